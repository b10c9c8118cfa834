"""Spectral embeddings of a shortest-path matrix.

Two routes produce raw node coordinates:

* centered (classical MDS): double-center the squared distances, take the
  top eigenpairs, scale eigenvectors by sqrt(eigenvalue);
* uncentered: decompose the distance matrix itself and keep either the
  scaled columns (vectors times singular values) or the bare vectors.

Every basis column is sign-normalized (entry of largest magnitude made
positive) so embeddings are bit-reproducible across runs.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

log = logging.getLogger(__name__)

RESIDUAL_RTOL = 1e-7
DENSE_CUTOFF = 1000
MAX_ITER = 10000


class ConvergenceError(RuntimeError):
    """Iterative eigensolver failed to converge for some pair."""


@dataclass(frozen=True)
class SpectralBasis:
    """Column-orthonormal vectors with their eigen/singular values.

    kind is "centered-eigen" (values sorted descending algebraically) or
    "raw-svd" (values are magnitudes of the distance-matrix eigenvalues,
    sorted descending).
    """

    vectors: np.ndarray
    values: np.ndarray
    kind: str


@dataclass(frozen=True)
class Embedding:
    """Node coordinates plus provenance.

    source_columns holds the original basis column index behind each
    coordinate column; values_used the eigen/singular value backing it.
    """

    coords: np.ndarray
    source_columns: np.ndarray
    variant_tag: str
    values_used: np.ndarray

    @property
    def n_dims(self):
        return self.coords.shape[1]


def gram_center(D):
    """Double-center the entry-wise squared distance matrix.

    Returns -1/2 * H * (D o D) * H with H = I - J/n, computed via row,
    column and grand means so the output is symmetric to exact equality.
    """
    D = np.asarray(D)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError("distance matrix must be square")
    if (np.diagonal(D) != 0).any():
        raise ValueError("distance matrix must have a zero diagonal")
    B = D.astype(np.float64) ** 2
    row = B.mean(axis=1)
    grand = row.mean()
    # row[i] + row[j] commutes exactly, keeping G symmetric to the last bit
    means = row[:, None] + row[None, :]
    G = -0.5 * ((B - means) + grand)
    return G


def _sign_fix(vectors):
    """Flip columns so each column's entry of largest magnitude is positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.where(vectors[idx, np.arange(vectors.shape[1])] < 0, -1.0, 1.0)
    return vectors * signs


def _check_residuals(M, vectors, values, norm_m):
    for j in range(vectors.shape[1]):
        res = np.linalg.norm(M @ vectors[:, j] - values[j] * vectors[:, j])
        if res > RESIDUAL_RTOL * max(norm_m, 1e-300):
            raise ConvergenceError(
                f"eigenpair {j} residual {res:.3e} exceeds {RESIDUAL_RTOL:.0e}*|M|_F"
            )


def _topk_sym(M, k, which, dense_cutoff, max_iter):
    """Top-k eigenpairs of a symmetric matrix, 'LA' (algebraic) or 'LM' (magnitude)."""
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    if M.ndim != 2 or M.shape[1] != n:
        raise ValueError("matrix must be square")
    if not np.array_equal(M, M.T):
        raise ValueError("matrix must be symmetric")
    if k > n:
        raise ValueError(f"k={k} exceeds matrix size {n}")
    if n <= dense_cutoff or k >= n - 1:
        vals, vecs = np.linalg.eigh(M)  # ascending
        if which == "LA":
            order = np.arange(n - 1, n - 1 - k, -1)
        else:
            order = np.argsort(-np.abs(vals), kind="stable")[:k]
        vals, vecs = vals[order], vecs[:, order]
    else:
        v0 = np.full(n, 1.0 / np.sqrt(n))  # fixed start vector: deterministic runs
        try:
            vals, vecs = spla.eigsh(M, k=k, which=which, v0=v0, maxiter=max_iter)
        except spla.ArpackNoConvergence as exc:
            n_ok = len(exc.eigenvalues)
            raise ConvergenceError(
                f"eigenpair {n_ok} failed to converge after {max_iter} iterations"
            ) from exc
        if which == "LA":
            order = np.argsort(-vals, kind="stable")
        else:
            order = np.argsort(-np.abs(vals), kind="stable")
        vals, vecs = vals[order], vecs[:, order]
    return vals, _sign_fix(vecs)


def eig_sym_topk(M, k, dense_cutoff=DENSE_CUTOFF, max_iter=MAX_ITER):
    """Top-k eigenpairs by algebraic value, descending.

    Residuals |M u - lambda u| are verified against 1e-7 * |M|_F per pair.
    """
    vals, vecs = _topk_sym(M, k, "LA", dense_cutoff, max_iter)
    _check_residuals(M, vecs, vals, np.linalg.norm(np.asarray(M, dtype=np.float64)))
    return SpectralBasis(vectors=vecs, values=vals, kind="centered-eigen")


def svd_sym_topk(D, k, dense_cutoff=DENSE_CUTOFF, max_iter=MAX_ITER):
    """Top-k singular pairs of a symmetric matrix via its eigendecomposition.

    For symmetric D the singular values are |lambda(D)| and the vectors are
    the matching eigenvectors, so D @ (D @ u) = sigma**2 * u holds.
    """
    Df = np.asarray(D, dtype=np.float64)
    vals, vecs = _topk_sym(Df, k, "LM", dense_cutoff, max_iter)
    _check_residuals(Df, vecs, vals, np.linalg.norm(Df))
    return SpectralBasis(vectors=vecs, values=np.abs(vals), kind="raw-svd")


def embed_centered(basis, d, exponent=0.5):
    """Embedding from a centered-eigen basis: column j = u_j * lambda_j**exponent.

    Only strictly positive eigenvalues admit a real scaling; requesting more
    dimensions than there are positive eigenvalues is an error. The default
    exponent +1/2 makes Z @ Z.T reproduce the centered Gram matrix; pass
    exponent=-0.5 for the inverse-scaled variant.
    """
    if basis.kind != "centered-eigen":
        raise ValueError(f"expected a centered-eigen basis, got {basis.kind!r}")
    n_pos = int(np.sum(basis.values > 0))
    if d > n_pos:
        raise ValueError(
            f"requested {d} dimensions but only {n_pos} positive eigenvalues exist"
        )
    scale = basis.values[:d] ** exponent
    coords = basis.vectors[:, :d] * scale
    return Embedding(
        coords=coords,
        source_columns=np.arange(d),
        variant_tag="centered",
        values_used=basis.values[:d].copy(),
    )


def embed_scaled(basis, d):
    """Embedding from a raw-svd basis: column j = u_j * sigma_j."""
    if basis.kind != "raw-svd":
        raise ValueError(f"expected a raw-svd basis, got {basis.kind!r}")
    if d > len(basis.values):
        raise ValueError(f"d={d} exceeds basis size {len(basis.values)}")
    coords = basis.vectors[:, :d] * basis.values[:d]
    return Embedding(
        coords=coords,
        source_columns=np.arange(d),
        variant_tag="scaled",
        values_used=basis.values[:d].copy(),
    )


def embed_vectors(basis, d):
    """Embedding from a raw-svd basis: the top-d vectors, unscaled."""
    if basis.kind != "raw-svd":
        raise ValueError(f"expected a raw-svd basis, got {basis.kind!r}")
    if d > len(basis.values):
        raise ValueError(f"d={d} exceeds basis size {len(basis.values)}")
    return Embedding(
        coords=basis.vectors[:, :d].copy(),
        source_columns=np.arange(d),
        variant_tag="vectors",
        values_used=basis.values[:d].copy(),
    )


RAW_VARIANTS = ("E1", "E3", "E5")
RANK_VARIANTS = ("E2", "E4", "E6")
VARIANT_FAMILY = {"E1": "emb", "E2": "emb", "E3": "vect", "E4": "vect", "E5": "iso", "E6": "iso"}


def build_raw_embedding(variant, D, k=100, mds_exponent=0.5, dense_cutoff=DENSE_CUTOFF):
    """Raw k-column embedding for a supervised-selection variant.

    E1: scaled singular columns of D; E3: bare singular vectors of D;
    E5: centered route on the double-centered Gram matrix, truncated (with
    a log line) when fewer than k positive eigenvalues exist. k is clamped
    to the node count.
    """
    if variant not in RAW_VARIANTS:
        raise ValueError(f"raw embeddings exist for variants {RAW_VARIANTS}, got {variant!r}")
    n = np.asarray(D).shape[0]
    kc = min(k, n)
    if variant == "E1":
        emb = embed_scaled(svd_sym_topk(D, kc, dense_cutoff=dense_cutoff), kc)
    elif variant == "E3":
        emb = embed_vectors(svd_sym_topk(D, kc, dense_cutoff=dense_cutoff), kc)
    else:
        basis = eig_sym_topk(gram_center(D), kc, dense_cutoff=dense_cutoff)
        n_pos = int(np.sum(basis.values > 0))
        if n_pos < kc:
            log.warning(
                "centered embedding truncated to %d of %d requested dimensions "
                "(non-positive eigenvalues excluded)", n_pos, kc,
            )
        emb = embed_centered(basis, min(kc, n_pos), exponent=mds_exponent)
    return Embedding(
        coords=emb.coords,
        source_columns=emb.source_columns,
        variant_tag=variant,
        values_used=emb.values_used,
    )


def write_embedding(emb, gene_ids, path, seed=None):
    """Write coordinates as CSV plus a key-value sidecar with provenance.

    Header row names each column dim_<c> by its source column; the sidecar
    (<path>.meta) records variant_tag, values_used and the seed.
    """
    cols = ",".join(f"dim_{int(c)}" for c in emb.source_columns)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"node_gene_id,{cols}\n" if emb.n_dims else "node_gene_id\n")
        for gid, row in zip(gene_ids, emb.coords):
            vals = ",".join(repr(float(v)) for v in row)
            fh.write(f"{int(gid)},{vals}\n" if emb.n_dims else f"{int(gid)}\n")
    with open(f"{path}.meta", "w", encoding="utf-8") as fh:
        fh.write(f"variant_tag = {emb.variant_tag}\n")
        fh.write("values_used = " + ",".join(repr(float(v)) for v in emb.values_used) + "\n")
        if seed is not None:
            fh.write(f"seed = {int(seed)}\n")


def read_embedding(path):
    """Read an embedding CSV written by write_embedding; returns (Embedding, gene_ids)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        source_columns = np.array([int(h.removeprefix("dim_")) for h in header[1:]], dtype=np.int64)
        gene_ids = []
        rows = []
        for line in fh:
            parts = line.strip().split(",")
            gene_ids.append(int(parts[0]))
            rows.append([float(v) for v in parts[1:]])
    meta = {}
    with open(f"{path}.meta", "r", encoding="utf-8") as fh:
        for line in fh:
            key, _, value = line.partition("=")
            meta[key.strip()] = value.strip()
    values_used = np.array(
        [float(v) for v in meta.get("values_used", "").split(",") if v], dtype=np.float64
    )
    emb = Embedding(
        coords=np.array(rows, dtype=np.float64).reshape(len(gene_ids), len(source_columns)),
        source_columns=source_columns,
        variant_tag=meta.get("variant_tag", ""),
        values_used=values_used,
    )
    return emb, np.array(gene_ids, dtype=np.int64)
