"""Per-disease feature vectors and concatenated disease-pair samples.

A disease's feature vector is the column-wise sum of its genes' embedding
rows, accumulated in ascending node-index order so results are exactly
reproducible. A pair sample concatenates the two disease vectors in
relative-risk file order. Because the features are plain column sums,
restricting the embedding to a column subset and summing gives exactly the
same numbers as summing first and selecting coordinates afterwards; the
greedy dimension search leans on that identity to assemble features once.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DiseaseFeature:
    disease: str
    values: np.ndarray


@dataclass(frozen=True)
class PairDataset:
    """Samples of concatenated disease-pair features.

    features:      (n_samples, 2m) float64
    labels:        (n_samples,) int8 in {0, 1}
    pairs:         disease name pairs, in relative-risk file order
    column_origin: per coordinate, (disease slot "a"|"b", source embedding column)
    """

    features: np.ndarray
    labels: np.ndarray
    pairs: tuple
    column_origin: tuple

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def source_columns(self):
        """Distinct source embedding columns, in coordinate order of slot a."""
        return tuple(col for slot, col in self.column_origin if slot == "a")


def disease_feature(emb, genes, index_map, disease=""):
    """Sum the embedding rows of a disease's genes, ascending node index.

    genes must already be restricted to LCC membership; an empty set is an
    error (callers drop such pairs upstream).
    """
    if not genes:
        raise ValueError(f"disease {disease!r} has an empty gene set")
    rows = sorted(index_map[g] for g in genes)
    acc = np.zeros(emb.coords.shape[1], dtype=np.float64)
    for r in rows:
        acc += emb.coords[r]
    return DiseaseFeature(disease=disease, values=acc)


def assemble_dataset(emb, dmap, labels, index_map, canonical_order=False):
    """One sample per labeled pair: features [F_a || F_b], in pair order.

    Concatenation is not swap-invariant, so slot assignment matters; the
    default keeps each pair's file orientation. canonical_order instead
    puts the lexicographically smaller disease name in slot a (a mode for
    sensitivity studies).
    """
    features_by_disease = {}

    def feat(name):
        if name not in features_by_disease:
            features_by_disease[name] = disease_feature(
                emb, dmap.gene_sets[name], index_map, disease=name
            ).values
        return features_by_disease[name]

    n = len(labels.pairs)
    m = emb.coords.shape[1]
    X = np.empty((n, 2 * m), dtype=np.float64)
    y = np.empty(n, dtype=np.int8)
    pairs = []
    for i, (a, b, lab) in enumerate(labels.pairs):
        if canonical_order and b < a:
            a, b = b, a
        X[i, :m] = feat(a)
        X[i, m:] = feat(b)
        y[i] = lab
        pairs.append((a, b))
    origin = tuple(("a", int(c)) for c in emb.source_columns) + tuple(
        ("b", int(c)) for c in emb.source_columns
    )
    return PairDataset(features=X, labels=y, pairs=tuple(pairs), column_origin=origin)


def select_coordinates(ds, columns):
    """Keep the coordinates whose source embedding column is in ``columns``.

    Both disease slots are kept, in their original relative order. Unknown
    columns are an error.
    """
    wanted = set(int(c) for c in columns)
    known = set(col for _, col in ds.column_origin)
    unknown = wanted - known
    if unknown:
        raise ValueError(f"unknown embedding column(s): {sorted(unknown)}")
    mask = np.array([col in wanted for _, col in ds.column_origin], dtype=bool)
    return PairDataset(
        features=ds.features[:, mask],
        labels=ds.labels,
        pairs=ds.pairs,
        column_origin=tuple(o for o, keep in zip(ds.column_origin, mask) if keep),
    )


def subset_samples(ds, indices):
    """Row subset of a dataset (for fold-restricted work); order follows indices."""
    idx = np.asarray(indices)
    return PairDataset(
        features=ds.features[idx],
        labels=ds.labels[idx],
        pairs=tuple(ds.pairs[int(i)] for i in idx),
        column_origin=ds.column_origin,
    )


def write_dataset(ds, path):
    """CSV export: header disease_a,disease_b,label,f_0..f_{2m-1}."""
    width = ds.features.shape[1]
    header = "disease_a,disease_b,label," + ",".join(f"f_{i}" for i in range(width))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for (a, b), lab, row in zip(ds.pairs, ds.labels, ds.features):
            vals = ",".join(repr(float(v)) for v in row)
            fh.write(f"{a},{b},{int(lab)},{vals}\n")
