"""Greedy supervised selection of embedding dimensions, and the experiment grid.

The selector grows a column set one dimension at a time: every remaining
column is scored by the cross-validated AUC of the classifier on the
current set plus that column, and the best scorer is appended (exact ties
resolved uniformly at random from the run seed). The unsupervised baseline
keeps the top-d columns by eigen/singular value instead.

Variants: E1/E3/E5 run the supervised selector on the scaled-singular,
bare-vector, and centered embeddings respectively; E2/E4/E6 are their
rank-selected counterparts.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np

from . import graphdist, netio, spectral
from .pairfeat import assemble_dataset, subset_samples
from .svmrbf import (
    DEFAULT_C,
    cross_val_mean_auc,
    fit_score_split,
    mean_and_std,
    stratified_kfold,
)
from .util import derive_seed, pmap

log = logging.getLogger(__name__)

SELECT_VARIANTS = ("E1", "E3", "E5")
RANK_VARIANTS = ("E2", "E4", "E6")
ALL_VARIANTS = ("E1", "E2", "E3", "E4", "E5", "E6")
# raw embedding each variant draws its columns from
RAW_SOURCE = {"E1": "E1", "E2": "E1", "E3": "E3", "E4": "E3", "E5": "E5", "E6": "E5"}


@dataclass(frozen=True)
class VariantConfig:
    variant: str
    d: int = 20
    k: int = 100
    internal_folds: int = 5
    outer_folds: int = 10
    C: float = DEFAULT_C
    gamma_rule: object = "scale"
    seed: int = 0
    mds_exponent: float = 0.5  # -0.5 restores the inverse-scaled centered variant

    def validate(self):
        if self.variant not in ALL_VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.d > self.k:
            raise ValueError(f"d={self.d} exceeds raw dimension k={self.k}")
        if self.d < 0:
            raise ValueError("d must be non-negative")


@dataclass(frozen=True)
class SelectionResult:
    """Ordered column choices with the winning mean AUC at each step."""

    variant: str
    seed: int
    selected: tuple
    trace: tuple
    internal_folds: int
    mode: str
    candidate_scores: tuple = ()  # per-iteration (column, score) pairs when recorded


@dataclass(frozen=True)
class DataBundle:
    """Everything the evaluation loop needs, restricted to the LCC."""

    graph: object        # LCC InteractomeGraph
    D: np.ndarray        # hop-count matrix over the LCC
    dmap: object         # LCC-restricted DiseaseGeneMap
    labels: object       # retained LabeledPairs
    index_map: dict      # gene ID -> LCC row


@dataclass(frozen=True)
class VariantResult:
    """Per-outer-fold metrics and provenance for one variant run."""

    config: VariantConfig
    threshold: float
    mode: str
    per_fold: tuple
    mean: object
    std: object
    selections: tuple | None
    columns_per_fold: tuple
    embedding: object
    dataset: object


def build_bundle(graph, dmap, rr, threshold, D=None):
    """Restrict everything to the LCC and label the pairs.

    D may be passed in from a cache; otherwise it is computed here.
    """
    lcc, _ = netio.largest_connected_component(graph)
    if D is None:
        D = graphdist.all_pairs_shortest_paths(lcc)
    elif D.shape[0] != lcc.n_nodes:
        raise ValueError(f"cached distance matrix is {D.shape[0]}x, LCC has {lcc.n_nodes} nodes")
    dmap_lcc = netio.restrict_to_lcc(dmap, lcc)
    labels = netio.drop_unusable_pairs(netio.label_pairs(rr, threshold), dmap_lcc)
    return DataBundle(graph=lcc, D=D, dmap=dmap_lcc, labels=labels, index_map=lcc.index_map())


def _candidate_score(args):
    ds, columns, folds, seed, C, gamma_rule = args
    try:
        return cross_val_mean_auc(ds, columns, folds, seed, C=C, gamma_rule=gamma_rule)
    except Exception as exc:
        raise RuntimeError(f"candidate column {columns[-1]} failed: {exc}") from exc


def bse_select(ds, cfg, workers=1, record_scores=False, mode="paper-faithful"):
    """Greedy forward selection of embedding columns by mean CV AUC.

    Iteration i scores every not-yet-selected column joined to the current
    set with internal cross-validation and appends the argmax; exact score
    ties are broken uniformly at random from the seeded generator. The
    trace records the winning mean AUC of each iteration. Candidate scans
    may run in parallel; scores are collected and reduced in a fixed order,
    so results do not depend on the worker count.
    """
    cfg.validate()
    all_columns = list(ds.source_columns)
    if cfg.d > len(all_columns):
        raise ValueError(f"d={cfg.d} exceeds the {len(all_columns)} available columns")
    tie_rng = np.random.default_rng(derive_seed(cfg.seed, "tie-break"))
    selected = []
    trace = []
    recorded = []
    for it in range(cfg.d):
        cv_seed = derive_seed(cfg.seed, "select-cv", it)
        candidates = [c for c in all_columns if c not in selected]
        tasks = [
            (ds, selected + [c], cfg.internal_folds, cv_seed, cfg.C, cfg.gamma_rule)
            for c in candidates
        ]
        scores = pmap(_candidate_score, tasks, workers)
        best = max(scores)
        tied = [c for c, s in zip(candidates, scores) if s == best]
        pick = int(tie_rng.choice(tied))
        selected.append(pick)
        trace.append(float(best))
        if record_scores:
            recorded.append(tuple(zip(candidates, scores)))
    return SelectionResult(
        variant=cfg.variant,
        seed=cfg.seed,
        selected=tuple(selected),
        trace=tuple(trace),
        internal_folds=cfg.internal_folds,
        mode=mode,
        candidate_scores=tuple(recorded),
    )


def rank_select(values, d):
    """Indices of the d largest values, descending; ties keep the lower index."""
    values = np.asarray(values)
    if d > len(values):
        raise ValueError(f"d={d} exceeds {len(values)} values")
    return np.argsort(-values, kind="stable")[:d]


def union_first_m(results, m):
    """Set union of the first m selected columns across fold results."""
    out = set()
    for r in results:
        if len(r.selected) < m:
            raise ValueError(f"selection of length {len(r.selected)} is shorter than m={m}")
        out.update(r.selected[:m])
    return out


def _fold_eval(args):
    (ds, cfg, mode, fold_idx, train_idx, test_idx) = args
    if cfg.variant in SELECT_VARIANTS:
        visible = ds if mode == "paper-faithful" else subset_samples(ds, train_idx)
        fold_cfg = replace(cfg, seed=derive_seed(cfg.seed, "fold", fold_idx))
        sel = bse_select(visible, fold_cfg, mode=mode)
        columns = list(sel.selected)
    else:
        sel = None
        columns = [int(c) for c in rank_select_columns(ds, cfg.d)]
    metrics = fit_score_split(
        ds, columns, train_idx, test_idx, C=cfg.C, gamma_rule=cfg.gamma_rule
    )
    return metrics, sel, tuple(columns)


def rank_select_columns(ds, d):
    """Rank-selected source columns of a dataset built from a raw embedding.

    Raw embeddings order columns by decreasing value, so this is the first
    d source columns; kept as a function so the contract stays explicit.
    """
    return list(ds.source_columns)[:d]


def evaluate_variant(cfg, bundle, selection_mode="paper-faithful", workers=1):
    """Outer stratified 10-fold evaluation of one variant.

    Supervised variants re-run the greedy selector within each outer fold
    (seeing the whole dataset in paper-faithful mode, only the outer
    training fold in nested mode); rank variants use the fixed top-d
    columns. Each fold's model trains on the outer-training samples and
    is scored on the outer-test fold.
    """
    cfg.validate()
    if selection_mode not in ("paper-faithful", "nested"):
        raise ValueError(f"unknown selection mode {selection_mode!r}")
    emb = spectral.build_raw_embedding(
        RAW_SOURCE[cfg.variant], bundle.D, k=cfg.k, mds_exponent=cfg.mds_exponent
    )
    ds = assemble_dataset(emb, bundle.dmap, bundle.labels, bundle.index_map)
    plan = stratified_kfold(
        ds.labels, cfg.outer_folds, derive_seed(cfg.seed, "outer-folds")
    )
    n = ds.n_samples
    tasks = []
    for f, fold in enumerate(plan.folds):
        mask = np.ones(n, dtype=bool)
        mask[fold] = False
        tasks.append((ds, cfg, selection_mode, f, np.flatnonzero(mask), fold))
    results = pmap(_fold_eval, tasks, workers)
    per_fold = tuple(m for m, _, _ in results)
    selections = tuple(s for _, s, _ in results if s is not None) or None
    columns_per_fold = tuple(c for _, _, c in results)
    mean, std = mean_and_std(per_fold)
    return VariantResult(
        config=cfg,
        threshold=float(bundle.labels.threshold),
        mode=selection_mode,
        per_fold=per_fold,
        mean=mean,
        std=std,
        selections=selections,
        columns_per_fold=columns_per_fold,
        embedding=emb,
        dataset=ds,
    )


def selection_to_text(sel):
    """Serialize a SelectionResult to the text record consumed downstream."""
    lines = [
        f"variant = {sel.variant}",
        f"seed = {sel.seed}",
        f"mode = {sel.mode}",
        f"internal_folds = {sel.internal_folds}",
        "selected = " + ",".join(str(c) for c in sel.selected),
        "trace = " + ",".join(repr(t) for t in sel.trace),
    ]
    return "\n".join(lines) + "\n"


def selection_from_text(text):
    fields = {}
    for line in text.strip().splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    return SelectionResult(
        variant=fields["variant"],
        seed=int(fields["seed"]),
        selected=tuple(int(c) for c in fields["selected"].split(",") if c),
        trace=tuple(float(t) for t in fields["trace"].split(",") if t),
        internal_folds=int(fields.get("internal_folds", 5)),
        mode=fields.get("mode", "paper-faithful"),
    )
