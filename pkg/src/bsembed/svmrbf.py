"""Soft-margin RBF-kernel SVM, stratified k-fold splitting, and metrics.

The classifier is trained from scratch (see _smo for the dual solver);
no external SVM implementation is involved. The area under the ROC curve
is computed by positive/negative pair counting with ties worth one half;
an independent trapezoidal-integral implementation is kept alongside as a
cross-check.
"""

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _smo
from .pairfeat import select_coordinates
from .util import derive_seed

log = logging.getLogger(__name__)

DEFAULT_C = 3.5
DEFAULT_TOL = 1e-3
DEFAULT_MAX_PASSES = 200_000
KERNEL_CACHE_LIMIT = 20_000  # above this, kernel rows are recomputed per step


@dataclass(frozen=True)
class SvmModel:
    """Fitted kernel classifier: f(x) = sum_i dual_coef_i * k(sv_i, x) + bias."""

    support_vectors: np.ndarray
    dual_coef: np.ndarray  # alpha_i * y_i over the support set
    bias: float
    gamma: float
    C: float
    converged: bool
    n_iter: int


@dataclass(frozen=True)
class FoldPlan:
    """Disjoint index folds covering all samples, stratified by class."""

    folds: tuple
    seed: int


@dataclass(frozen=True)
class MetricSet:
    precision: float
    recall: float
    f1: float
    accuracy: float
    roc_auc: float

    def as_dict(self):
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
            "roc_auc": self.roc_auc,
        }


METRIC_NAMES = ("precision", "recall", "f1", "accuracy", "roc_auc")


def rbf_kernel(x, y, gamma):
    """exp(-gamma * ||x - y||^2) for two equal-length vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    d = x - y
    return float(np.exp(-gamma * np.dot(d, d)))


def rbf_kernel_matrix(X, Y, gamma):
    """Kernel matrix between sample rows of X and Y."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    sq_x = np.sum(X * X, axis=1)
    sq_y = np.sum(Y * Y, axis=1)
    d2 = sq_x[:, None] + sq_y[None, :] - 2.0 * (X @ Y.T)
    np.maximum(d2, 0.0, out=d2)
    return np.exp(-gamma * d2)


def resolve_gamma(gamma_rule, X):
    """Resolve a gamma setting: a positive number, or "scale" for 1/(p*var).

    var is the total variance of the training feature entries; a zero
    variance falls back to gamma = 1 / p.
    """
    if isinstance(gamma_rule, str):
        if gamma_rule != "scale":
            raise ValueError(f"unknown gamma rule {gamma_rule!r}")
        X = np.asarray(X, dtype=np.float64)
        var = float(X.var())
        p = X.shape[1]
        return 1.0 / (p * var) if var > 0 else 1.0 / p
    gamma = float(gamma_rule)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return gamma


def dual_solution(
    X, y, C=DEFAULT_C, gamma=1.0, tol=DEFAULT_TOL, max_passes=DEFAULT_MAX_PASSES, debug=False
):
    """Solve the SVM dual; returns (alpha, bias, converged, n_iter).

    alpha covers every training sample (zeros included), which makes the
    optimality conditions directly checkable. The kernel matrix is cached
    densely up to KERNEL_CACHE_LIMIT samples and recomputed row-wise above
    it. With debug=True the solver re-checks dual feasibility (box bounds,
    equality constraint) after every step and raises on a breach.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or len(y) != X.shape[0]:
        raise ValueError("X must be 2-D with one label per row")
    classes = np.unique(y)
    if not np.all(np.isin(classes, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if len(classes) < 2:
        raise ValueError("training data contains a single class")
    if C <= 0:
        raise ValueError("C must be positive")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if len(y) <= KERNEL_CACHE_LIMIT:
        K = rbf_kernel_matrix(X, X, gamma)
        alpha, grad, gap_lo, gap_hi, n_iter, converged, status = _smo.solve(
            K, y, float(C), float(tol), int(max_passes), debug
        )
    else:
        alpha, grad, gap_lo, gap_hi, n_iter, converged, status = _smo.solve_rows(
            X, y, float(gamma), float(C), float(tol), int(max_passes), debug
        )
    if status == _smo.BOX_VIOLATED:
        raise AssertionError(f"dual box constraint violated at step {n_iter}")
    if status == _smo.EQUALITY_DRIFTED:
        raise AssertionError(f"dual equality constraint drifted at step {n_iter}")
    if not converged:
        log.warning("SMO hit the iteration cap (%d); returning best-effort model", max_passes)
    # bias from the free support vectors; midpoint of the violating gap otherwise
    yg = -y * grad
    free = (alpha > 0) & (alpha < C)
    bias = float(yg[free].mean()) if free.any() else float((gap_lo + gap_hi) / 2.0)
    return alpha, bias, bool(converged), int(n_iter)


def svm_fit(X, y, C=DEFAULT_C, gamma=1.0, tol=DEFAULT_TOL, max_passes=DEFAULT_MAX_PASSES,
            debug=False):
    """Train the soft-margin RBF SVM on labels in {-1, +1}.

    Solves the dual by sequential minimal optimization with second-order
    working-set selection. On hitting the iteration cap the best-effort
    model is returned with converged=False (and a log warning).
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    alpha, bias, converged, n_iter = dual_solution(
        X, y, C=C, gamma=gamma, tol=tol, max_passes=max_passes, debug=debug
    )
    sv = alpha > 0
    return SvmModel(
        support_vectors=X[sv].copy(),
        dual_coef=(alpha * y)[sv],
        bias=bias,
        gamma=float(gamma),
        C=float(C),
        converged=converged,
        n_iter=n_iter,
    )


def dual_objective(K, y, alpha):
    """Dual objective sum(alpha) - 1/2 alpha' (yy' * K) alpha."""
    v = alpha * np.asarray(y, dtype=np.float64)
    return float(np.sum(alpha) - 0.5 * v @ K @ v)


def svm_decision(model, X):
    """Decision scores f(x) for sample rows of X."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.support_vectors.shape[1]:
        raise ValueError(
            f"feature length {X.shape[1]} does not match training "
            f"length {model.support_vectors.shape[1]}"
        )
    K = rbf_kernel_matrix(X, model.support_vectors, model.gamma)
    return K @ model.dual_coef + model.bias


def svm_predict(model, X):
    """Predicted labels in {-1, +1}; a score of exactly zero predicts +1."""
    scores = svm_decision(model, X)
    return np.where(scores >= 0.0, 1, -1)


def kkt_violation(X, y, alpha, bias, gamma, C):
    """Largest violation of the optimality conditions over training samples.

    alpha = 0 samples should satisfy y*f >= 1, alpha = C samples y*f <= 1,
    and free support vectors sit on the margin; returns the max one-sided
    excess (0 means the conditions hold exactly).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    K = rbf_kernel_matrix(X, X, gamma)
    yf = y * (K @ (alpha * y) + bias)
    viol = 0.0
    for t in range(len(y)):
        if alpha[t] <= 0:
            viol = max(viol, 1.0 - yf[t])
        elif alpha[t] >= C:
            viol = max(viol, yf[t] - 1.0)
        else:
            viol = max(viol, abs(yf[t] - 1.0))
    return float(viol)


def stratified_kfold(labels, k, seed):
    """Split indices into k folds with per-class counts differing by <= 1.

    Proportions come from chunking a seeded shuffle of each class; an
    error is raised if any class has fewer than k members.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = np.random.default_rng(seed)
    folds = [[] for _ in range(k)]
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        if len(idx) < k:
            raise ValueError(f"class {cls} has {len(idx)} members, fewer than k={k}")
        rng.shuffle(idx)
        for f, chunk in enumerate(np.array_split(idx, k)):
            folds[f].extend(int(i) for i in chunk)
    return FoldPlan(folds=tuple(np.array(sorted(f), dtype=np.int64) for f in folds), seed=int(seed))


def auc_pair_count(labels, scores):
    """ROC AUC by pair counting: ties between a positive and a negative count 1/2.

    Implemented through midranks, which is the same count expressed in
    closed form.
    """
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=np.float64)
    n_pos = int(np.sum(labels == 1))
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes present")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # average rank, 1-based
        i = j + 1
    rank_sum = float(np.sum(ranks[labels == 1]))
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def auc_trapezoid(labels, scores):
    """ROC AUC by trapezoidal integration of the tie-grouped ROC curve."""
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=np.float64)
    n_pos = int(np.sum(labels == 1))
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes present")
    order = np.argsort(-scores, kind="stable")
    sorted_labels = labels[order]
    sorted_scores = scores[order]
    tps = [0.0]
    fps = [0.0]
    tp = fp = 0
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        block = sorted_labels[i : j + 1]
        tp += int(np.sum(block == 1))
        fp += len(block) - int(np.sum(block == 1))
        tps.append(tp)
        fps.append(fp)
        i = j + 1
    tpr = np.array(tps) / n_pos
    fpr = np.array(fps) / n_neg
    return float(np.sum(0.5 * (tpr[1:] + tpr[:-1]) * np.diff(fpr)))


def compute_metrics(labels, predictions, scores):
    """Precision, recall, f1, accuracy, and pair-counting ROC AUC.

    labels and predictions are in {0, 1}. With single-class labels the
    AUC is undefined and reported as NaN with a warning; the remaining
    metrics are still returned.
    """
    labels = np.asarray(labels)
    predictions = np.asarray(predictions)
    scores = np.asarray(scores, dtype=np.float64)
    if not (len(labels) == len(predictions) == len(scores)):
        raise ValueError("labels, predictions and scores must have equal length")
    tp = int(np.sum((labels == 1) & (predictions == 1)))
    fp = int(np.sum((labels == 0) & (predictions == 1)))
    fn = int(np.sum((labels == 1) & (predictions == 0)))
    tn = int(np.sum((labels == 0) & (predictions == 0)))
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    accuracy = (tp + tn) / len(labels)
    if len(np.unique(labels)) < 2:
        warnings.warn("single-class labels: ROC AUC is undefined", stacklevel=2)
        roc_auc = math.nan
    else:
        roc_auc = auc_pair_count(labels, scores)
    return MetricSet(
        precision=precision, recall=recall, f1=f1, accuracy=accuracy, roc_auc=roc_auc
    )


def standardize_train_test(X_train, X_test):
    """Z-score both splits with the training split's statistics."""
    mean = X_train.mean(axis=0)
    std = X_train.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return (X_train - mean) / std, (X_test - mean) / std


def _fold_fit_score(X, y01, train_idx, test_idx, C, gamma_rule, tol, max_passes, standardize):
    X_train, X_test = X[train_idx], X[test_idx]
    if standardize:
        X_train, X_test = standardize_train_test(X_train, X_test)
    gamma = resolve_gamma(gamma_rule, X_train)
    y_train = np.where(y01[train_idx] == 1, 1.0, -1.0)
    model = svm_fit(X_train, y_train, C=C, gamma=gamma, tol=tol, max_passes=max_passes)
    scores = svm_decision(model, X_test)
    predictions = (scores >= 0.0).astype(np.int8)
    return compute_metrics(y01[test_idx], predictions, scores)


def fit_score_split(
    ds,
    columns,
    train_idx,
    test_idx,
    C=DEFAULT_C,
    gamma_rule="scale",
    tol=DEFAULT_TOL,
    max_passes=DEFAULT_MAX_PASSES,
    standardize=False,
):
    """Train on the train rows of the column-restricted dataset, score the test rows."""
    if columns is not None:
        ds = select_coordinates(ds, columns)
    return _fold_fit_score(
        ds.features, ds.labels,
        np.asarray(train_idx), np.asarray(test_idx),
        C, gamma_rule, tol, max_passes, standardize,
    )


def cross_val_metrics(
    ds,
    columns=None,
    k=5,
    seed=0,
    C=DEFAULT_C,
    gamma_rule="scale",
    tol=DEFAULT_TOL,
    max_passes=DEFAULT_MAX_PASSES,
    standardize=False,
    plan=None,
):
    """Per-fold test metrics over a stratified k-fold plan.

    Each fold is scored by a model trained on the remaining folds; the
    fold plan is derived from the seed unless one is passed explicitly.
    """
    if columns is not None:
        ds = select_coordinates(ds, columns)
    if plan is None:
        plan = stratified_kfold(ds.labels, k, derive_seed(seed, "cv-folds"))
    out = []
    all_idx = np.arange(ds.n_samples)
    for fold in plan.folds:
        mask = np.ones(ds.n_samples, dtype=bool)
        mask[fold] = False
        out.append(
            _fold_fit_score(
                ds.features, ds.labels, all_idx[mask], fold,
                C, gamma_rule, tol, max_passes, standardize,
            )
        )
    return out


def cross_val_mean_auc(ds, columns, k, seed, C=DEFAULT_C, gamma_rule="scale", **kw):
    """Mean test-fold ROC AUC of the column-restricted dataset."""
    metrics = cross_val_metrics(ds, columns=columns, k=k, seed=seed, C=C,
                                gamma_rule=gamma_rule, **kw)
    return float(np.mean([m.roc_auc for m in metrics]))


def mean_and_std(metric_sets):
    """Element-wise mean and sample standard deviation over MetricSets."""
    arr = np.array([[getattr(m, name) for name in METRIC_NAMES] for m in metric_sets])
    mean = arr.mean(axis=0)
    std = arr.std(axis=0, ddof=1) if len(metric_sets) > 1 else np.zeros(arr.shape[1])
    return (
        MetricSet(*(float(v) for v in mean)),
        MetricSet(*(float(v) for v in std)),
    )
