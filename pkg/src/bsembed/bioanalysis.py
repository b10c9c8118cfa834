"""Biological read-outs of a fitted embedding and fold-level statistics.

Covers the top-gene tables per selected dimension (with disease-association
counts and node degrees), the association/connectivity ratio, paired
comparisons of supervised vs rank selection across folds, and evaluation of
union dimension sets. Report writers emit CSV tables plus small
self-contained SVG figures; no plotting backend is involved.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from .svmrbf import METRIC_NAMES, fit_score_split, mean_and_std, stratified_kfold
from .util import derive_seed

P_DEGENERATE = float(np.finfo(np.float64).tiny)


@dataclass(frozen=True)
class TopGeneRow:
    dimension: int          # source embedding column
    rank: int               # 1-based within the dimension
    gene_id: int
    value: float
    disease_count: int | None = None
    degree: int | None = None


@dataclass(frozen=True)
class TopGeneTable:
    rows: tuple
    dims: tuple
    n_top: int
    ranking: str
    # per listed dimension: its rank among the embedding's columns when
    # ordered by decreasing backing value (0 = largest); selected dimensions
    # are reported both ways since either indexing is a fair reading
    dim_value_ranks: dict = None


@dataclass(frozen=True)
class ComparisonStats:
    """Per-metric paired comparison of two methods across matched folds."""

    metric_rows: dict  # name -> (mean_select, mean_rank, p_value, std_diff)
    degenerate: tuple  # metric names where the difference had zero variance


def top_genes(emb, dims, n_top, gene_ids, ranking="absolute"):
    """The n_top genes per dimension, ranked by embedding value.

    ranking "signed" takes the largest values, "absolute" the largest
    magnitudes. Ties fall to the lower gene ID.
    """
    if ranking not in ("signed", "absolute"):
        raise ValueError(f"unknown ranking {ranking!r}")
    if n_top > emb.coords.shape[0]:
        raise ValueError(f"requested top {n_top} of {emb.coords.shape[0]} genes")
    gene_ids = np.asarray(gene_ids)
    col_of = {int(c): i for i, c in enumerate(emb.source_columns)}
    by_value = np.argsort(-np.asarray(emb.values_used), kind="stable")
    value_rank = {int(emb.source_columns[pos]): r for r, pos in enumerate(by_value)}
    rows = []
    for dim in dims:
        if int(dim) not in col_of:
            raise ValueError(f"dimension {dim} is not a column of this embedding")
        col = emb.coords[:, col_of[int(dim)]]
        key = np.abs(col) if ranking == "absolute" else col
        # stable argsort on -key: equal keys keep ascending gene-ID order
        order = np.argsort(-key, kind="stable")[:n_top]
        for r, idx in enumerate(order, start=1):
            rows.append(
                TopGeneRow(
                    dimension=int(dim),
                    rank=r,
                    gene_id=int(gene_ids[idx]),
                    value=float(col[idx]),
                )
            )
    return TopGeneTable(rows=tuple(rows), dims=tuple(int(d) for d in dims),
                        n_top=int(n_top), ranking=ranking,
                        dim_value_ranks={int(d): value_rank[int(d)] for d in dims})


def annotate(table, dmap, degrees, index_map):
    """Attach disease-association counts and node degrees to a top-gene table."""
    degrees = np.asarray(degrees)
    out = []
    for row in table.rows:
        if row.gene_id not in index_map:
            raise ValueError(f"gene {row.gene_id} is not an LCC node")
        count = sum(1 for name in dmap.diseases if row.gene_id in dmap.gene_sets[name])
        out.append(
            replace(row, disease_count=count, degree=int(degrees[index_map[row.gene_id]]))
        )
    return TopGeneTable(rows=tuple(out), dims=table.dims, n_top=table.n_top,
                        ranking=table.ranking, dim_value_ranks=table.dim_value_ranks)


def ratio_R(table):
    """Sum of disease-association counts over sum of degrees, across all cells.

    A gene appearing in several dimensions contributes once per appearance.
    """
    if not table.rows:
        raise ValueError("empty top-gene table")
    if any(row.disease_count is None or row.degree is None for row in table.rows):
        raise ValueError("table must be annotated first")
    s = sum(row.disease_count for row in table.rows)
    d = sum(row.degree for row in table.rows)
    if d == 0:
        raise ValueError("degree sum is zero")
    return s / d


def most_frequent_dims(selections, m):
    """The m columns most frequently selected across folds.

    Ties break by earlier average selection position, then lower index.
    """
    counts = {}
    positions = {}
    for sel in selections:
        for pos, col in enumerate(sel.selected):
            counts[col] = counts.get(col, 0) + 1
            positions.setdefault(col, []).append(pos)
    ranked = sorted(
        counts,
        key=lambda c: (-counts[c], float(np.mean(positions[c])), c),
    )
    if len(ranked) < m:
        raise ValueError(f"only {len(ranked)} distinct columns were ever selected")
    return ranked[:m]


def compare_methods(per_fold_select, per_fold_rank):
    """Paired two-sided t-test per metric across matched folds.

    Returns the means of both methods, the p-value, and the sample standard
    deviation of the per-fold differences. Zero-variance differences are
    degenerate: p = 1 when the means agree too, else reported as the
    smallest positive float and flagged.
    """
    if len(per_fold_select) != len(per_fold_rank):
        raise ValueError("fold counts differ between methods")
    n = len(per_fold_select)
    if n < 2:
        raise ValueError("need at least two folds")
    rows = {}
    degenerate = []
    for name in METRIC_NAMES:
        a = np.array([getattr(m, name) for m in per_fold_select], dtype=np.float64)
        b = np.array([getattr(m, name) for m in per_fold_rank], dtype=np.float64)
        diff = a - b
        sd = float(diff.std(ddof=1))
        mean_diff = float(diff.mean())
        if sd == 0.0:
            if mean_diff == 0.0:
                p = 1.0
            else:
                p = P_DEGENERATE
                degenerate.append(name)
        else:
            t = mean_diff / (sd / math.sqrt(n))
            p = float(2.0 * stats.t.sf(abs(t), df=n - 1))
        rows[name] = (float(a.mean()), float(b.mean()), p, sd)
    return ComparisonStats(metric_rows=rows, degenerate=tuple(degenerate))


def union_dim_scores(ds, union_columns, folds=10, seed=0, C=3.5, gamma_rule="scale"):
    """Stratified k-fold evaluation with a fixed union column set.

    Returns (per_fold, mean, std) MetricSets.
    """
    columns = sorted(int(c) for c in union_columns)
    plan = stratified_kfold(ds.labels, folds, derive_seed(seed, "union-folds"))
    n = ds.n_samples
    per_fold = []
    for fold in plan.folds:
        mask = np.ones(n, dtype=bool)
        mask[fold] = False
        per_fold.append(
            fit_score_split(ds, columns, np.flatnonzero(mask), fold, C=C, gamma_rule=gamma_rule)
        )
    mean, std = mean_and_std(per_fold)
    return tuple(per_fold), mean, std


def select_report_dims(result, m=5):
    """The "first m dimensions" of a variant for the top-gene analyses.

    Supervised variants take the most frequently selected columns across
    folds; rank variants take the top-m columns by value.
    """
    if result.selections:
        return most_frequent_dims(result.selections, m)
    return [int(c) for c in result.columns_per_fold[0][:m]]


# ---------------------------------------------------------------------------
# report writers


def write_per_fold_csv(path, result, header_lines=()):
    """Per-fold metric rows: fold,precision,recall,f1,accuracy,roc_auc."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("fold," + ",".join(METRIC_NAMES) + "\n")
        for f, m in enumerate(result.per_fold):
            vals = ",".join(f"{getattr(m, name):.6f}" for name in METRIC_NAMES)
            fh.write(f"{f},{vals}\n")
        means = ",".join(f"{getattr(result.mean, name):.6f}" for name in METRIC_NAMES)
        stds = ",".join(f"{getattr(result.std, name):.6f}" for name in METRIC_NAMES)
        fh.write(f"mean,{means}\n")
        fh.write(f"std,{stds}\n")


def write_comparison_csv(path, family, comparisons, header_lines=()):
    """Family comparison table: metric, rank mean, select mean, p, std-of-diff."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("# p_val test = paired two-sided t-test across matched folds\n")
        if comparisons.degenerate:
            fh.write("# degenerate (zero-variance difference): "
                     + ",".join(comparisons.degenerate) + "\n")
        fh.write(f"metric,{family}_r,{family}_s,p_val,std\n")
        for name in METRIC_NAMES:
            mean_s, mean_r, p, sd = comparisons.metric_rows[name]
            fh.write(f"{name},{mean_r:.4f},{mean_s:.4f},{p:.3e},{sd:.4f}\n")


def write_union_csv(path, scores_by_family, header_lines=()):
    """Union-dimension mean scores, one column per family."""
    families = sorted(scores_by_family)
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("metric," + ",".join(f"{f}_u" for f in families) + "\n")
        for name in METRIC_NAMES:
            vals = ",".join(f"{getattr(scores_by_family[f], name):.4f}" for f in families)
            fh.write(f"{name},{vals}\n")


def write_top_genes_csv(path, table, header_lines=()):
    """Rows carry the raw column index and its value rank side by side."""
    ranks = table.dim_value_ranks or {}
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(f"# gene ranking rule = {table.ranking}\n")
        fh.write("dimension,dim_value_rank,rank,gene_id,value,disease_count,degree\n")
        for row in table.rows:
            dc = "" if row.disease_count is None else row.disease_count
            dg = "" if row.degree is None else row.degree
            vr = ranks.get(row.dimension, "")
            fh.write(
                f"{row.dimension},{vr},{row.rank},{row.gene_id},{row.value!r},{dc},{dg}\n"
            )


def write_ratio_csv(path, ratios, header_lines=()):
    """Ratio table rows: family,method,ratio."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("family,method,ratio\n")
        for (family, method), value in sorted(ratios.items()):
            fh.write(f"{family},{method},{value:.6f}\n")


# ---------------------------------------------------------------------------
# minimal deterministic SVG output


def _svg_header(width, height, title):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'<title>{title}</title>\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
    )


def svg_heatmap(path, matrix, row_labels, col_labels, title, cell=26, header_lines=()):
    """Color-graded heatmap with the value printed in each cell."""
    matrix = np.asarray(matrix, dtype=np.float64)
    n_rows, n_cols = matrix.shape
    left, top = 120, 60
    width = left + n_cols * cell + 20
    height = top + n_rows * cell + 20
    vmax = float(matrix.max()) if matrix.size and matrix.max() > 0 else 1.0
    parts = [_svg_header(width, height, title)]
    for line in header_lines:
        parts.append(f"<!-- {line} -->\n")
    parts.append(f'<text x="{left}" y="24" font-size="14" font-family="sans-serif">{title}</text>\n')
    for j, lab in enumerate(col_labels):
        parts.append(
            f'<text x="{left + j * cell + cell // 2}" y="{top - 8}" font-size="9" '
            f'text-anchor="middle" font-family="sans-serif">{lab}</text>\n'
        )
    for i, lab in enumerate(row_labels):
        parts.append(
            f'<text x="{left - 6}" y="{top + i * cell + cell // 2 + 3}" font-size="9" '
            f'text-anchor="end" font-family="sans-serif">{lab}</text>\n'
        )
        for j in range(n_cols):
            v = matrix[i, j]
            shade = 255 - int(round(200 * min(v / vmax, 1.0)))
            parts.append(
                f'<rect x="{left + j * cell}" y="{top + i * cell}" width="{cell}" '
                f'height="{cell}" fill="rgb({shade},{shade},255)" stroke="#ccc"/>\n'
            )
            parts.append(
                f'<text x="{left + j * cell + cell // 2}" y="{top + i * cell + cell // 2 + 3}" '
                f'font-size="8" text-anchor="middle" font-family="sans-serif">{v:g}</text>\n'
            )
    parts.append("</svg>\n")
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(parts)


def svg_line_chart(path, series, title, header_lines=()):
    """Polyline chart of named series over the 1-based step axis."""
    width, height = 560, 360
    left, right, top, bottom = 60, 20, 50, 40
    all_vals = [v for vals in series.values() for v in vals]
    if not all_vals:
        raise ValueError("no data to plot")
    lo, hi = min(all_vals), max(all_vals)
    if hi == lo:
        hi = lo + 1.0
    n_steps = max(len(v) for v in series.values())
    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")

    def sx(i):
        return left + (width - left - right) * (i / max(n_steps - 1, 1))

    def sy(v):
        return top + (height - top - bottom) * (1 - (v - lo) / (hi - lo))

    parts = [_svg_header(width, height, title)]
    for line in header_lines:
        parts.append(f"<!-- {line} -->\n")
    parts.append(f'<text x="{left}" y="24" font-size="14" font-family="sans-serif">{title}</text>\n')
    parts.append(
        f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" y2="{height - bottom}" '
        f'stroke="black"/>\n<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" '
        f'stroke="black"/>\n'
    )
    for tick in (lo, (lo + hi) / 2, hi):
        parts.append(
            f'<text x="{left - 6}" y="{sy(tick) + 3}" font-size="9" text-anchor="end" '
            f'font-family="sans-serif">{tick:.3f}</text>\n'
        )
    for c, (name, vals) in enumerate(sorted(series.items())):
        pts = " ".join(f"{sx(i):.1f},{sy(v):.1f}" for i, v in enumerate(vals))
        color = colors[c % len(colors)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>\n')
        parts.append(
            f'<text x="{width - right - 4}" y="{top + 14 * (c + 1)}" font-size="10" '
            f'text-anchor="end" fill="{color}" font-family="sans-serif">{name}</text>\n'
        )
    parts.append("</svg>\n")
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(parts)
