"""Loaders for interactome, disease-gene, and relative-risk files.

All inputs are tab-separated text with one record per row; ``#``-prefixed
lines are treated as comments. Loaded objects are immutable by convention
and use a canonical node indexing: node index order follows strictly
increasing gene ID.
"""

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


class ParseError(ValueError):
    """Malformed input row; message carries file path and line number."""


@dataclass(frozen=True)
class InteractomeGraph:
    """Undirected, unweighted gene-interaction graph.

    node_ids:   strictly increasing gene IDs; position defines node index
    adjacency:  per-node sorted arrays of neighbor *indices*
    edge_count: number of undirected edges
    """

    node_ids: np.ndarray
    adjacency: tuple
    edge_count: int

    @property
    def n_nodes(self):
        return len(self.node_ids)

    def index_map(self):
        """dict gene ID -> node index."""
        return {int(g): i for i, g in enumerate(self.node_ids)}

    def degrees(self):
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)


@dataclass(frozen=True)
class DiseaseGeneMap:
    """Disease names (file order of first appearance) and their gene sets."""

    diseases: tuple
    gene_sets: dict

    def genes(self, disease):
        return self.gene_sets[disease]


@dataclass(frozen=True)
class RRTable:
    """Rows of (disease_a, disease_b, relative risk >= 0)."""

    rows: tuple


@dataclass(frozen=True)
class LabeledPairs:
    """Disease pairs labeled by the strict rule label = 1 iff rr > threshold."""

    threshold: float
    pairs: tuple  # (disease_a, disease_b, label)
    positive_fraction: float


def _data_rows(path):
    """Yield (line_number, stripped_line) for non-comment, non-blank rows."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line


def _build_graph(node_ids, edges):
    """Assemble an InteractomeGraph from gene IDs and deduplicated index edges."""
    node_ids = np.asarray(sorted(node_ids), dtype=np.int64)
    index = {int(g): i for i, g in enumerate(node_ids)}
    neighbors = [[] for _ in range(len(node_ids))]
    for a, b in edges:
        ia, ib = index[a], index[b]
        neighbors[ia].append(ib)
        neighbors[ib].append(ia)
    adjacency = tuple(np.array(sorted(ns), dtype=np.int32) for ns in neighbors)
    return InteractomeGraph(node_ids=node_ids, adjacency=adjacency, edge_count=len(edges))


def load_edge_list(path):
    """Load an interactome edge list (``gene_a<TAB>gene_b`` per row).

    Duplicate rows and reversed duplicates are collapsed to a single
    undirected edge; self-loops are dropped with a counted warning.
    Raises ParseError on malformed rows and on an empty file.
    """
    nodes = set()
    edges = set()
    self_loops = 0
    saw_data = False
    for lineno, line in _data_rows(path):
        saw_data = True
        fields = line.split("\t") if "\t" in line else line.split()
        if len(fields) != 2:
            raise ParseError(f"{path}:{lineno}: expected 2 fields, got {len(fields)}")
        try:
            a, b = int(fields[0]), int(fields[1])
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: non-integer gene ID: {exc}") from None
        if a <= 0 or b <= 0:
            raise ParseError(f"{path}:{lineno}: gene IDs must be positive")
        nodes.add(a)
        nodes.add(b)
        if a == b:
            self_loops += 1
            continue
        edges.add((min(a, b), max(a, b)))
    if not saw_data:
        raise ParseError(f"{path}: empty edge-list file")
    if self_loops:
        log.warning("%s: dropped %d self-loop row(s)", path, self_loops)
    return _build_graph(nodes, edges)


def write_edge_list(graph, path):
    """Write a graph back to edge-list form (each edge once, a < b by gene ID)."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, neigh in enumerate(graph.adjacency):
            gi = int(graph.node_ids[i])
            for j in neigh:
                gj = int(graph.node_ids[j])
                if gi < gj:
                    fh.write(f"{gi}\t{gj}\n")


def largest_connected_component(graph):
    """Return (LCC subgraph, index map old -> new; -1 for dropped nodes).

    Ties between equally sized components are broken by the smallest
    minimum gene ID. Node order in the result preserves gene-ID order.
    """
    if graph.n_nodes == 0:
        raise ValueError("empty graph")
    n = graph.n_nodes
    comp = np.full(n, -1, dtype=np.int64)
    components = []
    for start in range(n):
        if comp[start] >= 0:
            continue
        cid = len(components)
        comp[start] = cid
        stack = [start]
        members = [start]
        while stack:
            u = stack.pop()
            for v in graph.adjacency[u]:
                if comp[v] < 0:
                    comp[v] = cid
                    stack.append(v)
                    members.append(int(v))
        components.append(members)
    # largest component; ties by smallest minimum gene ID (members hold the
    # smallest index first because the scan starts from it)
    best = max(components, key=lambda m: (len(m), -int(graph.node_ids[min(m)])))
    keep = np.array(sorted(best), dtype=np.int64)
    old_to_new = np.full(n, -1, dtype=np.int64)
    old_to_new[keep] = np.arange(len(keep))
    adjacency = tuple(
        old_to_new[graph.adjacency[i]].astype(np.int32) for i in keep
    )
    edge_count = sum(len(a) for a in adjacency) // 2
    sub = InteractomeGraph(
        node_ids=graph.node_ids[keep].copy(),
        adjacency=tuple(np.sort(a) for a in adjacency),
        edge_count=edge_count,
    )
    return sub, old_to_new


def load_disease_genes(path):
    """Load disease-gene associations (``disease_name<TAB>gene_id`` per row).

    Associations are grouped per disease with duplicates collapsed. An
    empty file yields an empty map with a warning.
    """
    diseases = []
    gene_sets = {}
    for lineno, line in _data_rows(path):
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError(f"{path}:{lineno}: expected 2 fields, got {len(fields)}")
        name = fields[0].strip()
        try:
            gene = int(fields[1])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: non-integer gene ID {fields[1]!r}") from None
        if name not in gene_sets:
            diseases.append(name)
            gene_sets[name] = set()
        gene_sets[name].add(gene)
    if not diseases:
        log.warning("%s: no disease-gene associations found", path)
    return DiseaseGeneMap(diseases=tuple(diseases), gene_sets=gene_sets)


def write_disease_genes(dmap, path):
    with open(path, "w", encoding="utf-8") as fh:
        for name in dmap.diseases:
            for gene in sorted(dmap.gene_sets[name]):
                fh.write(f"{name}\t{gene}\n")


def load_rr_table(path, dmap=None):
    """Load relative-risk rows (``disease_a<TAB>disease_b<TAB>rr``).

    Rejects duplicate unordered pairs and negative rr values. When a
    DiseaseGeneMap is given, every disease must appear in it.
    """
    rows = []
    seen = set()
    for lineno, line in _data_rows(path):
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(f"{path}:{lineno}: expected 3 fields, got {len(fields)}")
        a, b = fields[0].strip(), fields[1].strip()
        try:
            rr = float(fields[2])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: non-numeric rr {fields[2]!r}") from None
        if rr < 0:
            raise ParseError(f"{path}:{lineno}: negative rr {rr}")
        key = (a, b) if a <= b else (b, a)
        if key in seen:
            raise ParseError(f"{path}:{lineno}: duplicate pair ({a}, {b})")
        seen.add(key)
        if dmap is not None:
            for name in (a, b):
                if name not in dmap.gene_sets:
                    raise ParseError(f"{path}:{lineno}: unknown disease {name!r}")
        rows.append((a, b, rr))
    return RRTable(rows=tuple(rows))


def write_rr_table(rr, path):
    with open(path, "w", encoding="utf-8") as fh:
        for a, b, val in rr.rows:
            fh.write(f"{a}\t{b}\t{val!r}\n")


def label_pairs(rr, threshold):
    """Label pairs by the strict rule: positive iff rr > threshold."""
    pairs = tuple((a, b, 1 if val > threshold else 0) for a, b, val in rr.rows)
    n_pos = sum(lab for _, _, lab in pairs)
    frac = n_pos / len(pairs) if pairs else 0.0
    return LabeledPairs(threshold=float(threshold), pairs=pairs, positive_fraction=frac)


def restrict_to_lcc(dmap, graph):
    """Drop genes that are not LCC nodes from every disease gene set.

    Sums over embedding rows are only defined for LCC nodes, so genes
    outside the component cannot contribute. Per-disease drop counts are
    logged; diseases may end up with empty sets (pairs touching them are
    dropped later by drop_unusable_pairs).
    """
    present = set(int(g) for g in graph.node_ids)
    gene_sets = {}
    dropped_total = 0
    for name in dmap.diseases:
        kept = set(g for g in dmap.gene_sets[name] if g in present)
        n_dropped = len(dmap.gene_sets[name]) - len(kept)
        if n_dropped:
            log.info("disease %r: %d gene(s) outside the LCC excluded", name, n_dropped)
            dropped_total += n_dropped
        gene_sets[name] = kept
    if dropped_total:
        log.warning("excluded %d gene association(s) outside the LCC", dropped_total)
    return DiseaseGeneMap(diseases=dmap.diseases, gene_sets=gene_sets)


def drop_unusable_pairs(labels, dmap):
    """Drop labeled pairs where either disease has an empty gene set.

    Their feature vectors would be all-zero. The dropped count is logged
    and the positive fraction is recomputed over the retained pairs.
    """
    kept = []
    dropped = 0
    for a, b, lab in labels.pairs:
        if dmap.gene_sets.get(a) and dmap.gene_sets.get(b):
            kept.append((a, b, lab))
        else:
            dropped += 1
    if dropped:
        log.warning("dropped %d pair(s) with an empty post-LCC gene set", dropped)
    n_pos = sum(lab for _, _, lab in kept)
    frac = n_pos / len(kept) if kept else 0.0
    return LabeledPairs(threshold=labels.threshold, pairs=tuple(kept), positive_fraction=frac)
