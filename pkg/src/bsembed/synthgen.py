"""Desk-scale synthetic interactomes with a planted comorbidity signal.

Disease modules are grown as local neighborhoods around anchor nodes, and a
pair's relative risk is high exactly when the two modules sit close in the
graph (mean cross-module shortest distance below a threshold), optionally
flipped with a small noise rate. Proximity is therefore the ground-truth
signal, and spectral coordinates are informative by construction.
"""

import os
from dataclasses import dataclass

import numpy as np

from . import graphdist, netio
from .netio import DiseaseGeneMap, InteractomeGraph, RRTable

RR_HIGH = 2.0
RR_LOW = 0.5


@dataclass(frozen=True)
class SynthConfig:
    n: int = 500
    edge_model: str = "preferential"  # "preferential" | "erdos"
    pa_edges: int = 2                 # attachments per new node (preferential)
    edge_prob: float = 0.01           # edge probability (erdos)
    n_diseases: int = 40
    genes_per_disease: tuple = (5, 12)
    tau: float | None = None          # None: median of the pair distances
    flip_noise: float = 0.0
    anchor_bias: str = "uniform"      # "uniform" | "low_degree"
    satellite_fraction: float = 0.0   # share of nodes in annotation-free pendant chains
    pair_fraction: float = 1.0
    seed: int = 0

    def validate(self):
        if self.n < 50:
            raise ValueError("need at least 50 nodes")
        if self.edge_model not in ("preferential", "erdos"):
            raise ValueError(f"unknown edge model {self.edge_model!r}")
        if not 0 <= self.flip_noise < 0.5:
            raise ValueError("flip noise must be in [0, 0.5)")
        lo, hi = self.genes_per_disease
        if lo < 1 or hi < lo:
            raise ValueError("genes_per_disease must be a (low, high) range with low >= 1")
        if hi > self.n:
            raise ValueError("disease modules larger than the graph are unsatisfiable")
        if self.n_diseases < 2:
            raise ValueError("need at least 2 diseases")
        if self.anchor_bias not in ("uniform", "low_degree"):
            raise ValueError(f"unknown anchor bias {self.anchor_bias!r}")
        if not 0 <= self.satellite_fraction <= 0.5:
            raise ValueError("satellite_fraction must be in [0, 0.5]")
        if not 0 < self.pair_fraction <= 1:
            raise ValueError("pair_fraction must be in (0, 1]")


def _preferential_graph(n, m, rng):
    """Barabasi-Albert style growth: each new node attaches to m distinct targets.

    Targets are drawn degree-proportionally from an urn of edge endpoints
    (uniform over the seed nodes for the first attachment).
    """
    urn = []  # edge endpoints; drawing uniformly from it is degree-proportional
    edges = set()
    for v in range(m, n):
        pool = urn if urn else list(range(m))
        chosen = set()
        while len(chosen) < m:
            chosen.add(int(pool[rng.integers(len(pool))]))
        for u in sorted(chosen):
            edges.add((u, v))
            urn.extend((u, v))
    return edges


def _erdos_graph(n, p, rng):
    edges = set()
    for i in range(n):
        draws = rng.random(n - i - 1)
        for off in np.flatnonzero(draws < p):
            edges.add((i, i + 1 + int(off)))
    return edges


def _satellite_chains(n_core, n_satellite, rng, chain_range=(3, 8)):
    """Pendant chains of indices n_core..n_core+n_satellite-1 hanging off the core.

    These mimic the sparsely studied periphery of a real interactome: long
    low-degree appendages that carry no disease annotations but dominate the
    extremes of the graph geometry.
    """
    edges = set()
    v = n_core
    while v < n_core + n_satellite:
        length = min(int(rng.integers(*chain_range)), n_core + n_satellite - v)
        attach = int(rng.integers(n_core))
        for step in range(length):
            prev = attach if step == 0 else v - 1
            edges.add((prev, v))
            v += 1
    return edges


def _grow_module(graph, anchor, size, rng, degrees=None):
    """Local neighborhood of ``size`` node indices around the anchor.

    Expands breadth-first, shuffling each level so modules differ between
    seeds while staying local. When degrees are given, each level is taken
    lowest-degree first (shuffle then stable sort, so exact-degree ties stay
    random): modules then sit on weakly connected genes instead of being
    swallowed by hubs a hop away.
    """
    picked = [anchor]
    seen = {anchor}
    frontier = [anchor]
    while len(picked) < size and frontier:
        level = []
        for u in frontier:
            for v in graph.adjacency[u]:
                if int(v) not in seen:
                    seen.add(int(v))
                    level.append(int(v))
        rng.shuffle(level)
        if degrees is not None:
            level.sort(key=lambda v: degrees[v])
        for v in level:
            if len(picked) < size:
                picked.append(v)
        frontier = level
    return picked


def mean_cross_distance(D, idx_a, idx_b):
    """Mean shortest distance over all node pairs of two modules."""
    block = D[np.ix_(sorted(idx_a), sorted(idx_b))]
    return float(block.mean())


def generate_benchmark(cfg):
    """Generate (InteractomeGraph, DiseaseGeneMap, RRTable) with a planted signal.

    Pair rr is RR_HIGH when the mean cross-module distance is below tau and
    RR_LOW otherwise, then flipped to the other side with probability
    flip_noise. Same config -> identical benchmark, byte for byte.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n_satellite = int(round(cfg.satellite_fraction * cfg.n))
    n_core = cfg.n - n_satellite
    if cfg.edge_model == "preferential":
        index_edges = _preferential_graph(n_core, cfg.pa_edges, rng)
    else:
        index_edges = _erdos_graph(n_core, cfg.edge_prob, rng)
    index_edges |= _satellite_chains(n_core, n_satellite, rng)
    # gene IDs deliberately differ from indices to keep mappings honest
    gene_ids = [10 * (i + 1) for i in range(cfg.n)]
    edges = set((gene_ids[a], gene_ids[b]) for a, b in index_edges)
    graph = netio._build_graph(gene_ids, edges)
    lcc, _ = netio.largest_connected_component(graph)
    if lcc.n_nodes < 0.9 * cfg.n:
        raise ValueError(
            f"generated graph too fragmented: LCC {lcc.n_nodes} < 0.9 * {cfg.n}; "
            "raise edge density"
        )
    D = graphdist.all_pairs_shortest_paths(lcc)
    degrees = lcc.degrees()

    # anchors avoid the satellite chains (annotation-free by construction);
    # uniform over the core, or biased into its low-degree tercile
    core_ids = set(gene_ids[:n_core])
    core_rows = np.array([i for i, g in enumerate(lcc.node_ids) if int(g) in core_ids])
    if cfg.anchor_bias == "low_degree":
        cut = np.quantile(degrees[core_rows], 1 / 3)
        pool = core_rows[degrees[core_rows] <= cut]
    else:
        pool = core_rows
    if len(pool) < cfg.n_diseases:
        pool = core_rows
    anchors = rng.choice(pool, size=cfg.n_diseases, replace=False)

    lo, hi = cfg.genes_per_disease
    grow_degrees = degrees if cfg.anchor_bias == "low_degree" else None
    diseases = []
    gene_sets = {}
    modules = []
    for d, anchor in enumerate(anchors):
        size = int(rng.integers(lo, hi + 1))
        module = _grow_module(lcc, int(anchor), size, rng, degrees=grow_degrees)
        name = f"disease_{d:03d}"
        diseases.append(name)
        gene_sets[name] = set(int(lcc.node_ids[i]) for i in module)
        modules.append(module)
    dmap = DiseaseGeneMap(diseases=tuple(diseases), gene_sets=gene_sets)

    all_pairs = [
        (i, j) for i in range(cfg.n_diseases) for j in range(i + 1, cfg.n_diseases)
    ]
    if cfg.pair_fraction < 1.0:
        n_keep = max(2, int(round(cfg.pair_fraction * len(all_pairs))))
        keep_idx = rng.choice(len(all_pairs), size=n_keep, replace=False)
        all_pairs = [all_pairs[int(t)] for t in sorted(keep_idx)]

    dists = np.array([mean_cross_distance(D, modules[i], modules[j]) for i, j in all_pairs])
    tau = float(np.median(dists)) if cfg.tau is None else float(cfg.tau)
    rows = []
    for (i, j), dist in zip(all_pairs, dists):
        rr = RR_HIGH if dist < tau else RR_LOW
        if cfg.flip_noise > 0 and rng.random() < cfg.flip_noise:
            rr = RR_LOW if rr == RR_HIGH else RR_HIGH
        rows.append((diseases[i], diseases[j], rr))
    return graph, dmap, RRTable(rows=tuple(rows))


def write_benchmark(cfg, out_dir):
    """Generate a benchmark and emit the three TSV inputs into out_dir.

    Returns the (interactome, disease_genes, rr) file paths.
    """
    graph, dmap, rr = generate_benchmark(cfg)
    os.makedirs(out_dir, exist_ok=True)
    paths = (
        os.path.join(out_dir, "interactome.tsv"),
        os.path.join(out_dir, "disease_genes.tsv"),
        os.path.join(out_dir, "rr.tsv"),
    )
    netio.write_edge_list(graph, paths[0])
    netio.write_disease_genes(dmap, paths[1])
    netio.write_rr_table(rr, paths[2])
    return paths
