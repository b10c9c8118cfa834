"""Command-line orchestrator for the full experiment grid.

Subcommands: prepare (LCC + distance cache), run (the whole grid),
select / evaluate (single cells), analyze (biological read-outs from
saved selections), synth (benchmark generation). A flat key = value
config file seeds the options and flags override it; every output file
embeds the resolved configuration for provenance.

Exit codes: 0 success, 1 partial failure, 2 configuration error.
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass, fields

from . import __version__, bioanalysis, bse, graphdist, netio, spectral, synthgen
from .pairfeat import assemble_dataset
from .util import derive_seed

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2

FAMILY = spectral.VARIANT_FAMILY


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    interactome: str = ""
    disease_genes: str = ""
    rr: str = ""
    out_dir: str = "out"
    variants: tuple = ("E1", "E2", "E3", "E4", "E5", "E6")
    thresholds: tuple = (0.0, 1.0)
    d: int = 20
    k: int = 100
    internal_folds: int = 5
    outer_folds: int = 10
    C: float = 3.5
    gamma: object = "scale"
    mds_exponent: float = 0.5
    selection_mode: str = "paper-faithful"
    seed: int = 0
    workers: int = 1
    figures: bool = False
    ranking: str = "absolute"   # top-gene ranking rule
    top_n: int = 20
    first_m: int = 5

    def validate(self):
        for v in self.variants:
            if v not in bse.ALL_VARIANTS:
                raise ConfigError(f"unknown variant {v!r}")
        if self.selection_mode not in ("paper-faithful", "nested"):
            raise ConfigError(f"unknown selection mode {self.selection_mode!r}")
        if self.d < 0 or self.k < self.d:
            raise ConfigError(f"need 0 <= d <= k, got d={self.d} k={self.k}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.ranking not in ("signed", "absolute"):
            raise ConfigError(f"unknown ranking {self.ranking!r}")
        if self.mds_exponent not in (0.5, -0.5):
            raise ConfigError("mds_exponent must be 0.5 or -0.5")
        if self.d > 0 and self.first_m > self.d:
            raise ConfigError(f"first_m={self.first_m} exceeds d={self.d}")

    def provenance_lines(self):
        lines = [f"bsembed {__version__}"]
        for f in fields(self):
            if f.name == "workers":
                continue  # scheduling knob; results are worker-count invariant
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            lines.append(f"{f.name} = {value}")
        return lines


def _coerce(name, value):
    """Coerce a config-file string to the RunConfig field type."""
    if name in ("variants",):
        return tuple(v.strip() for v in value.split(",") if v.strip())
    if name in ("thresholds",):
        return tuple(float(v) for v in value.split(",") if v.strip())
    if name in ("d", "k", "internal_folds", "outer_folds", "seed", "workers", "top_n", "first_m"):
        return int(value)
    if name in ("C", "mds_exponent"):
        return float(value)
    if name == "gamma":
        return value if value == "scale" else float(value)
    if name == "figures":
        return value.lower() in ("1", "true", "yes", "on")
    return value


def load_config(path):
    """Parse a flat key = value config file into a RunConfig."""
    cfg = RunConfig()
    known = {f.name for f in fields(RunConfig)}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in known:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                setattr(cfg, key, _coerce(key, value.strip()))
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return cfg


def _apply_overrides(cfg, args):
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            setattr(cfg, f.name, _coerce(f.name, value) if isinstance(value, str) else value)
    return cfg


def _threshold_tag(threshold):
    return f"RR{threshold:g}"


def cache_paths(cfg):
    return (
        os.path.join(cfg.out_dir, "distances.bsed"),
        os.path.join(cfg.out_dir, "node_map.tsv"),
    )


def cmd_prepare(cfg):
    """Compute (or validate) the LCC artifacts and the distance cache."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    graph = netio.load_edge_list(cfg.interactome)
    lcc, _ = netio.largest_connected_component(graph)
    cache_path, map_path = cache_paths(cfg)
    with open(map_path, "w", encoding="utf-8") as fh:
        fh.write("# gene_id\tlcc_index\n")
        for i, gid in enumerate(lcc.node_ids):
            fh.write(f"{int(gid)}\t{i}\n")
    if os.path.exists(cache_path):
        try:
            D = graphdist.read_distance_cache(cache_path)
            if D.shape[0] == lcc.n_nodes:
                log.info("valid distance cache found (%d nodes); skipping recompute", D.shape[0])
                return lcc, D
            log.warning("cache holds %d nodes but the LCC has %d; regenerating",
                        D.shape[0], lcc.n_nodes)
        except graphdist.CacheIntegrityError as exc:
            log.warning("invalid distance cache (%s); regenerating", exc)
    D = graphdist.all_pairs_shortest_paths(lcc)
    graphdist.write_distance_cache(D, cache_path)
    return lcc, D


def _load_bundle(cfg, threshold, lcc, D):
    dmap = netio.load_disease_genes(cfg.disease_genes)
    rr = netio.load_rr_table(cfg.rr, dmap=dmap)
    dmap_lcc = netio.restrict_to_lcc(dmap, lcc)
    labels = netio.drop_unusable_pairs(netio.label_pairs(rr, threshold), dmap_lcc)
    return bse.DataBundle(graph=lcc, D=D, dmap=dmap_lcc, labels=labels,
                          index_map=lcc.index_map())


def _variant_config(cfg, variant, threshold):
    return bse.VariantConfig(
        variant=variant,
        d=cfg.d,
        k=cfg.k,
        internal_folds=cfg.internal_folds,
        outer_folds=cfg.outer_folds,
        C=cfg.C,
        gamma_rule=cfg.gamma,
        seed=derive_seed(cfg.seed, "variant", variant, _threshold_tag(threshold)),
        mds_exponent=cfg.mds_exponent,
    )


def _analyze_variant(cfg, tag, result, bundle, header):
    """Top-gene table, ratio, and (for supervised variants) union scores."""
    variant = result.config.variant
    out = {}
    dims = bioanalysis.select_report_dims(result, m=cfg.first_m)
    table = bioanalysis.top_genes(
        result.embedding, dims, cfg.top_n, bundle.graph.node_ids, ranking=cfg.ranking
    )
    table = bioanalysis.annotate(
        table, bundle.dmap, bundle.graph.degrees(), bundle.index_map
    )
    bioanalysis.write_top_genes_csv(
        os.path.join(cfg.out_dir, f"top_genes_{variant}_{tag}.csv"), table, header
    )
    out["ratio"] = bioanalysis.ratio_R(table)
    out["table"] = table
    if result.selections:
        union = bse.union_first_m(result.selections, cfg.first_m)
        per_fold, mean, std = bioanalysis.union_dim_scores(
            result.dataset, union,
            folds=cfg.outer_folds,
            seed=derive_seed(cfg.seed, "union", variant, tag),
            C=cfg.C, gamma_rule=cfg.gamma,
        )
        out["union"] = (union, mean)
        with open(os.path.join(cfg.out_dir, f"selections_{variant}_{tag}.txt"), "w",
                  encoding="utf-8") as fh:
            for line in header:
                fh.write(f"# {line}\n")
            for sel in result.selections:
                fh.write(bse.selection_to_text(sel))
                fh.write("---\n")
    return out


def _write_figures(cfg, tag, results, analyses, header):
    for variant, result in results.items():
        if result.selections:
            series = {
                f"fold{f}": list(sel.trace)
                for f, sel in enumerate(result.selections)
            }
            bioanalysis.svg_line_chart(
                os.path.join(cfg.out_dir, f"auc_trace_{variant}_{tag}.svg"),
                series, f"{variant} {tag}: selection AUC trace", header_lines=header,
            )
    for variant, analysis in analyses.items():
        table = analysis["table"]
        dims = list(dict.fromkeys(row.dimension for row in table.rows))
        genes = [f"gene{r}" for r in range(1, table.n_top + 1)]
        counts = {(row.dimension, row.rank): row.disease_count for row in table.rows}
        degrees = {(row.dimension, row.rank): row.degree for row in table.rows}
        for name, cells in (("disease_counts", counts), ("degrees", degrees)):
            matrix = [[cells[(d, r)] for d in dims] for r in range(1, table.n_top + 1)]
            bioanalysis.svg_heatmap(
                os.path.join(cfg.out_dir, f"{name}_{variant}_{tag}.svg"),
                matrix, genes, [f"dim {d}" for d in dims],
                f"{variant} {tag}: top-gene {name.replace('_', ' ')}",
                header_lines=header,
            )


def cmd_run(cfg):
    """Evaluate every requested (variant, threshold) cell and write the bundle."""
    lcc, D = cmd_prepare(cfg)
    header = cfg.provenance_lines()
    failures = 0
    for threshold in cfg.thresholds:
        tag = _threshold_tag(threshold)
        try:
            bundle = _load_bundle(cfg, threshold, lcc, D)
        except Exception as exc:
            log.error("failed to build the %s dataset: %s", tag, exc)
            failures += len(cfg.variants)
            continue
        results = {}
        analyses = {}
        for variant in cfg.variants:
            try:
                vc = _variant_config(cfg, variant, threshold)
                result = bse.evaluate_variant(
                    vc, bundle, selection_mode=cfg.selection_mode, workers=cfg.workers
                )
                bioanalysis.write_per_fold_csv(
                    os.path.join(cfg.out_dir, f"metrics_{variant}_{tag}.csv"), result, header
                )
                results[variant] = result
                analyses[variant] = _analyze_variant(cfg, tag, result, bundle, header)
            except Exception as exc:
                log.error("variant %s on %s failed: %s", variant, tag, exc)
                failures += 1
        # family comparison tables need both the select and the rank member
        for select_v, rank_v in (("E1", "E2"), ("E3", "E4"), ("E5", "E6")):
            if select_v in results and rank_v in results:
                comp = bioanalysis.compare_methods(
                    results[select_v].per_fold, results[rank_v].per_fold
                )
                bioanalysis.write_comparison_csv(
                    os.path.join(cfg.out_dir, f"comparison_{FAMILY[select_v]}_{tag}.csv"),
                    FAMILY[select_v], comp, header,
                )
        union_scores = {
            FAMILY[v]: analyses[v]["union"][1] for v in results
            if "union" in analyses.get(v, {})
        }
        if union_scores:
            bioanalysis.write_union_csv(
                os.path.join(cfg.out_dir, f"union_scores_{tag}.csv"), union_scores, header
            )
        ratios = {
            (FAMILY[v], "select" if v in bse.SELECT_VARIANTS else "rank"): analyses[v]["ratio"]
            for v in results if v in analyses
        }
        if ratios:
            bioanalysis.write_ratio_csv(
                os.path.join(cfg.out_dir, f"ratios_{tag}.csv"), ratios, header
            )
        if cfg.figures:
            _write_figures(cfg, tag, results, analyses, header)
    with open(os.path.join(cfg.out_dir, "run_config.txt"), "w", encoding="utf-8") as fh:
        for line in header:
            fh.write(line + "\n")
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_select(cfg):
    """Run the greedy selector once per requested supervised variant/threshold."""
    lcc, D = cmd_prepare(cfg)
    header = cfg.provenance_lines()
    failures = 0
    for threshold in cfg.thresholds:
        tag = _threshold_tag(threshold)
        bundle = _load_bundle(cfg, threshold, lcc, D)
        for variant in cfg.variants:
            if variant not in bse.SELECT_VARIANTS:
                continue
            try:
                vc = _variant_config(cfg, variant, threshold)
                emb = spectral.build_raw_embedding(
                    bse.RAW_SOURCE[variant], bundle.D, k=vc.k, mds_exponent=vc.mds_exponent
                )
                ds = assemble_dataset(emb, bundle.dmap, bundle.labels, bundle.index_map)
                sel = bse.bse_select(ds, vc, workers=cfg.workers)
                path = os.path.join(cfg.out_dir, f"selection_{variant}_{tag}.txt")
                with open(path, "w", encoding="utf-8") as fh:
                    for line in header:
                        fh.write(f"# {line}\n")
                    fh.write(bse.selection_to_text(sel))
            except Exception as exc:
                log.error("selection %s on %s failed: %s", variant, tag, exc)
                failures += 1
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_evaluate(cfg):
    """Evaluate the requested variants without the analysis stages."""
    lcc, D = cmd_prepare(cfg)
    header = cfg.provenance_lines()
    failures = 0
    for threshold in cfg.thresholds:
        tag = _threshold_tag(threshold)
        bundle = _load_bundle(cfg, threshold, lcc, D)
        for variant in cfg.variants:
            try:
                vc = _variant_config(cfg, variant, threshold)
                result = bse.evaluate_variant(
                    vc, bundle, selection_mode=cfg.selection_mode, workers=cfg.workers
                )
                bioanalysis.write_per_fold_csv(
                    os.path.join(cfg.out_dir, f"metrics_{variant}_{tag}.csv"), result, header
                )
            except Exception as exc:
                log.error("variant %s on %s failed: %s", variant, tag, exc)
                failures += 1
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_analyze(cfg):
    """Re-run the biological analyses from saved selection records."""
    lcc, D = cmd_prepare(cfg)
    header = cfg.provenance_lines()
    failures = 0
    for threshold in cfg.thresholds:
        tag = _threshold_tag(threshold)
        bundle = _load_bundle(cfg, threshold, lcc, D)
        for variant in cfg.variants:
            sel_path = os.path.join(cfg.out_dir, f"selections_{variant}_{tag}.txt")
            try:
                vc = _variant_config(cfg, variant, threshold)
                emb = spectral.build_raw_embedding(
                    bse.RAW_SOURCE[variant], bundle.D, k=vc.k, mds_exponent=vc.mds_exponent
                )
                if variant in bse.SELECT_VARIANTS:
                    if not os.path.exists(sel_path):
                        raise FileNotFoundError(f"no selection record {sel_path}")
                    body = open(sel_path, "r", encoding="utf-8").read()
                    records = [
                        bse.selection_from_text(part)
                        for part in body.split("---") if part.strip() and
                        not all(ln.startswith("#") for ln in part.strip().splitlines())
                    ]
                    dims = bioanalysis.most_frequent_dims(records, cfg.first_m)
                else:
                    dims = list(range(cfg.first_m))
                table = bioanalysis.top_genes(
                    emb, dims, cfg.top_n, bundle.graph.node_ids, ranking=cfg.ranking
                )
                table = bioanalysis.annotate(
                    table, bundle.dmap, bundle.graph.degrees(), bundle.index_map
                )
                bioanalysis.write_top_genes_csv(
                    os.path.join(cfg.out_dir, f"top_genes_{variant}_{tag}.csv"), table, header
                )
            except Exception as exc:
                log.error("analysis %s on %s failed: %s", variant, tag, exc)
                failures += 1
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_synth(cfg, args):
    """Generate a synthetic benchmark into out_dir."""
    synth_cfg = synthgen.SynthConfig(
        n=args.n,
        n_diseases=args.diseases,
        flip_noise=args.noise,
        anchor_bias=args.anchor_bias,
        pair_fraction=args.pair_fraction,
        seed=cfg.seed,
    )
    paths = synthgen.write_benchmark(synth_cfg, cfg.out_dir)
    for path in paths:
        log.info("wrote %s", path)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bse", description="Supervised spectral embedding experiment runner"
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--verbose", action="store_true")
    for name in ("interactome", "disease_genes", "rr", "out_dir", "selection_mode",
                 "gamma", "ranking"):
        common.add_argument(f"--{name.replace('_', '-')}", dest=name)
    for name in ("d", "k", "internal_folds", "outer_folds", "seed", "workers",
                 "top_n", "first_m"):
        common.add_argument(f"--{name.replace('_', '-')}", dest=name, type=int)
    common.add_argument("--C", dest="C", type=float)
    common.add_argument("--mds-exponent", dest="mds_exponent", type=float)
    common.add_argument("--variants", dest="variants")
    common.add_argument("--thresholds", dest="thresholds")
    common.add_argument("--figures", dest="figures", action="store_const", const=True)

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("prepare", parents=[common])
    sub.add_parser("run", parents=[common])
    sub.add_parser("select", parents=[common])
    sub.add_parser("evaluate", parents=[common])
    sub.add_parser("analyze", parents=[common])
    synth = sub.add_parser("synth", parents=[common])
    synth.add_argument("--n", type=int, default=500)
    synth.add_argument("--diseases", type=int, default=40)
    synth.add_argument("--noise", type=float, default=0.1)
    synth.add_argument("--anchor-bias", dest="anchor_bias", default="uniform")
    synth.add_argument("--pair-fraction", dest="pair_fraction", type=float, default=1.0)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        cfg = _apply_overrides(cfg, args)
        cfg.validate()
        if args.command != "synth":
            for attr in ("interactome", "disease_genes", "rr"):
                path = getattr(cfg, attr)
                if args.command == "prepare" and attr != "interactome":
                    continue
                if not path or not os.path.exists(path):
                    raise ConfigError(f"{attr} file not found: {path!r}")
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    try:
        if args.command == "prepare":
            cmd_prepare(cfg)
            return EXIT_OK
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "select":
            return cmd_select(cfg)
        if args.command == "evaluate":
            return cmd_evaluate(cfg)
        if args.command == "analyze":
            return cmd_analyze(cfg)
        if args.command == "synth":
            return cmd_synth(cfg, args)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
