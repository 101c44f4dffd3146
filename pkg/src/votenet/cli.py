"""Command-line interface for the voting-network pipeline."""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import community, dataset as ds, discipline, netbuild, pipeline, synth, temporal, tiestrength


def _out_path(raw: str) -> Path:
    root = os.environ.get("VOTENET_OUTPUT_ROOT")
    p = Path(raw)
    if root and not p.is_absolute():
        p = Path(root) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def cmd_ingest(args) -> int:
    adapter = ds.ADAPTERS[args.format]
    records = []
    label = args.window
    for f in args.inputs:
        part = adapter(Path(f), window_label=label)
        label = part.window_label
        records.extend(part.records)
    data = ds.filter_low_attendance(ds.VoteDataset.build(label, records), args.max_missed)
    ds.write_canonical(data, _out_path(args.out))
    print(f"{len(data.members)} members, {len(data.sessions)} sessions -> {args.out}")
    return 0


def cmd_graph(args) -> int:
    data = ds.parse_canonical(Path(args.dataset))
    g = netbuild.build_graph(data)
    if args.percentile is not None:
        g = netbuild.percentile_filter(g, args.percentile)
    prefix = _out_path(args.out)
    netbuild.write_graph(g, prefix, gexf=args.gexf)
    if args.stats:
        stats = netbuild.graph_stats(g)
        pipeline.write_stats(stats, Path(f"{prefix}.stats.tsv"))
        print(f"nodes={stats.node_count} edges={stats.edge_count} "
              f"components={stats.connected_components} density={stats.density:.3f}")
    return 0


def cmd_detect(args) -> int:
    g = netbuild.read_graph(Path(args.graph))
    part = community.best_partition(g, seed=args.seed, restarts=args.restarts)
    community.write_partition(part, _out_path(args.out))
    print(f"{part.community_count} communities, modularity {part.modularity:.4f}")
    return 0


def cmd_polarize(args) -> int:
    g = netbuild.read_graph(Path(args.graph))
    prefix = _out_path(args.out)
    if args.overlap_threshold is not None:
        threshold = args.overlap_threshold
    else:
        start, stop, step = (float(x) for x in args.sweep.split(":"))
        curve = tiestrength.threshold_sweep(
            g, tiestrength.sweep_range(start, stop, step), seed=args.seed)
        tiestrength.write_sweep(curve, Path(f"{prefix}.sweep.tsv"))
        threshold = tiestrength.select_threshold(curve, g.node_count, args.min_retained)
    polarized = tiestrength.strong_tie_subgraph(g, tiestrength.classify_ties(g, threshold))
    netbuild.write_graph(polarized, prefix)
    part = community.best_partition(polarized, seed=args.seed, restarts=args.restarts)
    community.write_partition(part, Path(f"{prefix}.partition.tsv"))
    print(f"threshold {threshold:.3f}: {polarized.node_count} members, "
          f"{part.community_count} communities, modularity {part.modularity:.4f}")
    return 0


def cmd_discipline(args) -> int:
    data = ds.parse_canonical(Path(args.dataset))
    if args.groups == "party":
        assignment = discipline.party_assignment(data)
    else:
        assignment = {m: int(g) for m, g in
                      (line.split("\t") for line in
                       Path(args.groups).read_text(encoding="utf-8").splitlines()
                       if line.strip() and not line.startswith("#"))
                      if m in data.members}
    report = discipline.group_discipline(data, assignment)
    pipeline.write_discipline(report, _out_path(args.out))
    for g in sorted(report.per_group, key=str):
        value = report.per_group[g]
        if value:
            print(f"{g}\tmean={value[0]:.4f}\tsd={value[1]:.4f}")
    return 0


def cmd_temporal(args) -> int:
    part_dir = Path(args.partitions)
    files = sorted(part_dir.glob("*.partition.tsv"))
    if len(files) < 2:
        print("need at least two *.partition.tsv files", file=sys.stderr)
        return 1
    windows = [temporal.WindowPartition(f.name.removesuffix(".partition.tsv"),
                                        community.read_partition(f).assignment)
               for f in files]
    prefix = _out_path(args.out)
    report = temporal.temporal_report(windows)
    temporal.write_temporal_report(report, Path(f"{prefix}.temporal.tsv"))
    for a, b in zip(windows, windows[1:]):
        wp = temporal.WindowPair(a, b)
        temporal.write_flow(wp, temporal.flow_table(wp),
                            Path(f"{prefix}.flow_{a.label}_{b.label}.tsv"),
                            include_churn=args.include_churn)
    for a, b, pers, score in report.rows:
        print(f"{a}->{b}\tpersistence={100 * pers:.2f}%\tnmi={score:.2f}")
    return 0


def cmd_run(args) -> int:
    config = pipeline.load_config(Path(args.config))
    out = pipeline.run_pipeline(config)
    print(f"pipeline complete -> {out}")
    return 0


def cmd_report(args) -> int:
    config = pipeline.load_config(Path(args.config))
    table = pipeline.render_report(args.kind, config)
    if args.tsv:
        print(table.to_tsv(), end="")
    else:
        print(table.to_text(), end="")
    return 0


def cmd_synth(args) -> int:
    planted = synth.generate(blocs=args.blocs, members=args.members,
                             sessions=args.sessions, loyalty=args.loyalty,
                             absence=args.absence, seed=args.seed,
                             window_label=args.window)
    ds.write_canonical(planted.dataset, _out_path(args.out))
    print(f"{args.members} members / {args.blocs} blocs / {args.sessions} sessions "
          f"-> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="votenet",
        description="Roll-call voting similarity networks: build, detect, polarize, track.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse vote dumps into the canonical dataset format")
    p.add_argument("inputs", nargs="+", help="input dump files")
    p.add_argument("--format", choices=sorted(ds.ADAPTERS), default="canonical")
    p.add_argument("--max-missed", type=float, default=1.0 / 3.0,
                   help="max missed-session fraction before a member is dropped")
    p.add_argument("--window", default="window", help="window label")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("graph", help="build (and optionally filter) the similarity graph")
    p.add_argument("--dataset", required=True)
    p.add_argument("--percentile", type=float, default=None,
                   help="drop edges below this weight percentile")
    p.add_argument("--stats", action="store_true", help="also write topology statistics")
    p.add_argument("--gexf", action="store_true", help="also write a GEXF export")
    p.add_argument("--out", required=True, help="output file prefix")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("detect", help="Louvain community detection")
    p.add_argument("--graph", required=True, help="graph file prefix")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("polarize", help="strong-tie filtering and polarized communities")
    p.add_argument("--graph", required=True, help="graph file prefix")
    p.add_argument("--sweep", default="0:1:0.05", help="overlap sweep start:stop:step")
    p.add_argument("--overlap-threshold", type=float, default=None,
                   help="explicit threshold (skips the sweep)")
    p.add_argument("--min-retained", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--out", required=True, help="output file prefix")
    p.set_defaults(func=cmd_polarize)

    p = sub.add_parser("discipline", help="member and group discipline report")
    p.add_argument("--dataset", required=True)
    p.add_argument("--groups", default="party",
                   help="'party' or a member_id<TAB>group_id assignment file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_discipline)

    p = sub.add_parser("temporal", help="persistence/NMI/flows across windows")
    p.add_argument("--partitions", required=True,
                   help="directory of <window>.partition.tsv files")
    p.add_argument("--include-churn", action="store_true")
    p.add_argument("--out", required=True, help="output file prefix")
    p.set_defaults(func=cmd_temporal)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="render summary tables from pipeline artifacts")
    p.add_argument("kind", choices=("datasets", "ideological", "polarized", "temporal"))
    p.add_argument("--config", required=True)
    p.add_argument("--tsv", action="store_true", help="emit tab-separated values")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("synth", help="generate a planted-bloc synthetic dataset")
    p.add_argument("--blocs", type=int, default=2)
    p.add_argument("--members", type=int, default=200)
    p.add_argument("--sessions", type=int, default=100)
    p.add_argument("--loyalty", type=float, default=0.95)
    p.add_argument("--absence", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", default="synth")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ds.IngestError, pipeline.ConfigError, pipeline.StageError,
            tiestrength.ThresholdSelectionError, ValueError, KeyError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
