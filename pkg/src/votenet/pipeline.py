"""End-to-end pipeline: config, per-window stages, reports, manifest."""
from __future__ import annotations

import configparser
import hashlib
import os
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import community, dataset as ds, discipline, netbuild, temporal, tiestrength


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, window: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed for window {window!r}: {cause}")
        self.stage = stage
        self.window = window
        self.cause = cause


@dataclass(frozen=True)
class WindowSpec:
    label: str
    files: tuple[Path, ...]
    adapter: str = "canonical"
    percentile: Optional[float] = None
    overlap_threshold: Optional[float] = None


@dataclass(frozen=True)
class PipelineConfig:
    windows: tuple[WindowSpec, ...]
    output_dir: Path
    max_missed: float = 1.0 / 3.0
    percentile: float = 90.0
    sweep: tuple[float, ...] = tuple(tiestrength.sweep_range(0.0, 1.0, 0.05))
    min_retained: float = 0.5
    seed: int = 0
    restarts: int = 8
    boundaries: frozenset[tuple[str, str]] = frozenset()
    include_churn: bool = False
    config_hash: str = ""

    def validate(self) -> None:
        labels = [w.label for w in self.windows]
        if len(labels) != len(set(labels)):
            raise ConfigError("window labels must be unique")
        for w in self.windows:
            if w.adapter not in ds.ADAPTERS:
                raise ConfigError(f"unknown adapter {w.adapter!r} for window {w.label!r}")
            p = w.percentile if w.percentile is not None else self.percentile
            if not 0 < p < 100:
                raise ConfigError(f"percentile {p} out of range for window {w.label!r}")
            if w.overlap_threshold is not None and not 0 <= w.overlap_threshold <= 1:
                raise ConfigError(f"overlap threshold out of range for window {w.label!r}")
        if not 0 <= self.max_missed <= 1:
            raise ConfigError("max_missed must be in [0, 1]")
        if not 0 <= self.min_retained <= 1:
            raise ConfigError("min_retained must be in [0, 1]")
        if any(not 0 <= t <= 1 for t in self.sweep):
            raise ConfigError("sweep thresholds must be in [0, 1]")


def _parse_sweep(text: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        return tuple(tiestrength.sweep_range(start, stop, step))
    return tuple(float(x) for x in text.replace(",", " ").split())


def load_config(path: str | Path) -> PipelineConfig:
    """Load an INI-style pipeline config (see docs/config.example.ini)."""
    path = Path(path)
    parser = configparser.ConfigParser()
    read = parser.read(path, encoding="utf-8")
    if not read:
        raise ConfigError(f"config file {path} not found or unreadable")
    pipe = parser["pipeline"] if parser.has_section("pipeline") else {}
    output = Path(pipe.get("output", "out"))
    if not output.is_absolute():
        root = os.environ.get("VOTENET_OUTPUT_ROOT")
        output = (Path(root) / output) if root else (path.parent / output)
    boundaries = frozenset(
        tuple(pair.split("-", 1))  # type: ignore[misc]
        for pair in pipe.get("boundaries", "").split() if "-" in pair)
    windows = []
    for section in parser.sections():
        if not section.startswith("window:"):
            continue
        label = section.split(":", 1)[1].strip()
        sec = parser[section]
        files = tuple((path.parent / f).resolve() if not Path(f).is_absolute() else Path(f)
                      for f in sec.get("files", "").split())
        if not files:
            raise ConfigError(f"window {label!r} lists no input files")
        windows.append(WindowSpec(
            label=label,
            files=files,
            adapter=sec.get("adapter", "canonical"),
            percentile=sec.getfloat("percentile", fallback=None),
            overlap_threshold=sec.getfloat("overlap_threshold", fallback=None),
        ))
    config = PipelineConfig(
        windows=tuple(windows),
        output_dir=output,
        max_missed=float(pipe.get("max_missed", 1.0 / 3.0)),
        percentile=float(pipe.get("percentile", 90.0)),
        sweep=_parse_sweep(pipe.get("sweep", "0:1:0.05")),
        min_retained=float(pipe.get("min_retained", 0.5)),
        seed=int(pipe.get("seed", 0)),
        restarts=int(pipe.get("restarts", 8)),
        boundaries=boundaries,
        include_churn=pipe.get("include_churn", "false").strip().lower() in ("1", "true", "yes"),
        config_hash=hashlib.sha256(path.read_bytes()).hexdigest(),
    )
    config.validate()
    return config


# --- artifact writers -------------------------------------------------------

def atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_stats(stats: netbuild.GraphStats, path: Path) -> None:
    atomic_write(path, "".join(
        f"{k}\t{v:.12g}\n" if isinstance(v, float) else f"{k}\t{v}\n"
        for k, v in (
            ("nodes", stats.node_count),
            ("edges", stats.edge_count),
            ("components", stats.connected_components),
            ("avg_shortest_path", stats.avg_shortest_path),
            ("avg_degree", stats.avg_degree),
            ("clustering_transitivity", stats.clustering_coefficient),
            ("avg_local_clustering", stats.avg_local_clustering),
            ("density", stats.density),
        )))


def read_stats(path: Path) -> dict[str, float]:
    out = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        k, v = line.split("\t")
        out[k] = float(v)
    return out


def write_discipline(report: discipline.DisciplineReport, path: Path) -> None:
    lines = ["# member\tpd"]
    for m in sorted(report.per_member):
        lines.append(f"{m}\t{report.per_member[m]:.12g}")
    lines.append("# group\tmean\tsd")
    for g in sorted(report.per_group, key=str):
        value = report.per_group[g]
        if value is None:
            lines.append(f"{g}\t-\t-")
        else:
            lines.append(f"{g}\t{value[0]:.12g}\t{value[1]:.12g}")
    if report.undefined_members:
        lines.append("# undefined: " + " ".join(sorted(report.undefined_members)))
    atomic_write(path, "\n".join(lines) + "\n")


def read_group_discipline(path: Path) -> dict[str, tuple[float, float]]:
    """Group mean/SD block of a discipline report file."""
    out: dict[str, tuple[float, float]] = {}
    in_groups = False
    for line in path.read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if stripped.startswith("# group"):
            in_groups = True
            continue
        if not stripped or stripped.startswith("#"):
            continue
        if in_groups:
            g, mean, sd = stripped.split("\t")
            if mean != "-":
                out[g] = (float(mean), float(sd))
    return out


# --- stages -----------------------------------------------------------------

def ingest_window(spec: WindowSpec, max_missed: float) -> ds.VoteDataset:
    adapter = ds.ADAPTERS[spec.adapter]
    records: list[ds.VoteRecord] = []
    for f in spec.files:
        part = adapter(f, window_label=spec.label)
        records.extend(part.records)
    merged = ds.VoteDataset.build(spec.label, records)
    return ds.filter_low_attendance(merged, max_missed)


def detect_window(graph: netbuild.SimilarityGraph, data: ds.VoteDataset,
                  seed: int, restarts: int,
                  out_prefix: Path, name: str) -> community.Partition:
    """Run community detection + community discipline, writing both artifacts."""
    part = community.best_partition(graph, seed=seed, restarts=restarts)
    community.write_partition(part, out_prefix / f"{name}.partition.tsv")
    assignment = {m: g for m, g in community.community_assignment(part).items()
                  if m in data.members}
    report = discipline.group_discipline(data, assignment)
    write_discipline(report, out_prefix / f"{name}.pd.tsv")
    return part


def run_window(spec: WindowSpec, config: PipelineConfig) -> Path:
    """All per-window stages; returns the window's artifact directory."""
    wdir = config.output_dir / spec.label
    wdir.mkdir(parents=True, exist_ok=True)
    marker = wdir / ".partial"
    marker.touch()
    stage = "ingest"
    try:
        data = ingest_window(spec, config.max_missed)
        atomic_write(wdir / "dataset.tsv", ds.serialize_canonical(data))
        write_discipline(discipline.group_discipline(data, discipline.party_assignment(data)),
                         wdir / "party.pd.tsv")

        stage = "graph"
        percentile = spec.percentile if spec.percentile is not None else config.percentile
        full = netbuild.build_graph(data)
        filtered = netbuild.percentile_filter(full, percentile)
        netbuild.write_graph(filtered, wdir / "graph")
        write_stats(netbuild.graph_stats(filtered), wdir / "graph.stats.tsv")

        stage = "detect"
        detect_window(filtered, data, config.seed, config.restarts, wdir, "ideological")

        stage = "polarize"
        curve = tiestrength.threshold_sweep(filtered, config.sweep, seed=config.seed)
        tiestrength.write_sweep(curve, wdir / "sweep.tsv")
        if spec.overlap_threshold is not None:
            threshold = spec.overlap_threshold
        else:
            threshold = tiestrength.select_threshold(curve, filtered.node_count,
                                                     config.min_retained)
        atomic_write(wdir / "overlap_threshold.tsv", f"threshold\t{threshold:.6g}\n")
        polarized = tiestrength.strong_tie_subgraph(
            filtered, tiestrength.classify_ties(filtered, threshold))
        netbuild.write_graph(polarized, wdir / "polarized")
        write_stats(netbuild.graph_stats(polarized), wdir / "polarized.stats.tsv")
        detect_window(polarized, data, config.seed, config.restarts, wdir, "polarized")
    except Exception as exc:
        raise StageError(stage, spec.label, exc) from exc
    marker.unlink()
    return wdir


def run_temporal(config: PipelineConfig) -> None:
    windows = [
        temporal.WindowPartition(
            spec.label,
            community.read_partition(config.output_dir / spec.label
                                     / "polarized.partition.tsv").assignment)
        for spec in config.windows
    ]
    report = temporal.temporal_report(windows, set(config.boundaries))
    temporal.write_temporal_report(report, config.output_dir / "temporal.tsv")
    for a, b in zip(windows, windows[1:]):
        if (a.label, b.label) in config.boundaries:
            continue
        wp = temporal.WindowPair(a, b)
        temporal.write_flow(wp, temporal.flow_table(wp),
                            config.output_dir / f"flow_{a.label}_{b.label}.tsv",
                            include_churn=config.include_churn)


def write_manifest(config: PipelineConfig) -> Path:
    entries = []
    for p in sorted(config.output_dir.rglob("*")):
        if p.is_file() and p.name not in ("manifest.tsv",) and not p.name.endswith(".tmp"):
            digest = hashlib.sha256(p.read_bytes()).hexdigest()
            entries.append(f"{p.relative_to(config.output_dir)}\t{digest}")
    text = (f"# config_hash: {config.config_hash}\n# seed: {config.seed}\n"
            + "\n".join(entries) + "\n")
    path = config.output_dir / "manifest.tsv"
    atomic_write(path, text)
    return path


def run_pipeline(config: PipelineConfig) -> Path:
    """Run every stage for every window, then the cross-window stage.

    Returns the output directory. Any stage failure aborts with the stage
    and window name; the failed window keeps a ``.partial`` marker.
    """
    config.validate()
    config.output_dir.mkdir(parents=True, exist_ok=True)
    for spec in config.windows:
        run_window(spec, config)
    if len(config.windows) >= 2:
        run_temporal(config)
    write_manifest(config)
    return config.output_dir


# --- report tables ----------------------------------------------------------

@dataclass(frozen=True)
class ReportTable:
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def to_tsv(self) -> str:
        lines = ["\t".join(self.columns)]
        lines += ["\t".join(r) for r in self.rows]
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        table = [self.columns, *self.rows]
        widths = [max(len(row[i]) for row in table) for i in range(len(self.columns))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
                 for row in table]
        return "\n".join(lines) + "\n"


def _pd_across_groups(path: Path) -> tuple[str, str]:
    groups = read_group_discipline(path)
    if not groups:
        return "-", "-"
    means = [v[0] for v in groups.values()]
    avg = statistics.fmean(means)
    sd = statistics.pstdev(means) if len(means) > 1 else 0.0
    return f"{100 * avg:.2f}%", f"{100 * sd:.2f}"


def _structure_rows(config: PipelineConfig, name: str) -> list[tuple[str, ...]]:
    rows = []
    for spec in config.windows:
        wdir = config.output_dir / spec.label
        prefix = "graph" if name == "ideological" else "polarized"
        stats = read_stats(wdir / f"{prefix}.stats.tsv")
        part = community.read_partition(wdir / f"{name}.partition.tsv")
        avg_pd, sd_pd = _pd_across_groups(wdir / f"{name}.pd.tsv")
        rows.append((
            spec.label,
            f"{int(stats['nodes'])}", f"{int(stats['edges'])}",
            f"{int(stats['components'])}",
            f"{stats['avg_shortest_path']:.2f}",
            f"{stats['avg_degree']:.2f}",
            f"{stats['clustering_transitivity']:.2f}",
            f"{stats['density']:.2f}",
            f"{part.community_count}",
            f"{part.modularity:.2f}",
            avg_pd, sd_pd,
        ))
    return rows


_STRUCTURE_COLUMNS = ("Window", "Nodes", "Edges", "CC", "Avg. SPL", "Avg. Degree",
                      "Avg. Clustering", "Density", "Communities", "Mod.",
                      "Avg. PD", "SD PD")


def render_report(kind: str, config: PipelineConfig) -> ReportTable:
    """Paper-style summary tables over the pipeline's on-disk artifacts."""
    if kind == "datasets":
        rows = []
        for spec in config.windows:
            wdir = config.output_dir / spec.label
            data = ds.parse_canonical(wdir / "dataset.tsv")
            avg_pd, sd_pd = _pd_across_groups(wdir / "party.pd.tsv")
            rows.append((spec.label, f"{len(data.sessions)}", f"{len(data.records)}",
                         f"{len(set(data.members.values()))}", f"{len(data.members)}",
                         avg_pd, sd_pd))
        return ReportTable(("Window", "Sessions", "Votes", "Parties", "Members",
                            "Avg. PD", "SD PD"), tuple(rows))
    if kind in ("ideological", "polarized"):
        return ReportTable(_STRUCTURE_COLUMNS, tuple(_structure_rows(config, kind)))
    if kind == "temporal":
        path = config.output_dir / "temporal.tsv"
        if not path.exists():
            return ReportTable(("Windows", "Persistence", "NMI"), ())
        rows = []
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            a, b, pers, score = line.split("\t")
            rows.append((f"{a}-{b}", f"{100 * float(pers):.2f}%", f"{float(score):.2f}"))
        return ReportTable(("Windows", "Persistence", "NMI"), tuple(rows))
    raise ValueError(f"unknown report kind {kind!r}")
