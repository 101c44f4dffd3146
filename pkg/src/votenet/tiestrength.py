"""Strong/weak tie classification via neighborhood overlap."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .community import louvain
from .netbuild import SimilarityGraph

EdgeKey = tuple[str, str]


class ThresholdSelectionError(ValueError):
    """No sweep point satisfies the retention constraint."""


@dataclass(frozen=True)
class TieClassification:
    overlap: dict[EdgeKey, float]
    labels: dict[EdgeKey, str]  # "strong" | "weak"
    threshold: float

    def strong_edges(self) -> list[EdgeKey]:
        return [e for e, lab in self.labels.items() if lab == "strong"]


@dataclass(frozen=True)
class SweepPoint:
    threshold: float
    modularity: float
    retained_members: int


@dataclass(frozen=True)
class SweepCurve:
    points: tuple[SweepPoint, ...]


def _edge_key(u: str, v: str) -> EdgeKey:
    return (u, v) if u <= v else (v, u)


def neighborhood_overlap(g: SimilarityGraph, u: str, v: str) -> float:
    """Shared neighbors of an edge's endpoints over their combined neighbors.

    Neighborhoods exclude the endpoints themselves; a pair with no other
    neighbor gets overlap 0.
    """
    if not g.graph.has_edge(u, v):
        raise KeyError(f"edge ({u!r}, {v!r}) not in graph")
    nu = set(g.graph.neighbors(u))
    nv = set(g.graph.neighbors(v))
    shared = (nu & nv) - {u, v}
    union = (nu | nv) - {u, v}
    return len(shared) / len(union) if union else 0.0


def classify_ties(g: SimilarityGraph, threshold: float) -> TieClassification:
    """Label every edge strong (overlap ≥ threshold) or weak.

    Overlaps are computed once on the full graph topology; they are not
    recomputed as edges get removed downstream.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    overlap: dict[EdgeKey, float] = {}
    labels: dict[EdgeKey, str] = {}
    for u, v in g.graph.edges:
        key = _edge_key(u, v)
        o = neighborhood_overlap(g, u, v)
        overlap[key] = o
        labels[key] = "strong" if o >= threshold else "weak"
    return TieClassification(overlap, labels, threshold)


def strong_tie_subgraph(g: SimilarityGraph, t: TieClassification) -> SimilarityGraph:
    """Keep only strong edges; prune nodes left isolated."""
    out = g.graph.copy()
    out.remove_edges_from([e for e, lab in t.labels.items() if lab == "weak"])
    out.remove_nodes_from([v for v, deg in out.degree() if deg == 0])
    return SimilarityGraph(out, g.window_label)


def threshold_sweep(g: SimilarityGraph, thresholds: Sequence[float],
                    seed: int = 0) -> SweepCurve:
    """Modularity/membership trade-off over a range of overlap thresholds."""
    thresholds = list(thresholds)
    if any(t2 <= t1 for t1, t2 in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be strictly increasing")
    points = []
    for t in thresholds:
        sub = strong_tie_subgraph(g, classify_ties(g, t))
        if sub.edge_count > 0:
            q = louvain(sub, seed=seed).modularity
        else:
            q = 0.0
        points.append(SweepPoint(t, q, sub.node_count))
    return SweepCurve(tuple(points))


def select_threshold(curve: SweepCurve, base_node_count: int,
                     min_retained_fraction: float = 0.5) -> float:
    """Pick the modularity-maximizing threshold subject to a retention floor.

    Ties break toward the smaller threshold.
    """
    if not curve.points:
        raise ValueError("empty sweep curve")
    floor = min_retained_fraction * base_node_count
    eligible = [p for p in curve.points if p.retained_members >= floor]
    if not eligible:
        raise ThresholdSelectionError(
            f"no sweep point retains >= {min_retained_fraction:.0%} of {base_node_count} "
            "members; pick an overlap threshold manually")
    best = max(eligible, key=lambda p: (p.modularity, -p.threshold))
    return best.threshold


def write_sweep(curve: SweepCurve, path: str | Path) -> None:
    lines = ["# threshold\tmodularity\tretained_members"]
    for p in curve.points:
        lines.append(f"{p.threshold:.6g}\t{p.modularity:.12g}\t{p.retained_members}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_sweep(path: str | Path) -> SweepCurve:
    points = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        t, q, r = line.split("\t")
        points.append(SweepPoint(float(t), float(q), int(r)))
    return SweepCurve(tuple(points))


def sweep_range(start: float, stop: float, step: float) -> list[float]:
    """Inclusive threshold grid, robust to float step accumulation."""
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(round((stop - start) / step))
    values = [round(start + i * step, 10) for i in range(n + 1)]
    return [v for v in values if 0.0 <= v <= 1.0]
