"""Weighted voting-similarity graphs: construction, filtering, statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import networkx as nx
import numpy as np

from . import instrumentation
from .dataset import VoteDataset, VoteOption

_OPTION_CODE = {VoteOption.YES: 0, VoteOption.NO: 1, VoteOption.OBSTRUCTION: 2}


@dataclass
class SimilarityGraph:
    """Undirected weighted graph over members.

    Nodes carry a ``party`` attribute; edges carry ``weight`` (agreement
    ratio in [0, 1]) and ``co_attendance`` (number of co-attended sessions).
    Treated as immutable: filtering operations return new instances.
    """

    graph: nx.Graph
    window_label: str = ""

    @property
    def node_count(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def edge_count(self) -> int:
        return self.graph.number_of_edges()

    def weights(self) -> list[float]:
        return [w for _, _, w in self.graph.edges(data="weight")]

    def edges(self) -> Iterator[tuple[str, str, float, int]]:
        for u, v, data in self.graph.edges(data=True):
            yield u, v, data["weight"], data["co_attendance"]


@dataclass(frozen=True)
class GraphStats:
    node_count: int
    edge_count: int
    connected_components: int
    avg_shortest_path: float
    avg_degree: float
    clustering_coefficient: float  # global transitivity (headline value)
    avg_local_clustering: float
    density: float


def build_graph(d: VoteDataset, chunk_cells: int = 8_000_000) -> SimilarityGraph:
    """Build the similarity graph for one window.

    Edge weight for a member pair = (#co-attended sessions with identical
    option) / (#co-attended sessions); pairs that never co-attend get no
    edge. Members without any edge appear as isolated nodes.
    """
    members = sorted(d.members)
    if len(members) < 2:
        raise ValueError("need at least 2 members to build a similarity graph")
    sessions = list(d.sessions)
    midx = {m: i for i, m in enumerate(members)}
    sidx = {s: i for i, s in enumerate(sessions)}
    codes = np.full((len(members), max(len(sessions), 1)), -1, dtype=np.int8)
    for r in d.records:
        if r.option.counted:
            instrumentation.observe(r.option)
            codes[midx[r.member_id], sidx[r.session_id]] = _OPTION_CODE[r.option]

    n = len(members)
    agree = np.zeros((n, n), dtype=np.int64)
    co = np.zeros((n, n), dtype=np.int64)
    step = max(1, chunk_cells // (n * n))
    for s0 in range(0, codes.shape[1], step):
        c = codes[:, s0:s0 + step]
        present = c >= 0
        both = present[:, None, :] & present[None, :, :]
        eq = (c[:, None, :] == c[None, :, :]) & both
        agree += eq.sum(axis=-1, dtype=np.int64)
        co += both.sum(axis=-1, dtype=np.int64)

    g = nx.Graph()
    for m in members:
        g.add_node(m, party=d.members[m])
    iu, ju = np.triu_indices(n, k=1)
    mask = co[iu, ju] > 0
    for i, j in zip(iu[mask], ju[mask]):
        c_ij = int(co[i, j])
        g.add_edge(members[i], members[j],
                   weight=int(agree[i, j]) / c_ij, co_attendance=c_ij)
    return SimilarityGraph(g, d.window_label)


def weight_distribution(g: SimilarityGraph) -> list[tuple[float, float]]:
    """Empirical CDF of edge weights: sorted (weight, cumulative fraction)."""
    weights = sorted(g.weights())
    if not weights:
        raise ValueError("graph has no edges")
    n = len(weights)
    points: list[tuple[float, float]] = []
    for i, w in enumerate(weights, start=1):
        if i == n or weights[i] != w:
            points.append((w, i / n))
    return points


def nearest_rank_percentile(values: Iterable[float], percentile: float) -> float:
    """Percentile cutoff by rank on the sorted multiset.

    Returns the value at rank floor(p/100 * n) + 1, i.e. the smallest value
    of the retained top (100-p)% block, so strictly-below removal drops at
    most floor(p/100 * n) values.
    """
    ordered = sorted(values)
    if not ordered:
        raise ValueError("empty value set")
    rank = math.floor(percentile / 100.0 * len(ordered)) + 1
    return ordered[min(rank, len(ordered)) - 1]


def percentile_filter(g: SimilarityGraph, percentile: float) -> SimilarityGraph:
    """Drop edges strictly below the nearest-rank weight percentile.

    Ties at the cutoff survive. Nodes left isolated are pruned (single-node
    communities are excluded from all downstream analyses).
    """
    if not 0 < percentile < 100:
        raise ValueError(f"percentile must be in (0, 100), got {percentile}")
    cutoff = nearest_rank_percentile(g.weights(), percentile)
    out = g.graph.copy()
    out.remove_edges_from([(u, v) for u, v, w in out.edges(data="weight") if w < cutoff])
    out.remove_nodes_from([v for v, deg in out.degree() if deg == 0])
    return SimilarityGraph(out, g.window_label)


def graph_stats(g: SimilarityGraph, spl_mode: str = "connected_pairs") -> GraphStats:
    """Topological summary of a graph.

    Shortest paths are unweighted hop counts. spl_mode "connected_pairs"
    averages over all connected node pairs; "per_component" averages the
    per-component means (components of ≥2 nodes).
    """
    graph = g.graph
    n = graph.number_of_nodes()
    if n < 2:
        raise ValueError("need at least 2 nodes for graph statistics")
    e = graph.number_of_edges()
    components = list(nx.connected_components(graph))
    if spl_mode == "connected_pairs":
        total = pairs = 0
        for _, dists in nx.all_pairs_shortest_path_length(graph):
            total += sum(dists.values())
            pairs += len(dists) - 1  # drop self-distance
        spl = (total / pairs) if pairs else 0.0
    elif spl_mode == "per_component":
        means = [nx.average_shortest_path_length(graph.subgraph(c))
                 for c in components if len(c) >= 2]
        spl = sum(means) / len(means) if means else 0.0
    else:
        raise ValueError(f"unknown spl_mode {spl_mode!r}")
    return GraphStats(
        node_count=n,
        edge_count=e,
        connected_components=len(components),
        avg_shortest_path=spl,
        avg_degree=2.0 * e / n,
        clustering_coefficient=nx.transitivity(graph),
        avg_local_clustering=nx.average_clustering(graph),
        density=2.0 * e / (n * (n - 1)),
    )


# --- edge-list / node-list persistence --------------------------------------

def write_graph(g: SimilarityGraph, prefix: str | Path, gexf: bool = False) -> None:
    """Write ``<prefix>.edges.tsv`` and ``<prefix>.nodes.tsv`` (optionally GEXF)."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    with open(f"{prefix}.edges.tsv", "w", encoding="utf-8") as fh:
        fh.write(f"# window: {g.window_label}\n")
        for u, v in sorted(tuple(sorted(e)) for e in g.graph.edges):
            data = g.graph[u][v]
            fh.write(f"{u}\t{v}\t{data['weight']:.12g}\t{data['co_attendance']}\n")
    with open(f"{prefix}.nodes.tsv", "w", encoding="utf-8") as fh:
        fh.write(f"# window: {g.window_label}\n")
        for node in sorted(g.graph.nodes):
            fh.write(f"{node}\t{g.graph.nodes[node].get('party', '')}\n")
    if gexf:
        nx.write_gexf(g.graph, f"{prefix}.gexf")


def read_graph(prefix: str | Path) -> SimilarityGraph:
    prefix = Path(prefix)
    graph = nx.Graph()
    window = ""
    for line in Path(f"{prefix}.nodes.tsv").read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.lower().startswith("window:"):
                window = body.split(":", 1)[1].strip()
            continue
        fields = line.split("\t")
        graph.add_node(fields[0], party=fields[1] if len(fields) > 1 else "")
    for line in Path(f"{prefix}.edges.tsv").read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        u, v, w, c = line.split("\t")
        graph.add_edge(u, v, weight=float(w), co_attendance=int(c))
    return SimilarityGraph(graph, window)


def write_dot(g: SimilarityGraph, path: str | Path) -> None:
    """Minimal DOT export for visualization tools."""
    lines = ["graph votenet {"]
    for node in sorted(g.graph.nodes):
        party = g.graph.nodes[node].get("party", "")
        lines.append(f'  "{node}" [party="{party}"];')
    for u, v in sorted(tuple(sorted(e)) for e in g.graph.edges):
        lines.append(f'  "{u}" -- "{v}" [weight={g.graph[u][v]["weight"]:.6g}];')
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
