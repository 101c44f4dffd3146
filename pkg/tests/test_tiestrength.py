import itertools
import random

import networkx as nx
import pytest

from votenet.netbuild import SimilarityGraph
from votenet.tiestrength import (
    SweepCurve,
    SweepPoint,
    ThresholdSelectionError,
    classify_ties,
    neighborhood_overlap,
    read_sweep,
    select_threshold,
    strong_tie_subgraph,
    sweep_range,
    threshold_sweep,
    write_sweep,
)


def make_graph(edges):
    g = nx.Graph()
    for u, v in edges:
        g.add_edge(u, v, weight=1.0, co_attendance=1)
    return SimilarityGraph(g)


def complete(n):
    return make_graph(itertools.combinations([f"n{i}" for i in range(n)], 2))


def test_triangle_overlap_one():
    g = complete(3)
    assert neighborhood_overlap(g, "n0", "n1") == 1.0


def test_path_overlap_zero():
    g = make_graph([("a", "b"), ("b", "c")])
    assert neighborhood_overlap(g, "a", "b") == 0.0


def test_four_cycle_and_chord():
    cycle = make_graph([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    assert neighborhood_overlap(cycle, "a", "b") == 0.0
    chorded = make_graph([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c")])
    assert neighborhood_overlap(chorded, "a", "b") == 0.5


def test_k4_overlap_one_everywhere():
    g = complete(4)
    for u, v in g.graph.edges:
        assert neighborhood_overlap(g, u, v) == 1.0


def test_isolated_pair_overlap_zero():
    g = make_graph([("a", "b")])
    assert neighborhood_overlap(g, "a", "b") == 0.0


def test_overlap_symmetric():
    g = make_graph([("a", "b"), ("b", "c"), ("c", "a"), ("c", "d"), ("b", "d")])
    for u, v in g.graph.edges:
        assert neighborhood_overlap(g, u, v) == neighborhood_overlap(g, v, u)


def test_overlap_missing_edge():
    g = make_graph([("a", "b"), ("b", "c")])
    with pytest.raises(KeyError):
        neighborhood_overlap(g, "a", "c")


def test_threshold_zero_all_strong():
    g = make_graph([("a", "b"), ("b", "c"), ("c", "d")])
    t = classify_ties(g, 0.0)
    assert set(t.labels.values()) == {"strong"}


def test_threshold_one_non_clique_has_weak():
    g = make_graph([("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")])
    t = classify_ties(g, 1.0)
    assert "weak" in t.labels.values()


def test_boundary_overlap_equal_threshold_is_strong():
    chorded = make_graph([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c")])
    t = classify_ties(chorded, 0.5)
    assert t.labels[("a", "b")] == "strong"  # overlap exactly 0.5


def test_classification_monotone_in_threshold():
    rng = random.Random(7)
    g = make_graph([(f"u{rng.randrange(10)}", f"v{rng.randrange(10)}")
                    for _ in range(25)])
    prev = None
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        strong = set(classify_ties(g, t).strong_edges())
        if prev is not None:
            assert strong <= prev
        prev = strong


def test_strong_subgraph_identity_and_annihilation():
    g = complete(4)
    all_strong = classify_ties(g, 0.0)
    assert set(strong_tie_subgraph(g, all_strong).graph.edges) == set(g.graph.edges)
    path = make_graph([("a", "b"), ("b", "c")])
    all_weak = classify_ties(path, 0.5)
    empty = strong_tie_subgraph(path, all_weak)
    assert empty.node_count == 0 and empty.edge_count == 0


def test_strong_subgraph_preserves_edge_data():
    g = complete(3)
    g.graph["n0"]["n1"]["weight"] = 0.77
    g.graph["n0"]["n1"]["co_attendance"] = 9
    sub = strong_tie_subgraph(g, classify_ties(g, 0.5))
    assert sub.graph["n0"]["n1"] == {"weight": 0.77, "co_attendance": 9}


def test_overlap_uses_full_topology_not_recomputed():
    # bridge b-c is weak at 0.5; a-b stays strong because its overlap was
    # computed before the bridge was removed
    g = make_graph([("a", "b"), ("b", "x"), ("a", "x"), ("b", "c"),
                    ("c", "d"), ("d", "y"), ("c", "y")])
    t = classify_ties(g, 0.4)
    assert t.labels[("b", "c")] == "weak"
    assert t.labels[("a", "b")] == "strong"


def test_sweep_monotone_membership():
    rng = random.Random(13)
    g = make_graph([(f"u{rng.randrange(12)}", f"v{rng.randrange(12)}")
                    for _ in range(30)])
    curve = threshold_sweep(g, [0.0, 0.2, 0.4, 0.6, 0.8, 1.0], seed=0)
    retained = [p.retained_members for p in curve.points]
    assert retained == sorted(retained, reverse=True)
    assert curve.points[0].retained_members == g.node_count


def test_sweep_requires_increasing_thresholds():
    g = complete(3)
    with pytest.raises(ValueError):
        threshold_sweep(g, [0.5, 0.5], seed=0)


def test_select_threshold_rule():
    curve = SweepCurve((SweepPoint(0.2, 0.3, 100), SweepPoint(0.5, 0.6, 60),
                        SweepPoint(0.8, 0.7, 20)))
    assert select_threshold(curve, base_node_count=100, min_retained_fraction=0.5) == 0.5


def test_select_threshold_single_point():
    curve = SweepCurve((SweepPoint(0.3, 0.1, 10),))
    assert select_threshold(curve, base_node_count=10) == 0.3


def test_select_threshold_tie_prefers_smaller():
    curve = SweepCurve((SweepPoint(0.2, 0.6, 80), SweepPoint(0.4, 0.6, 70)))
    assert select_threshold(curve, base_node_count=100) == 0.2


def test_select_threshold_no_eligible_point():
    curve = SweepCurve((SweepPoint(0.9, 0.9, 5),))
    with pytest.raises(ThresholdSelectionError):
        select_threshold(curve, base_node_count=100)


def test_sweep_roundtrip(tmp_path):
    g = complete(5)
    curve = threshold_sweep(g, [0.0, 0.5, 1.0], seed=0)
    write_sweep(curve, tmp_path / "sweep.tsv")
    back = read_sweep(tmp_path / "sweep.tsv")
    assert [(p.threshold, p.retained_members) for p in back.points] == \
        [(p.threshold, p.retained_members) for p in curve.points]
    for a, b in zip(back.points, curve.points):
        assert a.modularity == pytest.approx(b.modularity, abs=1e-9)


def test_sweep_range_grid():
    grid = sweep_range(0.0, 1.0, 0.05)
    assert grid[0] == 0.0 and grid[-1] == 1.0 and len(grid) == 21
    assert sweep_range(0.4, 0.55, 0.05) == [0.4, 0.45, 0.5, 0.55]
