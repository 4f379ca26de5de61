import random

import pytest

from qfpuzzles.constructions import full_shift_puzzle, golden_mean_puzzle
from qfpuzzles.graphs import (
    Edge,
    GraphError,
    GraphTruncation,
    avoiding_path_counts,
    based_loop_counts,
    complete_graph,
    from_spec,
    gamma_n,
    loop_graph,
    path_count_table,
    periodic_point_counts,
    sft_graph,
    two_hub_graph,
)
from qfpuzzles.puzzle import PuzzleError


def matrix_power_traces(matrix, n_max):
    """Independent big-int oracle: traces of adjacency powers."""
    d = len(matrix)
    power = [[1 if r == c else 0 for c in range(d)] for r in range(d)]
    traces = []
    for _ in range(n_max):
        power = [
            [sum(power[r][k] * matrix[k][c] for k in range(d)) for c in range(d)]
            for r in range(d)
        ]
        traces.append(sum(power[r][r] for r in range(d)))
    return traces


def brute_walk_counts(g, start, end, length):
    """Independent DFS walk counter over explicit unit edges."""
    adj = {}
    for e in g.edges:
        assert e.length == 1
        adj.setdefault(e.src, []).extend([e.dst] * e.multiplicity)
    total = 0
    stack = [(start, 0)]
    while stack:
        v, steps = stack.pop()
        if steps == length:
            total += v == end
            continue
        for w in adj.get(v, []):
            stack.append((w, steps + 1))
    return total


def test_complete_graph_shape_and_counts():
    k3 = complete_graph(3)
    assert len(k3.edges) == 9
    assert periodic_point_counts(k3, 6) == [3**n for n in range(1, 7)]
    k1 = complete_graph(1)
    assert periodic_point_counts(k1, 4) == [1, 1, 1, 1]


def test_complete_graph_counts_match_matrix_oracle():
    k2 = complete_graph(2)
    assert periodic_point_counts(k2, 8) == matrix_power_traces([[1, 1], [1, 1]], 8)


def test_sft_graph_golden_mean_lucas():
    g = sft_graph([[1, 1], [1, 0]])
    assert periodic_point_counts(g, 5) == matrix_power_traces([[1, 1], [1, 0]], 5)
    assert periodic_point_counts(g, 5) == [1, 3, 4, 7, 11]


def test_sft_graph_identity_and_zero():
    ident = sft_graph([[1, 0], [0, 1]])
    assert periodic_point_counts(ident, 4) == [2, 2, 2, 2]
    zero = sft_graph([[0, 0], [0, 0]])
    assert periodic_point_counts(zero, 4) == [0, 0, 0, 0]


def test_loop_graph_single_self_loop():
    g = loop_graph([1])
    assert periodic_point_counts(g, 5) == [1, 1, 1, 1, 1]
    assert based_loop_counts(g, "a", 5) == [1, 1, 1, 1, 1]


def test_loop_graph_two_two_loops():
    g = loop_graph([0, 2])
    loops = based_loop_counts(g, "a", 8)
    assert loops == [0, 2, 0, 4, 0, 8, 0, 16]
    explicit = g.materialize()
    assert based_loop_counts(explicit, "a", 8) == loops
    for n in (2, 4, 6):
        assert brute_walk_counts(explicit, "a", "a", n) == loops[n - 1]


def test_materialize_size_guard():
    g = loop_graph([0, 0, 0, 0, 0, 1000])
    with pytest.raises(GraphError):
        g.materialize(max_vertices=100)


def test_two_hub_identity_asserted_on_construction():
    g = two_hub_graph([1, 1], [0, 2], [0, 1], [0, 0, 0, 1], 10)
    assert g.completeness_bound == 10
    assert ("a", "b") == g.distinguished


def test_two_hub_excursion_counts():
    # No b-loops, single a->b and b->a paths: excursions add one length-2
    # first return on top of the a-loops.
    g = two_hub_graph([1, 0], [0, 0], [1], [1], 8)
    first = avoiding_path_counts(g, "a", "a", {"a"}, 8)
    assert first == [1, 1, 0, 0, 0, 0, 0, 0]


def test_two_hub_without_transitions_reduces_to_loop_graph():
    g = two_hub_graph([1, 2], [0, 3], [], [], 8)
    assert avoiding_path_counts(g, "a", "a", {"a"}, 8) == [1, 2, 0, 0, 0, 0, 0, 0]
    loops_hub = based_loop_counts(g, "a", 8)
    loops_plain = based_loop_counts(loop_graph([1, 2]), "a", 8)
    assert loops_hub == loops_plain


def test_gamma_n_full_shift_is_complete():
    p = full_shift_puzzle(3)
    g = gamma_n(p, 1)
    assert sorted(g.vertices) == ["0", "1"]
    assert sorted((e.src, e.dst) for e in g.edges) == [
        ("0", "0"), ("0", "1"), ("1", "0"), ("1", "1"),
    ]


def test_gamma_n_golden_mean_misses_forbidden_edge():
    p = golden_mean_puzzle(3)
    g = gamma_n(p, 1)
    assert sorted((e.src, e.dst) for e in g.edges) == [("0", "0"), ("0", "1"), ("1", "0")]


def test_gamma_n_needs_next_level():
    p = golden_mean_puzzle(3)
    with pytest.raises(PuzzleError):
        gamma_n(p, 3)


def test_avoiding_path_counts_k3():
    k3 = complete_graph(3)
    counts = avoiding_path_counts(k3, "0", "0", {"0"}, 8)
    assert counts == [1] + [2 ** (k - 1) for k in range(2, 9)]


def test_avoiding_path_counts_brute_cross_check():
    rng = random.Random(3)
    for _ in range(10):
        d = rng.randint(2, 4)
        matrix = [[rng.randint(0, 1) for _ in range(d)] for _ in range(d)]
        g = sft_graph(matrix)
        if not g.edges:
            continue
        avoid = {g.vertices[0]}
        counts = avoiding_path_counts(g, g.vertices[0], g.vertices[0], avoid, 5)
        explicit = g.materialize()
        for n in range(1, 6):
            walks = 0
            stack = [(g.vertices[0], 0)]
            adj = {}
            for e in explicit.edges:
                adj.setdefault(e.src, []).extend([e.dst] * e.multiplicity)
            while stack:
                v, steps = stack.pop()
                if steps == n:
                    walks += v == g.vertices[0]
                    continue
                if steps > 0 and v in avoid:
                    continue
                for w in adj.get(v, []):
                    stack.append((w, steps + 1))
            assert walks == counts[n - 1]


def test_periodic_counts_on_bundles_match_explicit():
    rng = random.Random(5)
    for _ in range(10):
        f = [rng.randint(0, 2) for _ in range(rng.randint(1, 4))]
        if not any(f):
            continue
        g = loop_graph(f)
        compact = periodic_point_counts(g, 7)
        explicit = periodic_point_counts(g.materialize(), 7)
        assert compact == explicit


def test_graph_json_roundtrip():
    g = two_hub_graph([1], [0, 1], [1], [1], 6)
    again = from_spec(g.to_json())
    assert again.vertices == g.vertices
    assert again.edges == g.edges
    assert again.completeness_bound == g.completeness_bound


def test_from_spec_kinds():
    assert len(from_spec({"kind": "complete", "d": 4}).edges) == 16
    assert from_spec({"kind": "adjacency", "matrix": [[1]]}).vertices == ("0",)
    assert from_spec({"kind": "loop_graph", "f": [0, 2]}).completeness_bound == 2
    hub = from_spec({"kind": "two_hub", "a": [1], "b": [], "s": [1], "t": [1], "bound": 6})
    assert set(hub.distinguished) == {"a", "b"}
    with pytest.raises(GraphError):
        from_spec({"kind": "mystery"})


def test_duplicate_edges_rejected():
    with pytest.raises(GraphError):
        GraphTruncation(("a",), (Edge("a", "a", 1, 1), Edge("a", "a", 1, 2)))


def test_dot_export_mentions_vertices_and_bundles():
    g = loop_graph([0, 3])
    dot = g.to_dot()
    assert '"a"' in dot and "len 2 x3" in dot


def test_path_count_table_identity_row():
    k2 = complete_graph(2)
    table = path_count_table(k2, 3)
    assert table[0]["0"]["0"] == 1 and table[0]["0"]["1"] == 0
    assert table[3]["0"]["1"] == 4
