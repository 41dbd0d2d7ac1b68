from __future__ import annotations

import math
import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from sparsekit.clustering import Clustering
from sparsekit.graph import EdgeSet, Graph
from sparsekit.verify import apsp, measure_stretch, sssp, verify_stretch, verify_stretch_friendly

from conftest import cycle_graph, gnp_graph, path_graph


def brute_force_distances(g: Graph) -> list[list[float]]:
    """Exhaustive enumeration over all simple paths (oracle, n <= 10)."""
    assert g.n <= 10
    best = [[math.inf] * g.n for _ in range(g.n)]

    def dfs(start: int, node: int, weight: int, visited: set[int]):
        if weight < best[start][node]:
            best[start][node] = weight
        for eid in g.adj[node]:
            e = g.edges[eid]
            nxt = e.other(node)
            if nxt not in visited:
                visited.add(nxt)
                dfs(start, nxt, weight + e.w, visited)
                visited.remove(nxt)

    for s in range(g.n):
        best[s][s] = 0
        dfs(s, s, 0, {s})
    return best


def test_apsp_path():
    g = path_graph(3, [1, 2])
    d = apsp(g)
    assert d[0][2] == 3 and d[2][0] == 3 and d[0][1] == 1


def test_apsp_single_node():
    g = Graph(1, [])
    assert apsp(g) == [[0]]


def test_apsp_matches_brute_force_random():
    for seed in range(12):
        g = gnp_graph(8, 0.4, seed=seed, weighted=True, max_weight=12)
        oracle = brute_force_distances(g)
        d = apsp(g)
        for u in range(g.n):
            for v in range(g.n):
                assert d[u][v] == oracle[u][v], (seed, u, v)


def test_apsp_ten_node_weighted_vs_oracle():
    g = gnp_graph(10, 0.45, seed=77, weighted=True, max_weight=20)
    assert apsp(g) == brute_force_distances(g)


def test_sssp_respects_edge_restrictions():
    g = cycle_graph(5)
    d = sssp(g, 0, edge_ids=[0, 1, 2, 3])  # cut the closing edge
    assert d[4] == 4


def test_verify_stretch_full_graph_is_one():
    g = gnp_graph(15, 0.4, seed=9, weighted=True)
    rep = verify_stretch(g, EdgeSet(g, frozenset(range(g.m))), 1)
    assert rep.ok and rep.worst_ratio == 1


def test_verify_stretch_four_cycle_three_edges():
    g = cycle_graph(4)
    rep = verify_stretch(g, EdgeSet(g, frozenset([0, 1, 2])), 3)
    assert rep.ok and rep.worst_ratio == Fraction(3)
    assert not verify_stretch(g, EdgeSet(g, frozenset([0, 1, 2])), 2).ok


def test_verify_stretch_disconnection_reports_inf():
    g = path_graph(4)
    rep = verify_stretch(g, EdgeSet(g, frozenset([0, 2])), 100)
    assert not rep.ok and math.isinf(rep.worst_ratio) and rep.worst_edge == 1


@settings(deadline=None, max_examples=25)
@given(st.integers(0, 10**6))
def test_verify_stretch_identity_property(seed):
    g = gnp_graph(10, 0.35, seed=seed, weighted=bool(seed % 2), max_weight=30)
    assert verify_stretch(g, EdgeSet(g, frozenset(range(g.m))), 1).ok


def test_stretch_friendly_unweighted_any_clustering():
    g = gnp_graph(12, 0.4, seed=4)
    # grow arbitrary BFS clusters of size <= 3
    rng = random.Random(0)
    unused = set(range(g.n))
    parts = []
    while unused:
        root = min(unused)
        members = {root: root}
        frontier = [root]
        while frontier and len(members) < 3:
            x = frontier.pop()
            for eid in g.adj[x]:
                y = g.edges[eid].other(x)
                if y in unused and y not in members and len(members) < 3:
                    members[y] = x
                    frontier.append(y)
        unused -= set(members)
        parts.append((root, members))
    cl = Clustering.from_parent_maps(g, parts)
    assert verify_stretch_friendly(g, cl).ok


def test_stretch_friendly_star_cluster_ok():
    # hub-rooted star with unit tree weights; a heavy boundary edge is fine
    g = Graph(5, [(0, 1, 1), (0, 2, 1), (0, 3, 1), (3, 4, 5)])
    cl = Clustering.from_parent_maps(g, [(0, {0: 0, 1: 0, 2: 0, 3: 0}), (4, {4: 4})])
    assert verify_stretch_friendly(g, cl).ok


def test_stretch_friendly_violation_on_root_path():
    # path a-b-c with w(a,b)=3, w(b,c)=1, cluster rooted at c,
    # boundary edge at a of weight 2: a's root path holds the weight-3 edge.
    g = Graph(4, [(0, 1, 3), (1, 2, 1), (0, 3, 2)])
    cl = Clustering.from_parent_maps(g, [(2, {2: 2, 1: 2, 0: 1}), (3, {3: 3})])
    rep = verify_stretch_friendly(g, cl)
    assert not rep.ok
    cluster_id, graph_edge, tree_edge = rep.violation
    assert graph_edge == 2 and tree_edge == 0


def test_stretch_friendly_inside_edge_check():
    # triangle cluster: tree edges 0-1 (w=5), 1-2 (w=1); inside edge 0-2 w=2
    # has tree path 0-1-2 holding the weight-5 edge -> violation
    g = Graph(3, [(0, 1, 5), (1, 2, 1), (0, 2, 2)])
    cl = Clustering.from_parent_maps(g, [(1, {1: 1, 0: 1, 2: 1})])
    rep = verify_stretch_friendly(g, cl)
    assert not rep.ok and rep.violation[1] == 2


def test_stretch_friendly_edge_subset_restriction():
    g = Graph(3, [(0, 1, 5), (1, 2, 1), (0, 2, 2)])
    cl = Clustering.from_parent_maps(g, [(1, {1: 1, 0: 1, 2: 1})])
    assert verify_stretch_friendly(g, cl, edge_ids=[0, 1]).ok


def test_measure_stretch_zero_weight_edges():
    g = Graph(3, [(0, 1, 0), (1, 2, 4), (0, 2, 4)])
    ratio, _ = measure_stretch(g, frozenset([0, 1]))
    assert ratio == Fraction(1)  # edge (0,2): d_H = 0 + 4 = 4 = w
