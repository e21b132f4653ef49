import itertools
from fractions import Fraction

import networkx as nx
import pytest
import sympy
from hypothesis import given, strategies as st

from qhd.graph import (GraphError, PlumbingTree, TreeConstraints, abc_generate, blowdown,
                       blows_down_to_empty, canonical_form, canonical_tree, contract_edge, delta,
                       enumerate_trees, fpp_graph, hj_expansion, hj_value, linear_from_fraction,
                       path_between, stats, tree_shapes)


def to_nx(tree):
    g = nx.Graph()
    for v, e in tree.vertices:
        g.add_node(v, e=e)
    g.add_edges_from(tree.edge_list())
    return g


def det_of(tree):
    ids = tree.ids
    m = sympy.zeros(len(ids))
    for i, v in enumerate(ids):
        m[i, i] = tree.framing(v)
        for j, w in enumerate(ids):
            if w in tree.neighbors(v):
                m[i, j] = 1
    return m.det()


def test_build_rejects_cycles_and_unknown_vertices():
    with pytest.raises(GraphError):
        PlumbingTree.build([("a", -2), ("b", -2), ("c", -2)], [("a", "b"), ("b", "c"), ("c", "a")])
    with pytest.raises(GraphError):
        PlumbingTree.build([("a", -2)], [("a", "z")])
    with pytest.raises(GraphError):
        PlumbingTree.build([("a", -2), ("b", -2)], [])


def test_json_round_trip_and_dot():
    t = fpp_graph(2)
    assert PlumbingTree.from_json(t.to_json()) == t
    dot = t.to_dot()
    assert dot.startswith("graph") and dot.count("--") == 7


def test_hj_examples():
    assert hj_expansion(9, 5) == [2, 5]
    assert hj_expansion(4, 1) == [4]
    assert hj_expansion(7, 3) == [3, 2, 2]


@given(st.lists(st.integers(2, 7), min_size=1, max_size=6))
def test_hj_round_trip(coeffs):
    x = hj_value(coeffs)
    assert hj_expansion(x.numerator, x.denominator) == coeffs


@pytest.mark.parametrize("p,q", [(p, q) for p in range(2, 8) for q in range(1, p)
                                 if sympy.gcd(p, q) == 1])
def test_rational_blowdown_graph_det(p, q):
    t = linear_from_fraction(p, q)
    assert abs(det_of(t)) == p * p
    coeffs = [-t.framing(v) for v in t.ids]
    assert hj_value(coeffs) == Fraction(p * p, p * q - 1)


def test_fpp_graph_shape():
    t = fpp_graph(3)
    assert len(t) == 1 + 13 * 2
    assert t.framing("node") == -14
    assert abs(det_of(fpp_graph(2))) == 576


def test_delta_and_stats():
    assert delta(PlumbingTree.linear([-4])) == 2
    assert delta(PlumbingTree.linear([-5, -2])) == 2
    assert delta(fpp_graph(2)) == -1
    s = stats(fpp_graph(2), "node")
    # deg + e = -1: the node of fpp(2) is not large
    assert s.is_node and not s.is_large_node and s.degree == 7
    assert stats(fpp_graph(3), "node").degree + fpp_graph(3).framing("node") == -1
    assert stats(PlumbingTree.linear([-4]), "v1").is_large_node


def test_path_and_contract():
    t = PlumbingTree.linear([-2, -3, -4])
    assert path_between(t, "v1", "v3") == ["v1", "v2", "v3"]
    c = contract_edge(t, ("v2", "v3"), -5)
    assert list(c.ids) == ["v1", "v2"] and c.framing("v2") == -5
    with pytest.raises(GraphError):
        contract_edge(t, ("v1", "v3"), -1)


def test_blowdown():
    t = PlumbingTree.linear([-2, -1, -2])
    b = blowdown(t, "v2")
    assert list(b.ids) == ["v1", "v3"] and b.framing("v1") == -1
    # -2 -1 -2 -> -1 -1 -> 0: stuck at a 0-curve
    assert not blows_down_to_empty(t)
    assert blows_down_to_empty(PlumbingTree.linear([-2, -1]))
    assert not blows_down_to_empty(PlumbingTree.linear([-2]))


def test_abc_blowup_framings():
    from qhd.graph import abc_blowups
    tree, cur = abc_blowups("C", (("e", "x1"), ("e", "c"), "v"))
    # edge c-x1, then edge u1-c, then the vertex u2 itself
    assert cur == "u3" and tree.framing("u3") == -1
    assert tree.framing("x1") == -3 and tree.framing("c") == -3
    assert tree.framing("u1") == -2 and tree.framing("u2") == -2
    assert tree.neighbors("u3") == ["u2"]
    for fam, final in zip("ABC", (-4, -3, -2)):
        assert abc_generate(fam, ("e1",)).framing("u1") == final
    with pytest.raises(GraphError):
        abc_blowups("C", (("e", "x2"), ("e", "x3")))


def test_tree_shape_counts():
    # unlabelled trees on n vertices: 1, 1, 1, 2, 3, 6, 11, 23, 47
    counts = [len(tree_shapes(n)) for n in range(1, 10)]
    assert counts == [1, 1, 1, 2, 3, 6, 11, 23, 47]
    assert counts == [sum(1 for _ in nx.nonisomorphic_trees(n)) if n > 1 else 1
                      for n in range(1, 10)]


@st.composite
def random_tree(draw):
    n = draw(st.integers(1, 8))
    fr = draw(st.lists(st.integers(-4, -1), min_size=n, max_size=n))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    perm = draw(st.permutations(list(range(n))))
    verts = [(f"x{perm[i]}", fr[i]) for i in range(n)]
    edges = [(f"x{perm[i]}", f"x{perm[p]}") for i, p in zip(range(1, n), parents)]
    return PlumbingTree.build(verts, edges)


@given(random_tree(), random_tree())
def test_canonical_form_decides_isomorphism(a, b):
    same = nx.is_isomorphic(to_nx(a), to_nx(b), node_match=lambda x, y: x["e"] == y["e"])
    assert (canonical_form(a) == canonical_form(b)) == same


@given(random_tree())
def test_canonical_tree_is_isomorphic(a):
    c = canonical_tree(a)
    assert canonical_form(c) == canonical_form(a)
    assert list(c.ids) == [f"v{i + 1}" for i in range(len(a))]


def test_enumeration_matches_networkx_dedupe():
    cons = TreeConstraints.uniform(5, (-2, -3))
    ours = [canonical_form(t) for t in enumerate_trees(cons)]
    assert len(ours) == len(set(ours))
    reps = []
    for n in range(1, 6):
        shapes = [nx.empty_graph(1)] if n == 1 else list(nx.nonisomorphic_trees(n))
        for g in shapes:
            nodes = list(g.nodes)
            for combo in itertools.product((-2, -3), repeat=n):
                h = g.copy()
                nx.set_node_attributes(h, dict(zip(nodes, combo)), "e")
                if not any(nx.is_isomorphic(h, r, node_match=lambda x, y: x["e"] == y["e"])
                           for r in reps):
                    reps.append(h)
    assert len(ours) == len(reps)


def test_reduced_constraints():
    cons = TreeConstraints.reduced(7, min_nodes=1, max_nodes=1)
    for t in enumerate_trees(cons):
        for v in t.ids:
            d = t.degree(v)
            if d == 1:
                assert t.framing(v) == -2
            elif d == 2:
                assert t.framing(v) in (-2, -3)
            else:
                assert t.framing(v) == -d - 2
