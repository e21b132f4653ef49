import itertools

import pytest

from qhd.configuration import validate
from qhd.exact import matmul, transpose
from qhd.configuration import incidence_matrix
from qhd.graph import PlumbingTree, TreeConstraints, enumerate_trees, fpp_graph
from qhd.sandwich import (CurveSlot, PresentationError, SandwichPresentation, presentation_smooth,
                          star_instances, star_presentation)
from qhd.solver import SolveMode, brute_force_count, solve


def small_presentations(max_curves=6, max_size=4):
    cons = TreeConstraints.uniform(4, (-1, -2, -3, -4, -5, -6))
    for t in enumerate_trees(cons):
        for end in t.ids:
            try:
                p = presentation_smooth(t, end)
            except PresentationError:
                continue
            if 0 < len(p.curves) <= max_curves and max(p.sizes) <= max_size:
                yield p


def test_triangle_count():
    p = presentation_smooth(PlumbingTree.linear([-4]), "v1")
    res = solve(p, SolveMode(emit="count"))
    assert (res.canonical_count, res.labeled_count) == (1, 6)
    assert brute_force_count(p) == 6


def test_five_two_count():
    p = presentation_smooth(PlumbingTree.linear([-5, -2]), "v1")
    res = solve(p, SolveMode(emit="count"))
    assert res.labeled_count == brute_force_count(p) == 24


def test_completeness_against_brute_force():
    seen = 0
    for p in small_presentations():
        res = solve(p, SolveMode(emit="count"))
        assert res.labeled_count == brute_force_count(p), p.to_json()
        seen += 1
    assert seen > 20


def cusp_presentations():
    # hand-made Gram matrices with one or two cusp rows (sizes <= 4)
    base = PlumbingTree.linear([-2])
    cases = [
        ([3, 2, 2], ["cusp", "smooth", "smooth"], [[3, 2, 1], [2, 2, 1], [1, 1, 2]]),
        ([3, 3, 2], ["cusp", "cusp", "smooth"], [[3, 4, 1], [4, 3, 1], [1, 1, 2]]),
        ([4, 3, 2, 2], ["cusp", "smooth", "smooth", "smooth"],
         [[4, 3, 2, 2], [3, 3, 1, 1], [2, 1, 2, 1], [2, 1, 1, 2]]),
        ([3, 3], ["cusp", "cusp"], [[3, 5], [5, 3]]),
    ]
    for sizes, kinds, gram in cases:
        slots = tuple(CurveSlot("v1", s, k) for s, k in zip(sizes, kinds))
        yield SandwichPresentation(base, "v1", slots, tuple(map(tuple, gram)))


@pytest.mark.parametrize("p", list(cusp_presentations()))
def test_cusp_completeness(p):
    res = solve(p, SolveMode(emit="all"))
    assert res.labeled_count == brute_force_count(p)
    for c in res.solutions:
        assert validate(c, p).valid


def test_any_mu_against_brute_force():
    for fr in ([-4], [-3], [-2, -3]):
        t = PlumbingTree.linear(fr)
        for end in t.ids:
            try:
                p = presentation_smooth(t, end)
            except PresentationError:
                continue
            res = solve(p, SolveMode(mu0=False, emit="count"))
            assert res.labeled_count == brute_force_count(p, mu0=False)


def test_solutions_validate_and_reproduce_gram():
    for p in small_presentations():
        for c in solve(p, SolveMode(emit="all")).solutions:
            assert validate(c, p).valid
            inc = incidence_matrix(c)
            g = matmul(inc, transpose(inc))
            assert all(g[i][j] == p.gram[i][j] for i in range(len(g)) for j in range(len(g)) if i != j)


def test_no_solution_example():
    t = PlumbingTree.build([("c", -5), ("leaf1", -2), ("leaf2", -2), ("leaf3", -2)],
                           [("c", "leaf1"), ("c", "leaf2"), ("c", "leaf3")])
    res = solve(presentation_smooth(t, "leaf1"))
    assert res.status == "none" and res.complete


def test_fano_found():
    p = presentation_smooth(fpp_graph(2), "node")
    res = solve(p, SolveMode(timeout=60))
    assert res.status == "found"
    c = res.solutions[0]
    assert all(c.size(i) == 3 for i in range(7))
    assert all(c.intersection(i, j) == 1 for i, j in itertools.combinations(range(7), 2))


def test_timeout_reports_unknown():
    p = presentation_smooth(fpp_graph(3), "node")
    res = solve(p, SolveMode(emit="count", timeout=0.0))
    assert res.status == "timeout" and not res.complete


def test_identity_plus_all_ones_pattern():
    # the one-vertex cusp instance: every curve has its double point at its own point
    inst = star_instances("C6", 1)[0]
    res = solve(star_presentation(inst), SolveMode(emit="all"))
    assert res.canonical_count == 1
    inc = incidence_matrix(res.solutions[0])
    m = len(inc)
    assert sorted(map(sorted, inc)) == sorted(sorted([1] * (m - 1) + [2]) for _ in range(m))


def test_mode_validation():
    with pytest.raises(ValueError):
        SolveMode(emit="bogus")
