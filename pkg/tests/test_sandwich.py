import pytest

from qhd.configuration import Configuration, validate
from qhd.families import cl_config, reconstruct_graph, t_config
from qhd.graph import PlumbingTree, canonical_form, fpp_graph, linear_from_fraction
from qhd.sandwich import (STAR_FAMILIES, BlowupCluster, ClusterError, PresentationError,
                          SandwichPresentation, blowdown_cluster, gram_smooth,
                          noether_presentation_gram, presentation_smooth, required_counts,
                          scott_incidence, star_cluster, star_instances, star_matches_family,
                          star_presentation, switch_end, tilde_tree)
from qhd.solver import SolveMode, solve


def smooth_catalog():
    out = [PlumbingTree.linear(f) for f in ([-4], [-5, -2], [-2, -5], [-3, -3], [-6, -2, -2])]
    out += [fpp_graph(2), linear_from_fraction(7, 3)]
    out += [reconstruct_graph(c) for c in (cl_config(2, 2), cl_config(2, 3), t_config(2, 2, 2),
                                           t_config(-3, -2, -2))]
    return out


def ends(tree):
    return [v for v in tree.ids if -(tree.degree(v) + tree.framing(v)) >= 1]


def test_required_counts():
    t = PlumbingTree.linear([-5, -2])
    assert required_counts(t, "v1") == {"v1": 3, "v2": 1}
    assert required_counts(t, "v2") == {"v1": 4, "v2": 0}
    with pytest.raises(PresentationError):
        required_counts(PlumbingTree.linear([-1, -2]), "v1")


def test_presentation_gram_examples():
    p = presentation_smooth(PlumbingTree.linear([-4]), "v1")
    assert [list(r) for r in p.gram] == [[2, 1, 1], [1, 2, 1], [1, 1, 2]]
    p = presentation_smooth(PlumbingTree.linear([-5, -2]), "v1")
    assert list(p.sizes) == [2, 2, 2, 3]
    assert [list(r) for r in p.gram][3] == [1, 1, 1, 3]
    assert SandwichPresentation.from_json(p.to_json()) == p


def test_tilde_tree_blows_down_to_empty():
    from qhd.graph import blows_down_to_empty
    for t in smooth_catalog():
        for e in ends(t)[:2]:
            assert blows_down_to_empty(tilde_tree(presentation_smooth(t, e)))


def test_noether_gram_equals_path_gram():
    for t in smooth_catalog():
        for e in ends(t):
            p = presentation_smooth(t, e)
            assert noether_presentation_gram(p) == gram_smooth(p) == p.gram


def test_cluster_validation():
    with pytest.raises(ClusterError):
        BlowupCluster(("O", "p"), {"O": (), "p": ("q",)}, ())
    with pytest.raises(ClusterError):
        # three proximate points is impossible
        BlowupCluster(("O", "a", "b", "c"), {"O": (), "a": ("O",), "b": ("a", "O"),
                                             "c": ("O", "a", "b")}, ())


def test_blowdown_cluster_inverts_to_tree():
    p = presentation_smooth(PlumbingTree.linear([-5, -2]), "v1")
    t = tilde_tree(p)
    cl = blowdown_cluster(t, [f"~{i}" for i in range(4)])
    assert canonical_form(cl.to_tree()) == canonical_form(t)


# point counts and intersections of the star family curvettas
def table_value(a, b):
    ka, kb = a[0], b[0]
    if a == b:
        return {"L": 2, "S": 3, "G": 6}.get(ka) or 5 + int(a[1:].split("^")[0])
    pair = "".join(sorted(ka + kb))
    if pair == "LL":
        return 1
    if pair == "LS":
        return 1
    if pair == "SS":
        return 2
    if pair == "CL":
        return 2
    if pair == "CS":
        return 3
    if pair == "CC":
        i = int(a[1:].split("^")[0])
        j = int(b[1:].split("^")[0])
        return 6 + min(i, j)
    return None


@pytest.mark.parametrize("family", [f for f, v in STAR_FAMILIES.items() if not v[5]])
def test_star_gram_reproduces_table(family):
    checked = 0
    for n in range(1, 4):
        for inst in star_instances(family, n):
            pres = star_presentation(inst)
            labels = [c.label for c in pres.curves]
            for i, a in enumerate(labels):
                for j, b in enumerate(labels):
                    want = table_value(a, b)
                    if want is not None:
                        assert pres.gram[i][j] == want, (family, inst.counts, a, b)
                        checked += 1
            assert star_matches_family(inst)
            assert len(pres.curves) == inst.total_curves
    assert checked > 0


def test_degree_four_gamma_curves():
    for family in ("A^4", "B^4", "C^4"):
        for inst in star_instances(family, 2):
            pres = star_presentation(inst)
            labels = [c.label for c in pres.curves]
            gs = [i for i, x in enumerate(labels) if x.startswith("G")]
            cs = [i for i, x in enumerate(labels) if x.startswith("C")]
            for g in gs:
                assert pres.gram[g][g] == 6
                for h in gs:
                    if h != g:
                        assert pres.gram[g][h] == 7
                for c in cs:
                    assert pres.gram[g][c] == 6
            assert star_matches_family(inst)


def test_star_cluster_labels_and_kinds():
    inst = star_instances("C3", 2)[0]
    cluster, labels = star_cluster(inst)
    assert labels[:3] == ["L1", "L2", "L3"]
    pres = star_presentation(inst)
    kinds = {c.label[0]: c.kind for c in pres.curves}
    assert kinds == {"L": "smooth", "C": "cusp"}


def test_scott_incidence():
    for t in smooth_catalog():
        e = ends(t)[0]
        p = presentation_smooth(t, e)
        c = scott_incidence(p)
        assert validate(c, p).valid
        assert c.mu == len(t)


def apex():
    p = presentation_smooth(PlumbingTree.linear([-5, -2]), "v1")
    c = Configuration.from_sets([{"1", "4"}, {"2", "4"}, {"3", "4"}, {"1", "2", "3"}],
                                vertices=["v1", "v1", "v1", "v2"])
    return p, c


def test_switch_end_example_and_involution():
    p, c = apex()
    assert validate(c, p).valid
    p2, c2 = switch_end(p, c, "v2", 3)
    assert p2.end == "v2" and validate(c2, p2).valid
    p3, c3 = switch_end(p2, c2, "v1", 3)
    assert c3 == c and p3 == p


def test_switch_end_errors():
    p, c = apex()
    with pytest.raises(PresentationError):
        switch_end(p, c, "v2", 0)
    with pytest.raises(PresentationError):
        switch_end(p, c, "v1", 0)


def test_switch_involution_on_solver_outputs():
    from math import gcd
    graphs = smooth_catalog() + [linear_from_fraction(p, q) for p in range(2, 9)
                                 for q in range(1, p) if gcd(p, q) == 1]
    graphs += [reconstruct_graph(c) for c in (cl_config(-3, 2), cl_config(2, 2, "star", 2))]
    done = 0
    for t in graphs:
        if len(t) > 6:
            continue
        for v in ends(t):
            p = presentation_smooth(t, v)
            res = solve(p, SolveMode(emit="all", timeout=20))
            for conf in res.solutions[:40]:
                for w in ends(t):
                    if w == v or t.degree(w) + t.framing(w) >= 0:
                        continue
                    k = next(i for i, s in enumerate(p.curves) if s.vertex == w)
                    p2, c2 = switch_end(p, conf, w, k)
                    p3, c3 = switch_end(p2, c2, v, k)
                    assert (p3, c3) == (p, conf)
                    done += 1
    assert done >= 100


def test_scott_needs_every_vertex_on_a_path():
    p = presentation_smooth(PlumbingTree.linear([-3, -1]), "v1")
    with pytest.raises(PresentationError):
        scott_incidence(p)
