import pytest

from qhd.configuration import Configuration, ConfigurationError, incidence_matrix, validate
from qhd.exact import matmul, transpose
from qhd.graph import PlumbingTree
from qhd.sandwich import presentation_smooth

TRIANGLE = [{"1", "2"}, {"1", "3"}, {"2", "3"}]


def pres4():
    return presentation_smooth(PlumbingTree.linear([-4]), "v1")


def test_triangle_validates():
    c = Configuration.from_sets(TRIANGLE)
    rep = validate(c, pres4())
    assert rep.valid and rep.mu == 0 and rep.free_points == []


def test_violations_are_reported():
    bad = Configuration.from_sets([{"1", "2"}, {"1", "2"}, {"2", "3"}])
    rep = validate(bad, pres4())
    assert not rep.valid and any("intersect" in v for v in rep.violations)
    unused = Configuration.from_sets(TRIANGLE, points=["1", "2", "3", "4"])
    assert "points on no curve" in validate(unused, pres4()).violations[0]
    double = Configuration.from_sets([{"1": 2}, {"1", "3"}, {"2", "3"}])
    assert any("multiple point" in v for v in validate(double, pres4()).violations)
    with pytest.raises(ConfigurationError):
        validate(Configuration.from_sets(TRIANGLE[:2]), pres4())


def test_intersection_and_incidence():
    c = Configuration.from_sets([{"a": 2, "b": 1}, {"a": 1, "c": 1}])
    assert c.size(0) == 3 and c.intersection(0, 1) == 2
    inc = incidence_matrix(c)
    g = matmul(inc, transpose(inc))
    assert g == [[5, 2], [2, 2]]  # diagonal of I I^T is the sum of squared multiplicities


def test_json_round_trip_and_relabel():
    c = Configuration.from_sets(TRIANGLE, vertices=["v1"] * 3)
    assert Configuration.from_json(c.to_json()) == c
    r = c.relabel_points({"1": "x", "2": "y", "3": "z"})
    assert r.point_set(0) == {"x", "y"}
    assert r.canonical_points().point_set(0) == {"1", "2"}


def test_natural_point_order():
    c = Configuration.from_sets([{"10", "2", "1"}])
    assert list(c.points) == ["1", "2", "10"]
