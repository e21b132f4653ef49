from fractions import Fraction

import sympy
from hypothesis import given, settings, strategies as st

from qhd.exact import (bareiss_det, cofactor_det, elementary_divisors, hermite_rows,
                       integer_kernel, is_negative_definite, is_square, matmul, rank,
                       smith_form, solve_rational)

small_ints = st.integers(-6, 6)


def matrices(rows, cols):
    return st.lists(st.lists(small_ints, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@st.composite
def square(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    return draw(matrices(n, n))


@st.composite
def rect(draw):
    return draw(matrices(draw(st.integers(1, 4)), draw(st.integers(1, 5))))


@given(square())
def test_bareiss_matches_sympy(m):
    assert bareiss_det(m) == sympy.Matrix(m).det()


@given(square(4))
def test_cofactor_matches_bareiss(m):
    assert cofactor_det(m) == bareiss_det(m)


def test_empty_determinant_is_one():
    assert bareiss_det([]) == 1


@given(rect())
@settings(max_examples=60)
def test_smith_form_is_valid(m):
    d, u, v = smith_form(m)
    assert matmul(matmul(u, m), v) == d
    assert abs(bareiss_det(u)) == 1 and abs(bareiss_det(v)) == 1
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    nz = [x for x in diag if x]
    assert all(x > 0 for x in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    for i, row in enumerate(d):
        for j, x in enumerate(row):
            if i != j:
                assert x == 0


@given(rect())
@settings(max_examples=60)
def test_elementary_divisors_match_sympy(m):
    from sympy.matrices.normalforms import smith_normal_form
    snf = smith_normal_form(sympy.Matrix(m), domain=sympy.ZZ)
    want = [abs(int(snf[i, i])) for i in range(min(snf.shape)) if snf[i, i] != 0]
    assert elementary_divisors(m) == want


@given(rect())
@settings(max_examples=60)
def test_integer_kernel_spans_kernel(m):
    basis = integer_kernel(m)
    n = len(m[0])
    for x in basis:
        assert all(sum(a * b for a, b in zip(row, x)) == 0 for row in m)
    assert len(basis) == n - sympy.Matrix(m).rank()
    assert rank(m) == sympy.Matrix(m).rank()
    if basis:
        # saturation: the basis spans a primitive sublattice (gcd of maximal minors is 1)
        assert elementary_divisors(basis) == [1] * len(basis)


def test_hermite_rows_idempotent():
    rows = [[2, 4, 6], [1, 1, 1]]
    h = hermite_rows(rows)
    assert hermite_rows(h) == h


@given(square(4), st.lists(small_ints, min_size=4, max_size=4))
def test_solve_rational(m, b):
    n = len(m)
    b = b[:n]
    if bareiss_det(m) == 0:
        return
    x = solve_rational(m, b)
    assert all(isinstance(v, (int, Fraction)) for v in x)
    assert [sum(r[j] * x[j] for j in range(n)) for r in m] == b


def test_negative_definite_and_square():
    assert is_negative_definite([[-2, 1], [1, -2]])
    assert not is_negative_definite([[-1, 1], [1, -1]])
    assert is_square(576) and not is_square(2) and is_square(0)
