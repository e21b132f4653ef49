"""Milnor fiber invariants read off an incidence matrix.

The incidence matrix I maps the free group on the points to the free group on
the curves.  Its kernel carries the intersection form of the fiber (minus the
Euclidean product) and the canonical class pairs with a kernel vector as
minus its coordinate sum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .configuration import incidence_matrix
from .exact import (bareiss_det, dot, elementary_divisors, integer_kernel,
                    is_negative_definite, matmul, rank, solve_rational, transpose)


@dataclass(frozen=True)
class FiberInvariants:
    mu: int
    h1_torsion: tuple
    h1_free_rank: int
    kernel_basis: tuple
    restricted_form: tuple
    canonical_pairing: tuple

    def to_json(self):
        return {"mu": self.mu, "h1_torsion": list(self.h1_torsion),
                "h1_free_rank": self.h1_free_rank,
                "kernel_basis": [list(r) for r in self.kernel_basis],
                "restricted_form": [list(r) for r in self.restricted_form],
                "canonical_pairing": list(self.canonical_pairing)}


def fiber_invariants(config):
    inc = incidence_matrix(config)
    npts = len(config.points)
    basis = integer_kernel(inc, npts)
    divs = elementary_divisors(inc) if inc else []
    form = tuple(tuple(-dot(x, y) for y in basis) for x in basis)
    pairing = tuple(-sum(x) for x in basis)
    free = len(inc) - len(divs)
    return FiberInvariants(len(basis), tuple(d for d in divs if d > 1), free,
                           tuple(map(tuple, basis)), form, pairing)


def restricted_form_definite(inv):
    return not inv.restricted_form or is_negative_definite([list(r) for r in inv.restricted_form])


def adjunction_parity(inv):
    """K.x + x.x is even for every kernel basis vector."""
    return all((inv.canonical_pairing[a] + inv.restricted_form[a][a]) % 2 == 0
               for a in range(len(inv.kernel_basis)))


def zk_via_projection(config):
    """Square of the projection of K = (1,...,1) onto the kernel of I (ambient -Euclidean)."""
    inc = incidence_matrix(config)
    basis = integer_kernel(inc, len(config.points))
    if not basis:
        return Fraction(0)
    gram = [[dot(x, y) for y in basis] for x in basis]
    k = [sum(x) for x in basis]
    coef = solve_rational(gram, k)
    return -sum(c * kk for c, kk in zip(coef, k))


def zk_via_rows(config):
    """Same number through the row space of I: -(K.K - (IK)^T (I I^T)^-1 (IK))."""
    inc = incidence_matrix(config)
    n = len(config.points)
    ik = [sum(r) for r in inc]
    gram = matmul(inc, transpose(inc))
    if rank(inc) != len(inc):
        raise ValueError("incidence rows are dependent")
    coef = solve_rational(gram, ik)
    return -(n - sum(c * x for c, x in zip(coef, ik)))


def qhd_det_check(config, form):
    """|det I|^2 == |det Q| for a square incidence matrix."""
    inc = incidence_matrix(config)
    if len(inc) != len(config.points):
        raise ValueError("incidence matrix is not square")
    d = bareiss_det(inc)
    if d == 0:
        raise ValueError("incidence matrix is singular")
    q = form.rows if hasattr(form, "rows") else form
    return d * d == abs(bareiss_det(q))


def congruent(a, b, bound=3):
    """Search U with |entries| <= bound, det U = +-1 and U^T a U = b (small n only)."""
    n = len(a)
    if len(b) != n:
        return None
    if n == 0:
        return []
    rng = range(-bound, bound + 1)

    def form(x, y):
        return sum(x[i] * a[i][j] * y[j] for i in range(n) for j in range(n))

    by_norm = {}
    for x in itertools.product(rng, repeat=n):
        if any(x):
            by_norm.setdefault(form(x, x), []).append(x)
    cols = []

    def rec(j):
        if j == n:
            return abs(bareiss_det(transpose([list(c) for c in cols]))) == 1
        for x in by_norm.get(b[j][j], ()):
            if all(form(cols[i], x) == b[i][j] for i in range(j)):
                cols.append(x)
                if rec(j + 1):
                    return True
                cols.pop()
        return False

    if rec(0):
        return transpose([list(c) for c in cols])
    return None


@dataclass(frozen=True)
class CongruenceReport:
    det_match: bool
    divisors_match: bool
    explicit: object  # the matrix U, None if not found, "skipped" beyond the search size


def compare_forms(a, b, max_search=4, bound=3):
    a = [list(r) for r in a]
    b = [list(r) for r in b]
    det_ok = bareiss_det(a) == bareiss_det(b)
    div_ok = elementary_divisors(a) == elementary_divisors(b) if a else not b
    explicit = congruent(a, b, bound) if len(a) <= max_search else "skipped"
    return CongruenceReport(det_ok, div_ok, explicit)
