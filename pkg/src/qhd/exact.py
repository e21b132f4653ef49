"""Exact integer and rational linear algebra.

Everything here works on lists of lists of Python ints (or Fractions), so
determinants, kernels and torsion orders are exact for any size of entry.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt


def bareiss_det(matrix):
    """Determinant of a square integer matrix by fraction-free elimination."""
    n = len(matrix)
    if n == 0:
        return 1
    a = [list(row) for row in matrix]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def cofactor_det(matrix):
    """Laplace expansion along the first row. Exponential; for cross-checks only."""
    n = len(matrix)
    if n == 0:
        return 1
    if n == 1:
        return matrix[0][0]
    total = 0
    for j in range(n):
        if matrix[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        total += (-1) ** j * matrix[0][j] * cofactor_det(minor)
    return total


def leading_minors(matrix):
    return [bareiss_det([row[:k] for row in matrix[:k]]) for k in range(1, len(matrix) + 1)]


def is_negative_definite(matrix):
    """Sylvester's criterion: the k-th leading minor has sign (-1)^k."""
    return all((m < 0) if k % 2 else (m > 0)
               for k, m in enumerate(leading_minors(matrix), start=1))


def is_square(n):
    return n >= 0 and isqrt(n) ** 2 == n


def solve_rational(matrix, rhs):
    """Solve A x = b over the rationals. Raises ValueError if A is singular."""
    n = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular matrix")
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def transpose(m):
    return [list(col) for col in zip(*m)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def smith_form(matrix):
    """Smith normal form with transforms.

    Returns ``(D, U, V)`` with ``U * matrix * V == D``, where U and V are
    unimodular and D is diagonal with d_1 | d_2 | ... (non-negative).
    """
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    a = [list(row) for row in matrix]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):
        for row in a:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    t = 0
    while t < min(m, n):
        # pick the smallest non-zero entry in the remaining block as pivot
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    add_row(i, t, -q)
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    add_col(j, t, -q)
                    if a[t][j]:
                        done = False
            if done:
                # divisibility of the rest of the block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if a[i][j] % a[t][t]), None)
                if bad is None:
                    break
                add_row(t, bad[0], 1)
                continue
            # move the smallest entry of row/column t to the pivot position
            cand = [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, n) if a[t][j]]
            _, i, j = min(cand)
            swap_rows(t, i)
            swap_cols(t, j)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return a, u, v


def elementary_divisors(matrix):
    d, _, _ = smith_form(matrix)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i]]


def integer_kernel(matrix, ncols=None):
    """A basis of the integer kernel {x : A x = 0}, as row vectors in Hermite form."""
    if not matrix:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    d, _, v = smith_form(matrix)
    n = len(matrix[0])
    rank = sum(1 for i in range(min(len(d), n)) if d[i][i])
    basis = [[v[r][c] for r in range(n)] for c in range(rank, n)]
    return hermite_rows(basis)


def hermite_rows(rows):
    """Row-style Hermite normal form of an integer basis (pivots positive)."""
    a = [list(r) for r in rows]
    if not a:
        return a
    n = len(a[0])
    r = 0
    for c in range(n):
        if r == len(a):
            break
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[p] = a[p], a[r]
            others = [i for i in range(r + 1, len(a)) if a[i][c]]
            if not others:
                break
            for i in others:
                q = a[i][c] // a[r][c]
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
    return [row for row in a if any(row)]


def rank(matrix):
    return len(elementary_divisors(matrix)) if matrix and matrix[0] else 0
