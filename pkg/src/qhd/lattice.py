"""Intersection lattices of plumbing trees and the lattice-theoretic tests.

All arithmetic is exact: determinants are fraction-free, the anticanonical
cycle is a vector of Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
import time

from .exact import bareiss_det, dot, is_negative_definite, is_square, solve_rational


@dataclass(frozen=True)
class IntersectionForm:
    ids: tuple
    matrix: tuple  # tuple of row tuples
    negative_definite: bool

    @property
    def rows(self):
        return [list(r) for r in self.matrix]

    def __len__(self):
        return len(self.ids)


def intersection_matrix(tree):
    ids = tree.ids
    index = {v: i for i, v in enumerate(ids)}
    q = [[0] * len(ids) for _ in ids]
    for v, e in tree.vertices:
        q[index[v]][index[v]] = e
    for a, b in tree.edge_list():
        q[index[a]][index[b]] = q[index[b]][index[a]] = 1
    return IntersectionForm(tuple(ids), tuple(map(tuple, q)), is_negative_definite(q))


def _form(obj):
    return obj if isinstance(obj, IntersectionForm) else intersection_matrix(obj)


def determinant(form):
    """(det, |det| is a perfect square)."""
    d = bareiss_det(_form(form).rows)
    return d, is_square(abs(d))


@dataclass(frozen=True)
class Anticanonical:
    zk: tuple
    zk_square: Fraction
    zk_test: bool


def anticanonical(form):
    """Z_K with Z_K . E_v = e(v) + 2, its square, and the test Z_K^2 + n == 0."""
    q = _form(form).rows
    rhs = [q[i][i] + 2 for i in range(len(q))]
    try:
        z = solve_rational(q, rhs)
    except ValueError:
        raise ValueError("intersection form is singular") from None
    sq = sum(z[i] * q[i][j] * z[j] for i in range(len(q)) for j in range(len(q)))
    return Anticanonical(tuple(z), sq, sq + len(q) == 0)


class EmbeddingTimeout(RuntimeError):
    pass


def diagonal_embed(form, extra_columns=0, timeout=None):
    """Search an embedding of Q into the diagonal lattice n<-1> with K = sum e_i.

    Returns rows x_v (in the form's vertex order) with x_v . x_w = -Q_vw and
    sum(x_v) = e(v) + 2, or None when no such embedding exists with entries
    bounded by ceil(sqrt|e(v)|).  Only coordinate permutations are quotiented
    out (sign flips change the coordinate sums).  ``extra_columns`` searches
    in n + k columns instead; the rank-equal case k = 0 is the one used by
    the symplectic-plumbing-tree definition.
    """
    form = _form(form)
    q = form.rows
    n = len(q)
    cols = n + extra_columns
    order = sorted(range(n), key=lambda i: (-abs(q[i][i]), i))
    deadline = None if timeout is None else time.monotonic() + timeout
    rows = {}

    def row_candidates(i, classes):
        # classes: list of (start, size, previous rows' shared values)
        norm = -q[i][i]
        target_sum = q[i][i] + 2
        bound = isqrt(abs(q[i][i]))
        if bound * bound < abs(q[i][i]):
            bound += 1
        prev = [j for j in order if j in rows]
        targets = [-q[i][j] for j in prev]
        values = list(range(bound, -bound - 1, -1))
        out = []
        ncls = len(classes)
        # suffix bounds for Cauchy-Schwarz pruning of the dot products
        cap_after = [0] * (ncls + 1)
        for k in range(ncls - 1, -1, -1):
            cap_after[k] = cap_after[k + 1] + classes[k][1]

        def rec(k, rem_norm, rem_sum, dots, chosen):
            if deadline is not None and time.monotonic() > deadline:
                raise EmbeddingTimeout
            if k == ncls:
                if rem_norm == 0 and rem_sum == 0 and all(d == t for d, t in zip(dots, targets)):
                    out.append(list(chosen))
                return
            # remaining coordinates can realise at most |sum| <= sqrt(cols * norm)
            c = cap_after[k]
            if rem_sum * rem_sum > c * rem_norm:
                return
            start, size, shared = classes[k]
            # choose a non-increasing block of values for this class
            def fill(pos, hi_idx, rn, rs, block):
                if pos == size:
                    nd = [d + sum(block) * sv for d, sv in zip(dots, shared)]
                    rec(k + 1, rn, rs, nd, chosen + block)
                    return
                for vi in range(hi_idx, len(values)):
                    x = values[vi]
                    if x * x > rn:
                        continue
                    fill(pos + 1, vi, rn - x * x, rs - x, block + [x])
            fill(0, 0, rem_norm, rem_sum, [])

        rec(0, norm, target_sum, [0] * len(prev), [])
        return out

    def split(classes, row):
        new = []
        for start, size, shared in classes:
            block = row[start:start + size]
            pos = start
            for x in sorted(set(block), reverse=True):
                cnt = block.count(x)
                new.append((pos, cnt, shared + [x]))
                pos += cnt
        return new

    def search(depth, classes):
        if depth == n:
            return True
        i = order[depth]
        for cand in row_candidates(i, classes):
            rows[i] = cand
            if search(depth + 1, split(classes, cand)):
                return True
            del rows[i]
        return False

    # shared values per class are only needed against previous rows; keep them
    # aligned with the order in which rows were placed
    if n == 0:
        return []
    found = search(0, [(0, cols, [])])
    if not found:
        return None
    return [rows[i] for i in range(n)]


def check_embedding(form, rows):
    q = _form(form).rows
    n = len(q)
    for i in range(n):
        if sum(rows[i]) != q[i][i] + 2:
            return False
        for j in range(n):
            if dot(rows[i], rows[j]) != -q[i][j]:
                return False
    return True
