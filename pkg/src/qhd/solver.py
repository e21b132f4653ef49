"""Exhaustive search for configurations with a prescribed Gram matrix.

Rows (curves) are filled one at a time, longest first.  Columns (points) are
kept in lexicographically decreasing order, so identical columns form
contiguous classes and a row only chooses how many 2s and 1s go into each
class.  Every configuration is produced once up to renaming points; the
labelled count multiplies back by N! / prod(class size!).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import factorial

from .configuration import Configuration, validate


class SolverTimeout(RuntimeError):
    """The search budget ran out before the search space was exhausted."""


@dataclass(frozen=True)
class SolveMode:
    mu0: bool = True
    emit: str = "first"  # first | all | count
    timeout: float = None

    def __post_init__(self):
        if self.emit not in ("first", "all", "count"):
            raise ValueError(f"unknown emit mode {self.emit!r}")


@dataclass
class SolveResult:
    status: str  # found | none | timeout
    solutions: list = field(default_factory=list)
    canonical_count: int = 0
    labeled_count: int = 0
    complete: bool = True  # counts are exhaustive (False for emit=first)
    elapsed: float = 0.0

    @property
    def found(self):
        return bool(self.solutions) or self.canonical_count > 0

    def to_json(self):
        out = {"status": self.status, "complete": self.complete}
        if self.complete:
            out["canonical_count"] = self.canonical_count
            out["labeled_count"] = self.labeled_count
        out["solutions"] = [c.to_json() for c in self.solutions]
        return out


def solve(presentation, mode=SolveMode()):
    gram = [list(r) for r in presentation.gram]
    m = len(gram)
    sizes = [c.size for c in presentation.curves]
    cusp = [c.kind == "cusp" for c in presentation.curves]
    for i in range(m):
        for j in range(m):
            if i != j and gram[i][j] < 0:
                raise ValueError("negative intersection number")
    rows = sorted(range(m), key=lambda i: (-sizes[i], i))
    n_cols = m if mode.mu0 else sum(sizes)
    later = [0] * (m + 1)
    for k in range(m - 1, -1, -1):
        later[k] = later[k + 1] + sizes[rows[k]]
    deadline = None if mode.timeout is None else time.monotonic() + mode.timeout
    start = time.monotonic()
    result = SolveResult("none", complete=mode.emit != "first")
    stop = []

    def row_choices(depth, classes):
        i = rows[depth]
        placed = [rows[k] for k in range(depth)]
        targets = [gram[i][r] for r in placed]
        need = sizes[i]
        nk = len(classes)
        # suffix maxima of each earlier row's value over the remaining classes
        sufmax = [[0] * depth for _ in range(nk + 1)]
        room = [0] * (nk + 1)
        for k in range(nk - 1, -1, -1):
            vals = classes[k][1]
            sufmax[k] = [max(a, b) for a, b in zip(sufmax[k + 1], vals)]
            room[k] = room[k + 1] + classes[k][0]
        twos = 1 if cusp[i] else 0

        def rec(k, rem, twos_left, dots, pick):
            if deadline is not None and time.monotonic() > deadline:
                raise SolverTimeout
            if k == nk:
                if rem == 0 and twos_left == 0 and dots == targets:
                    yield list(pick)
                return
            cap = sufmax[k]
            for r in range(depth):
                res = targets[r] - dots[r]
                if res < 0 or res > rem * cap[r]:
                    return
            if rem > room[k] + twos_left:
                return
            size, vals = classes[k]
            for t2 in range(min(twos_left, size), -1, -1):
                w2 = 2 * t2
                if w2 > rem:
                    continue
                for t1 in range(min(size - t2, rem - w2), -1, -1):
                    w = w2 + t1
                    nd = [d + v * w for d, v in zip(dots, vals)]
                    pick.append((t2, t1))
                    yield from rec(k + 1, rem - w, twos_left - t2, nd, pick)
                    pick.pop()

        yield from rec(0, need, twos, [0] * depth, [])

    def split(classes, pick):
        out = []
        for (size, vals), (t2, t1) in zip(classes, pick):
            for cnt, x in ((t2, 2), (t1, 1), (size - t2 - t1, 0)):
                if cnt:
                    out.append((cnt, vals + (x,)))
        return out

    def finish(classes):
        used = [(c, v) for c, v in classes if any(v)]
        zero = sum(c for c, v in classes if not any(v))
        if mode.mu0 and zero:
            return
        n = sum(c for c, _ in used)
        labeled = factorial(n)
        for c, _ in used:
            labeled //= factorial(c)
        result.canonical_count += 1
        result.labeled_count += labeled
        if mode.emit != "count":
            result.solutions.append(_to_config(used, rows, m, presentation))
            if mode.emit == "first":
                stop.append(True)

    def search(depth, classes):
        if stop:
            return
        if depth == m:
            finish(classes)
            return
        if mode.mu0:
            zero = sum(c for c, v in classes if not any(v))
            if zero > later[depth]:
                return
        for pick in row_choices(depth, classes):
            search(depth + 1, split(classes, pick))
            if stop:
                return

    try:
        search(0, [(n_cols, ())])
    except SolverTimeout:
        result.status = "timeout"
        result.complete = False
        result.elapsed = time.monotonic() - start
        return result
    result.status = "found" if result.canonical_count else "none"
    if result.status == "none":
        result.complete = True  # the search ran to the end
    result.elapsed = time.monotonic() - start
    for conf in result.solutions:
        rep = validate(conf, presentation)
        assert rep.valid, rep.violations
    return result


def _to_config(used, rows, m, presentation):
    # expand classes into columns; column values are indexed by search depth
    cols = []
    for c, vals in used:
        cols.extend([vals] * c)
    supports = [None] * m
    for depth, i in enumerate(rows):
        supports[i] = {str(k + 1): col[depth] for k, col in enumerate(cols) if col[depth]}
    points = [str(k + 1) for k in range(len(cols))]
    return Configuration.from_sets(supports, points, [c.vertex for c in presentation.curves])


def brute_force_count(presentation, mu0=True):
    """Labelled solution count by plain row-by-row enumeration (test oracle).

    For mu0 the point set is {1..m}; otherwise every N up to the total size is
    tried and matrices with an unused point are discarded.
    """
    from itertools import combinations

    gram = presentation.gram
    m = len(gram)
    sizes = [c.size for c in presentation.curves]
    cusp = [c.kind == "cusp" for c in presentation.curves]

    def vectors(n, size, is_cusp):
        if not is_cusp:
            for sup in combinations(range(n), size):
                v = [0] * n
                for p in sup:
                    v[p] = 1
                yield v
            return
        for d in range(n):
            rest = [p for p in range(n) if p != d]
            for sup in combinations(rest, size - 2):
                v = [0] * n
                v[d] = 2
                for p in sup:
                    v[p] = 1
                yield v

    def count(n):
        total = 0
        chosen = []

        def rec(i):
            nonlocal total
            if i == m:
                if all(any(r[p] for r in chosen) for p in range(n)):
                    total += 1
                return
            for v in vectors(n, sizes[i], cusp[i]):
                if all(sum(a * b for a, b in zip(v, chosen[j])) == gram[i][j] for j in range(i)):
                    chosen.append(v)
                    rec(i + 1)
                    chosen.pop()

        rec(0)
        return total

    if mu0:
        return count(m)
    return sum(count(n) for n in range(1, sum(sizes) + 1))
