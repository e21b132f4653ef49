"""Explicit configurations with mu = 0 and graph reconstruction from a Gram matrix."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .configuration import Configuration
from .graph import PlumbingTree


class FamilyError(ValueError):
    pass


# ---------------------------------------------------------------- finite fields

def _prime_power(q):
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            return (p, k) if r == 1 else None
    return None


def _polymod(a, m, p):
    a = list(a)
    while len(a) >= len(m):
        c = a[-1]
        if c:
            shift = len(a) - len(m)
            for i, x in enumerate(m):
                a[shift + i] = (a[shift + i] - c * x) % p
        a.pop()
    return a


def _irreducible(p, k):
    """First monic irreducible polynomial of degree k over F_p (coefficients low to high)."""
    for tail in itertools.product(range(p), repeat=k):
        f = list(tail) + [1]
        if f[0] == 0:
            continue
        ok = True
        for d in range(1, k // 2 + 1):
            for g_tail in itertools.product(range(p), repeat=d):
                g = list(g_tail) + [1]
                if not any(_polymod(f, g, p)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return f
    raise FamilyError(f"no irreducible polynomial of degree {k} over F_{p}")


class GF:
    """The field with q = p^k elements; elements are ints 0..q-1 (base-p digits)."""

    def __init__(self, q):
        pk = _prime_power(q)
        if pk is None:
            raise FamilyError(f"{q} is not a prime power")
        self.q = q
        self.p, self.k = pk
        p, k = self.p, self.k
        digits = [self._digits(x) for x in range(q)]
        self.add = [[self._num([(a + b) % p for a, b in zip(digits[x], digits[y])])
                     for y in range(q)] for x in range(q)]
        mod = _irreducible(p, k) if k > 1 else None
        self.mul = [[0] * q for _ in range(q)]
        for x in range(q):
            for y in range(q):
                prod = [0] * (2 * k - 1)
                for i, a in enumerate(digits[x]):
                    for j, b in enumerate(digits[y]):
                        prod[i + j] = (prod[i + j] + a * b) % p
                if mod is not None:
                    prod = _polymod(prod, mod, p)
                prod = (prod + [0] * k)[:k]
                self.mul[x][y] = self._num(prod)

    def _digits(self, x):
        out = []
        for _ in range(self.k):
            out.append(x % self.p)
            x //= self.p
        return out

    def _num(self, digits):
        return sum(d * self.p ** i for i, d in enumerate(digits))


def projective_plane(q):
    """Points and lines of PG(2, q); lines are sets of point indices."""
    f = GF(q)
    pts = []
    for v in itertools.product(range(q), repeat=3):
        lead = next((c for c in v if c), None)
        if lead == 1:
            pts.append(v)
    lines = []
    for h in pts:
        line = []
        for k, v in enumerate(pts):
            s = 0
            for a, b in zip(h, v):
                s = f.add[s][f.mul[a][b]]
            if s == 0:
                line.append(k)
        lines.append(line)
    return pts, lines


# ---------------------------------------------------------------- named configurations

@dataclass(frozen=True)
class NamedConfiguration:
    name: str
    params: tuple
    config: Configuration


def fpp_config(n, l=0):
    """Lines of the projective plane of order n; with l > 0, the modified version.

    The modification picks a point x, adds points a1..al, curves {x, ai}, and
    puts every ai on each line missing x.
    """
    if _prime_power(n) is None:
        raise FamilyError(f"no field-plane construction for order {n}")
    if l < 0:
        raise FamilyError("l must be non-negative")
    _, lines = projective_plane(n)
    curves = [{str(p + 1) for p in line} for line in lines]
    npts = n * n + n + 1
    points = [str(p + 1) for p in range(npts)]
    if l:
        x = "1"
        extra = [f"a{i + 1}" for i in range(l)]
        for c in curves:
            if x not in c:
                c.update(extra)
        curves += [{x, a} for a in extra]
        points += extra
    return Configuration.from_sets([sorted(c) for c in curves], points)


def cl_config(k, n, extension=None, b=0):
    """Cluster configurations Cl(k, n); negative k uses complements inside the own cluster.

    ``extension`` is None, "cluster" or "star" with parameter b (negative b
    for the complement form of the cluster extension).
    """
    if abs(k) < 2 or n < 1:
        raise FamilyError("need |k| >= 2 and n >= 1")
    clusters = [[f"A{i + 1}_{j + 1}" for j in range(n)] for i in range(abs(k))]
    everything = [p for c in clusters for p in c]
    curves = []
    for i, own in enumerate(clusters):
        others = [p for c in clusters if c is not own for p in c]
        for a in own:
            if k > 0:
                curves.append(others + [a])
            else:
                curves.append(others + [p for p in own if p != a])
    points = list(everything)
    if extension is None:
        if b:
            raise FamilyError("b given without an extension")
    elif extension == "cluster":
        if k > 0 and not (b >= n > 1):
            raise FamilyError("cluster extension with k > 0 needs b >= n > 1")
        if k < 0 and k >= -1:
            raise FamilyError("cluster extension needs k < -1")
        if b == 0:
            raise FamilyError("cluster extension needs b != 0")
        bs = [f"B{i + 1}" for i in range(abs(b))]
        curves = [c + bs for c in curves]
        for x in bs:
            curves.append(everything + ([x] if b > 0 else [y for y in bs if y != x]))
        points += bs
    elif extension == "star":
        if b < 1:
            raise FamilyError("star extension needs b >= 1")
        bs = [f"B{i + 1}" for i in range(b)]
        curves = [c + bs for c in curves]
        curves += [["x", y] for y in bs]
        curves.append(everything + ["x"])
        points += bs + ["x"]
    else:
        raise FamilyError(f"unknown extension {extension!r}")
    return Configuration.from_sets(curves, points)


def t_config(a, b, c):
    """Three sets; curves X + {y} for (X, Y) = (A, B), (B, C), (C, A), complemented in Y
    when the size parameter of X is negative."""
    if 0 in (a, b, c):
        raise FamilyError("t parameters must be non-zero")
    sets = {name: [f"{name}{i + 1}" for i in range(abs(s))]
            for name, s in (("a", a), ("b", b), ("c", c))}
    sign = {"a": a, "b": b, "c": c}
    curves = []
    for x, y in (("a", "b"), ("b", "c"), ("c", "a")):
        for p in sets[y]:
            if sign[x] > 0:
                curves.append(sets[x] + [p])
            else:
                curves.append(sets[x] + [q for q in sets[y] if q != p])
    points = sets["a"] + sets["b"] + sets["c"]
    return Configuration.from_sets(curves, points)


def config_gram(config):
    n = len(config.curves)
    return [[config.size(i) if i == j else config.intersection(i, j) for j in range(n)]
            for i in range(n)]


# ---------------------------------------------------------------- reconstruction

def reconstruct_graph(config_or_gram, with_vertices=False):
    """The plumbing tree whose smooth presentation (ending at the root) has this Gram.

    Curve i becomes a chain of G_ii free points; two chains share their first
    G_ij points.  Every point becomes a curve framed -1 - #children; the last
    point of each chain is the curvetta's -1 leaf and is dropped.
    """
    from .sandwich import _presentation_with

    gram = config_gram(config_or_gram) if isinstance(config_or_gram, Configuration) \
        else [list(r) for r in config_or_gram]
    m = len(gram)
    if m == 0:
        raise FamilyError("no curves")
    for i in range(m):
        if gram[i][i] < 2:
            raise FamilyError(f"curve {i} has fewer than two points")
        for j in range(m):
            if i != j:
                if gram[i][j] < 1:
                    raise FamilyError(f"curves {i},{j} are disjoint: no common root")
                if gram[i][j] >= min(gram[i][i], gram[j][j]):
                    raise FamilyError(f"curves {i},{j} share a whole branch")
    for i, j, k in itertools.combinations(range(m), 3):
        vals = sorted((gram[i][j], gram[i][k], gram[j][k]))
        if vals[0] != vals[1]:
            raise FamilyError(f"curves {i},{j},{k} violate the prefix-tree condition")

    def node(i, d):
        return f"r{d}_{min(j for j in range(m) if j == i or gram[i][j] >= d) + 1}"

    children = {}
    order = []
    for i in range(m):
        prev = None
        for d in range(1, gram[i][i] + 1):
            x = node(i, d)
            if x not in children:
                children[x] = set()
                order.append((d, x))
            if prev is not None:
                children[prev].add(x)
            prev = x
    terminals = {node(i, gram[i][i]) for i in range(m)}
    order.sort(key=lambda t: (t[0], int(t[1].split("_")[1])))
    keep = [x for _, x in order if x not in terminals]
    verts = [(x, -1 - len(children[x])) for x in keep]
    edges = [(x, y) for x in keep for y in sorted(children[x]) if y not in terminals]
    tree = PlumbingTree.build(verts, edges)
    root = keep[0]
    vertices = [node(i, gram[i][i] - 1) for i in range(m)]
    pres = _presentation_with(tree, root, vertices)
    if [list(r) for r in pres.gram] != gram:
        raise FamilyError("reconstructed presentation does not reproduce the Gram matrix")
    for x in tree.ids:
        want = -(tree.degree(x) + tree.framing(x)) - (1 if x == root else 0)
        if want != pres.curve_count(x):
            raise FamilyError(f"vertex {x} carries {pres.curve_count(x)} curves, needs {want}")
    return (tree, root, vertices) if with_vertices else tree


def catalog():
    """Named configurations used across the tests and the acceptance suite."""
    items = [
        ("fpp", (2, 0), fpp_config(2)),
        ("fpp", (3, 0), fpp_config(3)),
        ("fpp", (2, 1), fpp_config(2, 1)),
        ("fpp", (2, 2), fpp_config(2, 2)),
        ("cl", (2, 2), cl_config(2, 2)),
        ("cl", (-2, 2), cl_config(-2, 2)),
        ("cl", (2, 3), cl_config(2, 3)),
        ("cl", (3, 2), cl_config(3, 2)),
        ("cl", (-3, 2), cl_config(-3, 2)),
        ("cl-cluster", (2, 2, 2), cl_config(2, 2, "cluster", 2)),
        ("cl-star", (2, 2, 2), cl_config(2, 2, "star", 2)),
        ("t", (2, 2, 2), t_config(2, 2, 2)),
        ("t", (2, -2, 2), t_config(2, -2, 2)),
        ("t", (-3, -2, -2), t_config(-3, -2, -2)),
    ]
    return [NamedConfiguration(n, p, c) for n, p, c in items]
