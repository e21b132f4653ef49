"""Plumbing trees: framed trees encoding resolution graphs.

A :class:`PlumbingTree` is immutable.  Vertex ids are strings; the vertex
order given at construction is kept and used wherever a deterministic order
is needed.  Framings are arbitrary integers here; whether a tree is a usable
resolution graph (all framings <= -1, negative definite, ...) is decided by
separate checks, since blowup sequences pass through -1 vertices.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class PlumbingTree:
    vertices: tuple  # ((id, framing), ...)
    edges: frozenset  # frozenset of frozenset({a, b})
    _adj: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        ids = [v for v, _ in self.vertices]
        if len(set(ids)) != len(ids):
            raise GraphError("duplicate vertex ids")
        adj = {v: [] for v in ids}
        for e in self.edges:
            if len(e) != 2:
                raise GraphError(f"bad edge {sorted(e)}")
            a, b = sorted(e)
            if a not in adj or b not in adj:
                raise GraphError(f"edge {a}-{b} uses an unknown vertex")
            adj[a].append(b)
            adj[b].append(a)
        order = {v: i for i, v in enumerate(ids)}
        for v in adj:
            adj[v].sort(key=order.__getitem__)
        object.__setattr__(self, "_adj", adj)
        if ids and len(self.edges) != len(ids) - 1:
            raise GraphError("not a tree: wrong number of edges")
        if ids:
            seen = {ids[0]}
            todo = [ids[0]]
            while todo:
                x = todo.pop()
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        todo.append(y)
            if len(seen) != len(ids):
                raise GraphError("not a tree: disconnected")

    @classmethod
    def build(cls, framings, edges=()):
        """``framings`` is a mapping (or pair list) id -> framing."""
        items = framings.items() if hasattr(framings, "items") else framings
        verts = tuple((str(v), int(e)) for v, e in items)
        return cls(verts, frozenset(frozenset((str(a), str(b))) for a, b in edges))

    @classmethod
    def linear(cls, framings, prefix="v"):
        """Path v1 - v2 - ... carrying the given framings in order."""
        ids = [f"{prefix}{i + 1}" for i in range(len(framings))]
        return cls.build(zip(ids, framings), zip(ids, ids[1:]))

    @property
    def ids(self):
        return [v for v, _ in self.vertices]

    def framing(self, v):
        return dict(self.vertices)[v]

    @property
    def framings(self):
        return dict(self.vertices)

    def neighbors(self, v):
        try:
            return list(self._adj[v])
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def degree(self, v):
        return len(self.neighbors(v))

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return v in self._adj

    def edge_list(self):
        order = {v: i for i, v in enumerate(self.ids)}
        pairs = [tuple(sorted(e, key=order.__getitem__)) for e in self.edges]
        return sorted(pairs, key=lambda p: (order[p[0]], order[p[1]]))

    def nodes(self):
        return [v for v in self.ids if self.degree(v) >= 3]

    def with_framing(self, v, e):
        return PlumbingTree(tuple((x, e if x == v else f) for x, f in self.vertices), self.edges)

    def relabel(self, mapping):
        verts = tuple((mapping.get(v, v), e) for v, e in self.vertices)
        edges = frozenset(frozenset(mapping.get(x, x) for x in e) for e in self.edges)
        return PlumbingTree(verts, edges)

    def to_json(self):
        return {
            "vertices": [{"id": v, "framing": e} for v, e in self.vertices],
            "edges": [list(p) for p in self.edge_list()],
        }

    @classmethod
    def from_json(cls, data):
        return cls.build([(d["id"], d["framing"]) for d in data["vertices"]],
                         [tuple(e) for e in data["edges"]])

    def to_dot(self, name="plumbing"):
        lines = [f"graph {name} {{"]
        for v, e in self.vertices:
            lines.append(f'  "{v}" [label="{e}"];')
        for a, b in self.edge_list():
            lines.append(f'  "{a}" -- "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EdgeSketch:
    """Figure notation: an edge labelled k stands for k vertices framed -2.

    ``edges`` holds triples (a, b, k).  k = 0 is a plain edge, k = -1 merges
    the two endpoints into one vertex framed e + f + 2.
    """
    vertices: tuple
    edges: tuple

    @classmethod
    def build(cls, framings, edges):
        items = framings.items() if hasattr(framings, "items") else framings
        return cls(tuple((str(v), int(e)) for v, e in items),
                   tuple((str(a), str(b), int(k)) for a, b, k in edges))

    def to_json(self):
        return {
            "vertices": [{"id": v, "framing": e} for v, e in self.vertices],
            "edges": [{"ends": [a, b], "label": k} for a, b, k in self.edges],
        }

    @classmethod
    def from_json(cls, data):
        edges = []
        for d in data["edges"]:
            if isinstance(d, dict):
                a, b = d["ends"]
                edges.append((a, b, d.get("label", 0)))
            else:
                a, b, *rest = d
                edges.append((a, b, rest[0] if rest else 0))
        return cls.build([(d["id"], d["framing"]) for d in data["vertices"]], edges)


def expand_sketch(sketch):
    framing = dict(sketch.vertices)
    order = [v for v, _ in sketch.vertices]
    # union-find for the -1 merges
    parent = {v: v for v in order}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    plain = []
    for a, b, k in sketch.edges:
        if a not in framing or b not in framing:
            raise GraphError(f"edge {a}-{b} uses an unknown vertex")
        if k < -1:
            raise GraphError(f"edge label {k} < -1")
        if k == -1:
            ra, rb = find(a), find(b)
            if ra == rb:
                raise GraphError("merge would create a cycle")
            framing[ra] = framing[ra] + framing[rb] + 2
            parent[rb] = ra
        else:
            plain.append((a, b, k))
    verts = [(v, framing[v]) for v in order if find(v) == v]
    edges = []
    for a, b, k in plain:
        ra, rb = find(a), find(b)
        if ra == rb:
            raise GraphError("merge would create a cycle")
        prev = ra
        for i in range(k):
            vid = f"{a}_{b}_{i + 1}"
            verts.append((vid, -2))
            edges.append((prev, vid))
            prev = vid
        edges.append((prev, rb))
    try:
        return PlumbingTree.build(verts, edges)
    except GraphError as exc:
        raise GraphError(f"sketch does not expand to a tree: {exc}") from None


@dataclass(frozen=True)
class VertexStats:
    degree: int
    framing: int
    is_node: bool
    is_leaf: bool
    is_large_node: bool


def stats(tree, v):
    d = tree.degree(v)
    e = tree.framing(v)
    # "large" is defined by d + e <= -2; it is reported for every vertex
    return VertexStats(d, e, d >= 3, d == 1, d + e <= -2)


def delta(tree):
    total = sum(-e - tree.degree(v) for v, e in tree.vertices)
    return total - 1 - len(tree)


def path_between(tree, v, w):
    """The unique path from v to w, endpoints included."""
    if v not in tree or w not in tree:
        raise GraphError(f"unknown vertex in path {v!r} -> {w!r}")
    prev = {v: None}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        if x == w:
            break
        for y in tree.neighbors(x):
            if y not in prev:
                prev[y] = x
                queue.append(y)
    path = [w]
    while path[-1] != v:
        path.append(prev[path[-1]])
    return path[::-1]


def contract_edge(tree, edge, new_framing, new_id=None):
    a, b = edge
    if frozenset((a, b)) not in tree.edges:
        raise GraphError(f"edge {a}-{b} not in tree")
    keep = new_id or a
    verts = []
    for v, e in tree.vertices:
        if v == a:
            verts.append((keep, new_framing))
        elif v != b:
            verts.append((v, e))
    edges = []
    for e in tree.edges:
        if e == frozenset((a, b)):
            continue
        x, y = tuple(e)
        x = keep if x in (a, b) else x
        y = keep if y in (a, b) else y
        edges.append((x, y))
    return PlumbingTree.build(verts, edges)


def blowdown(tree, v):
    """Contract a -1 vertex of degree <= 2 (the inverse of a point blowup)."""
    if tree.framing(v) != -1:
        raise GraphError(f"{v} is not a -1 vertex")
    nbrs = tree.neighbors(v)
    if len(nbrs) > 2:
        raise GraphError(f"{v} has degree {len(nbrs)}; contracting it leaves the tree world")
    verts = [(x, e + 1 if x in nbrs else e) for x, e in tree.vertices if x != v]
    edges = [tuple(e) for e in tree.edges if v not in e]
    if len(nbrs) == 2:
        edges.append(tuple(nbrs))
    return PlumbingTree.build(verts, edges)


def blows_down_to_empty(tree):
    while len(tree):
        cand = [v for v, e in tree.vertices if e == -1 and tree.degree(v) <= 2]
        if not cand:
            return False
        tree = blowdown(tree, cand[0])
    return True


# ---------------------------------------------------------------- continued fractions

def hj_expansion(num, den):
    """Hirzebruch-Jung expansion num/den = a1 - 1/(a2 - 1/...), all a_i >= 2."""
    num, den = Fraction(num), Fraction(den)
    x = num / den
    if x <= 1:
        raise GraphError("HJ expansion needs num/den > 1")
    out = []
    while True:
        a = -((-x.numerator) // x.denominator)  # ceiling
        out.append(a)
        if a == x:
            return out
        x = 1 / (a - x)


def hj_value(coeffs):
    x = Fraction(coeffs[-1])
    for a in reversed(coeffs[:-1]):
        x = a - 1 / x
    return x


def linear_from_fraction(p, q):
    """The linear graph of p^2/(pq-1): the G family of rational blowdowns."""
    if not (p > q > 0) or gcd(p, q) != 1:
        raise GraphError(f"need p > q > 0 coprime, got ({p}, {q})")
    return PlumbingTree.linear([-a for a in hj_expansion(p * p, p * q - 1)])


# ---------------------------------------------------------------- families

def fpp_graph(n, l=0):
    """Star with n^2+n+1 arms of n-1 vertices framed -2, node framed -n^2-n-2.

    For l > 0 the graph is the one carried by the modified projective-plane
    configuration, recovered by reconstruction.
    """
    if n < 2:
        raise GraphError("fpp needs n >= 2")
    if l:
        from .families import fpp_config, reconstruct_graph
        return reconstruct_graph(fpp_config(n, l))
    verts = [("node", -n * n - n - 2)]
    edges = []
    for arm in range(1, n * n + n + 2):
        prev = "node"
        for j in range(1, n):
            vid = f"a{arm}_{j}"
            verts.append((vid, -2))
            edges.append((prev, vid))
            prev = vid
    return PlumbingTree.build(verts, edges)


ABC_SEEDS = {"A": (3, 3, 3), "B": (2, 4, 4), "C": (2, 3, 6)}
ABC_FINAL = {"A": -4, "B": -3, "C": -2}


def abc_seed(family):
    """Central -1 vertex with three leaves -a, -b, -c."""
    a, b, c = ABC_SEEDS[family]
    return PlumbingTree.build([("c", -1), ("x1", -a), ("x2", -b), ("x3", -c)],
                              [("c", "x1"), ("c", "x2"), ("c", "x3")])


def _blowup_edge(tree, a, b, new_id):
    verts = [(v, e - 1 if v in (a, b) else e) for v, e in tree.vertices] + [(new_id, -1)]
    edges = [tuple(e) for e in tree.edges if e != frozenset((a, b))]
    edges += [(a, new_id), (new_id, b)]
    return PlumbingTree.build(verts, edges)


def _blowup_vertex(tree, a, new_id):
    verts = [(v, e - 1 if v == a else e) for v, e in tree.vertices] + [(new_id, -1)]
    return PlumbingTree.build(verts, [tuple(e) for e in tree.edges] + [(a, new_id)])


def abc_blowups(family, word):
    """Run a blowup word on the seed; returns (tree, id of the current -1 vertex).

    Letters: ``"v"`` blows up the -1 vertex itself (new -1 leaf); ``"eK"``
    blows up the edge from the -1 vertex to its K-th neighbour (1-based, in
    vertex-id creation order); ``("e", id)`` names the neighbour directly.
    """
    if family not in ABC_SEEDS:
        raise GraphError(f"unknown family {family!r}")
    tree = abc_seed(family)
    cur = "c"
    for step, letter in enumerate(word, start=1):
        new_id = f"u{step}"
        if letter in ("v", "vertex"):
            tree = _blowup_vertex(tree, cur, new_id)
        else:
            nbrs = tree.neighbors(cur)
            if isinstance(letter, tuple) and letter[0] == "e":
                target = letter[1]
                if target not in nbrs:
                    raise GraphError(f"{target} is not adjacent to the -1 vertex {cur}")
            elif isinstance(letter, str) and letter.startswith("e") and letter[1:].isdigit():
                k = int(letter[1:])
                if not 1 <= k <= len(nbrs):
                    raise GraphError(f"illegal blowup site {letter!r} at step {step}")
                target = nbrs[k - 1]
            else:
                raise GraphError(f"illegal blowup letter {letter!r}")
            tree = _blowup_edge(tree, cur, target, new_id)
        cur = new_id
    return tree, cur


def abc_generate(family, word=()):
    """A member of the A/B/C families: blow up the seed, then reframe the -1 vertex."""
    tree, cur = abc_blowups(family, word)
    return tree.with_framing(cur, ABC_FINAL[family])


# ---------------------------------------------------------------- canonical forms

def centers(tree):
    ids = tree.ids
    if len(ids) <= 2:
        return ids
    deg = {v: tree.degree(v) for v in ids}
    layer = [v for v in ids if deg[v] == 1]
    remaining = len(ids)
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for x in layer:
            for y in tree.neighbors(x):
                deg[y] -= 1
                if deg[y] == 1:
                    nxt.append(y)
        layer = nxt
    return layer


def rooted_form(tree, root, parent=None):
    subs = sorted(rooted_form(tree, c, root) for c in tree.neighbors(root) if c != parent)
    return f"({tree.framing(root)}" + "".join(subs) + ")"


def canonical_form(tree):
    """Isomorphism invariant string: minimum rooted encoding over the centres."""
    if not len(tree):
        return "()"
    return min(rooted_form(tree, c) for c in centers(tree))


def canonical_tree(tree):
    """Relabel to a canonical representative with ids v1..vn (BFS from centre)."""
    code = canonical_form(tree)
    root = next(c for c in centers(tree) if rooted_form(tree, c) == code)
    order = []

    def walk(v, parent):
        order.append(v)
        kids = sorted((c for c in tree.neighbors(v) if c != parent),
                      key=lambda c: rooted_form(tree, c, v))
        for c in kids:
            walk(c, v)

    walk(root, None)
    mapping = {v: f"v{i + 1}" for i, v in enumerate(order)}
    verts = tuple((mapping[v], tree.framing(v)) for v in order)
    edges = frozenset(frozenset(mapping[x] for x in e) for e in tree.edges)
    return PlumbingTree(verts, edges)


# ---------------------------------------------------------------- enumeration

@dataclass(frozen=True)
class TreeConstraints:
    """What :func:`enumerate_trees` should emit.

    ``framings`` maps a degree to the allowed framings; the key ``"node"``
    (a callable deg -> framings, or a list) covers all degrees >= 3 not
    listed explicitly, and ``"default"`` covers anything else.
    """
    max_vertices: int
    framings: dict
    min_vertices: int = 1
    min_nodes: int = 0
    max_nodes: int = None
    delta: int = None

    def allowed(self, degree):
        if degree in self.framings:
            return list(self.framings[degree])
        if degree >= 3 and "node" in self.framings:
            rule = self.framings["node"]
            return list(rule(degree) if callable(rule) else rule)
        return list(self.framings.get("default", ()))

    @classmethod
    def uniform(cls, max_vertices, framings, **kw):
        return cls(max_vertices, {"default": tuple(framings)}, **kw)

    @classmethod
    def reduced(cls, max_vertices, **kw):
        """Framings forced on reduced graphs: leaves -2, degree 2 in {-2,-3}, nodes -deg-2."""
        return cls(max_vertices, {1: (-2,), 2: (-2, -3), "node": _node_rule}, **kw)


def _node_rule(degree):
    return (-degree - 2,)


_SHAPES = {1: [((), 1)]}


def tree_shapes(n):
    """All unlabelled trees on n vertices, as sorted edge lists on 0..n-1."""
    if n not in _SHAPES:
        seen = {}
        for edges, m in tree_shapes(n - 1):
            for v in range(m):
                grown = tuple(edges) + ((v, m),)
                t = PlumbingTree.build([(str(i), 0) for i in range(m + 1)],
                                       [(str(a), str(b)) for a, b in grown])
                key = canonical_form(t)
                if key not in seen:
                    seen[key] = (grown, m + 1)
        _SHAPES[n] = [seen[k] for k in sorted(seen)]
    return _SHAPES[n]


def enumerate_trees(constraints):
    """Every framed tree meeting the constraints, once up to isomorphism.

    Output is canonically relabelled and sorted by (size, canonical form).
    """
    c = constraints
    for n in range(c.min_vertices, c.max_vertices + 1):
        found = {}
        for edges, _ in tree_shapes(n):
            deg = [0] * n
            for a, b in edges:
                deg[a] += 1
                deg[b] += 1
            nodes = sum(1 for d in deg if d >= 3)
            if nodes < c.min_nodes or (c.max_nodes is not None and nodes > c.max_nodes):
                continue
            choices = [c.allowed(d) for d in deg]
            if any(not ch for ch in choices):
                continue
            str_edges = [(str(a), str(b)) for a, b in edges]
            for combo in itertools.product(*choices):
                t = PlumbingTree.build([(str(i), f) for i, f in enumerate(combo)], str_edges)
                if c.delta is not None and delta(t) != c.delta:
                    continue
                key = canonical_form(t)
                if key not in found:
                    found[key] = t
        for key in sorted(found):
            yield canonical_tree(found[key])
