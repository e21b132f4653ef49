"""Sandwich presentations, curvetta Gram matrices and blowup clusters.

A presentation fixes an end vertex of a plumbing tree and hangs -1 curvetta
leaves on the vertices; each curvetta becomes a curve with a prescribed
number of points, and two curves have a prescribed intersection number.
The cluster engine recomputes those numbers from infinitely near points
with Noether's formula, which also covers cusp curvettas.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .configuration import Configuration, ConfigurationError, validate
from .graph import (GraphError, PlumbingTree, abc_blowups, canonical_form,
                    path_between, ABC_FINAL, ABC_SEEDS)


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class CurveSlot:
    vertex: str
    size: int
    kind: str = "smooth"  # or "cusp"
    label: str = None


@dataclass(frozen=True)
class SandwichPresentation:
    base: PlumbingTree
    end: str
    curves: tuple  # CurveSlot per curve index
    gram: tuple  # square tuple of tuples, diagonal = sizes

    def __post_init__(self):
        n = len(self.curves)
        if len(self.gram) != n or any(len(r) != n for r in self.gram):
            raise PresentationError("Gram matrix has the wrong shape")
        for i in range(n):
            if self.gram[i][i] != self.curves[i].size:
                raise PresentationError(f"Gram diagonal {i} differs from the curve size")
            for j in range(n):
                if self.gram[i][j] != self.gram[j][i]:
                    raise PresentationError("Gram matrix is not symmetric")

    @property
    def sizes(self):
        return [c.size for c in self.curves]

    def curve_count(self, v):
        return sum(1 for c in self.curves if c.vertex == v)

    def counts(self):
        return {v: self.curve_count(v) for v in self.base.ids}

    def curves_at(self, v):
        return [i for i, c in enumerate(self.curves) if c.vertex == v]

    @property
    def smooth(self):
        return all(c.kind == "smooth" for c in self.curves)

    def to_json(self):
        return {
            "graph": self.base.to_json(),
            "end": self.end,
            "curves": [{"vertex": c.vertex, "size": c.size, "kind": c.kind,
                        **({"label": c.label} if c.label else {})} for c in self.curves],
            "gram": [list(r) for r in self.gram],
        }

    @classmethod
    def from_json(cls, data):
        slots = tuple(CurveSlot(d["vertex"], d["size"], d.get("kind", "smooth"), d.get("label"))
                      for d in data["curves"])
        return cls(PlumbingTree.from_json(data["graph"]), data["end"], slots,
                   tuple(tuple(r) for r in data["gram"]))


def required_counts(tree, end):
    """Number of curvettas each vertex carries when the blowdown ends at ``end``."""
    if end not in tree:
        raise PresentationError(f"unknown end vertex {end!r}")
    out = {}
    for v, e in tree.vertices:
        c = -(tree.degree(v) + e) - (1 if v == end else 0)
        if c < 0:
            where = "end vertex" if v == end else "vertex"
            raise PresentationError(f"{where} {v} would need {c} curvettas")
        out[v] = c
    return out


def _smooth_gram(tree, end, vertices):
    paths = {w: set(path_between(tree, w, end)) for w in set(vertices)}
    n = len(vertices)
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                g[i][i] = len(paths[vertices[i]]) + 1
            else:
                g[i][j] = len(paths[vertices[i]] & paths[vertices[j]])
    return tuple(map(tuple, g))


def presentation_smooth(tree, end):
    counts = required_counts(tree, end)
    verts = [v for v in tree.ids for _ in range(counts[v])]
    gram = _smooth_gram(tree, end, verts)
    slots = tuple(CurveSlot(w, gram[i][i]) for i, w in enumerate(verts))
    return SandwichPresentation(tree, end, slots, gram)


def gram_smooth(presentation):
    """Sizes |p(w,v)|+1 and pairwise |p(w,v) & p(z,v)| for a smooth presentation."""
    return _smooth_gram(presentation.base, presentation.end,
                        [c.vertex for c in presentation.curves])


def tilde_tree(presentation):
    """The base tree with one -1 leaf per curve; leaf of curve i is ``~i``."""
    verts = list(presentation.base.vertices)
    edges = presentation.base.edge_list()
    for i, c in enumerate(presentation.curves):
        verts.append((f"~{i}", -1))
        edges.append((c.vertex, f"~{i}"))
    return PlumbingTree.build(verts, edges)


# ---------------------------------------------------------------- clusters

class ClusterError(ValueError):
    pass


@dataclass(frozen=True)
class BlowupCluster:
    points: tuple  # in blowup order, origin first
    proximity: dict  # point -> tuple of earlier points it is proximate to
    curvettas: tuple  # curve index -> terminal point

    def __post_init__(self):
        if not self.points:
            raise ClusterError("empty cluster")
        pos = {p: k for k, p in enumerate(self.points)}
        if len(pos) != len(self.points):
            raise ClusterError("duplicate points")
        for k, p in enumerate(self.points):
            prox = self.proximity.get(p, ())
            if k == 0 and prox:
                raise ClusterError("the origin cannot be proximate to anything")
            if k > 0 and not 1 <= len(prox) <= 2:
                raise ClusterError(f"{p} must be proximate to one or two earlier points")
            if any(q not in pos or pos[q] >= k for q in prox):
                raise ClusterError(f"{p} is proximate to a later or unknown point")
            if len(prox) == 2:
                # a satellite sits on the intersection of its parent with an older curve
                par = self.parent(p)
                other = next(q for q in prox if q != par)
                if other not in self.proximity.get(par, ()):
                    raise ClusterError(f"{p}: its two proximate points do not meet")
        for t in self.curvettas:
            if t not in pos:
                raise ClusterError(f"curvetta on unknown point {t!r}")

    def parent(self, p):
        prox = self.proximity.get(p, ())
        if not prox:
            return None
        pos = {q: k for k, q in enumerate(self.points)}
        return max(prox, key=pos.__getitem__)

    def branch(self, t):
        out = []
        while t is not None:
            out.append(t)
            t = self.parent(t)
        return out

    def proximate_to(self, p):
        return [q for q in self.points if p in self.proximity.get(q, ())]

    def to_tree(self):
        """Dual graph of the exceptional curves after blowing up every point."""
        framings = [(p, -1 - len(self.proximate_to(p))) for p in self.points]
        edges = []
        for q in self.points:
            for p in self.proximity.get(q, ()):
                separated = any(p in self.proximity.get(r, ()) and q in self.proximity.get(r, ())
                                for r in self.points)
                if not separated:
                    edges.append((p, q))
        return PlumbingTree.build(framings, edges)

    def to_json(self):
        return {"points": list(self.points),
                "proximity": {p: list(self.proximity.get(p, ())) for p in self.points},
                "curvettas": list(self.curvettas)}


def blowdown_cluster(tilde, curvetta_leaves=None):
    """Blow a presentation graph down to a point, recording the cluster.

    At every stage the -1 vertex (of degree <= 2) that comes first in the
    tree's vertex order is contracted; its neighbours at that moment are the
    points it is proximate to.  ``curvetta_leaves`` lists the leaf of each
    curve; by default every -1 leaf of the input, in vertex order.
    """
    if curvetta_leaves is None:
        curvetta_leaves = [v for v, e in tilde.vertices if e == -1 and tilde.degree(v) == 1]
    framing = dict(tilde.vertices)
    adj = {v: set(tilde.neighbors(v)) for v in tilde.ids}
    order = {v: k for k, v in enumerate(tilde.ids)}
    contracted = []
    proximity = {}
    while adj:
        cand = sorted((v for v in adj if framing[v] == -1 and len(adj[v]) <= 2), key=order.get)
        if not cand:
            raise ClusterError("no contractible -1 vertex: the tree does not blow down")
        v = cand[0]
        nbrs = adj.pop(v)
        proximity[v] = tuple(sorted(nbrs, key=order.get))
        for x in nbrs:
            adj[x].discard(v)
            framing[x] += 1
        if len(nbrs) == 2:
            a, b = nbrs
            adj[a].add(b)
            adj[b].add(a)
        contracted.append(v)
    points = tuple(reversed(contracted))
    pos = {p: k for k, p in enumerate(points)}
    proximity = {p: tuple(sorted(proximity[p], key=pos.get)) for p in points}
    return BlowupCluster(points, proximity, tuple(curvetta_leaves))


@dataclass(frozen=True)
class NoetherData:
    gram: tuple
    sizes: tuple  # l(i): total multiplicity of branch i over the cluster
    resolution_sizes: tuple  # m(i): multiplicity summed over singular points of the union
    multiplicities: tuple  # per curve: dict point -> multiplicity


def branch_multiplicities(cluster, t):
    """Multiplicities of the curvetta at ``t`` at every point of its branch."""
    br = cluster.branch(t)
    on = set(br)
    pos = {p: k for k, p in enumerate(cluster.points)}
    m = {}
    for p in sorted(br, key=pos.get, reverse=True):
        if p == t:
            m[p] = 1
        else:
            m[p] = sum(m[q] for q in on if q in m and p in cluster.proximity.get(q, ()))
    return m


def noether_gram(cluster):
    mults = [branch_multiplicities(cluster, t) for t in cluster.curvettas]
    n = len(mults)
    gram = [[sum(m * mults[j].get(p, 0) for p, m in mults[i].items()) for j in range(n)]
            for i in range(n)]
    sizes = tuple(sum(m.values()) for m in mults)
    total = {}
    for m in mults:
        for p, k in m.items():
            total[p] = total.get(p, 0) + k
    res = tuple(sum(k for p, k in m.items() if total[p] >= 2) for m in mults)
    for l, r in zip(sizes, res):
        if r > l:
            raise ClusterError("branch multiplicity exceeds its decoration")
    for i in range(n):
        gram[i][i] = sizes[i]
    return NoetherData(tuple(map(tuple, gram)), sizes, res, tuple(mults))


def noether_presentation_gram(presentation):
    """Gram of a smooth presentation recomputed through its blowdown cluster."""
    t = tilde_tree(presentation)
    cl = blowdown_cluster(t, [f"~{i}" for i in range(len(presentation.curves))])
    return noether_gram(cl).gram


# ---------------------------------------------------------------- star families

# name -> (seed family, seed leaf of the long arm, #L, #S, #Gamma, degree-4?)
STAR_FAMILIES = {
    "C6": ("C", "x3", 0, 0, 0, False),
    "C3": ("C", "x2", 3, 0, 0, False),
    "C2": ("C", "x1", 0, 4, 0, False),
    "B2": ("B", "x1", 1, 2, 0, False),
    "B4": ("B", "x2", 1, 0, 0, False),
    "A3": ("A", "x1", 0, 1, 0, False),
    "A^4": ("A", None, 0, 1, 2, True),
    "B^4": ("B", None, 1, 2, 1, True),
    "C^4": ("C", None, 0, 0, 5, True),
}


def _short_arms(family):
    """Seed leaves playing the L, S and Gamma roles (by framing)."""
    seed, long_leaf, nl, ns, ng, deg4 = STAR_FAMILIES[family]
    a, b, c = ABC_SEEDS[seed]
    leaves = {"x1": a, "x2": b, "x3": c}
    need = {"L": 3 + nl, "S": 2 + ns, "G": 1 + ng}
    roles = ["L", "S", "G"] if deg4 else ["L", "S"]
    free = [x for x in leaves if x != long_leaf]
    for perm in itertools.permutations(free, len(roles)):
        if all(leaves[x] == need[r] for x, r in zip(perm, roles)):
            return dict(zip(roles, perm))
    raise PresentationError(f"no role assignment for {family}")


@dataclass(frozen=True)
class StarFamilyInstance:
    family: str
    word: tuple  # blowup letters as ("e", neighbour) or "v"
    counts: tuple  # curvettas on the node (index 0) and arm vertices 1..n
    graph: PlumbingTree
    arm: tuple  # ids of the node and the arm vertices, node first

    @property
    def n(self):
        return len(self.counts) - 1

    @property
    def final_index(self):
        """Arm index of the vertex that was reframed at the end of the word."""
        cur = f"u{len(self.word)}" if self.word else "c"
        return self.arm.index(cur) if cur in self.arm else None

    @property
    def ell(self):
        """Smallest arm index carrying a cusp curvetta not forced by the reframing.

        The reframed vertex carries -final-2 curvettas whatever the word was
        (none in the C families); those do not count.  Returns n when only
        the end of the arm is left.
        """
        forced = -ABC_FINAL[STAR_FAMILIES[self.family][0]] - 2
        fi = self.final_index
        for i, c in enumerate(self.counts):
            if c - (forced if i == fi else 0) > 0:
                return i
        return self.n

    @property
    def total_curves(self):
        _, _, nl, ns, ng, _ = STAR_FAMILIES[self.family]
        return nl + ns + ng + sum(self.counts)

    def cusp_positions(self):
        return [i for i, c in enumerate(self.counts) for _ in range(c)]

    def to_json(self):
        return {"family": self.family, "n": self.n, "counts": list(self.counts),
                "word": [w if isinstance(w, str) else list(w) for w in self.word],
                "ell": self.ell}


def star_instance(family, word):
    """Build an instance from a blowup word on the family's seed."""
    if family not in STAR_FAMILIES:
        raise PresentationError(f"unknown star family {family!r}")
    seed, long_leaf, _, _, _, deg4 = STAR_FAMILIES[family]
    word = tuple(word)
    try:
        tree, cur = abc_blowups(seed, word)
    except GraphError as exc:
        raise PresentationError(str(exc)) from None
    tree = tree.with_framing(cur, ABC_FINAL[seed])
    if deg4:
        if not word or word[0] not in ("v", "vertex"):
            raise PresentationError("degree-4 families start with a vertex blowup")
        long_leaf = "u1"
    elif word and word[0] != ("e", long_leaf):
        raise PresentationError(f"{family} words start by blowing up the edge to {long_leaf}")
    arm = path_between(tree, "c", long_leaf) if word or not deg4 else ["c"]
    counts = []
    for k, x in enumerate(arm):
        e = tree.framing(x)
        if k == 0:
            c = -e - (3 if deg4 else 2)
        elif k < len(arm) - 1:
            c = -e - 2
        else:
            c = -e - 1
        if c < 0:
            raise PresentationError(f"arm vertex {x} cannot carry {c} cusp curvettas")
        counts.append(c)
    return StarFamilyInstance(family, word, tuple(counts), tree, tuple(arm))


def star_words(family, n):
    """All blowup words producing a long arm of length n (node excluded)."""
    seed, long_leaf, _, _, _, deg4 = STAR_FAMILIES[family]
    if deg4:
        if n < 2:
            return []
        words = [("v",)]
        steps = n - 1
    else:
        if n < 1:
            return []
        if n == 1:
            return [()]
        words = [(("e", long_leaf),)]
        steps = n - 2
    for _ in range(steps):
        nxt = []
        for w in words:
            tree, cur = abc_blowups(seed, w)
            for y in tree.neighbors(cur):
                nxt.append(w + (("e", y),))
        words = nxt
    return words


def star_instances(family, n):
    """Distinct instances with long arm length n (deduplicated by counts)."""
    seen = {}
    for w in star_words(family, n):
        try:
            inst = star_instance(family, w)
        except PresentationError:
            continue
        seen.setdefault(inst.counts, inst)
    return sorted(seen.values(), key=lambda inst: (inst.ell, inst.counts))


def is_known_case(instance):
    """Every blowup after the first happened next to the end of the long arm."""
    seed, long_leaf, _, _, _, deg4 = STAR_FAMILIES[instance.family]
    leaf = "u1" if deg4 else long_leaf
    # the first edge blowup is forced in both kinds of family
    skip = 2 if deg4 else 1
    for letter in instance.word[skip:]:
        if letter[1] != leaf:
            return False
    return True


def star_cluster(instance):
    """The infinitely near points of the cusp model, with curvetta terminals.

    O is the origin, p1 free on E_O, p2 the satellite on E_O and E_p1.  The
    node is E_p2, the long arm is a chain of free points a1, a2, ... starting
    on E_p2, and the degree-4 families add a point q free on E_p2.
    """
    _, _, nl, ns, ng, deg4 = STAR_FAMILIES[instance.family]
    pts = ["O", "p1", "p2"]
    prox = {"O": (), "p1": ("O",), "p2": ("O", "p1")}
    if deg4:
        pts.append("q")
        prox["q"] = ("p2",)
    arm = ["p2"]
    for i in range(1, instance.n + 1):
        a = f"a{i}"
        pts.append(a)
        prox[a] = (arm[-1],)
        arm.append(a)
    labels, terms = [], []

    def leaf(label, on):
        t = f"t_{label}"
        pts.append(t)
        prox[t] = (on,)
        labels.append(label)
        terms.append(t)

    for k in range(1, nl + 1):
        leaf(f"L{k}", "O")
    for k in range(1, ns + 1):
        leaf(f"S{k}", "p1")
    for k in range(1, ng + 1):
        leaf(f"G{k}", "q")
    for i, c in enumerate(instance.counts):
        for j in range(1, c + 1):
            leaf(f"C{i}^{j}", arm[i])
    return BlowupCluster(tuple(pts), prox, tuple(terms)), labels


def star_presentation(instance):
    cluster, labels = star_cluster(instance)
    data = noether_gram(cluster)
    tree = cluster.to_tree()
    terms = set(cluster.curvettas)
    keep = [v for v in tree.ids if v not in terms]
    base = PlumbingTree.build([(v, tree.framing(v)) for v in keep],
                              [e for e in tree.edge_list() if e[0] not in terms and e[1] not in terms])
    slots = []
    for i, t in enumerate(cluster.curvettas):
        kind = "cusp" if any(m >= 2 for m in data.multiplicities[i].values()) else "smooth"
        slots.append(CurveSlot(cluster.parent(t), data.sizes[i], kind, labels[i]))
    return SandwichPresentation(base, "O", tuple(slots), data.gram)


def star_matches_family(instance):
    """The base graph of the cusp model is the family graph (as framed trees)."""
    pres = star_presentation(instance)
    return canonical_form(pres.base) == canonical_form(instance.graph)


# ---------------------------------------------------------------- Scott and switching

def scott_incidence(presentation):
    """The Scott configuration: one point per vertex plus a free point per curve."""
    if not presentation.smooth:
        raise PresentationError("Scott configurations need smooth branches")
    tree, end = presentation.base, presentation.end
    points = list(tree.ids) + [f"f{i + 1}" for i in range(len(presentation.curves))]
    curves = []
    for i, c in enumerate(presentation.curves):
        curves.append(list(path_between(tree, c.vertex, end)) + [f"f{i + 1}"])
    covered = {x for c in curves for x in c}
    stray = [x for x in tree.ids if x not in covered]
    if stray:
        # only possible with curve-free -1 leaves, i.e. a non-minimal graph
        raise PresentationError(f"vertices {stray} lie on no curve's path to the end")
    config = Configuration.from_sets(curves, points, [c.vertex for c in presentation.curves])
    rep = validate(config, presentation)
    assert rep.valid, rep.violations
    return config


def _presentation_with(tree, end, vertices):
    gram = _smooth_gram(tree, end, vertices)
    slots = tuple(CurveSlot(w, gram[i][i]) for i, w in enumerate(vertices))
    return SandwichPresentation(tree, end, slots, gram)


def switch_end(presentation, config, w, chosen):
    """Move the end vertex to ``w`` using the curve ``chosen`` (an index) at w.

    The chosen curve keeps its index and is re-attached to the old end; every
    other curve is replaced by its symmetric difference with it.
    """
    tree, v = presentation.base, presentation.end
    if not presentation.smooth:
        raise PresentationError("switching is defined for smooth presentations")
    if w not in tree or w == v:
        raise PresentationError(f"cannot switch the end to {w!r}")
    if tree.degree(w) + tree.framing(w) >= 0:
        raise PresentationError(f"{w} has deg+e >= 0 and cannot become the end")
    if not 0 <= chosen < len(presentation.curves) or presentation.curves[chosen].vertex != w:
        raise PresentationError(f"curve {chosen} does not lie on {w}")
    rep = validate(config, presentation)
    if not rep.valid:
        raise ConfigurationError(f"configuration does not fit the presentation: {rep.violations}")
    base = config.point_set(chosen)
    curves = []
    for i in range(len(config.curves)):
        if i == chosen:
            curves.append(sorted(base))
        else:
            curves.append(sorted(config.point_set(i) ^ base))
    verts = [c.vertex for c in presentation.curves]
    verts[chosen] = v
    new_pres = _presentation_with(tree, w, verts)
    new_conf = Configuration.from_sets(curves, config.points, verts)
    rep = validate(new_conf, new_pres)
    assert rep.valid, rep.violations
    return new_pres, new_conf
