"""Reduction of smooth-branch configurations along reducing triples.

A step picks a triple v <= w <= z (order: x > y when y lies on the path from
x to v), names the point Q that the curve on w has and the chosen curve on z
lacks, contracts the edge separating the vertices whose curves contain Q,
and deletes Q and the curve on w.  The quantity delta is preserved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .configuration import Configuration, validate
from .graph import contract_edge, delta, path_between
from .sandwich import PresentationError, _presentation_with, switch_end


class ReductionError(ValueError):
    pass


class SeparationError(ReductionError):
    pass


class QPropagateError(ReductionError):
    """A vertex above a Q-vertex has a curve missing Q."""


@dataclass(frozen=True)
class ReducingTriple:
    v: str
    w: str
    z: str
    cw: int  # curve index on w
    cz: int  # curve index on z
    extended: bool = False  # v = w of degree < 3 and z a node

    def to_json(self):
        return {"v": self.v, "w": self.w, "z": self.z, "cw": self.cw, "cz": self.cz,
                "extended": self.extended}


def counts_for_end(presentation, v):
    """Curve counts after moving the end of the blowdown to v."""
    c = presentation.counts()
    c[presentation.end] += 1
    c[v] -= 1
    return c


def _curves_for_end(presentation, v):
    """Curve indices per vertex once the end is moved to v (one curve of v goes to the old end)."""
    per = {x: presentation.curves_at(x) for x in presentation.base.ids}
    if v != presentation.end:
        moved = per[v][0]
        per[v] = per[v][1:]
        per[presentation.end] = per[presentation.end] + [moved]
    return per


def small_nodes(tree):
    """Nodes with deg + e > -2; the Q-propagation check assumes there are none."""
    return [x for x in tree.nodes() if tree.degree(x) + tree.framing(x) > -2]


def find_triples(presentation, config=None, strict=False):
    tree = presentation.base
    if strict and small_nodes(tree):
        raise ReductionError(f"nodes {small_nodes(tree)} are not large")
    order = {x: k for k, x in enumerate(tree.ids)}
    out = []
    for v in tree.ids:
        if not presentation.curves_at(v):
            continue
        per = _curves_for_end(presentation, v)
        cnt = {x: len(per[x]) for x in per}
        for z in tree.ids:
            path = path_between(tree, v, z)
            interior = path[1:-1]
            # the path meets the rest of the tree only at its ends
            if any(tree.degree(x) != 2 for x in interior):
                continue
            for w in path:
                inner = [x for x in interior if x != w]
                if any(cnt[x] for x in inner):
                    continue
                # additive curve requirement
                need = {}
                for x in (v, z):
                    need[x] = need.get(x, 0) + 1
                need[w] = need.get(w, 0) + 1
                if any(cnt[x] < k for x, k in need.items()):
                    continue
                if w not in (v, z) and cnt[w] != 1:
                    continue
                degs = {tree.degree(v), tree.degree(w), tree.degree(z)}
                plain = degs <= {1, 2} or v == w == z
                extended = (not plain and v == w and tree.degree(v) < 3 and tree.degree(z) > 2)
                if not (plain or extended):
                    continue
                cw = per[w][0]
                rest_z = [i for i in per[z] if i != cw]
                out.append(((len(path), order[v], order[w], order[z]),
                            ReducingTriple(v, w, z, cw, rest_z[0], extended)))
    out.sort(key=lambda t: t[0])
    return [t for _, t in out]


def _at_end(presentation, config, v):
    """Presentation and configuration whose blowdown ends at v."""
    if presentation.end == v:
        return presentation, config
    chosen = presentation.curves_at(v)[0]
    return switch_end(presentation, config, v, chosen)


def qpq(config, triple, presentation=None):
    """(Q, P, Q') for a triple; the extended variant uses the two curves on z."""
    cw = config.point_set(triple.cw)
    cz = config.point_set(triple.cz)
    if triple.extended and presentation is not None:
        on_z = [i for i in presentation.curves_at(triple.z) if i != triple.cw]
        if len(on_z) >= 2:
            common = config.point_set(on_z[0]) & config.point_set(on_z[1]) & cw
            if len(common) != 1:
                raise ReductionError("leafred violated: the curves on z meet C_v in "
                                     f"{len(common)} common points")
            q = cw - common
            if len(q) != 1:
                raise ReductionError("leafred violated: C_v has no single point off the common one")
            (Q,) = q
            p = cw & cz
            return Q, frozenset(p), frozenset(cz - p)
    q = cw - cz
    if len(q) != 1:
        raise ReductionError(f"C_w minus C_z has {len(q)} points, expected 1")
    (Q,) = q
    p = cw & cz
    return Q, frozenset(p), frozenset(cz - p)


def q_vertices(presentation, config, triple, Q):
    """Vertices having a curve other than C_w through Q, with the propagation check."""
    tree = presentation.base
    v = presentation.end
    hit = set()
    for x in tree.ids:
        idx = [i for i in presentation.curves_at(x) if i != triple.cw]
        if any(Q in config.point_set(i) for i in idx):
            hit.add(x)
    # every curve above a Q-vertex (other than w) must contain Q
    for x in hit:
        if x == triple.w:
            continue
        for a in tree.ids:
            if a == x or x not in path_between(tree, a, v):
                continue
            for i in presentation.curves_at(a):
                if i != triple.cw and Q not in config.point_set(i):
                    raise QPropagateError(f"{a} lies above {x} but its curve {i} misses Q")
    return hit


def separating_edge(presentation, config, triple, Q):
    """The edge cutting off the Q-vertices, or None when every vertex carries Q.

    The configuration must be the one whose blowdown ends at the triple's v.
    """
    tree = presentation.base
    v = presentation.end
    if v != triple.v:
        raise ReductionError("configuration must end at the triple's v")
    hit = q_vertices(presentation, config, triple, Q)
    bearing = {x for x in tree.ids if presentation.curves_at(x)}
    if not hit:
        raise SeparationError("no curve besides C_w contains Q (a free point)")
    if v in hit:
        if bearing <= hit | {triple.w}:
            return None
        raise SeparationError(f"Q-vertices {sorted(hit)} include v but not every vertex")
    # close upwards: everything above a Q-vertex is on the Q side
    up = set()
    for a in tree.ids:
        path = path_between(tree, a, v)
        if any(x in hit for x in path):
            up.add(a)
    roots = [a for a in up if path_between(tree, a, v)[1] not in up]
    if len(roots) != 1:
        raise SeparationError(f"Q-vertices {sorted(hit)} are not cut off by a single edge")
    # curve-free vertices below the root may sit on either side; every edge
    # down to the next curve-bearing vertex separates, and the contraction
    # has to absorb the loss of C_w, so the edge at w is preferred
    cands = []
    x = roots[0]
    while True:
        p = path_between(tree, x, v)[1]
        cands.append((p, x))
        if p == v or p in bearing:
            break
        x = p
    at_w = [e for e in cands if triple.w in e]
    return at_w[0] if at_w else cands[0]


@dataclass
class StepRecord:
    triple: ReducingTriple
    Q: str
    P: list
    Q_prime: list
    edge: tuple
    merged_framing: int
    graph: dict
    config: dict
    delta: int

    def to_json(self):
        return {"triple": self.triple.to_json(), "Q": self.Q, "P": self.P,
                "Q_prime": self.Q_prime, "edge": list(self.edge),
                "merged_framing": self.merged_framing, "graph": self.graph,
                "config": self.config, "delta": self.delta}


def reduce_step(presentation, config, triple):
    # curve indices survive the switch, so the triple's C_w and C_z still apply
    pres, conf = _at_end(presentation, config, triple.v)
    Q, P, Qp = qpq(conf, triple, pres)
    edge = separating_edge(pres, conf, triple, Q)
    if edge is None:
        raise ReductionError("terminal: every vertex contains Q, no edge to contract")
    a, b = edge
    tree = pres.base
    keep = [i for i in range(len(conf.curves)) if i != triple.cw]
    verts = [pres.curves[i].vertex for i in keep]
    verts = [a if x == b else x for x in verts]
    end = a if pres.end in (a, b) else pres.end
    count = verts.count(a)
    deg_after = tree.degree(a) + tree.degree(b) - 2
    e_new = -deg_after - count - (1 if end == a else 0)
    new_tree = contract_edge(tree, (a, b), e_new)
    try:
        new_pres = _presentation_with(new_tree, end, verts)
    except PresentationError as exc:
        raise ReductionError(f"contraction gives no presentation: {exc}") from None
    curves = [sorted(conf.point_set(i) - {Q}) for i in keep]
    points = [p for p in conf.points if p != Q]
    new_conf = Configuration.from_sets(curves, points, verts)
    rep = validate(new_conf, new_pres)
    if not rep.valid:
        raise ReductionError(f"reduced configuration does not validate: {rep.violations}")
    for x in new_tree.ids:
        c = -(new_tree.degree(x) + new_tree.framing(x)) - (1 if x == end else 0)
        if c != new_pres.curve_count(x):
            raise ReductionError(f"curve count at {x} is {new_pres.curve_count(x)}, expected {c}")
    if delta(new_tree) != delta(tree):
        raise ReductionError("delta changed")
    rec = StepRecord(triple, Q, sorted(P), sorted(Qp), (a, b), e_new,
                     new_tree.to_json(), new_conf.to_json(), delta(new_tree))
    return new_pres, new_conf, rec


@dataclass
class ReductionTrace:
    initial_delta: int
    small_nodes: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # (step number, triple, reason)
    final_presentation: object = None
    final_config: object = None

    @property
    def final_delta(self):
        return delta(self.final_presentation.base)

    def to_json(self):
        return {"initial_delta": self.initial_delta, "final_delta": self.final_delta,
                "small_nodes": self.small_nodes,
                "steps": [s.to_json() for s in self.steps],
                "skipped": [{"step": k, "triple": t.to_json(), "reason": r}
                            for k, t, r in self.skipped],
                "final_graph": self.final_presentation.base.to_json(),
                "final_config": self.final_config.to_json()}


def _try_triples(presentation, config):
    tried = []
    for t in find_triples(presentation, config):
        try:
            return reduce_step(presentation, config, t), tried
        except QPropagateError:
            raise
        except ReductionError as exc:
            tried.append((t, str(exc)))
    return None, tried


def reduce_fully(presentation, config):
    rep = validate(config, presentation)
    if not rep.valid:
        raise ReductionError(f"input configuration is not valid: {rep.violations}")
    trace = ReductionTrace(delta(presentation.base), small_nodes(presentation.base))
    limit = len(presentation.base)
    while True:
        done, tried = _try_triples(presentation, config)
        for t, reason in tried:
            trace.skipped.append((len(trace.steps), t, reason))
        if done is None:
            break
        presentation, config, rec = done
        trace.steps.append(rec)
        if len(trace.steps) > limit:
            raise ReductionError("reduction did not terminate within |V| steps")
    trace.final_presentation = presentation
    trace.final_config = config
    assert trace.final_delta == trace.initial_delta
    return trace


@dataclass
class ReducedReport:
    reduced: bool  # no triple admits a step
    structural: bool  # nodes carry two curves, others at most one, node-free parts at most two
    triples: int
    notes: list = field(default_factory=list)

    def to_json(self):
        return {"reduced": self.reduced, "structural": self.structural,
                "triples": self.triples, "notes": self.notes}


def is_reduced(presentation, config):
    done, tried = _try_triples(presentation, config)
    tree = presentation.base
    nodes = set(tree.nodes())
    notes = []
    ok = True
    for x in tree.ids:
        c = presentation.curve_count(x)
        if x in nodes and c != 2:
            ok = False
            notes.append(f"node {x} carries {c} curves")
        if x not in nodes and c > 1:
            ok = False
            notes.append(f"{x} carries {c} curves")
    seen = set()
    for x in tree.ids:
        if x in nodes or x in seen:
            continue
        comp, todo = [], [x]
        seen.add(x)
        while todo:
            y = todo.pop()
            comp.append(y)
            for nb in tree.neighbors(y):
                if nb not in nodes and nb not in seen:
                    seen.add(nb)
                    todo.append(nb)
        total = sum(presentation.curve_count(y) for y in comp)
        if total > 2:
            ok = False
            notes.append(f"component {sorted(comp)} carries {total} curves")
    reduced = done is None
    if reduced != ok:
        notes.append("operational and structural notions of reduced disagree here")
    return ReducedReport(reduced, ok, len(find_triples(presentation, config)), notes)


def reduced_size_bound(s, has_deg4):
    if s < 1:
        raise ValueError("need at least one node")
    return 7 * s + 1 if has_deg4 else 7 * s - 2
