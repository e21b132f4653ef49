"""Point/curve configurations: the combinatorics of a picture deformation fiber.

A curve is a multiset of points.  Smooth branches use multiplicities 0/1;
a cusp branch carries exactly one double point.  Two curves meet in
sum_p m_p(A) * m_p(B) points counted with multiplicity.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class Configuration:
    points: tuple
    curves: tuple  # each curve: tuple of (point, multiplicity), sorted by point order
    vertices: tuple = None  # curve index -> vertex of the base graph, if known

    def __post_init__(self):
        known = set(self.points)
        if len(known) != len(self.points):
            raise ConfigurationError("duplicate point labels")
        for c in self.curves:
            for p, m in c:
                if p not in known:
                    raise ConfigurationError(f"curve uses unknown point {p!r}")
                if m <= 0:
                    raise ConfigurationError("multiplicities must be positive")
        if self.vertices is not None and len(self.vertices) != len(self.curves):
            raise ConfigurationError("vertex assignment has the wrong length")

    @classmethod
    def from_sets(cls, curves, points=None, vertices=None):
        """Curves given as iterables (multiplicity 1) or point -> multiplicity mappings."""
        supports = []
        for c in curves:
            if hasattr(c, "items"):
                supports.append({str(p): int(m) for p, m in c.items() if m})
            else:
                supports.append({str(p): 1 for p in c})
        if points is None:
            seen = []
            for s in supports:
                for p in s:
                    if p not in seen:
                        seen.append(p)
            points = _natural_sort(seen)
        points = tuple(str(p) for p in points)
        order = {p: i for i, p in enumerate(points)}
        curves = tuple(tuple(sorted(s.items(), key=lambda pm: order[pm[0]])) for s in supports)
        return cls(points, curves, None if vertices is None else tuple(vertices))

    def support(self, i):
        return dict(self.curves[i])

    def point_set(self, i):
        return frozenset(p for p, _ in self.curves[i])

    def size(self, i):
        return sum(m for _, m in self.curves[i])

    def intersection(self, i, j):
        a = dict(self.curves[i])
        return sum(m * a.get(p, 0) for p, m in self.curves[j])

    @property
    def mu(self):
        return len(self.points) - len(self.curves)

    def with_vertices(self, vertices):
        return Configuration(self.points, self.curves, tuple(vertices))

    def relabel_points(self, mapping):
        return Configuration.from_sets([{mapping[p]: m for p, m in c} for c in self.curves],
                                       [mapping[p] for p in self.points], self.vertices)

    def canonical_points(self):
        """Relabel points 1..N in order of first appearance along the curves."""
        order = []
        for c in self.curves:
            for p, _ in c:
                if p not in order:
                    order.append(p)
        order += [p for p in self.points if p not in order]
        return self.relabel_points({p: str(i + 1) for i, p in enumerate(order)})

    def to_json(self):
        out = {"points": list(self.points), "curves": []}
        for i, c in enumerate(self.curves):
            entry = {"support": {p: m for p, m in c}}
            if self.vertices is not None:
                entry = {"vertex": self.vertices[i], **entry}
            out["curves"].append(entry)
        return out

    @classmethod
    def from_json(cls, data):
        curves = [d["support"] for d in data["curves"]]
        verts = [d.get("vertex") for d in data["curves"]]
        return cls.from_sets(curves, data.get("points"),
                             None if any(v is None for v in verts) else verts)


def _natural_sort(labels):
    def key(s):
        return (0, int(s), "") if s.isdigit() else (1, 0, s)
    return sorted(labels, key=key)


@dataclass
class ValidationReport:
    valid: bool
    mu: int
    free_points: list
    violations: list = field(default_factory=list)

    def to_json(self):
        return {"valid": self.valid, "mu": self.mu, "free_points": self.free_points,
                "violations": self.violations}


def validate(config, presentation):
    """Check a configuration against the sizes and Gram matrix of a presentation."""
    slots = presentation.curves
    if len(slots) != len(config.curves):
        raise ConfigurationError(
            f"presentation has {len(slots)} curves, configuration has {len(config.curves)}")
    bad = []
    for i, slot in enumerate(slots):
        if config.size(i) != slot.size:
            bad.append(f"curve {i}: size {config.size(i)} != {slot.size}")
        mults = [m for _, m in config.curves[i]]
        if slot.kind == "smooth":
            if any(m != 1 for m in mults):
                bad.append(f"curve {i}: smooth branch with a multiple point")
        elif sorted(m for m in mults if m > 1) != [2]:
            bad.append(f"curve {i}: cusp branch needs exactly one double point")
    g = presentation.gram
    for i in range(len(slots)):
        for j in range(i + 1, len(slots)):
            k = config.intersection(i, j)
            if k != g[i][j]:
                bad.append(f"curves {i},{j}: intersect {k} != {g[i][j]}")
    on = {p: 0 for p in config.points}
    for c in config.curves:
        for p, m in c:
            on[p] += m
    free = [p for p in config.points if on[p] == 1]
    unused = [p for p in config.points if on[p] == 0]
    if unused:
        bad.append(f"points on no curve: {unused}")
    return ValidationReport(not bad, config.mu, free, bad)


def incidence_matrix(config):
    """Rows are curves, columns points; entry = multiplicity."""
    index = {p: k for k, p in enumerate(config.points)}
    rows = []
    for c in config.curves:
        row = [0] * len(config.points)
        for p, m in c:
            row[index[p]] = m
        rows.append(row)
    return rows
