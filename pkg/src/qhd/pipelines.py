"""End-to-end checks and enumeration sweeps.

A sweep enumerates framed trees, runs a fixed chain of necessary conditions
on each (cheap lattice tests first, the configuration search last) and
writes one JSON record per tree.  A tree survives only if every enabled
filter passes; a filter that runs out of budget is reported as "unknown".
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import asdict, dataclass, field

from .graph import PlumbingTree, TreeConstraints, canonical_form, delta, enumerate_trees
from .lattice import EmbeddingTimeout, anticanonical, determinant, diagonal_embed, intersection_matrix
from .sandwich import PresentationError, presentation_smooth, star_instances, star_presentation, is_known_case, STAR_FAMILIES
from .solver import SolveMode, solve

FILTERS = ("negative_definite", "square_det", "zk_test", "embedding", "solver")


# ---------------------------------------------------------------- single graph

@dataclass
class GraphReport:
    vertices: int
    negative_definite: bool
    det: int = None
    square_det: bool = None
    zk_square: str = None
    zk_test: bool = None
    embedding: list = None  # rows, or None when no embedding exists
    embedding_status: str = "skipped"  # found | none | timeout | skipped
    delta: int = 0

    @property
    def passes(self):
        return bool(self.negative_definite and self.square_det and self.zk_test
                    and self.embedding_status == "found")

    def to_json(self):
        out = asdict(self)
        out["passes"] = self.passes
        return out


def check_graph(tree, embed_timeout=None):
    form = intersection_matrix(tree)
    rep = GraphReport(len(tree), form.negative_definite, delta=delta(tree))
    if not form.negative_definite:
        return rep
    rep.det, rep.square_det = determinant(form)
    ac = anticanonical(form)
    rep.zk_square, rep.zk_test = str(ac.zk_square), ac.zk_test
    try:
        rows = diagonal_embed(form, timeout=embed_timeout)
    except EmbeddingTimeout:
        rep.embedding_status = "timeout"
    else:
        rep.embedding = rows
        rep.embedding_status = "none" if rows is None else "found"
    return rep


def default_end(tree):
    """First vertex (in id order) that can end the blowdown: it must carry a curvetta."""
    for v in tree.ids:
        if -(tree.degree(v) + tree.framing(v)) >= 1:
            return v
    return None


# ---------------------------------------------------------------- sweeps

_FRAMING_PRESETS = {"reduced": TreeConstraints.reduced}


@dataclass
class SweepSpec:
    max_vertices: int
    framings: object = "reduced"  # preset name or {degree: [framings], "node": "-deg-2" | [...]}
    min_vertices: int = 1
    min_nodes: int = 0
    max_nodes: int = None
    delta: int = None
    filters: tuple = FILTERS
    timeout: float = None  # seconds per filter call

    def constraints(self):
        kw = dict(min_vertices=self.min_vertices, min_nodes=self.min_nodes,
                  max_nodes=self.max_nodes, delta=self.delta)
        if isinstance(self.framings, str):
            if self.framings not in _FRAMING_PRESETS:
                raise ValueError(f"unknown framing preset {self.framings!r}")
            return _FRAMING_PRESETS[self.framings](self.max_vertices, **kw)
        table = {}
        for key, val in self.framings.items():
            if key == "node" and val == "-deg-2":
                table["node"] = lambda d: (-d - 2,)
            elif key in ("node", "default"):
                table[key] = tuple(val)
            else:
                table[int(key)] = tuple(val)
        return TreeConstraints(self.max_vertices, table, **kw)

    def to_json(self):
        out = asdict(self)
        out["filters"] = list(self.filters)
        return out

    @classmethod
    def from_json(cls, data):
        data = dict(data)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown sweep fields: {sorted(unknown)}")
        if "filters" in data:
            bad = [f for f in data["filters"] if f not in FILTERS]
            if bad:
                raise ValueError(f"unknown filters: {bad}")
            data["filters"] = tuple(f for f in FILTERS if f in data["filters"])
        return cls(**data)


def graph_key(tree):
    return json.dumps(canonical_form(tree), separators=(",", ":"))


def evaluate(tree, filters=FILTERS, timeout=None):
    """Run the filter chain on one tree; later filters are skipped after a failure."""
    outcome = {f: "skipped" for f in FILTERS}
    certs = {}
    form = intersection_matrix(tree)
    alive = True

    def mark(name, ok):
        nonlocal alive
        outcome[name] = "pass" if ok else "fail"
        alive = alive and ok

    for name in FILTERS:
        if not alive:
            break
        if name not in filters:
            continue
        if name == "negative_definite":
            mark(name, form.negative_definite)
        elif not form.negative_definite:
            # everything below needs an invertible form
            outcome[name] = "fail"
            alive = False
        elif name == "square_det":
            d, ok = determinant(form)
            certs["det"] = d
            mark(name, ok)
        elif name == "zk_test":
            ac = anticanonical(form)
            certs["zk_square"] = str(ac.zk_square)
            mark(name, ac.zk_test)
        elif name == "embedding":
            try:
                rows = diagonal_embed(form, timeout=timeout)
            except EmbeddingTimeout:
                outcome[name] = "unknown"
                alive = False
                continue
            if rows is not None:
                certs["embedding"] = rows
            mark(name, rows is not None)
        elif name == "solver":
            end = default_end(tree)
            if end is None:
                mark(name, False)
                continue
            try:
                pres = presentation_smooth(tree, end)
            except PresentationError:
                mark(name, False)
                continue
            res = solve(pres, SolveMode(mu0=True, emit="first", timeout=timeout))
            certs["end"] = end
            if res.status == "timeout":
                outcome[name] = "unknown"
                alive = False
                continue
            if res.solutions:
                certs["configuration"] = res.solutions[0].to_json()
            mark(name, res.status == "found")
    enabled = [f for f in FILTERS if f in filters]
    survivor = all(outcome[f] == "pass" for f in enabled)
    unknown = any(v == "unknown" for v in outcome.values())
    return {"key": graph_key(tree), "graph": tree.to_json(), "delta": delta(tree),
            "filters": outcome, "certificates": certs,
            "verdict": "survivor" if survivor else ("unknown" if unknown else "excluded")}


@dataclass
class SweepSummary:
    spec: dict
    total: int = 0
    survivors: list = field(default_factory=list)
    unknown: int = 0
    failed_at: dict = field(default_factory=dict)  # first failing filter -> count
    elapsed: float = 0.0

    @property
    def certified_empty(self):
        return self.total > 0 and not self.survivors and self.unknown == 0

    def to_json(self):
        return {"spec": self.spec, "total": self.total, "survivors": self.survivors,
                "unknown": self.unknown, "failed_at": self.failed_at,
                "certified_empty": self.certified_empty, "elapsed": round(self.elapsed, 3)}


def _eval_job(args):
    tree_json, filters, timeout = args
    return evaluate(PlumbingTree.from_json(tree_json), filters, timeout)


def _read_done(path):
    done = {}
    if path and os.path.exists(path):
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    break  # a torn last line from an interrupted run
                done[rec["key"]] = rec
    return done


def run_sweep(spec, out=None, resume=True, jobs=1):
    """Enumerate, filter and summarise.  Records are written in enumeration order."""
    start = time.monotonic()
    done = _read_done(out) if resume else {}
    trees = list(enumerate_trees(spec.constraints()))
    todo = [t for t in trees if graph_key(t) not in done]
    args = [(t.to_json(), tuple(spec.filters), spec.timeout) for t in todo]
    if jobs > 1 and len(args) > 1:
        from multiprocessing import Pool
        with Pool(jobs) as pool:
            fresh = pool.map(_eval_job, args, chunksize=8)
    else:
        fresh = [_eval_job(a) for a in args]
    fresh = {r["key"]: r for r in fresh}
    records = [done.get(graph_key(t)) or fresh[graph_key(t)] for t in trees]
    if out:
        with open(out, "w") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    summary = SweepSummary(spec.to_json())
    for rec in records:
        summary.total += 1
        if rec["verdict"] == "survivor":
            summary.survivors.append(rec)
        elif rec["verdict"] == "unknown":
            summary.unknown += 1
        else:
            first = next((f for f in FILTERS if rec["filters"][f] == "fail"), "none")
            summary.failed_at[first] = summary.failed_at.get(first, 0) + 1
    summary.elapsed = time.monotonic() - start
    return summary


def two_node_spec(max_vertices=12):
    return SweepSpec(max_vertices, "reduced", min_nodes=2, max_nodes=2, delta=1)


def one_node_spec(max_vertices=12, target_delta=2):
    return SweepSpec(max_vertices, "reduced", min_nodes=1, max_nodes=1, delta=target_delta,
                     filters=FILTERS[:-1])


# ---------------------------------------------------------------- star families

def expected_ells(family, n):
    """Cusp positions admitted by the classification; None when it is not pinned here."""
    table = {"C6": {n}, "C3": {n, n - 3}, "C2": {n, n - 4}, "B4": {n}, "A3": {n},
             "A^4": {n}, "B^4": {n}, "C^4": {n}}
    got = table.get(family)
    return None if got is None else {x for x in got if x >= 0}


@dataclass
class StarRow:
    family: str
    n: int
    counts: tuple
    ell: int
    known_case: bool
    status: str
    elapsed: float

    def to_json(self):
        out = asdict(self)
        out["counts"] = list(self.counts)
        return out


@dataclass
class StarSweepResult:
    family: str
    n_max: int
    rows: list

    def found_ells(self, n):
        return {r.ell for r in self.rows if r.n == n and r.status == "found"}

    @property
    def exhaustive(self):
        return all(r.status != "timeout" for r in self.rows)

    def matches(self):
        """Per n: found cusp positions equal the admitted ones (None if not pinned)."""
        out = {}
        for n in sorted({r.n for r in self.rows}):
            exp = expected_ells(self.family, n)
            out[n] = None if exp is None else self.found_ells(n) == exp
        return out

    def to_json(self):
        return {"family": self.family, "n_max": self.n_max, "exhaustive": self.exhaustive,
                "matches": {str(k): v for k, v in self.matches().items()},
                "rows": [r.to_json() for r in self.rows]}


def star_sweep(family, n_max, timeout=None, n_min=1):
    if family not in STAR_FAMILIES:
        raise ValueError(f"unknown star family {family!r}")
    rows = []
    for n in range(n_min, n_max + 1):
        for inst in star_instances(family, n):
            pres = star_presentation(inst)
            res = solve(pres, SolveMode(mu0=True, emit="first", timeout=timeout))
            rows.append(StarRow(family, n, inst.counts, inst.ell, is_known_case(inst),
                                res.status, round(res.elapsed, 4)))
    return StarSweepResult(family, n_max, rows)
