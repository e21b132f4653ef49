"""Command-line entry point.

Exit codes: 0 success, 1 negative verdict (no solution, check failed, ...),
2 usage or input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

OK, NEGATIVE, USAGE, BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


def _dump(obj, fh=None):
    fh = fh or sys.stdout
    fh.write(json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n")


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def load_bundle(path):
    """A graph file, or an object with "graph" plus optional "end" and "config"."""
    from .configuration import Configuration
    from .graph import PlumbingTree

    data = _read_json(path)
    try:
        if "graph" in data:
            tree = PlumbingTree.from_json(data["graph"])
            conf = Configuration.from_json(data["config"]) if "config" in data else None
            return tree, data.get("end"), conf
        return PlumbingTree.from_json(data), None, None
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed graph ({exc})") from None


def _presentation(tree, end):
    from .pipelines import default_end
    from .sandwich import presentation_smooth

    end = end or default_end(tree)
    if end is None:
        raise InputError("no vertex can end the blowdown")
    if end not in tree:
        raise InputError(f"unknown end vertex {end!r}")
    return presentation_smooth(tree, end)


def _jobs(args):
    if getattr(args, "jobs", None):
        return args.jobs
    env = os.environ.get("QHD_JOBS")
    return int(env) if env and env.isdigit() else 1


# ---------------------------------------------------------------- subcommands

def cmd_graph(args):
    from .graph import PlumbingTree, fpp_graph, linear_from_fraction

    if args.file:
        tree = load_bundle(args.file)[0]
    elif args.linear:
        tree = PlumbingTree.linear(args.linear)
    elif args.fraction:
        p, q = args.fraction
        tree = linear_from_fraction(p, q)
    elif args.fpp is not None:
        tree = fpp_graph(args.fpp, args.l)
    else:
        raise InputError("give a file, --linear, --fraction or --fpp")
    if args.format == "dot":
        sys.stdout.write(tree.to_dot())
    else:
        _dump(tree.to_json())
    return OK


def cmd_present(args):
    from .sandwich import scott_incidence

    tree, end, _ = load_bundle(args.graph)
    pres = _presentation(tree, args.end or end)
    out = pres.to_json()
    if args.scott:
        out["scott"] = scott_incidence(pres).to_json()
    _dump(out)
    return OK


def cmd_solve(args):
    from .solver import SolveMode, solve

    tree, end, _ = load_bundle(args.graph)
    pres = _presentation(tree, args.end or end)
    emit = "count" if args.count else ("all" if args.all else "first")
    res = solve(pres, SolveMode(mu0=args.mu0, emit=emit, timeout=args.timeout))
    out = {"end": pres.end, **res.to_json()}
    if res.status == "none":
        out["certificate"] = "exhaustive search found no configuration"
    _dump(out)
    return {"found": OK, "none": NEGATIVE, "timeout": BUDGET}[res.status]


def cmd_reduce(args):
    from .reduction import reduce_fully
    from .solver import SolveMode, solve

    tree, end, conf = load_bundle(args.graph)
    if args.config:
        from .configuration import Configuration
        conf = Configuration.from_json(_read_json(args.config))
    pres = _presentation(tree, args.end or end)
    if conf is None:
        res = solve(pres, SolveMode(timeout=args.timeout))
        if res.status == "timeout":
            _dump({"status": "timeout"})
            return BUDGET
        if not res.solutions:
            _dump({"status": "none", "certificate": "no configuration to reduce"})
            return NEGATIVE
        conf = res.solutions[0]
    elif conf.vertices is None:
        raise InputError("configuration curves need their vertices")
    _dump(reduce_fully(pres, conf).to_json())
    return OK


def cmd_fiber(args):
    from .configuration import Configuration
    from .homology import fiber_invariants

    data = _read_json(args.config)
    conf = Configuration.from_json(data.get("config", data))
    _dump(fiber_invariants(conf).to_json())
    return OK


def cmd_check(args):
    from .pipelines import check_graph

    tree = load_bundle(args.graph)[0]
    rep = check_graph(tree, embed_timeout=args.timeout)
    _dump(rep.to_json())
    if rep.embedding_status == "timeout":
        return BUDGET
    return OK if rep.passes else NEGATIVE


def cmd_family(args):
    from .families import cl_config, fpp_config, reconstruct_graph, t_config

    p = args.params
    if args.name == "fpp":
        if len(p) not in (1, 2):
            raise InputError("fpp takes n [l]")
        conf = fpp_config(*p)
    elif args.name == "cl":
        if len(p) != 2:
            raise InputError("cl takes k n")
        conf = cl_config(p[0], p[1], args.extension, args.b)
    else:
        if len(p) != 3:
            raise InputError("t takes a b c")
        conf = t_config(*p)
    out = {"config": conf.to_json()}
    if args.reconstruct:
        tree, root, verts = reconstruct_graph(conf, with_vertices=True)
        out["graph"] = tree.to_json()
        out["end"] = root
        out["config"] = conf.with_vertices(verts).to_json()
    if args.emit:
        with open(args.emit, "w") as fh:
            _dump(out, fh)
    _dump(out)
    return OK


def cmd_sweep(args):
    from .pipelines import SweepSpec, run_sweep

    spec = SweepSpec.from_json(_read_json(args.spec))
    if args.timeout is not None:
        spec.timeout = args.timeout
    summary = run_sweep(spec, out=args.out, resume=not args.fresh, jobs=_jobs(args))
    out = summary.to_json()
    out.pop("elapsed")
    _dump(out)
    return BUDGET if summary.unknown else OK


def cmd_star_sweep(args):
    from .pipelines import star_sweep

    res = star_sweep(args.family, args.max_n, timeout=args.timeout)
    out = res.to_json()
    for row in out["rows"]:
        row.pop("elapsed")
    _dump(out)
    if not res.exhaustive:
        return BUDGET
    return NEGATIVE if False in res.matches().values() else OK


# ---------------------------------------------------------------- parser

def build_parser():
    ap = argparse.ArgumentParser(prog="qhd", description="Combinatorial QHD smoothing toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("graph", help="build or convert a plumbing graph")
    g.add_argument("file", nargs="?")
    g.add_argument("--linear", type=int, nargs="+", metavar="E")
    g.add_argument("--fraction", type=int, nargs=2, metavar=("P", "Q"),
                   help="linear graph of P^2/(PQ-1)")
    g.add_argument("--fpp", type=int, metavar="N")
    g.add_argument("--l", type=int, default=0)
    g.add_argument("--format", choices=("json", "dot"), default="json")
    g.set_defaults(func=cmd_graph)

    p = sub.add_parser("present", help="smooth presentation of a graph")
    p.add_argument("graph")
    p.add_argument("--end")
    p.add_argument("--scott", action="store_true", help="include the Scott configuration")
    p.set_defaults(func=cmd_present)

    s = sub.add_parser("solve", help="search configurations for a presentation")
    s.add_argument("graph")
    s.add_argument("--end")
    s.add_argument("--mu0", dest="mu0", action="store_true", default=True)
    s.add_argument("--any-mu", dest="mu0", action="store_false")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--count", action="store_true")
    mode.add_argument("--all", action="store_true")
    s.add_argument("--timeout", type=float)
    s.set_defaults(func=cmd_solve)

    r = sub.add_parser("reduce", help="reduce a configuration step by step")
    r.add_argument("graph")
    r.add_argument("--end")
    r.add_argument("--config")
    r.add_argument("--timeout", type=float)
    r.set_defaults(func=cmd_reduce)

    f = sub.add_parser("fiber", help="Milnor fiber invariants of a configuration")
    f.add_argument("config")
    f.set_defaults(func=cmd_fiber)

    c = sub.add_parser("check", help="necessary conditions on a graph")
    c.add_argument("graph")
    c.add_argument("--timeout", type=float)
    c.set_defaults(func=cmd_check)

    fam = sub.add_parser("family", help="explicit configurations")
    fam.add_argument("name", choices=("fpp", "cl", "t"))
    fam.add_argument("--params", type=int, nargs="+", required=True)
    fam.add_argument("--extension", choices=("cluster", "star"))
    fam.add_argument("--b", type=int, default=0)
    fam.add_argument("--emit")
    fam.add_argument("--reconstruct", action="store_true")
    fam.set_defaults(func=cmd_family)

    sw = sub.add_parser("sweep", help="enumerate trees and run the filter chain")
    sw.add_argument("--spec", required=True)
    sw.add_argument("--out")
    sw.add_argument("--fresh", action="store_true", help="ignore records already in --out")
    sw.add_argument("--jobs", type=int)
    sw.add_argument("--timeout", type=float)
    sw.set_defaults(func=cmd_sweep)

    st = sub.add_parser("star-sweep", help="solver table for a star family")
    st.add_argument("--family", required=True)
    st.add_argument("--max-n", type=int, required=True)
    st.add_argument("--timeout", type=float)
    st.add_argument("--jobs", type=int)
    st.set_defaults(func=cmd_star_sweep)
    return ap


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"qhd: {exc}", file=sys.stderr)
        return USAGE
    except ValueError as exc:
        # domain errors (bad parameters, impossible presentations) are input errors
        print(f"qhd: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
