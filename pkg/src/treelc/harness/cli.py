"""Command-line entry point.

Exit codes: 0 when every verdict holds, 1 on verdict failures, 2 on input
errors.  Each global flag can also be set through an environment variable
named TREELC_<FLAG> (for example TREELC_SEED=7 or TREELC_Q_GRID=1,1/2);
flags given on the command line win.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from ..errors import ParseError, TreeLCError
from ..exactnum import format_rational, parse_rational
from ..matroid import validate as validate_matroid
from ..poly import is_lorentzian, is_mconvex_function
from ..setfn import is_mnat_concave, is_valuated_matroid
from ..trees import UpperSubtree, c_T, certify_a_psd, classify, normalize_radius
from .generators import gen
from .io import Instance, dump_instance, dumps_canonical, jsonable, load_instance
from .suite import CLAIMS, DEFAULT_CAPS, DEFAULT_Q_GRID, InputError, RunConfig, render_report, run_suite

ENV_PREFIX = "TREELC_"
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def parse_q_grid(text: str) -> tuple:
    try:
        grid = tuple(parse_rational(t.strip()) for t in text.split(",") if t.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad q grid {text!r}: {exc}") from exc
    if not grid:
        raise InputError("empty q grid")
    return grid


def parse_caps(items: Sequence[str]) -> Dict[str, int]:
    caps = {}
    for item in items:
        for part in item.split(","):
            if not part.strip():
                continue
            key, sep, val = part.partition("=")
            if not sep or key.strip() not in DEFAULT_CAPS:
                raise InputError(f"bad cap {part!r}; known caps: {', '.join(sorted(DEFAULT_CAPS))}")
            caps[key.strip()] = int(val)
    return caps


def _env(name: str) -> Optional[str]:
    return os.environ.get(ENV_PREFIX + name)


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the verb from being reset by the subparser
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--q-grid", help="comma-separated rationals in (0,1]")
    common.add_argument("--mode", choices=("exact", "float"))
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", help="bisection tolerance for c_T (rational)")
    common.add_argument("--cap", action="append", metavar="KEY=N", help="size or count cap")

    p = argparse.ArgumentParser(prog="treelc", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="verb", required=True)

    v = sub.add_parser("validate", parents=[common], help="check the defining axioms of an instance file")
    v.add_argument("path")

    c = sub.add_parser("check", parents=[common], help="run one claim, on generated instances or on a file")
    c.add_argument("claim", choices=CLAIMS)
    c.add_argument("inputs", nargs="*", help="instance files; when given, generated instances are skipped")
    c.add_argument("-o", "--output")

    cert = sub.add_parser("certify", parents=[common], help="emit a certificate")
    cert.add_argument("what", choices=("tree-psd",))
    cert.add_argument("path")
    cert.add_argument("--upper", help="comma-separated vertices generating the upper subtree (default: all)")
    cert.add_argument("-o", "--output")

    ct = sub.add_parser("ct", parents=[common], help="bracket the optimal constant c_T of a tree")
    ct.add_argument("path")

    g = sub.add_parser("gen", parents=[common], help="generate a seeded instance")
    g.add_argument("kind")
    g.add_argument("params", nargs="*", metavar="KEY=VALUE")
    g.add_argument("-o", "--output")

    cv = sub.add_parser("convert", parents=[common], help="rewrite an instance file in canonical form")
    cv.add_argument("path_in")
    cv.add_argument("path_out", nargs="?")

    s = sub.add_parser("suite", parents=[common], help="run the claim suite")
    s.add_argument("--claims", help="comma-separated claim names (empty string selects none)")
    s.add_argument("--corpus", help="corpus directory with instances/<kind>/*.json")
    s.add_argument("-o", "--output")
    s.add_argument("--jobs", type=int, default=1)
    return p


def _config(args, **kw) -> RunConfig:
    flag = lambda name: getattr(args, name, None)  # noqa: E731
    grid_text = flag("q_grid") or _env("Q_GRID")
    mode = flag("mode") or _env("MODE") or "exact"
    seed = flag("seed") if flag("seed") is not None else int(_env("SEED") or 0)
    tol = parse_rational(flag("tol") or _env("TOL") or "1/1000000000")
    caps = parse_caps(([_env("CAP")] if _env("CAP") else []) + (flag("cap") or []))
    grid = parse_q_grid(grid_text) if grid_text else DEFAULT_Q_GRID
    return RunConfig(mode=mode, q_grid=grid, seed=seed, caps=caps, tol=tol, **kw)


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _parse_param(text: str):
    key, sep, val = text.partition("=")
    if not sep:
        raise InputError(f"expected KEY=VALUE, got {text!r}")
    try:
        return key, json.loads(val)
    except json.JSONDecodeError:
        return key, val


def cmd_validate(args) -> int:
    inst = load_instance(args.path)
    obj = inst.obj
    if inst.kind == "setfunction":
        v = is_mnat_concave(obj)
    elif inst.kind == "valuated":
        v = is_valuated_matroid(obj)
    elif inst.kind == "matroid":
        v = validate_matroid(obj.independent, obj.n)
    elif inst.kind == "poly":
        v = is_lorentzian(obj)
    elif inst.kind == "mconvex":
        v = is_mconvex_function(obj)
    else:  # trees are validated on load
        v = True
    ok = bool(v)
    out = {"kind": inst.kind, "valid": ok}
    if not ok:
        out["witness"] = jsonable(v.witness)
        out["reason"] = v.reason
    sys.stdout.write(dumps_canonical(out))
    return EXIT_OK if ok else EXIT_FAIL


def _finish(result, config, output) -> int:
    _emit(render_report(result.records, config), output)
    for r in result.failed:
        sys.stderr.write(f"{r['status']}: {r['key']}\n")
    return result.exit_code


def cmd_check(args) -> int:
    extra = [(f"input-{k:02d}-{Path(p).stem}", load_instance(p)) for k, p in enumerate(args.inputs)]
    config = _config(args, claims=[args.claim], extra=extra, generate=not extra)
    return _finish(run_suite(config), config, args.output)


def _tree_of(inst: Instance):
    if inst.kind != "tree":
        raise InputError(f"expected a tree instance, found {inst.kind}")
    T = inst.obj
    if T.radius == 0:
        raise InputError("tree has radius 0")
    return T, T.radius != 1


def cmd_certify(args) -> int:
    T, rescaled = _tree_of(load_instance(args.path))
    T = normalize_radius(T)
    if args.upper:
        seeds = []
        for tok in args.upper.split(","):
            tok = tok.strip()
            seeds.append(int(tok) if tok.lstrip("-").isdigit() else tok)
        U = UpperSubtree.closure(T, seeds)
    else:
        U = UpperSubtree.whole(T)
    cert = certify_a_psd(T, U)
    out = {
        "psd": True,
        "normalized_radius": rescaled,
        "labels": jsonable(list(cert.labels)),
        "pivots": jsonable(list(cert.pivots)),
        "steps": jsonable(list(cert.steps)),
        "trace": [dict(type=type(s).__name__, **jsonable(s)) for s in cert.trace],
    }
    _emit(dumps_canonical(out), args.output)
    return EXIT_OK


def cmd_ct(args) -> int:
    config = _config(args)
    T, rescaled = _tree_of(load_instance(args.path))
    T = normalize_radius(T)
    ct = c_T(T, config.tol)
    cls = classify(T)
    out = {
        "n_leaves": T.n_leaves,
        "normalized_radius": rescaled,
        "lo": format_rational(ct.lo),
        "hi": format_rational(ct.hi),
        "exact": ct.exact,
        "degenerate": ct.degenerate,
        "leaf_positive": cls.leaf_positive,
        "star_metric": cls.star_metric,
        "tol": format_rational(config.tol),
    }
    sys.stdout.write(dumps_canonical(out))
    return EXIT_OK


def cmd_gen(args) -> int:
    config = _config(args)
    params = dict(_parse_param(p) for p in args.params)
    try:
        inst = gen(args.kind, params, config.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(dump_instance(inst), args.output)
    return EXIT_OK


def cmd_convert(args) -> int:
    inst = load_instance(args.path_in)
    _emit(dump_instance(inst), args.path_out)
    return EXIT_OK


def cmd_suite(args) -> int:
    claims = None
    if args.claims is not None:
        claims = [c.strip() for c in args.claims.split(",") if c.strip()]
    config = _config(args, claims=claims, corpus=Path(args.corpus) if args.corpus else None, jobs=args.jobs)
    result = run_suite(config)
    for claim, counts in sorted(result.summary().items()):
        sys.stderr.write(f"{claim}: " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())) + "\n")
    return _finish(result, config, args.output)


COMMANDS = {
    "validate": cmd_validate,
    "check": cmd_check,
    "certify": cmd_certify,
    "ct": cmd_ct,
    "gen": cmd_gen,
    "convert": cmd_convert,
    "suite": cmd_suite,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.verb](args)
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_INPUT
    except (TreeLCError, OSError, ValueError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
