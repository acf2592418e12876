"""Command-line front end.

Exit codes: 0 success, 2 unreadable or invalid input, 3 analysis failure or
inconclusive certification, 4 certifier and re-checker disagree.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__, render, report
from .csp import CspStatus, csp_certify, verify_certificate
from .germ import ParseError, SemanticError, elaborate, parse_specs
from .germ.sets import ElaborationError
from .suites import SUITES

EXIT_OK, EXIT_INPUT, EXIT_ANALYSIS, EXIT_DISAGREE = 0, 2, 3, 4


class InputError(Exception):
    pass


def default_depth() -> int:
    raw = os.environ.get("POROLAB_DEPTH")
    if raw is None:
        return 64
    try:
        d = int(raw)
    except ValueError:
        raise InputError(f"POROLAB_DEPTH must be a positive integer, got {raw!r}")
    if d < 1:
        raise InputError("POROLAB_DEPTH must be a positive integer")
    return d


def _depth(args) -> int:
    return args.depth if args.depth is not None else default_depth()


def load_file(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}")
    try:
        specs = parse_specs(text)
    except (ParseError, SemanticError) as e:
        raise InputError(f"{path}:{e}")
    return [elaborate(s) for s in specs]


def _analyze_one(path, depth):
    return [report.analyze(E, depth) for E in load_file(path)]


def cmd_analyze(args) -> int:
    depth = _depth(args)
    # files are independent; results are written in input order
    with ThreadPoolExecutor(max_workers=min(4, len(args.paths))) as pool:
        futures = [pool.submit(_analyze_one, p, depth) for p in args.paths]
        reps = []
        for p, f in zip(args.paths, futures):
            try:
                reps.extend(f.result())
            except InputError as e:
                print(f"error: {e}", file=sys.stderr)
                return EXIT_INPUT
            except (ElaborationError, ArithmeticError, ValueError, LookupError) as e:
                print(f"error: {p}: analysis failed: {e}", file=sys.stderr)
                return EXIT_ANALYSIS
    if args.format == "json":
        sys.stdout.write(report.dumps(reps[0] if len(reps) == 1 else reps))
    else:
        sys.stdout.write("".join(report.text(r) for r in reps))
    return EXIT_OK


def cmd_certify(args) -> int:
    depth = _depth(args)
    sets = load_file(args.path)
    code = EXIT_OK
    out = []
    for E in sets:
        cert = csp_certify(E, depth)
        section = report._certificate(E, cert, depth, centers_shown=depth)
        section["name"] = E.name
        section["depth"] = depth
        out.append(section)
        recheck = verify_certificate(E, cert, depth)
        if cert.status is CspStatus.EMPIRICAL:
            print(f"{E.name}: no certificate, only an empirical reading at depth {depth}",
                  file=sys.stderr)
            code = max(code, EXIT_ANALYSIS)
        elif not recheck.ok:
            print(f"{E.name}: re-check disagrees with the certifier: "
                  f"{list(recheck.violations[:4])}", file=sys.stderr)
            code = EXIT_DISAGREE
        else:
            print(f"{E.name}: {cert.label}, re-check passed on {recheck.checked_blocks} items",
                  file=sys.stderr)
    sys.stdout.write(report.dumps(out[0] if len(out) == 1 else out))
    return code


def cmd_render(args) -> int:
    depth = args.depth if args.depth is not None else render.RENDER_DEPTH
    sets = load_file(args.path)
    if args.ascii:
        sys.stdout.write("".join(render.ascii_ruler(E, depth) for E in sets))
        return EXIT_OK
    text = "".join(render.svg(E, depth) for E in sets[:1])
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        print(f"error: cannot write {args.out}: {e.strerror}", file=sys.stderr)
        return EXIT_ANALYSIS
    return EXIT_OK


def cmd_verify(args) -> int:
    depth = args.depth if args.depth is not None else (32 if args.suite == "oracle"
                                                       else default_depth())
    res = SUITES[args.suite](depth)
    print(res.summary())
    for f in res.failures[:20]:
        print(f"  failure: {f}")
    return EXIT_OK if res.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="porolab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"porolab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="porosity, gap and CSP analysis of set files")
    a.add_argument("paths", nargs="+")
    a.add_argument("--depth", type=int)
    a.add_argument("--format", choices=("json", "text"), default="json")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("certify", help="emit a CSP certificate and re-check it")
    c.add_argument("path")
    c.add_argument("--depth", type=int)
    c.set_defaults(func=cmd_certify)

    r = sub.add_parser("render", help="draw the set under x -> ln(1/x)")
    r.add_argument("path")
    r.add_argument("--depth", type=int)
    g = r.add_mutually_exclusive_group()
    g.add_argument("--out")
    g.add_argument("--ascii", action="store_true")
    r.set_defaults(func=cmd_render)

    v = sub.add_parser("verify", help="run an invariant suite over the bundled corpus")
    v.add_argument("--suite", required=True, choices=sorted(SUITES))
    v.add_argument("--depth", type=int)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "depth", None) is not None and args.depth < 1:
        print("error: --depth must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (ElaborationError, ArithmeticError, ValueError, LookupError) as e:
        print(f"error: analysis failed: {e}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
