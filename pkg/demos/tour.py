#!/usr/bin/env python3
"""A short tour of porolab on four bundled sets.

Squaring points, the same points thickened by 3, the bands between every
other point, and a gap-ratio table that repeats each power of 2 forever.
Prints porosity, the universal gap sequence, the constants and the
certificate for each, then writes the bubble diagram of the bands set.

    python3 demos/tour.py [--depth N] [--svg bands.svg]
"""

import argparse

from porolab.corpus import get
from porolab.csp import C_E, csp_certify, verify_certificate
from porolab.exact import fmt
from porolab.gaps import universality_certificate
from porolab.porosity import porosity_at_zero
from porolab.render import ascii_ruler, svg

TOUR = [
    ("f1", "points x_(n+1) = x_n^2 from 1/2"),
    ("f2", "the same points, each thickened to [x, 3x]"),
    ("f3", "closed bands between x_(2n+1) and x_(2n)"),
    ("f5", "gap ratios 2; 4, 2; 8, 4, 2; ... with single points"),
]


def show(name, blurb, depth):
    E = get(name)
    print(f"== {name}: {blurb}")
    p = porosity_at_zero(E, depth)
    print(f"   p+ at 0         {fmt(p.value)}  ({p.verdict.label()})")
    U = universality_certificate(E, depth)
    line = f"   universal seq   {U.verdict.label()}"
    if U.universal_sequence is not None:
        line += f", c = {U.c}, M = {fmt(U.M_value)}"
    print(line)
    C, vd = C_E(E, depth)
    print(f"   C_E             {fmt(C) if C is not None else '?'}  ({vd.label()})")
    cert = csp_certify(E, depth)
    rc = verify_certificate(E, cert, depth)
    extra = f"q = {cert.q}, {len(cert.clusters)} clusters below t" if cert.q else \
        (cert.refutation or {}).get("mechanism", "")
    print(f"   certificate     {cert.label}: {extra}")
    print(f"   re-check        {'ok' if rc.ok else 'FAILED'} on {rc.checked_blocks} items")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depth", type=int, default=64)
    ap.add_argument("--svg", help="write the bands bubble diagram here")
    args = ap.parse_args()
    for name, blurb in TOUR:
        show(name, blurb, args.depth)
    print()
    print(ascii_ruler(get("f3"), 6), end="")
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(svg(get("f3")))
        print(f"wrote {args.svg}")


if __name__ == "__main__":
    main()
