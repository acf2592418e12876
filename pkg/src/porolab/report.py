"""Machine-readable analysis reports."""

from __future__ import annotations

import enum
import json
from fractions import Fraction
from importlib import resources

from . import __version__
from .csp import (C_E, C_of_tau, CspStatus, TestSequence, canonical_family, csp_certify,
                  matching_sequence, verify_certificate)
from .exact import Rational, fmt, is_inf
from .germ.dsl import print_spec
from .germ.sets import FiniteSet, classify_origin
from .porosity import p_plus_text, porosity_at_zero
from .verdict import TailVerdict

SCHEMA_VERSION = "1"


def jsonable(x):
    """Convert analysis values to plain JSON types; rationals become exact strings."""
    if isinstance(x, TailVerdict):
        return {"status": x.label(), "depth": x.depth, "witness": jsonable(x.witness)}
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x) if abs(x) > 2 ** 53 else x
    if isinstance(x, (Fraction, Rational)) or is_inf(x):
        return fmt(x)
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, enum.Enum):
        return x.value
    if isinstance(x, dict):
        return {str(jsonable(k)): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return str(x)


def _porosity(E, depth):
    p = porosity_at_zero(E, depth)
    return {"p_plus": p_plus_text(p), "exact": p.exact, "strongly_porous": jsonable(p.verdict)}


def _certificate(E, cert, depth, centers_shown=8):
    out = {"status": cert.label, "q": jsonable(cert.q), "t": jsonable(cert.t),
           "t_block": cert.t_block,
           "centers": [fmt(x) for x in cert.centers[:centers_shown]],
           "refutation": jsonable(cert.refutation),
           "diagnostics": jsonable({k: v for k, v in cert.diagnostics.items()
                                    if k != "universal_sequence"})}
    r = verify_certificate(E, cert, depth)
    out["recheck"] = {"ok": r.ok, "checked": r.checked_blocks,
                      "violations": jsonable(list(r.violations[:8]))}
    return out


def analyze(E, depth: int) -> dict:
    """One report for an elaborated set."""
    rep = {"tool": "porolab", "version": __version__, "schema": SCHEMA_VERSION,
           "depth": depth, "spec": print_spec(E.spec) if E.spec is not None else None,
           "name": E.name}
    rep["origin"] = classify_origin(E).value
    rep["porosity"] = _porosity(E, depth)
    if isinstance(E, FiniteSet):
        rep["universality"] = None
        rep["constants"] = {"M": None, "M_verdict": None, "C_E": "0", "C_E_verdict": None, "C_tau": []}
        rep["csp"] = _certificate(E, csp_certify(E, depth), depth)
        return rep
    ctx = matching_sequence(E, depth)
    L, U = ctx
    rep["universality"] = {
        "verdict": jsonable(U.verdict), "method": U.method, "c": jsonable(U.c),
        "t_schedule": jsonable(U.t_schedule),
        "universal": L.label if L is not None and U.verdict.truthy else None,
        "band_witness": jsonable(U.band_witness) if U.band_witness else None,
    }
    taus = []
    for tau in canonical_family(E, depth, ctx):
        v, vd = C_of_tau(E, tau, depth, ctx)
        taus.append({"tau": tau.label, "provenance": tau.provenance.value,
                     "C": jsonable(v), "verdict": jsonable(vd)})
    ce, cev = C_E(E, depth)
    rep["constants"] = {"M": jsonable(U.M_value),
                        "M_verdict": jsonable(U.M_verdict) if U.M_verdict is not None else None,
                        "C_E": jsonable(ce), "C_E_verdict": jsonable(cev), "C_tau": taus}
    rep["csp"] = _certificate(E, csp_certify(E, depth), depth)
    return rep


def dumps(rep) -> str:
    return json.dumps(rep, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def text(rep) -> str:
    lines = [f"set {rep['name']} (depth {rep['depth']})",
             f"  p+          {rep['porosity']['p_plus']}  "
             f"[{rep['porosity']['strongly_porous']['status']}]"]
    u = rep.get("universality")
    if u:
        lines.append(f"  universal   {u['verdict']['status']}  ({u['method']})")
    c = rep["constants"]
    if c.get("M") is not None:
        lines.append(f"  M           {c['M']}")
    lines.append(f"  C_E         {c['C_E']}")
    lines.append(f"  csp         {rep['csp']['status']}")
    if rep["csp"]["q"]:
        lines.append(f"  q, t        {rep['csp']['q']}, {rep['csp']['t']}")
    if rep["csp"]["refutation"]:
        lines.append(f"  refutation  {rep['csp']['refutation'].get('mechanism')}")
    return "\n".join(lines) + "\n"


def schema() -> dict:
    return json.loads(resources.files("porolab").joinpath("data/report.schema.json").read_text())


__all__ = ["analyze", "dumps", "text", "jsonable", "schema", "SCHEMA_VERSION", "CspStatus",
           "TestSequence"]
