"""Parser and printer for the set-definition language.

Example::

    # squares of squares
    set F1 { shape = points(power(alpha=2, x0=1/2)), depth = 64 }

Ratio maps (the ``ratiomap`` arguments of ``ratio_table`` and ``ratio_gaps``)
are built from ``const(v)``, ``cycle(v, ...)``, ``diagonal(base=v)``,
``linear(a=v, b=v)``, ``harmonic(a=v, b=v)``, ``interleave(m, m)`` and
``prefix([v, ...], m)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .laws import (Const, Cycle, Diagonal, Factorial, Geometric, Harmonic, Interleave,
                   Linear, Power, Prefix, RatioMap, RatioTable, SemanticError)
from .sets import (Bands, DEFAULT_DEPTH, ExplicitBlocks, Points, RatioGaps, SetSpec,
                   Thicken)

MAX_DEPTH = 100_000
MAX_LITERAL_DIGITS = 400

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}()\[\],;=/])
""", re.VERBOSE)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message, self.line, self.col = message, line, col


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Tok]:
    out, pos, line, col = [], 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind, s = m.lastgroup, m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                out.append(Tok(kind, s, line, col))
            col += len(s)
        pos = m.end()
    out.append(Tok("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def fail(self, msg, tok=None):
        t = tok or self.tok
        raise ParseError(msg, t.line, t.col)

    def semantic(self, tok, fn, *args):
        try:
            return fn(*args)
        except SemanticError as e:
            raise ParseError(str(e), tok.line, tok.col) from None

    def take(self, kind=None, text=None) -> Tok:
        t = self.tok
        if (kind and t.kind != kind) or (text is not None and t.text != text):
            want = repr(text) if text is not None else kind
            got = repr(t.text) if t.kind != "eof" else "end of input"
            self.fail(f"expected {want}, found {got}")
        self.i += 1
        return t

    def peek(self, text) -> bool:
        return self.tok.text == text and self.tok.kind in ("punct", "ident")

    # spec := "set" IDENT "{" field ("," field)* "}"
    def spec(self) -> SetSpec:
        self.take("ident", "set")
        name = self.take("ident").text
        self.take("punct", "{")
        fields: dict = {}
        while True:
            key = self.take("ident")
            if key.text in fields:
                self.fail(f"field {key.text!r} given twice", key)
            self.take("punct", "=")
            if key.text == "shape":
                fields["shape"] = self.shape()
            elif key.text == "depth":
                t = self.take("int")
                d = int(t.text)
                if not 1 <= d <= MAX_DEPTH:
                    self.fail(f"depth must lie in [1, {MAX_DEPTH}]", t)
                fields["depth"] = d
            elif key.text == "origin":
                t = self.take("ident")
                if t.text not in ("in", "out"):
                    self.fail("origin must be 'in' or 'out'", t)
                fields["origin"] = t.text == "in"
            else:
                self.fail(f"unknown field {key.text!r}", key)
            if self.peek(","):
                self.take()
                continue
            break
        self.take("punct", "}")
        if "shape" not in fields:
            self.fail(f"set {name!r} has no shape")
        return SetSpec(name, fields["shape"], fields.get("depth", DEFAULT_DEPTH),
                       fields.get("origin", True), depth_given="depth" in fields)

    def rat(self) -> Fraction:
        t = self.take("int")
        if len(t.text) > MAX_LITERAL_DIGITS:
            self.fail("rational literal exceeds the size bound", t)
        num = int(t.text)
        if self.peek("/"):
            self.take()
            d = self.take("int")
            if len(d.text) > MAX_LITERAL_DIGITS:
                self.fail("rational literal exceeds the size bound", d)
            den = int(d.text)
            if den <= 0:
                self.fail("denominator must be positive", d)
            return Fraction(num, den)
        return Fraction(num)

    def kwarg(self, name) -> Fraction:
        self.take("ident", name)
        self.take("punct", "=")
        return self.rat()

    def call_open(self):
        name = self.take("ident")
        self.take("punct", "(")
        return name

    def shape(self):
        head = self.call_open()
        kind = head.text
        if kind == "points":
            law = self.law()
            out = self.semantic(head, Points, law)
        elif kind == "bands":
            law = self.law()
            out = self.semantic(head, Bands, law)
        elif kind == "thicken":
            law = self.law()
            self.take("punct", ",")
            q = self.kwarg("q")
            out = self.semantic(head, Thicken, law, q)
        elif kind == "blocks":
            self.take("punct", "[")
            pairs = []
            while not self.peek("]"):
                t = self.tok
                lo = self.rat()
                self.take("punct", ",")
                hi = self.rat()
                self.take("punct", ";")
                if not 0 < lo <= hi:
                    self.fail("block needs 0 < lo <= hi", t)
                pairs.append((lo, hi))
            self.take("punct", "]")
            out = ExplicitBlocks(tuple(pairs))
        elif kind == "ratio_gaps":
            g = self.ratiomap()
            self.take("punct", ",")
            beta = self.ratiomap()
            self.take("punct", ",")
            seed = self.kwarg("seed")
            out = self.semantic(head, RatioGaps, g, beta, seed)
        else:
            self.fail(f"unknown shape {kind!r}", head)
        self.take("punct", ")")
        return out

    def law(self):
        head = self.call_open()
        kind = head.text
        if kind == "geometric":
            out = self.semantic(head, Geometric, self.kwarg("r"))
        elif kind == "power":
            alpha = self.kwarg("alpha")
            self.take("punct", ",")
            x0 = self.kwarg("x0")
            out = self.semantic(head, Power, alpha, x0)
        elif kind == "factorial":
            out = self.semantic(head, Factorial, self.kwarg("scale"))
        elif kind == "ratio_table":
            out = self.semantic(head, RatioTable, self.ratiomap())
        else:
            self.fail(f"unknown law {kind!r}", head)
        self.take("punct", ")")
        return out

    def ratiomap(self) -> RatioMap:
        head = self.call_open()
        kind = head.text
        if kind == "const":
            out = self.semantic(head, Const, self.rat())
        elif kind == "cycle":
            vals = [self.rat()]
            while self.peek(","):
                self.take()
                vals.append(self.rat())
            out = self.semantic(head, Cycle, tuple(vals))
        elif kind == "diagonal":
            out = self.semantic(head, Diagonal, self.kwarg("base"))
        elif kind in ("linear", "harmonic"):
            a = self.kwarg("a")
            self.take("punct", ",")
            b = self.kwarg("b")
            out = self.semantic(head, Linear if kind == "linear" else Harmonic, a, b)
        elif kind == "interleave":
            first = self.ratiomap()
            self.take("punct", ",")
            second = self.ratiomap()
            out = Interleave(first, second)
        elif kind == "prefix":
            self.take("punct", "[")
            vals = []
            while not self.peek("]"):
                vals.append(self.rat())
                if self.peek(","):
                    self.take()
            self.take("punct", "]")
            self.take("punct", ",")
            tail = self.ratiomap()
            out = self.semantic(head, Prefix, tuple(vals), tail)
        else:
            self.fail(f"unknown ratio map {kind!r}", head)
        self.take("punct", ")")
        return out


def parse_specs(text: str) -> list[SetSpec]:
    """Parse every ``set`` definition in ``text``."""
    p = _Parser(text)
    out = []
    while p.tok.kind != "eof":
        out.append(p.spec())
    if not out:
        p.fail("no set definition found")
    return out


def parse_spec(text: str) -> SetSpec:
    """Parse exactly one ``set`` definition."""
    p = _Parser(text)
    spec = p.spec()
    if p.tok.kind != "eof":
        p.fail("trailing input after the set definition")
    return spec


# -- printing --------------------------------------------------------------------

def shape_text(shape) -> str:
    if isinstance(shape, Points):
        return f"points({shape.law.to_text()})"
    if isinstance(shape, Bands):
        return f"bands({shape.law.to_text()})"
    if isinstance(shape, Thicken):
        return f"thicken({shape.law.to_text()}, q={shape.q})"
    if isinstance(shape, ExplicitBlocks):
        return "blocks([" + " ".join(f"{lo}, {hi};" for lo, hi in shape.pairs) + "])"
    if isinstance(shape, RatioGaps):
        return (f"ratio_gaps({shape.gap_ratio.to_text()}, {shape.block_ratio.to_text()}, "
                f"seed={shape.seed})")
    raise TypeError(f"not a shape: {shape!r}")


def print_spec(spec: SetSpec) -> str:
    origin = "in" if spec.origin_in_set else "out"
    return (f"set {spec.name} {{ shape = {shape_text(spec.shape)}, depth = {spec.depth}, "
            f"origin = {origin} }}")
