"""Exact rational arithmetic for numbers far beyond what ``Fraction`` can hold.

A :class:`Rational` is a quotient of two finite sums of monomials
``c * p1**e1 * ... * pk**ek`` where ``c`` is a :class:`fractions.Fraction`
and the ``pi`` are primes with arbitrarily large integer exponents.  Values
that fit in ``FOLD_BITS`` bits are always folded back into a single
``Fraction``, so ordinary numbers behave exactly like ``Fraction``.

Nothing is ever rounded.  Order decisions on huge operands are taken with
outward-rounded interval arithmetic at increasing precision; the decision is
only returned once the enclosing interval excludes zero.  Because logarithms
of distinct primes are linearly independent over the rationals, a monomial
ratio with non-empty prime part can never equal one, so the refinement loop
terminates for every comparison the library performs.
"""

from __future__ import annotations

import math
import re
import threading
from fractions import Fraction
from numbers import Rational as _NumRational

from mpmath.ctx_iv import MPIntervalContext
from mpmath.libmp import to_float, to_int

__all__ = ["Rational", "INF", "PrecisionExhausted", "as_rational", "is_inf", "fmt"]

FOLD_BITS = 2048
_MAX_PREC = 1 << 16
_FACTOR_LIMIT_BITS = 160

INF = math.inf


class PrecisionExhausted(ArithmeticError):
    """Interval refinement hit the precision cap without deciding a sign."""


_tls = threading.local()


def _ctx() -> MPIntervalContext:
    ctx = getattr(_tls, "ctx", None)
    if ctx is None:
        ctx = _tls.ctx = MPIntervalContext()
    return ctx


def is_inf(x) -> bool:
    return isinstance(x, float) and math.isinf(x) and x > 0


# -- power products -----------------------------------------------------------
# A power product is a sorted tuple of (prime, nonzero exponent) pairs.

def _pw_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for p, e in b:
        d[p] = d.get(p, 0) + e
    return tuple(sorted((p, e) for p, e in d.items() if e))


def _pw_inv(a):
    return tuple((p, -e) for p, e in a)


def _pw_bits(a) -> int:
    return sum(abs(e) * p.bit_length() for p, e in a)


def _pw_fraction(a) -> Fraction:
    num = den = 1
    for p, e in a:
        if e > 0:
            num *= p ** e
        else:
            den *= p ** (-e)
    return Fraction(num, den)


def _factor_int(n: int) -> dict[int, int]:
    if n < 2:
        return {}
    if n.bit_length() > _FACTOR_LIMIT_BITS:
        raise ValueError(f"refusing to factor a {n.bit_length()}-bit integer")
    # sympy is slow to import; only seeds of huge powers need factoring
    from sympy import factorint

    return {int(p): int(e) for p, e in factorint(n).items()}


def _factor_fraction(f: Fraction):
    d = _factor_int(abs(f.numerator))
    for p, e in _factor_int(f.denominator).items():
        d[p] = d.get(p, 0) - e
    return tuple(sorted((p, e) for p, e in d.items() if e))


def _bits(f: Fraction) -> int:
    return abs(f.numerator).bit_length() + f.denominator.bit_length()


# -- monomials and sums -------------------------------------------------------
# A monomial is (coef: Fraction != 0, pw).  A poly is a tuple of monomials.

def _mono(coef: Fraction, pw):
    if pw:
        primes = {p for p, _ in pw}
        num, den = coef.numerator, coef.denominator
        extra = {}
        for p in primes:
            while num % p == 0:
                num //= p
                extra[p] = extra.get(p, 0) + 1
            while den % p == 0:
                den //= p
                extra[p] = extra.get(p, 0) - 1
        if extra:
            coef = Fraction(num, den)
            pw = _pw_mul(pw, tuple(sorted(extra.items())))
        if _pw_bits(pw) <= FOLD_BITS:
            coef = coef * _pw_fraction(pw)
            pw = ()
    return (coef, pw)


def _poly_norm(terms):
    out: list[list] = []
    for coef, pw in terms:
        if coef == 0:
            continue
        for slot in out:
            ratio = _pw_mul(pw, _pw_inv(slot[1]))
            if not ratio or _pw_bits(ratio) <= FOLD_BITS:
                slot[0] = slot[0] + coef * _pw_fraction(ratio)
                break
        else:
            out.append([coef, pw])
    monos = [_mono(c, pw) for c, pw in out if c != 0]
    monos.sort(key=lambda m: (m[1], m[0]))
    return tuple(monos)


def _poly_mul(a, b):
    return _poly_norm([(c1 * c2, _pw_mul(p1, p2)) for c1, p1 in a for c2, p2 in b])


def _is_pure(poly) -> bool:
    return all(not pw for _, pw in poly)


def _pure_value(poly) -> Fraction:
    return sum((c for c, _ in poly), Fraction(0))


_ONE = ((Fraction(1), ()),)


def _iv_mono(ctx, coef, pw):
    v = ctx.mpf(coef.numerator) / coef.denominator
    for p, e in pw:
        v = v * ctx.mpf(p) ** e
    return v


def _log2_est(coef: Fraction, pw):
    """Float estimate of log2|monomial| with an absolute error bound."""
    est = math.log2(abs(coef.numerator)) - math.log2(coef.denominator)
    err = 1e-9 * (1 + abs(est))
    for p, e in pw:
        t = e * math.log2(p)
        est += t
        err += abs(t) * 2.0 ** -48 + 1e-9
    return est, err


def _dominant_sign(poly):
    """Sign of the sum when one monomial provably outweighs all others, else None."""
    ests = sorted(((*_log2_est(c, pw), c) for c, pw in poly), key=lambda t: t[0], reverse=True)
    (e1, r1, c1), (e2, r2, _) = ests[0], ests[1]
    # |top| >= 2^(e1-r1) and the rest sum to at most (n-1) * 2^(e2+r2)
    if e1 - r1 > e2 + r2 + math.log2(len(poly)) + 1:
        return 1 if c1 > 0 else -1
    return None


def _poly_sign(poly) -> int:
    if not poly:
        return 0
    if len(poly) == 1:
        return 1 if poly[0][0] > 0 else -1
    if _is_pure(poly):
        s = _pure_value(poly)
        return (s > 0) - (s < 0)
    d = _dominant_sign(poly)
    if d is not None:
        return d
    ctx = _ctx()
    prec = 96
    while prec <= _MAX_PREC:
        ctx.prec = prec
        v = ctx.mpf(0)
        for coef, pw in poly:
            v = v + _iv_mono(ctx, coef, pw)
        if v.a > 0:
            return 1
        if v.b < 0:
            return -1
        prec *= 4
    raise PrecisionExhausted("could not decide the sign of a sum of monomials")


def _mono_log_sign(coef: Fraction, pw) -> int:
    """Sign of ln|coef * pw|, i.e. compare the monomial's magnitude with 1."""
    if not pw:
        a = abs(coef)
        return (a > 1) - (a < 1)
    est, err = _log2_est(coef, pw)
    if abs(est) > err + 1e-6:
        return 1 if est > 0 else -1
    ctx = _ctx()
    prec = 64 + max(abs(e).bit_length() for _, e in pw) + _bits(coef)
    while prec <= _MAX_PREC:
        ctx.prec = prec
        s = ctx.log(ctx.mpf(abs(coef.numerator))) - ctx.log(ctx.mpf(coef.denominator))
        for p, e in pw:
            s = s + ctx.mpf(e) * ctx.log(ctx.mpf(p))
        if s.a > 0:
            return 1
        if s.b < 0:
            return -1
        prec *= 4
    raise PrecisionExhausted("could not compare a monomial with one")


_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


class Rational:
    """An exact rational number; see the module docstring for the encoding."""

    __slots__ = ("_num", "_den", "_frac")

    def __init__(self, value=0, _raw=None):
        if _raw is not None:
            num, den = _raw
            self._set(num, den)
            return
        if isinstance(value, Rational):
            self._num, self._den, self._frac = value._num, value._den, value._frac
            return
        if isinstance(value, str):
            m = _RAT_RE.match(value)
            if not m:
                raise ValueError(f"not a rational literal: {value!r}")
            value = Fraction(int(m.group(1)), int(m.group(2) or 1))
        if isinstance(value, float):
            raise TypeError("floats are not exact; pass a Fraction or a string")
        f = Fraction(value)
        self._frac = f
        self._num = ((f, ()),) if f else ()
        self._den = _ONE

    def _set(self, num, den):
        if not den:
            raise ZeroDivisionError("Rational division by zero")
        if len(den) == 1:
            c, pw = den[0]
            num = _poly_mul(num, ((1 / c, _pw_inv(pw)),))
            den = _ONE
        self._num, self._den = num, den
        self._frac = None
        if _is_pure(num) and _is_pure(den):
            f = _pure_value(num) / _pure_value(den)
            self._frac = f
            self._num = ((f, ()),) if f else ()
            self._den = _ONE

    @classmethod
    def _make(cls, num, den=_ONE) -> "Rational":
        return cls(_raw=(num, den))

    @classmethod
    def power(cls, base, k: int) -> "Rational":
        """``base ** k`` for a small rational base and any integer ``k``."""
        base = Fraction(base) if not isinstance(base, Rational) else base.to_fraction()
        if base == 0:
            if k <= 0:
                raise ZeroDivisionError("0 ** non-positive")
            return cls(0)
        if _bits(base) * abs(k) <= FOLD_BITS:
            return cls(base ** k)
        sign = -1 if (base < 0 and k % 2) else 1
        pw = tuple((p, e * k) for p, e in _factor_fraction(abs(base)))
        return cls._make(((Fraction(sign), pw),))

    # -- inspection ----------------------------------------------------------
    @property
    def is_small(self) -> bool:
        return self._frac is not None

    def to_fraction(self) -> Fraction:
        if self._frac is None:
            raise OverflowError(f"value too large for Fraction: {self}")
        return self._frac

    @property
    def numerator(self) -> int:
        return self.to_fraction().numerator

    @property
    def denominator(self) -> int:
        return self.to_fraction().denominator

    def sign(self) -> int:
        if self._frac is not None:
            return (self._frac > 0) - (self._frac < 0)
        return _poly_sign(self._num) * _poly_sign(self._den)

    def bits(self) -> int:
        """Rough size of the exact encoding in bits (exponent magnitudes count)."""
        return sum(_bits(c) + _pw_bits(pw) for c, pw in self._num + self._den)

    def log(self) -> float:
        """Natural logarithm as a float, for presentation only."""
        if self.sign() <= 0:
            raise ValueError("log of a non-positive number")
        if self._frac is not None:
            f = self._frac
            return math.log(f.numerator) - math.log(f.denominator)
        ctx = _ctx()
        ctx.prec = 80
        def plog(poly):
            v = ctx.mpf(0)
            for c, pw in poly:
                v = v + _iv_mono(ctx, c, pw)
            return ctx.log(v)
        s = plog(self._num) - plog(self._den)
        return (to_float(s._mpi_[0]) + to_float(s._mpi_[1])) / 2

    def floor_log2(self) -> int:
        """The integer ``j`` with ``2**j <= self < 2**(j+1)``; exact."""
        if self.sign() <= 0:
            raise ValueError("floor_log2 of a non-positive number")
        if self._frac is not None:
            f = self._frac
            j = f.numerator.bit_length() - f.denominator.bit_length()
        else:
            j = self._approx_floor_log2()
        while Rational.power(2, j) > self:
            j -= 1
        while Rational.power(2, j + 1) <= self:
            j += 1
        return j

    def _approx_floor_log2(self) -> int:
        ctx = _ctx()
        prec = 128
        while prec <= _MAX_PREC:
            ctx.prec = prec
            def plog(poly):
                v = ctx.mpf(0)
                for c, pw in poly:
                    v = v + _iv_mono(ctx, c, pw)
                return ctx.log(v)
            s = (plog(self._num) - plog(self._den)) / ctx.log(ctx.mpf(2))
            lo = int(to_int(s._mpi_[0], "f"))
            hi = int(to_int(s._mpi_[1], "f"))
            if hi - lo <= 1:
                return lo
            prec *= 4
        raise PrecisionExhausted("floor_log2")

    # -- arithmetic ----------------------------------------------------------
    def __neg__(self):
        if self._frac is not None:
            return Rational(-self._frac)
        return Rational._make(tuple((-c, pw) for c, pw in self._num), self._den)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __add__(self, other):
        o = as_rational(other, strict=False)
        if o is NotImplemented:
            return NotImplemented
        if self._frac is not None and o._frac is not None:
            return Rational(self._frac + o._frac)
        if self._den == o._den:
            return Rational._make(_poly_norm(self._num + o._num), self._den)
        num = _poly_norm(_poly_mul(self._num, o._den) + _poly_mul(o._num, self._den))
        return Rational._make(num, _poly_mul(self._den, o._den))

    __radd__ = __add__

    def __sub__(self, other):
        o = as_rational(other, strict=False)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return as_rational(other) - self

    def __mul__(self, other):
        if is_inf(other):
            if self.sign() > 0:
                return INF
            return NotImplemented
        o = as_rational(other, strict=False)
        if o is NotImplemented:
            return NotImplemented
        if self._frac is not None and o._frac is not None:
            return Rational(self._frac * o._frac)
        return Rational._make(_poly_mul(self._num, o._num), _poly_mul(self._den, o._den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = as_rational(other, strict=False)
        if o is NotImplemented:
            return NotImplemented
        if o.sign() == 0:
            raise ZeroDivisionError("Rational division by zero")
        if self._frac is not None and o._frac is not None:
            return Rational(self._frac / o._frac)
        return Rational._make(_poly_mul(self._num, o._den), _poly_mul(self._den, o._num))

    def __rtruediv__(self, other):
        return as_rational(other) / self

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("only integer powers are exact")
        if k < 0:
            return Rational(1) / (self ** (-k))
        if self._frac is not None:
            return Rational.power(self._frac, k)
        if len(self._num) == 1 and self._den == _ONE:
            c, pw = self._num[0]
            base = Rational.power(c, k)
            return base * Rational._make(((Fraction(1), tuple((p, e * k) for p, e in pw)),))
        out = Rational(1)
        for _ in range(k):
            out = out * self
        return out

    # -- ordering ------------------------------------------------------------
    def _cmp(self, other) -> int:
        if isinstance(other, float):
            if is_inf(other):
                return -1
            if math.isinf(other):
                return 1
            raise TypeError("cannot compare Rational with a finite float exactly")
        o = as_rational(other)
        if self._frac is not None and o._frac is not None:
            return (self._frac > o._frac) - (self._frac < o._frac)
        sa, sb = self.sign(), o.sign()
        if sa != sb:
            return (sa > sb) - (sa < sb)
        if sa == 0:
            return 0
        if (len(self._num) == 1 and self._den == _ONE
                and len(o._num) == 1 and o._den == _ONE):
            (c1, p1), (c2, p2) = self._num[0], o._num[0]
            ratio = _mono(c1 / c2, _pw_mul(p1, _pw_inv(p2)))
            s = _mono_log_sign(*ratio)
            return s if sa > 0 else -s
        return (self - o).sign()

    def __eq__(self, other):
        if isinstance(other, float) and math.isinf(other):
            return False
        try:
            return self._cmp(other) == 0
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        if self._frac is not None:
            return hash(self._frac)
        # large values have no canonical encoding; equality is decided by order
        return hash("porolab.Rational.large")

    def __bool__(self):
        return self.sign() != 0

    # -- text ----------------------------------------------------------------
    def __str__(self):
        if self._frac is not None:
            f = self._frac
            if f.denominator == 1:
                return _int_str(f.numerator)
            return f"{_int_str(f.numerator)}/{_int_str(f.denominator)}"
        num = _poly_str(self._num)
        if self._den == _ONE:
            return num
        return f"({num})/({_poly_str(self._den)})"

    def __repr__(self):
        return f"Rational('{self}')"


_CHUNK = 10 ** 1000


def _int_str(n: int) -> str:
    """Decimal text of any int, sidestepping the interpreter's digit limit."""
    if n < 0:
        return "-" + _int_str(-n)
    if n < _CHUNK:
        return str(n)
    # split by the largest chunk power not exceeding n
    k, p = 1, _CHUNK
    while p * p <= n:
        p, k = p * p, 2 * k
    hi, lo = divmod(n, p)
    return _int_str(hi) + _int_str(lo).rjust(1000 * k, "0")


def _mono_str(coef: Fraction, pw) -> str:
    c = _int_str(coef.numerator) + ("" if coef.denominator == 1 else "/" + _int_str(coef.denominator))
    parts = [] if (coef == 1 and pw) else [c]
    parts += [f"{p}^{e}" for p, e in pw]
    return "*".join(parts)


def _poly_str(poly) -> str:
    if not poly:
        return "0"
    # largest magnitude first keeps the text stable and readable
    monos = sorted(poly, key=lambda m: Rational._make((( abs(m[0]), m[1]),)), reverse=True)
    out = ""
    for i, (c, pw) in enumerate(monos):
        s = _mono_str(abs(c), pw)
        if i == 0:
            out = s if c > 0 else "-" + s
        else:
            out += (" + " if c > 0 else " - ") + s
    return out


def as_rational(x, strict: bool = True):
    if isinstance(x, Rational):
        return x
    if isinstance(x, (int, Fraction, _NumRational)) or isinstance(x, str):
        return Rational(x)
    if strict:
        raise TypeError(f"cannot convert {type(x).__name__} to Rational exactly")
    return NotImplemented


def fmt(x) -> str:
    """Exact text for a rational, or ``"inf"``."""
    if is_inf(x):
        return "inf"
    return str(as_rational(x))
