"""Ratio maps and decay laws: the generators behind every germ set."""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from ..exact import Rational
from .profile import DIV, ZERO, Profile, diag_exponent, is_marker


class SemanticError(ValueError):
    """A well-formed definition that violates a mathematical constraint."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class _PrefixMemo:
    """Thread-safe memo of a prefix-product sequence."""

    def __init__(self, step):
        self._step = step
        self._vals = [Rational(1)]
        self._lock = threading.Lock()

    def __call__(self, n: int) -> Rational:
        if n < len(self._vals):
            return self._vals[n]
        with self._lock:
            while len(self._vals) <= n:
                k = len(self._vals)
                self._vals.append(self._vals[-1] * self._step(k))
            return self._vals[n]


# -- ratio maps ----------------------------------------------------------------
# A ratio map is a positive rational sequence n -> value (n >= 1) whose eventual
# shape is known from the family it belongs to.

class RatioMap:
    def value(self, n: int) -> Rational:
        raise NotImplementedError

    def profile(self) -> Profile:
        raise NotImplementedError

    def to_text(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Const(RatioMap):
    v: Fraction

    def __post_init__(self):
        object.__setattr__(self, "v", _frac(self.v))
        if self.v <= 0:
            raise SemanticError("ratio map values must be positive")

    def value(self, n):
        return Rational(self.v)

    def profile(self):
        return Profile.constant(self.v)

    def to_text(self):
        return f"const({self.v})"


@dataclass(frozen=True)
class Cycle(RatioMap):
    vs: tuple

    def __post_init__(self):
        object.__setattr__(self, "vs", tuple(_frac(v) for v in self.vs))
        if not self.vs:
            raise SemanticError("cycle needs at least one value")
        if any(v <= 0 for v in self.vs):
            raise SemanticError("ratio map values must be positive")

    def value(self, n):
        return Rational(self.vs[(n - 1) % len(self.vs)])

    def profile(self):
        return Profile.periodic(self.vs)

    def to_text(self):
        return "cycle(" + ", ".join(str(v) for v in self.vs) + ")"


@dataclass(frozen=True)
class Diagonal(RatioMap):
    """base; base**2, base; base**3, base**2, base; ..."""

    base: Fraction

    def __post_init__(self):
        object.__setattr__(self, "base", _frac(self.base))
        if self.base <= 0 or self.base == 1:
            raise SemanticError("diagonal base must be positive and different from 1")

    def value(self, n):
        return Rational.power(self.base, diag_exponent(n))

    def profile(self):
        return Profile.diagonal(self.base)

    def to_text(self):
        return f"diagonal(base={self.base})"


@dataclass(frozen=True)
class Linear(RatioMap):
    """a*n + b, increasing to infinity."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", _frac(self.a))
        object.__setattr__(self, "b", _frac(self.b))
        if self.a <= 0 or self.a + self.b <= 0:
            raise SemanticError("linear map needs a > 0 and a + b > 0")

    def value(self, n):
        return Rational(self.a * n + self.b)

    def profile(self):
        return Profile.periodic((DIV,))

    def to_text(self):
        return f"linear(a={self.a}, b={self.b})"


@dataclass(frozen=True)
class Harmonic(RatioMap):
    """1/(a*n + b), decreasing to zero."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", _frac(self.a))
        object.__setattr__(self, "b", _frac(self.b))
        if self.a <= 0 or self.a + self.b <= 0:
            raise SemanticError("harmonic map needs a > 0 and a + b > 0")

    def value(self, n):
        return Rational(1 / (self.a * n + self.b))

    def profile(self):
        return Profile.periodic((ZERO,))

    def to_text(self):
        return f"harmonic(a={self.a}, b={self.b})"


@dataclass(frozen=True)
class Interleave(RatioMap):
    """Odd positions from ``first``, even positions from ``second``."""

    first: RatioMap
    second: RatioMap

    def value(self, n):
        return self.first.value((n + 1) // 2) if n % 2 else self.second.value(n // 2)

    def profile(self):
        return Profile.interleave(self.first.profile(), self.second.profile())

    def to_text(self):
        return f"interleave({self.first.to_text()}, {self.second.to_text()})"


@dataclass(frozen=True)
class Prefix(RatioMap):
    """Finitely many explicit values, then ``tail`` restarted at index 1."""

    head: tuple
    tail: RatioMap

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(_frac(v) for v in self.head))
        if any(v <= 0 for v in self.head):
            raise SemanticError("ratio map values must be positive")

    def value(self, n):
        k = len(self.head)
        return Rational(self.head[n - 1]) if n <= k else self.tail.value(n - k)

    def profile(self):
        return self.tail.profile().shift(-len(self.head))

    def to_text(self):
        vals = ", ".join(str(v) for v in self.head)
        return f"prefix([{vals}], {self.tail.to_text()})"


# -- decay laws ------------------------------------------------------------------

class LimitTag(enum.Enum):
    RATIO_TO_ZERO = "RATIO_TO_ZERO"
    RATIO_TO_CONST = "RATIO_TO_CONST"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class DecayLaw:
    """A strictly decreasing positive sequence x_1 > x_2 > ... tending to 0."""

    def x(self, n: int) -> Rational:
        raise NotImplementedError

    def rho(self, n: int) -> Rational:
        """The ratio x_{n+1} / x_n."""
        return self.x(n + 1) / self.x(n)

    def rho_profile(self) -> Profile:
        raise NotImplementedError

    @property
    def limit_tag(self) -> LimitTag:
        raise NotImplementedError

    @property
    def limit_value(self):
        return None

    @property
    def tag_declared(self) -> bool:
        """True when the tag comes from a user-chosen table rather than a closed form."""
        return False

    def to_text(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Geometric(DecayLaw):
    r: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r", _frac(self.r))
        if not 0 < self.r < 1:
            raise SemanticError("ratio must lie in (0,1)")

    def x(self, n):
        return Rational.power(self.r, n)

    def rho(self, n):
        return Rational(self.r)

    def rho_profile(self):
        return Profile.constant(self.r)

    @property
    def limit_tag(self):
        return LimitTag.RATIO_TO_CONST

    @property
    def limit_value(self):
        return self.r

    def to_text(self):
        return f"geometric(r={self.r})"


@dataclass(frozen=True)
class Power(DecayLaw):
    """x_1 = x0 and x_{n+1} = x_n ** alpha, so x_n = x0 ** (alpha ** (n-1))."""

    alpha: Fraction
    x0: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", _frac(self.alpha))
        object.__setattr__(self, "x0", _frac(self.x0))
        if self.alpha <= 1:
            raise SemanticError("alpha must exceed 1")
        if self.alpha.denominator != 1:
            raise SemanticError("alpha must be an integer so that the powers stay rational")
        if not 0 < self.x0 < 1:
            raise SemanticError("x0 must lie in (0,1)")

    def x(self, n):
        return Rational.power(self.x0, int(self.alpha) ** (n - 1))

    def rho(self, n):
        a = int(self.alpha)
        return Rational.power(self.x0, a ** (n - 1) * (a - 1))

    def rho_profile(self):
        return Profile.periodic((ZERO,))

    @property
    def limit_tag(self):
        return LimitTag.RATIO_TO_ZERO

    @property
    def limit_value(self):
        return Fraction(0)

    def to_text(self):
        return f"power(alpha={self.alpha}, x0={self.x0})"


@dataclass(frozen=True)
class Factorial(DecayLaw):
    """x_n = scale / n!"""

    scale: Fraction
    _memo: object = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "scale", _frac(self.scale))
        if self.scale <= 0:
            raise SemanticError("scale must be positive")
        object.__setattr__(self, "_memo", _PrefixMemo(lambda k: Rational(Fraction(1, k))))

    def x(self, n):
        return Rational(self.scale) * self._memo(n)

    def rho(self, n):
        return Rational(Fraction(1, n + 1))

    def rho_profile(self):
        return Profile.periodic((ZERO,))

    @property
    def limit_tag(self):
        return LimitTag.RATIO_TO_ZERO

    @property
    def limit_value(self):
        return Fraction(0)

    def to_text(self):
        return f"factorial(scale={self.scale})"


@dataclass(frozen=True)
class RatioTable(DecayLaw):
    """x_n = rho_1 * ... * rho_n for a ratio map with values in (0,1)."""

    table: RatioMap
    _memo: object = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_memo", _PrefixMemo(self.table.value))
        prof = self.table.profile()
        bad = False
        if prof.is_periodic:
            bad = any(e is DIV or (not is_marker(e) and e >= 1)
                      for e in prof.entries)
        elif prof.is_diagonal:
            bad = prof.base >= 1 or prof.base * prof.scale >= 1
        if bad:
            raise SemanticError("ratio table values must lie in (0,1)")

    def validate(self, depth: int):
        for n in range(1, depth + 1):
            v = self.table.value(n)
            if not (0 < v < 1):
                raise SemanticError(f"ratio table value at index {n} is {v}, outside (0,1)")

    def x(self, n):
        return self._memo(n)

    def rho(self, n):
        return self.table.value(n + 1)

    def rho_profile(self):
        return self.table.profile().shift(1)

    @property
    def limit_tag(self):
        prof = self.table.profile()
        if prof.is_periodic:
            if all(e is ZERO for e in prof.entries):
                return LimitTag.RATIO_TO_ZERO
            if prof.period == 1:
                return LimitTag.RATIO_TO_CONST
        return LimitTag.UNKNOWN

    @property
    def limit_value(self):
        tag = self.limit_tag
        if tag is LimitTag.RATIO_TO_ZERO:
            return Fraction(0)
        if tag is LimitTag.RATIO_TO_CONST:
            return self.table.profile().entries[0]
        return None

    @property
    def tag_declared(self):
        return True

    def to_text(self):
        return f"ratio_table({self.table.to_text()})"
