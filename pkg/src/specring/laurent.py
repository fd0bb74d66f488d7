"""Truncated two-sided Laurent series over a ring.

Series carry a coefficient window ``[lo, hi]`` (everything outside is zero by
truncation) and a growth class.  Ring-class series multiply freely, while a
module-class series may only be multiplied by a ring-class one.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .errors import DecayCertificateError, GrowthClassError, PairingError
from .rings import Ring, element_to_json

DEFAULT_WINDOW = 32


class GrowthClass(enum.IntEnum):
    """Coefficient growth regimes ordered by inclusion."""

    FINITE_RING = 0
    RAPID_RING = 1
    SUMMABLE_RING = 2
    BOUNDED_MODULE = 3
    POLY_MODULE = 4
    FORMAL_MODULE = 5

    def is_ring(self, one_sided=False) -> bool:
        if one_sided:
            # power series: every class except bounded is closed under products
            return self is not GrowthClass.BOUNDED_MODULE
        return self <= GrowthClass.SUMMABLE_RING

    @property
    def label(self):
        return self.name.lower()


def join_class(a: GrowthClass, b: GrowthClass) -> GrowthClass:
    return GrowthClass(max(a, b))


@dataclass(frozen=True)
class WeightClass:
    """Weight rule ``n -> alpha(n) >= 0`` for the weighted seminorm.

    kinds: ``ones``, ``polynomial`` (param d: (1+|n|)**d), ``geometric``
    (param r: r**|n|) and ``finite_support`` (param: set of exponents).
    """

    kind: str = "ones"
    param: Any = None

    def __call__(self, n: int) -> float:
        if self.kind == "ones":
            return 1.0
        if self.kind == "polynomial":
            return float((1 + abs(n)) ** self.param)
        if self.kind == "geometric":
            return float(self.param) ** abs(n)
        if self.kind == "finite_support":
            return 1.0 if n in self.param else 0.0
        raise ValueError(f"unknown weight kind {self.kind!r}")


def companion_weight(alpha: WeightClass, n: int, one_sided=False) -> float:
    """The companion weight used for class preservation under products.

    Two-sided: ``1 v max_{|m|<=n} alpha(m)``.  Power series: the square root of
    ``max_{m>=n} alpha(m)``; the supremum is approximated on ``[n, n + 64]``.
    Documented constant only; nothing in the package depends on it.
    """
    if one_sided:
        return math.sqrt(max(alpha(m) for m in range(n, n + 65)))
    return max(1.0, max(alpha(m) for m in range(-abs(n), abs(n) + 1)))


@dataclass(frozen=True, eq=False)
class LaurentSeries:
    ring: Ring
    coeffs: dict
    lo: int
    hi: int
    growth: GrowthClass = GrowthClass.FINITE_RING
    one_sided: bool = False
    tail_bound: float | None = None

    def __post_init__(self):
        if self.lo > self.hi + 1:
            raise ValueError("empty window must have lo == hi + 1")
        for n in self.coeffs:
            if not self.lo <= n <= self.hi:
                raise ValueError(f"exponent {n} outside window [{self.lo}, {self.hi}]")

    # -- construction -----------------------------------------------------
    @classmethod
    def from_coeffs(cls, ring, coeffs, window=None, growth=GrowthClass.FINITE_RING,
                    one_sided=None, tail_bound=None):
        coeffs = {int(n): c for n, c in dict(coeffs).items() if not ring.is_zero(c)}
        if window is None:
            window = (min(coeffs), max(coeffs)) if coeffs else (0, 0)
        lo, hi = window
        if one_sided is None:
            one_sided = lo >= 0
        return cls(ring, coeffs, lo, hi, GrowthClass(growth), one_sided, tail_bound)

    @classmethod
    def constant(cls, ring, c):
        return cls.from_coeffs(ring, {0: c}, (0, 0))

    @classmethod
    def monomial(cls, ring, n, c=None):
        return cls.from_coeffs(ring, {n: ring.one() if c is None else c}, (n, n))

    @classmethod
    def z(cls, ring, power=1):
        return cls.monomial(ring, power)

    # -- access -----------------------------------------------------------
    def __getitem__(self, n):
        return self.coeffs.get(n, self.ring.zero())

    @property
    def window(self):
        return (self.lo, self.hi)

    def support(self):
        return sorted(self.coeffs)

    def items(self):
        return sorted(self.coeffs.items())

    def is_zero(self):
        return not self.coeffs

    def equals(self, other, tol=None) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self.ring.eq(self[k], other[k], tol) for k in keys)

    def clip(self, lo, hi):
        coeffs = {n: c for n, c in self.coeffs.items() if lo <= n <= hi}
        return replace(self, coeffs=coeffs, lo=max(lo, self.lo), hi=min(hi, self.hi))

    def map(self, fn):
        R = self.ring
        coeffs = {n: fn(c) for n, c in self.coeffs.items()}
        return replace(self, coeffs={n: c for n, c in coeffs.items() if not R.is_zero(c)})

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        return series_arith("add", self, _as_series(self.ring, other))

    def __radd__(self, other):
        return series_arith("add", _as_series(self.ring, other), self)

    def __neg__(self):
        return self.map(self.ring.neg)

    def __sub__(self, other):
        return self + (-_as_series(self.ring, other))

    def __rsub__(self, other):
        return _as_series(self.ring, other) + (-self)

    def __mul__(self, other):
        return series_arith("mul", self, _as_series(self.ring, other))

    def __rmul__(self, other):
        return series_arith("mul", _as_series(self.ring, other), self)

    def scale(self, c, left=True):
        R = self.ring
        return self.map((lambda a: R.mul(c, a)) if left else (lambda a: R.mul(a, c)))

    def __repr__(self):
        terms = ", ".join(f"{n}: {c!r}" for n, c in self.items())
        return f"LaurentSeries({{{terms}}}, window={self.window}, {self.growth.label})"

    def to_json(self) -> str:
        return json.dumps({
            "window": [self.lo, self.hi],
            "class": self.growth.label,
            "coeffs": {str(n): element_to_json(self.ring, c) for n, c in self.items()},
        })


def _as_series(ring, x):
    if isinstance(x, LaurentSeries):
        return x
    if isinstance(x, int):
        x = ring.from_int(x)
    elif isinstance(x, Fraction):
        x = ring.from_fraction(x)
    return LaurentSeries.constant(ring, x)


def series_arith(op: str, a: LaurentSeries, b: LaurentSeries, clip=None) -> LaurentSeries:
    """Exact sum or convolution of two truncated series."""
    R = a.ring
    one_sided = a.one_sided and b.one_sided
    if op == "add":
        coeffs = dict(a.coeffs)
        for n, c in b.coeffs.items():
            coeffs[n] = R.add(coeffs[n], c) if n in coeffs else c
        window = (min(a.lo, b.lo), max(a.hi, b.hi))
        growth = join_class(a.growth, b.growth)
    elif op == "mul":
        if not a.growth.is_ring(one_sided) and not b.growth.is_ring(one_sided):
            raise PairingError(
                f"cannot multiply {a.growth.label} by {b.growth.label}: "
                "a module-class series needs a ring-class partner"
            )
        coeffs = {}
        for i, x in a.coeffs.items():
            for j, y in b.coeffs.items():
                p = R.mul(x, y)
                coeffs[i + j] = R.add(coeffs[i + j], p) if i + j in coeffs else p
        window = (a.lo + b.lo, a.hi + b.hi)
        growth = join_class(a.growth, b.growth)
    else:
        raise ValueError(f"unknown op {op!r}")
    tail = None
    if a.tail_bound is not None or b.tail_bound is not None:
        tail = (a.tail_bound or 0.0) + (b.tail_bound or 0.0)
    out = LaurentSeries.from_coeffs(R, coeffs, window, growth, one_sided, tail)
    if clip is not None:
        out = out.clip(*clip)
    return out


def weighted_seminorm(a: LaurentSeries, index: str | None = None,
                      alpha: WeightClass = WeightClass()) -> float:
    family = a.ring.seminorms
    index = family.indices[0] if index is None else index
    p = family.maps[index]
    return float(sum(alpha(n) * p(c) for n, c in a.coeffs.items()))


def integrate_z0(a: LaurentSeries):
    """Formal circle mean: the coefficient of ``z**0``."""
    return a[0]


def iterated_integral(a: LaurentSeries):
    """Double integral of a series whose coefficients are series (inner variable)."""
    return integrate_z0(integrate_z0(a))


def limit_at_one(a: LaurentSeries):
    """Coefficient sum; defined up to the summable class."""
    if a.growth > GrowthClass.SUMMABLE_RING:
        raise GrowthClassError(f"lim z->1 is not defined on {a.growth.label}")
    return a.ring.sum(c for _, c in a.items())


def transform_variable(a: LaurentSeries, rule: str, t=None, k: int = 1) -> LaurentSeries:
    """``negate_z`` (z -> -z), ``invert_z`` (z -> 1/z) or ``scale_by_t`` (z -> t**k z)."""
    R = a.ring
    if rule == "negate_z":
        coeffs = {n: (R.neg(c) if n % 2 else c) for n, c in a.coeffs.items()}
        return replace(a, coeffs=coeffs)
    if rule == "invert_z":
        coeffs = {-n: c for n, c in a.coeffs.items()}
        return LaurentSeries.from_coeffs(R, coeffs, (-a.hi, -a.lo), a.growth, a.hi <= 0, a.tail_bound)
    if rule == "scale_by_t":
        if t is None:
            raise ValueError("scale_by_t needs t")
        coeffs = {n: R.mul(R.power(t, k * n), c) for n, c in a.coeffs.items()}
        return LaurentSeries.from_coeffs(R, coeffs, a.window, a.growth, a.one_sided, a.tail_bound)
    raise ValueError(f"unknown rule {rule!r}")


def evaluate(a: LaurentSeries, x):
    """Substitute a ring element for ``z`` in a finite series."""
    R = a.ring
    return R.sum(R.mul(c, R.power(x, n)) for n, c in a.items())


def invert_unit_pencil(ring: Ring, w, M: int = DEFAULT_WINDOW, threshold: float = 1e-12) -> LaurentSeries:
    """Truncated inverse ``sum_{n<=M} (-w)**n z**n`` of ``1 + z w``.

    The decay certificate is ``p(w) < 1`` on exact rings and
    ``p(w**M) <= threshold * p(1)`` on floating point rings.
    """
    R = ring
    pw = R.norm(w)
    if R.exact:
        if not pw < 1:
            raise DecayCertificateError(f"p(w) = {pw} >= 1: powers of w are not certified to decay")
    else:
        if not R.norm(R.power(w, M)) <= threshold * R.norm(R.one()):
            raise DecayCertificateError(f"p(w^{M}) above {threshold}: no decay certificate")
    mw = R.neg(w)
    coeffs = {}
    term = R.one()
    for n in range(M + 1):
        coeffs[n] = term
        term = R.mul(term, mw)
    if pw < 1:
        tail = pw ** (M + 1) / (1 - pw)
    else:
        tail = R.norm(term) * (M + 1)
    return LaurentSeries.from_coeffs(R, coeffs, (0, M), GrowthClass.RAPID_RING, True, tail)


# ---------------------------------------------------------------------------
# the ordered bracket


def lambda_terms(n: int):
    """Yield ``(sign, eps)`` for every ``eps in {0,1}**n`` of the ordered bracket."""
    for bits in range(2 ** n):
        eps = tuple((bits >> (n - 1 - k)) & 1 for k in range(n))
        neg = sum(eps[j] * eps[j + 1] for j in range(n - 1)) % 2
        yield (-1 if neg else 1), eps


def lambda_scale_exponent(n: int) -> int:
    return (n + 1) // 2


def lambda_combinator(ring: Ring, args: Sequence, window=None):
    """Ordered bracket ``2**-ceil(n/2) * sum_eps sign(eps) * prod_k c_k**eps_k``.

    Factors are multiplied in argument order.  Ring elements and
    :class:`LaurentSeries` may be mixed; the result is a ring element when all
    arguments are ring elements.
    """
    R = ring
    n = len(args)
    scale = R.one()
    for _ in range(lambda_scale_exponent(n)):
        scale = R.mul(scale, R.half())
    if not any(isinstance(a, LaurentSeries) for a in args):
        total = R.zero()
        for sign, eps in lambda_terms(n):
            term = R.one()
            for c, e in zip(args, eps):
                if e:
                    term = R.mul(term, c)
            total = R.add(total, term if sign > 0 else R.neg(term))
        return R.mul(scale, total)
    series = [_as_series(R, a) for a in args]
    total = LaurentSeries.from_coeffs(R, {}, (0, 0))
    for sign, eps in lambda_terms(n):
        term = LaurentSeries.constant(R, R.one())
        for c, e in zip(series, eps):
            if e:
                term = series_arith("mul", term, c, clip=window)
        total = total + (term if sign > 0 else -term)
    return total.scale(scale)


# ---------------------------------------------------------------------------
# series as ring elements (two-variable data)


class SeriesRing(Ring):
    """Laurent series over ``base`` as a ring, for nested (two-variable) data.

    Products are clipped to ``window`` when given.  No inverses.
    """

    def __init__(self, base: Ring, window=None):
        self.base = base
        self.window = window
        self.exact = base.exact
        self.tol = base.tol
        self.name = f"{base.name}[z^-1,z]"

    def zero(self):
        return LaurentSeries.from_coeffs(self.base, {}, (0, 0))

    def one(self):
        return LaurentSeries.constant(self.base, self.base.one())

    def from_int(self, n):
        return LaurentSeries.constant(self.base, self.base.from_int(n))

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return series_arith("mul", a, b, clip=self.window)

    def is_zero(self, a):
        return all(self.base.is_zero(c) for c in a.coeffs.values())

    def eq(self, a, b, tol=None):
        return a.equals(b, tol)

    def try_invert(self, x):
        return None

    @property
    def has_half(self):
        return self.base.has_half

    def half(self):
        return LaurentSeries.constant(self.base, self.base.half())

    @property
    def seminorms(self):
        from .rings import SeminormFamily

        return SeminormFamily({"l1": lambda a: weighted_seminorm(a)})
