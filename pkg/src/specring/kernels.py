"""Transformation kernels as exact coefficient rules.

A kernel is an element of ``A[t][[z^-1, z]]``; it is stored through the rule
``(t-degree d, z-exponent s) -> Fraction`` and never as a rational function.
Tables are cut at t-degree ``t_max`` and at ``|s| <= m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import GrowthClassError
from .laurent import GrowthClass, LaurentSeries
from .rings import RationalRing, Ring

KINDS = (
    "Poisson",
    "HilbertPoisson",
    "ShiftedOddPoisson",
    "VariantRegularization",
    "VariantHilbertPoisson",
    "OrdinaryRegularization",
    "HilbertTwoVar",
)

NEEDS_HALF = frozenset({"VariantRegularization", "VariantHilbertPoisson"})

DEFAULT_T_MAX = 24

_HALF = Fraction(1, 2)


def _sgn(s):
    return (s > 0) - (s < 0)


def _poisson(d, s):
    return Fraction(1) if d == abs(s) else Fraction(0)


def _hilbert_poisson(d, s):
    return _sgn(s) * _poisson(d, s)


def _shifted_odd(d, s):
    if s <= 0:
        return Fraction(1) if d == -s else Fraction(0)
    return Fraction(1) if d == s - 1 else Fraction(0)


def _variant_reg(d, s):
    if s == 0:
        return Fraction(1) if d == 1 else Fraction(0)
    if d == abs(s) + 1:
        return _HALF
    if d == abs(s):
        return -_HALF
    return Fraction(0)


def _variant_hilbert(d, s):
    if s != 0 and d in (abs(s), abs(s) + 1):
        return _sgn(s) * _HALF
    return Fraction(0)


def _ordinary_reg(d, s):
    # t(1-z)(1-1/z)/((1-tz)(1-t/z)): z^0 row is 2t/(1+t), z^s row is -t^|s| (1-t)/(1+t)
    if s == 0:
        return Fraction(2 * (-1) ** (d - 1)) if d >= 1 else Fraction(0)
    k = d - abs(s)
    if k < 0:
        return Fraction(0)
    if k == 0:
        return Fraction(-1)
    return Fraction(-2 * (-1) ** k)


def _hilbert_two_var(sw, sz):
    return Fraction(_sgn(sw)) if sz == -sw else Fraction(0)


_RULES = {
    "Poisson": _poisson,
    "HilbertPoisson": _hilbert_poisson,
    "ShiftedOddPoisson": _shifted_odd,
    "VariantRegularization": _variant_reg,
    "VariantHilbertPoisson": _variant_hilbert,
    "OrdinaryRegularization": _ordinary_reg,
    "HilbertTwoVar": _hilbert_two_var,
}

# numerators over (1 - tz)(1 - t/z), as {(t-degree, z-exponent): coefficient}
NUMERATORS = {
    "Poisson": {(0, 0): Fraction(1), (2, 0): Fraction(-1)},
    "HilbertPoisson": {(1, 1): Fraction(1), (1, -1): Fraction(-1)},
    "ShiftedOddPoisson": {(0, 0): Fraction(1), (0, 1): Fraction(1),
                          (1, 0): Fraction(-1), (1, 1): Fraction(-1)},
    "VariantRegularization": {(1, 0): Fraction(1), (2, 0): Fraction(1),
                              (1, 1): -_HALF, (1, -1): -_HALF, (2, 1): -_HALF, (2, -1): -_HALF},
    "VariantHilbertPoisson": {(1, 1): _HALF, (1, -1): -_HALF, (2, 1): _HALF, (2, -1): -_HALF},
    "OrdinaryRegularization": {(1, 0): Fraction(2), (1, 1): Fraction(-1), (1, -1): Fraction(-1)},
}

CLOSED_FORMS = {
    "Poisson": "(1-t^2)/((1-tz)(1-t/z))",
    "HilbertPoisson": "t(z-1/z)/((1-tz)(1-t/z))",
    "ShiftedOddPoisson": "(1-t)(1+z)/((1-tz)(1-t/z))",
    "VariantRegularization": "(1+t)t(1-z)(1-1/z)/(2(1-tz)(1-t/z))",
    "VariantHilbertPoisson": "(1+t)t(z-1/z)/(2(1-tz)(1-t/z))",
    "OrdinaryRegularization": "t(1-z)(1-1/z)/((1-tz)(1-t/z))",
    "HilbertTwoVar": "(z+w)/(z-w) = sum_s sgn(s) w^s z^-s",
}


@dataclass(frozen=True)
class TransformationKernel:
    kind: str
    t_max: int = DEFAULT_T_MAX
    m: int | None = None
    caveats: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in _RULES:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.m is None:
            object.__setattr__(self, "m", self.t_max)
        if self.kind == "OrdinaryRegularization" and not self.caveats:
            object.__setattr__(self, "caveats", ("infinite t-series per z column; not a ring element of A[t][[z^-1,z]]",))

    @property
    def two_variable(self):
        return self.kind == "HilbertTwoVar"

    @property
    def closed_form(self):
        return CLOSED_FORMS[self.kind]

    def coefficient(self, d: int, s: int) -> Fraction:
        """Coefficient of ``t**d z**s`` (for HilbertTwoVar: of ``w**d z**s``)."""
        return _RULES[self.kind](d, s)

    def column_degree(self, s: int):
        """Top t-degree of the z**s column, or None for an infinite column."""
        k = self.kind
        if k in ("Poisson", "HilbertPoisson"):
            return abs(s)
        if k == "ShiftedOddPoisson":
            return -s if s <= 0 else s - 1
        if k in NEEDS_HALF:
            return 1 if s == 0 else abs(s) + 1
        return None

    def table(self) -> dict:
        """Non-zero entries ``{(d, s): Fraction}`` inside the truncation box."""
        out = {}
        if self.two_variable:
            for sw in range(-self.m, self.m + 1):
                c = self.coefficient(sw, -sw)
                if c:
                    out[(sw, -sw)] = c
            return out
        for s in range(-self.m, self.m + 1):
            for d in range(self.t_max + 1):
                c = self.coefficient(d, s)
                if c:
                    out[(d, s)] = c
        return out


def kernel_coefficients(kind: str, t_order: int = DEFAULT_T_MAX, z_window: int | None = None,
                        ring: Ring | None = None) -> dict:
    """Exact coefficient table of a kernel, converted into ``ring``.

    Variant kernels have ``1/2`` entries, so a ring without one raises
    :class:`MissingHalfError` here.
    """
    k = TransformationKernel(kind, t_order, z_window)
    R = RationalRing() if ring is None else ring
    return {key: R.from_fraction(c) for key, c in k.table().items()}


def apply_kernel(k: TransformationKernel, b: LaurentSeries) -> LaurentSeries:
    """``sum_d t**d sum_s k[d, s] b[-s]`` as a series in ``t``.

    For the two-variable Hilbert kernel the result is ``int k(z, w) b(z) dz``,
    a series in ``w``.
    """
    R = b.ring
    if k.two_variable:
        coeffs = {}
        for sw in range(-k.m, k.m + 1):
            c = k.coefficient(sw, -sw)
            if c and b[sw] is not None:
                coeffs[sw] = R.mul(R.from_fraction(c), b[sw])
        return LaurentSeries.from_coeffs(R, coeffs, (-k.m, k.m))
    coeffs = {}
    for (d, s), c in k.table().items():
        bs = b[-s]
        if R.is_zero(bs):
            continue
        term = R.mul(R.from_fraction(c), bs)
        coeffs[d] = R.add(coeffs[d], term) if d in coeffs else term
    return LaurentSeries.from_coeffs(R, coeffs, (0, k.t_max), GrowthClass.FINITE_RING, True)


def kernel_limit_t1(k: TransformationKernel, z_window: int | None = None,
                    ring: Ring | None = None) -> LaurentSeries:
    """``lim_{t->1}`` column by column.

    Only columns whose whole t-polynomial fits under ``t_max`` are summed; a
    column cut by the truncation would give a wrong limit.
    """
    if k.two_variable:
        raise ValueError("the two-variable kernel has no t")
    R = RationalRing() if ring is None else ring
    m = k.m if z_window is None else z_window
    coeffs = {}
    lo = hi = 0
    for s in range(-m, m + 1):
        top = k.column_degree(s)
        if top is None:
            raise GrowthClassError(f"{k.kind} columns are infinite t-series; lim t->1 is not available")
        if top > k.t_max:
            continue
        lo, hi = min(lo, s), max(hi, s)
        total = sum((k.coefficient(d, s) for d in range(top + 1)), Fraction(0))
        if total:
            coeffs[s] = R.from_fraction(total)
    return LaurentSeries.from_coeffs(R, coeffs, (lo, hi))


def closed_form_residual(kind: str, t_max: int = DEFAULT_T_MAX, m: int | None = None) -> dict:
    """Entries where ``(1 - tz)(1 - t/z) * kernel`` differs from its numerator.

    Compared for ``d <= t_max`` and ``|s| <= m - 1`` (the outermost column is
    cut by the window).  An empty dict means exact agreement.
    """
    k = TransformationKernel(kind, t_max, m)
    if k.two_variable:
        raise ValueError("closed-form check is for the one-variable kernels")
    c = k.coefficient
    num = NUMERATORS[kind]
    bad = {}
    for s in range(-k.m + 1, k.m):
        for d in range(t_max + 1):
            v = c(d, s)
            if d >= 2:
                v += c(d - 2, s)
            if d >= 1:
                v -= c(d - 1, s - 1) + c(d - 1, s + 1)
            want = num.get((d, s), Fraction(0))
            if v != want:
                bad[(d, s)] = (v, want)
    return bad


def variant_hilbert_relation_holds(t_max: int = DEFAULT_T_MAX, m: int | None = None) -> bool:
    """The variant Hilbert-Poisson kernel is ``(1+t)/2`` times the Hilbert-Poisson kernel."""
    h = TransformationKernel("HilbertPoisson", t_max, m)
    v = TransformationKernel("VariantHilbertPoisson", t_max, m)
    for s in range(-h.m, h.m + 1):
        for d in range(t_max + 1):
            want = _HALF * h.coefficient(d, s) + (_HALF * h.coefficient(d - 1, s) if d else 0)
            if v.coefficient(d, s) != want:
                return False
    return True


# ---------------------------------------------------------------------------
# resolvent-analytic pipeline for a scalar rational Q


def scalar_pencil_inverse(Q, m: int) -> dict:
    """Exact coefficients of ``1/((1+Q)/2 + (1-Q)/2 z)`` for rational ``Q != 0``.

    ``Q > 0`` expands in ``z`` (exponents 0..m), ``Q < 0`` in ``1/z``
    (exponents -1..-m-1); both share the ratio ``(|Q|-1)/(|Q|+1)``.
    """
    Q = Fraction(Q)
    if Q == 0:
        raise ValueError("Q = 0 has no sign")
    a = abs(Q)
    X = (a - 1) / (a + 1)
    c = 2 / (a + 1)
    if Q > 0:
        return {n: c * X ** n for n in range(m + 1)}
    return {-1 - k: c * X ** k for k in range(m + 1)}


@dataclass
class ResolventAnalyticReport:
    Q: Fraction
    t_max: int
    m: int
    direct: list             # t-coefficients of the regularized double integral
    hilbert_parts: tuple     # the two variant-Hilbert integrals, as t-coefficient lists
    integrand_mismatches: int
    checked_entries: int

    @property
    def vanishes(self):
        return (not any(self.direct) and not any(map(any, self.hilbert_parts))
                and self.integrand_mismatches == 0)


def resolvent_analytic_check(Q, t_max: int = 8, m: int = 24) -> ResolventAnalyticReport:
    """Regularized form of ``1 - (sgn Q)**2`` for scalar ``Q``, exactly at truncation.

    The integrand ``R~(t, w/z) (1 - r(z) r(w))`` with ``r = L(-z,Q)/L(z,Q)`` is
    compared entry by entry with ``H~(t, w/z) (g(z) - g(w))``,
    ``g = (z-1)(1-Q^2)/(2 L(z,Q))``, on the box where no truncated data enters.
    Both sides are then integrated.
    """
    Q = Fraction(Q)
    if m <= t_max:
        raise ValueError("need m > t_max")
    inv = scalar_pencil_inverse(Q, m + 1)
    iv = lambda n: inv.get(n, Fraction(0))
    r = {n: (1 + Q) / 2 * iv(n) + (Q - 1) / 2 * iv(n - 1) for n in range(-m, m + 1)}
    g = {n: (1 - Q * Q) / 2 * (iv(n - 1) - iv(n)) for n in range(-m, m + 1)}
    rr = lambda n: r.get(n, Fraction(0))
    gg = lambda n: g.get(n, Fraction(0))

    def F(i, j):
        return (1 if i == 0 and j == 0 else 0) - rr(i) * rr(j)

    def G(i, j):
        return (gg(i) if j == 0 else 0) - (gg(j) if i == 0 else 0)

    Rt = TransformationKernel("VariantRegularization", t_max, m)
    Ht = TransformationKernel("VariantHilbertPoisson", t_max, m)
    reach = m - t_max
    mismatches = checked = 0
    for d in range(t_max + 1):
        for a in range(-reach, reach + 1):
            for b in range(-reach, reach + 1):
                lhs = sum((Rt.coefficient(d, s) * F(a + s, b - s) for s in range(-d, d + 1)), Fraction(0))
                rhs = sum((Ht.coefficient(d, s) * G(a + s, b - s) for s in range(-d, d + 1)), Fraction(0))
                checked += 1
                if lhs != rhs:
                    mismatches += 1

    # double integral: the w^s z^-s kernel term pairs with the z^s w^-s coefficient
    direct = [sum((Rt.coefficient(d, s) * F(s, -s) for s in range(-d, d + 1)), Fraction(0))
              for d in range(t_max + 1)]
    part_z = [sum((Ht.coefficient(d, s) * (gg(s) if s == 0 else 0) for s in range(-d, d + 1)), Fraction(0))
              for d in range(t_max + 1)]
    part_w = [sum((Ht.coefficient(d, s) * (gg(-s) if s == 0 else 0) for s in range(-d, d + 1)), Fraction(0))
              for d in range(t_max + 1)]
    return ResolventAnalyticReport(Q, t_max, m, direct, (part_z, part_w), mismatches, checked)
