"""Exact verification of the cross-multiplied resolvent identities.

Every identity is checked as an equality of Laurent polynomials with rational
coefficients in commuting indeterminates.  Ring elements such as ``Q`` enter
as scalars: each identity involves a single ring element together with
central scalars (``z``, ``w``, ``t``), so the scalar identity implies the ring
identity through the substitution homomorphism.  Denominators are always
cleared by an explicit multiplier before comparing; the checker never
divides.

Inverses like ``Q**-1`` are negative exponents, so the relation
``Q * Qinv = 1`` is part of the canonical form.  Involution indeterminates
(``F**2 = 1``) reduce their exponent mod 2.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .laurent import lambda_scale_exponent, lambda_terms


class MultiPoly:
    """Sparse Laurent polynomial: monomial -> Fraction.

    A monomial is a sorted tuple of ``(variable, exponent)`` pairs with
    non-zero exponents.  Zero coefficients are never stored.
    """

    __slots__ = ("terms", "involutions")

    def __init__(self, terms=None, involutions=frozenset()):
        self.involutions = frozenset(involutions)
        out = {}
        for mono, c in (terms or {}).items():
            mono = self._reduce(mono)
            out[mono] = out.get(mono, Fraction(0)) + Fraction(c)
        self.terms = {m: c for m, c in out.items() if c != 0}

    def _reduce(self, mono):
        exps = {}
        for v, e in mono:
            exps[v] = exps.get(v, 0) + e
        if self.involutions:
            exps = {v: (e % 2 if v in self.involutions else e) for v, e in exps.items()}
        return tuple(sorted((v, e) for v, e in exps.items() if e))

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, c, involutions=frozenset()):
        return cls({(): c}, involutions)

    @classmethod
    def var(cls, name, power=1, involutions=frozenset()):
        return cls({((name, power),): 1}, involutions)

    def _lift(self, other):
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.const(other, self.involutions)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, Fraction(0)) + c
        return MultiPoly(terms, self.involutions | other.involutions)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly({m: -c for m, c in self.terms.items()}, self.involutions)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        inv = self.involutions | other.involutions
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = MultiPoly._reduce_with(m1 + m2, inv)
                terms[m] = terms.get(m, Fraction(0)) + c1 * c2
        return MultiPoly(terms, inv)

    __rmul__ = __mul__

    @staticmethod
    def _reduce_with(mono, inv):
        exps = {}
        for v, e in mono:
            exps[v] = exps.get(v, 0) + e
        return tuple(sorted((v, (e % 2 if v in inv else e)) for v, e in exps.items()
                            if (e % 2 if v in inv else e)))

    def __pow__(self, k):
        if k < 0:
            return self.monomial_inverse() ** (-k)
        out = MultiPoly.const(1, self.involutions)
        for _ in range(k):
            out = out * self
        return out

    def monomial_inverse(self):
        if len(self.terms) != 1:
            raise ValueError("only monomials can be inverted")
        (mono, c), = self.terms.items()
        return MultiPoly({tuple((v, -e) for v, e in mono): 1 / c}, self.involutions)

    def subs(self, mapping: dict) -> "MultiPoly":
        """Substitute polynomials for variables (negative powers need monomials)."""
        out = MultiPoly({}, self.involutions)
        for mono, c in self.terms.items():
            term = MultiPoly.const(c, self.involutions)
            for v, e in mono:
                if v in mapping:
                    term = term * (self._lift(mapping[v]) ** e)
                else:
                    term = term * MultiPoly.var(v, e, self.involutions)
            out = out + term
        return out

    # -- inspection -------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def variables(self):
        return sorted({v for m in self.terms for v, _ in m})

    def min_exponents(self):
        lows = {}
        for m in self.terms:
            present = dict(m)
            for v in self.variables():
                lows[v] = min(lows.get(v, 0), present.get(v, 0))
        return lows

    def clear_monomial(self):
        """Multiply by the smallest monomial making every exponent non-negative."""
        lows = self.min_exponents()
        shift = MultiPoly({tuple((v, -e) for v, e in lows.items() if e): 1}, self.involutions)
        return self * shift

    def coefficient(self, **exps):
        mono = tuple(sorted((v, e) for v, e in exps.items() if e))
        return self.terms.get(mono, Fraction(0))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items()):
            m = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)
            parts.append(f"{c}" if not m else (m if c == 1 else f"{c}*{m}"))
        return " + ".join(parts)


def lam(*args):
    """The ordered bracket over MultiPoly (commuting, so order only affects signs)."""
    n = len(args)
    total = MultiPoly()
    for sign, eps in lambda_terms(n):
        term = MultiPoly.const(sign)
        for a, e in zip(args, eps):
            if e:
                term = term * a
        total = total + term
    return total * Fraction(1, 2 ** lambda_scale_exponent(n))


# printed 4-argument bracket (times 4); the scheme must reproduce it
PRINTED_LAMBDA4 = {
    "": 1, "a": 1, "b": 1, "c": 1, "d": 1,
    "ab": -1, "bc": -1, "cd": -1, "ac": 1, "ad": 1, "bd": 1,
    "abc": 1, "acd": -1, "abd": -1, "bcd": 1, "abcd": -1,
}


def printed_lam4(a, b, c, d, table=PRINTED_LAMBDA4):
    vals = {"a": a, "b": b, "c": c, "d": d}
    total = MultiPoly()
    for key, coef in table.items():
        term = MultiPoly.const(coef)
        for ch in key:
            term = term * vals[ch]
        total = total + term
    return total * Fraction(1, 4)


# ---------------------------------------------------------------------------
# catalog


@dataclass
class IdentityEntry:
    name: str
    anchor: str
    group: str
    multiplier: str
    build: Callable  # lam -> list[(lhs, rhs)]
    uses_half: bool = True


@dataclass
class IdentityResult:
    name: str
    verified: bool
    residuals: list = field(default_factory=list)
    seconds: float = 0.0

    def to_dict(self):
        return {"name": self.name, "verified": self.verified,
                "residuals": [repr(r) for r in self.residuals],
                "seconds": round(self.seconds, 4)}


def _vars(inv=()):
    names = "z w t Q S P T F R".split()
    invs = frozenset(inv)
    return {n: MultiPoly.var(n, involutions=invs) for n in names}


def _E7(L):
    v = _vars()
    z, w, Q = v["z"], v["w"], v["Q"]
    Lz, Lw = L(z, Q), L(w, Q)
    # first "=", cleared by Lz*Lw
    first = (Lz * Lw - L(-z, Q) * L(-w, Q), (z + w) * Fraction(1, 2) * (1 - Q * Q))
    # last "=", cleared by 2 (z - w) Lz Lw
    last = ((z + w) * (z - w) * (1 - Q * Q),
            (z + w) * ((z - 1) * (1 - Q * Q) * Lw - (w - 1) * (1 - Q * Q) * Lz))
    return [first, last]


def _E13(L, n_max=6):
    Q = _vars()["Q"]
    pairs = []
    # a_n (1+Q)^(n+1) = 2 (Q-1)^n (1+Q)^0 ... scaled form
    def a_scaled(n, k):
        # a_n * (1+Q)^k for n >= 0, a_{-1} = 0
        if n < 0:
            return MultiPoly()
        return 2 * (Q - 1) ** n * (1 + Q) ** (k - n - 1)
    for n in range(n_max + 1):
        k = n + 1
        lhs = (1 - Q) * Fraction(1, 2) * a_scaled(n - 1, k) + (1 + Q) * Fraction(1, 2) * a_scaled(n, k)
        rhs = (1 + Q) ** k if n == 0 else MultiPoly()
        pairs.append((lhs, rhs))
    return pairs


def _sqrt_setup(L):
    v = _vars()
    z, w, S = v["z"], v["w"], v["S"]
    zi, wi = z ** -1, w ** -1
    Lz, Lw = L(z, S, zi), L(w, S, wi)
    L7a = L(z, S, zi, MultiPoly.const(1), w, S, wi)
    L7b = L(z, S, zi, MultiPoly.const(1), wi, S, w)
    return z, w, S, zi, wi, Lz, Lw, L7a, L7b


def _E9(L):
    z, w, S, zi, wi, Lz, Lw, L7a, L7b = _sqrt_setup(L)
    return [(2 * S * S - 2 * S * Lz * Lw, S * (S - L7a) + S * (S - L7b))]


def _E10(L):
    z, w, S, zi, wi, Lz, Lw, L7a, L7b = _sqrt_setup(L)
    k = z * wi
    return [((S - L7a) * (k - 1), (k + 1) * (L(-z, S, zi) * Lw - L(-w, S, wi) * Lz))]


def _E11(L):
    z, w, S, zi, wi, Lz, Lw, L7a, L7b = _sqrt_setup(L)
    k = z * w
    return [((S - L7b) * (k - 1), (k + 1) * (L(-z, S, zi) * Lw - L(w, S, -wi) * Lz))]


def _LAMBDA_NEG(L):
    v = _vars()
    z, Q = v["z"], v["Q"]
    return [(L(z, -Q), z * L(z ** -1, Q))]


def _LAMBDA_INV(L):
    v = _vars()
    z, Q = v["z"], v["Q"]
    return [(Q * L(z, Q ** -1), L(-z, Q))]


def _LAMBDA_SINV(L):
    v = _vars()
    z, S = v["z"], v["S"]
    return [(L(-z, S, (-z) ** -1), S * L(z, S ** -1, z ** -1))]


def _SQ_FACTOR(L):
    v = _vars()
    z, Q = v["z"], v["Q"]
    return [(L(z, Q * Q, z ** -1), L(z, Q) * L(z ** -1, Q))]


def _ROOTSIGN_AVG(L):
    v = _vars()
    z, Q = v["z"], v["Q"]
    zi = z ** -1
    # 1/2 (A/B + C/D) = Q / (B D) cleared by 2 B D, with B D = L(z, Q^2, 1/z)
    return [
        (L(-z, Q) * L(zi, Q) + L(-zi, Q) * L(z, Q), 2 * Q),
        (L(z, Q) * L(zi, Q), L(z, Q * Q, zi)),
    ]


def _E15_FINAL(L):
    v = _vars()
    z, w, P = v["z"], v["w"], v["P"]
    PP = P * (1 - P)
    Az, Aw = 1 - P + P * z, 1 - P + P * w
    return [((z + w) * (z - w) * PP, (z + w) * ((z - 1) * PP * Aw - (w - 1) * PP * Az))]


def _E17_FINAL(L):
    v = _vars()
    z, w, T = v["z"], v["w"], v["T"]
    zi, wi = z ** -1, w ** -1
    h = Fraction(1, 2)
    cz, cw = (z + zi) * h, (w + wi) * h
    sz, sw = (z - zi) * h, (w - wi) * h
    Dz, Dw = 1 + (z - 2 + zi) * T, 1 + (w - 2 + wi) * T
    first = ((1 + cz) * T * (Dw - (1 + cw) * T) - T * Dz * Dw,
             (cz - cz * T - cw * T + T + cz * cw * T) * T * (1 - 4 * T))
    last = ((sz - sw) * (1 - 2 * T) + (z * wi - zi * w) * T, sz * Dw - sw * Dz)
    return [first, last]


def _IDEM_SHIFT(L):
    v = _vars()
    z, P = v["z"], v["P"]
    zi = z ** -1
    A = 1 - P + P * z
    B = P + (1 - P) * zi
    return [
        # with P and 1-P swapped inside the bracket the identity is false
        (P + (1 - P) * z, (1 - P + P * zi) * z),
        # (1 - P') + P' z with P' = -P/(1-2P), cleared by (1 - 2P)
        ((1 - 2 * P) + P - P * z, 1 - P + P * (-z)),
        # P z / A = 1 - (1-P) z^-1 / B, cleared by A B
        (P * z * B, A * B - (1 - P) * zi * A),
    ]


def _FSQRT_SHIFT(L):
    v = _vars()
    z, T = v["z"], v["T"]
    zi = z ** -1
    cz = (z + zi) * Fraction(1, 2)
    Dm = 1 + ((-z) - 2 + (-z) ** -1) * T
    return [
        ((1 - 4 * T) - (z - 2 + zi) * T, Dm),
        ((1 + cz) * (-T) * (1 - 4 * T), (1 - cz) * T - 2 * T * Dm),
    ]


def _FACT_P(L):
    v = _vars()
    z, P = v["z"], v["P"]
    zi = z ** -1
    return [(1 + (z - 2 + zi) * P * (1 - P), (1 - P + P * z) * (1 - P + P * zi))]


def _FSQRT_DECOMP(L):
    v = _vars()
    z, P = v["z"], v["P"]
    zi = z ** -1
    h = Fraction(1, 2)
    cz, sz = (z + zi) * h, (z - zi) * h
    PP = P * (1 - P)
    D = (1 - P + P * z) * (1 - P + P * zi)
    return [((1 + cz) * PP + sz * PP * (1 - 2 * P), P * D + P * z * (1 - 2 * P) * (1 - P + P * zi))]


def _homotopy_vars():
    v = _vars(inv=("F",))
    return v["z"], v["t"], v["F"], v["R"]


def _KH_CLOSED(L):
    z, t, F, R = _homotopy_vars()
    zi = z ** -1
    h = Fraction(1, 2)
    Lt, Lmt = L(t, R), L(-t, R)
    closed = L(z, F, t, R)
    K_cleared = (1 + F) * h * L(t * z, R) + (1 - F) * h * z * L(t * zi, R)
    X_cleared = (Lt + Lmt * F) * h + (Lt - Lmt * F) * h * z
    H_cleared = (1 + F) * h * L(t * zi, R) + (1 - F) * h * zi * L(t * z, R)
    sub = lambda p, **kw: p.subs(kw)
    return [
        (K_cleared, closed),
        (X_cleared, closed),
        (closed * L(zi, F, t, R), L(t * z, R) * L(t * zi, R)),      # K H = 1
        (H_cleared, L(zi, F, t, R)),
        (sub(closed, z=1), Lt),                                       # K(t,1,Q) = 1
        (sub(closed, z=-1, t=1), R * F),                              # K(1,-1,Q) = Q (L(1,R) = 1)
        (sub(closed, z=-1, t=0), F * sub(Lt, t=0)),                   # K(0,-1,Q) = sgn Q
        (sub(closed, z=-1, t=-1) * R * F, sub(Lt, t=-1)),             # K(-1,-1,Q) = Q^-1
    ]


def _LG_CLOSED(L):
    z, t, F, R = _homotopy_vars()
    zi = z ** -1
    h = Fraction(1, 2)
    closed = L(z, F, t, R)
    L_def = (1 + F) * h * L(t * z, R) + (1 - F) * h * z * L(t * zi, R)
    G_cleared = (1 + F) * h * L(t * zi, R) + (1 - F) * h * zi * L(t * z, R)
    sub = lambda p, **kw: p.subs(kw)
    return [
        (L_def, closed),
        (closed, L(t, F, z, R * F)),
        (closed * L(zi, F, t, R), L(t * z, R) * L(t * zi, R)),       # L G = 1
        (G_cleared, L(zi, F, t, R)),
        (sub(closed, z=1), L(t, R)),
        (sub(closed, z=-1, t=1), R * F),
        (sub(closed, z=-1, t=0), (R * F + F) * h),
        (sub(closed, z=-1, t=-1), F),
    ]


CATALOG = [
    IdentityEntry("E7", "which does makes sense in", "sign", "Λ(z,Q)Λ(w,Q); 2(z-w)Λ(z,Q)Λ(w,Q)", _E7),
    IdentityEntry("E13", "The product of Λ(z,Q)", "sign", "(1+Q)^(n+1), n = 0..6", _E13),
    IdentityEntry("LAMBDA_NEG", "Λ(z,-Q)=zΛ(z^-1,Q)", "sign", "none", _LAMBDA_NEG),
    IdentityEntry("LAMBDA_INV", "Λ(z,Q^-1)=Q^-1Λ(-z,Q)", "sign", "Q", _LAMBDA_INV),
    IdentityEntry("SQ_FACTOR", "follows from the equality", "sign", "none", _SQ_FACTOR),
    IdentityEntry("ROOTSIGN_AVG", "averaging chain of the sgn/sqrt relation", "sign",
                  "2Λ(z,Q)Λ(z^-1,Q)", _ROOTSIGN_AVG),
    IdentityEntry("E9", "This follows using the key identities", "sqrt",
                  "2Λ(z,S,z^-1)Λ(w,S,w^-1)", _E9),
    IdentityEntry("E10", "This follows using the key identities", "sqrt",
                  "2Λ(z,S,z^-1)Λ(w,S,w^-1)(zw^-1 - 1)", _E10),
    IdentityEntry("E11", "This follows using the key identities", "sqrt",
                  "2Λ(z,S,z^-1)Λ(w,S,w^-1)(zw - 1)", _E11),
    IdentityEntry("LAMBDA_SINV", "shows that S^-1 in", "sqrt", "Λ(z,S^-1,z^-1)Λ(-z,S,(-z)^-1)", _LAMBDA_SINV),
    IdentityEntry("E15_FINAL", "It is natural try the proof along the steps", "idem",
                  "2(z-w)(1-P+Pz)(1-P+Pw)", _E15_FINAL),
    IdentityEntry("IDEM_SHIFT", "P+(1-P)z=(P+(1-P)z^-1)z", "idem",
                  "none; (1-2P); (1-P+Pz)(P+(1-P)z^-1)", _IDEM_SHIFT, uses_half=False),
    IdentityEntry("FACT_P", "The decomposition", "idem", "none", _FACT_P, uses_half=False),
    IdentityEntry("E17_FINAL", "the use of 1/2 is superficial", "fsqrt",
                  "D(z)D(w); 2(z-w)D(z)D(w)/((z+w)T(1-4T))", _E17_FINAL),
    IdentityEntry("FSQRT_SHIFT", "1+(z-2+z^-1)(-T/(1-4T))", "fsqrt", "(1-4T); (1-4T)D(-z)", _FSQRT_SHIFT),
    IdentityEntry("FSQRT_DECOMP", "The equality follows from the identity", "fsqrt",
                  "(1-P+Pz)(1-P+Pz^-1)", _FSQRT_DECOMP),
    IdentityEntry("KH_CLOSED", "K(t,z,Q)=Λ(z,sgn Q,t,|Q|_r)/Λ(t,|Q|_r)", "homotopy",
                  "Λ(t,R); Λ(tz,R)Λ(tz^-1,R)", _KH_CLOSED),
    IdentityEntry("LG_CLOSED", "L(t,z,Q)=Λ(t,sgn Q,z,Q)", "homotopy", "Λ(tz,R)Λ(tz^-1,R)", _LG_CLOSED),
]

GROUPS = ("sign", "sqrt", "idem", "fsqrt", "homotopy")


def catalog(group: str = "all"):
    if group == "all":
        return list(CATALOG)
    if group not in GROUPS:
        raise ValueError(f"unknown identity set {group!r}")
    return [e for e in CATALOG if e.group == group]


def get_entry(name: str) -> IdentityEntry:
    for e in CATALOG:
        if e.name == name:
            return e
    raise KeyError(name)


def verify_identity(entry, lam_impl=lam) -> IdentityResult:
    """Compute ``lhs - rhs`` for every cleared pair; verified iff all vanish."""
    if isinstance(entry, str):
        entry = get_entry(entry)
    start = time.perf_counter()
    residuals = []
    for lhs, rhs in entry.build(lam_impl):
        diff = (lhs - rhs).clear_monomial()
        if not diff.is_zero():
            residuals.append(diff)
    return IdentityResult(entry.name, not residuals, residuals, time.perf_counter() - start)


def verify_all(group: str = "all", lam_impl=lam) -> list[IdentityResult]:
    return [verify_identity(e, lam_impl) for e in catalog(group)]
