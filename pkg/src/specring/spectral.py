"""The spectral integrals and everything derived from them.

Each primitive (``sgn``, ``sqrt_spec``, ``idem_spec``, ``fsqrt_spec``) is the
``z**0`` coefficient of a resolvent-type series.  Three backends realize it:

* :class:`Quadrature` averages the integrand over the ``N``-th roots of unity
  (the trapezoid rule).  It works on the complex embedding of the ring.
* :class:`SeriesCayley` expands one-sided pencils through decaying Cayley
  powers, exactly when the ring is exact.
* :class:`Oracle` evaluates ``V f(D) V^-1`` from supplied diagonalization data.

Results carry residuals that are recomputed from the returned value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from .errors import (BackendError, DecayCertificateError, MissingHalfError,
                     NotInvertibleError, SpectralClassError)
from .laurent import (DEFAULT_WINDOW, GrowthClass, LaurentSeries, evaluate,
                      invert_unit_pencil, series_arith)
from .rings import (ComplexMatrixRing, ComplexRing, IntegerRing, MatrixRing,
                    RationalRing, Ring, cayley, element_to_json)

SINGULAR_MARGIN = 1e-10


# ---------------------------------------------------------------------------
# backends


@dataclass(frozen=True)
class Quadrature:
    nodes: int = 64
    pairwise: bool = False

    name = "quadrature"

    def __post_init__(self):
        n = self.nodes
        if n < 2 or n & (n - 1):
            raise ValueError(f"nodes must be a power of two, got {n}")

    def mapped(self, fn):
        return self


@dataclass(frozen=True)
class SeriesCayley:
    order: int = DEFAULT_WINDOW
    tail_tol: float = 1e-12
    sign: Any = None  # optional caller-supplied sign data (an involution commuting with x)

    name = "series"

    def mapped(self, fn):
        return replace(self, sign=None)


@dataclass(frozen=True, eq=False)
class Oracle:
    V: Any
    D: Any

    name = "oracle"

    def __post_init__(self):
        V = np.atleast_2d(np.asarray(self.V, dtype=complex))
        D = np.atleast_1d(np.asarray(self.D, dtype=complex))
        if V.shape != (len(D), len(D)):
            raise BackendError("oracle data: V must be square and match D")
        if abs(np.linalg.det(V)) < 1e-12:
            raise BackendError("oracle data: V is singular")
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "D", D)

    def matrix(self, diag=None):
        d = self.D if diag is None else diag
        return self.V @ np.diag(d) @ np.linalg.inv(self.V)

    def apply(self, f):
        return self.matrix(np.array([f(d) for d in self.D], dtype=complex))

    def mapped(self, fn):
        return Oracle(self.V, np.array([fn(d) for d in self.D], dtype=complex))


def make_backend(kind: str, nodes: int = 64, order: int = DEFAULT_WINDOW, oracle=None):
    if kind == "quadrature":
        return Quadrature(nodes)
    if kind == "series":
        return SeriesCayley(order)
    if kind == "oracle":
        if oracle is None:
            raise BackendError("the oracle backend needs V and D")
        return Oracle(oracle["V"], oracle["D"])
    raise ValueError(f"unknown backend {kind!r}")


# ---------------------------------------------------------------------------
# results


@dataclass
class SpectralResult:
    value: Any
    ring: Ring
    residuals: dict = field(default_factory=dict)
    error_budget: float = 0.0
    backend: str = ""
    nodes: int | None = None
    margin: float | None = None
    flags: tuple = ()

    def converged(self, tol: float) -> bool:
        return self.error_budget <= tol

    def to_dict(self):
        return {
            "value": element_to_json(self.ring, self.value),
            "residuals": {k: float(v) for k, v in sorted(self.residuals.items())},
            "error_budget": float(self.error_budget),
            "backend": self.backend,
            "nodes": self.nodes,
            "margin": None if self.margin is None else float(self.margin),
            "flags": list(self.flags),
        }


def infer_ring(x) -> Ring:
    if isinstance(x, np.ndarray):
        if x.ndim == 2:
            return ComplexMatrixRing(x.shape[0])
        return ComplexRing()
    if isinstance(x, (bool,)):
        raise TypeError("booleans are not ring elements")
    if isinstance(x, int):
        return IntegerRing()
    if isinstance(x, Fraction):
        return RationalRing()
    if isinstance(x, (float, complex)):
        return ComplexRing()
    if isinstance(x, tuple):
        return MatrixRing(RationalRing(), len(x))
    raise TypeError(f"cannot infer a ring for {type(x).__name__}")


def _ring(x, ring):
    return infer_ring(x) if ring is None else ring


def _embed(R: Ring, x):
    if not R.embeds_in_complex:
        raise BackendError(f"{R.name} does not embed in complex matrices")
    return R.complex_ring(), np.asarray(R.to_complex(x), dtype=complex)


def _norm(arr) -> float:
    return float(np.linalg.norm(np.atleast_2d(arr), np.inf))


# ---------------------------------------------------------------------------
# quadrature core


def roots_of_unity(N: int) -> np.ndarray:
    k = np.arange(N)
    return np.exp(2j * np.pi * k / N)


def _affine(coefs, mats):
    """``sum_j coefs[j][:, None, None] * mats[j]`` over all nodes."""
    out = 0
    for c, M in zip(coefs, mats):
        out = out + np.asarray(c)[:, None, None] * M[None, :, :]
    return out


def circle_mean(den, num, pairwise=False, check=True):
    """Trapezoid mean of ``den(z_k)^-1 num(z_k)`` over stacked nodes.

    Returns ``(I_N, I_{N/2}, margin)``.  ``margin`` is the smallest singular
    value of the pencil over the nodes.
    """
    N = den.shape[0]
    margin = float(np.linalg.svd(den, compute_uv=False)[:, -1].min())
    if check and margin < SINGULAR_MARGIN:
        raise SpectralClassError(f"pencil singular at a node (margin {margin:.3e})", margin)
    vals = np.linalg.solve(den, num)
    if not np.all(np.isfinite(vals)):
        raise SpectralClassError("pencil inversion produced non-finite values", margin)
    if pairwise:
        full = vals.sum(axis=0) / N
        half = vals[::2].sum(axis=0) / (N // 2)
    else:
        acc = np.zeros(vals.shape[1:], dtype=complex)
        acc_half = np.zeros(vals.shape[1:], dtype=complex)
        for k in range(N):
            acc += vals[k]
            if k % 2 == 0:
                acc_half += vals[k]
        full = acc / N
        half = acc_half / (N // 2)
    return full, half, margin


def circle_coefficients(den, num):
    """All Laurent coefficients of ``den^-1 num`` by discrete Fourier transform.

    Index ``n`` of the result holds the ``z**n`` coefficient for
    ``0 <= n < N/2`` and ``z**(n-N)`` for the upper half.
    """
    vals = np.linalg.solve(den, num)
    return np.fft.fft(vals, axis=0) / den.shape[0]


def _pencils(fn: str, X, z):
    I = np.eye(X.shape[0], dtype=complex)
    if fn == "sgn":
        return _affine([(1 + z) / 2, (1 - z) / 2], [I, X]), _affine([(1 - z) / 2, (1 + z) / 2], [I, X])
    if fn == "sqrt":
        t = (z + 1 / z) / 2
        return _affine([(1 + t) / 2, (1 - t) / 2], [I, X]), _affine([np.ones_like(z)], [X])
    if fn == "idem":
        return _affine([np.ones_like(z), z - 1], [I, X]), _affine([z], [X])
    if fn == "fsqrt":
        return _affine([np.ones_like(z), z - 2 + 1 / z], [I, X]), _affine([1 + z], [X])
    if fn == "pertr":
        # -L(z,-X)/L(z,X)
        return _affine([(1 + z) / 2, (1 - z) / 2], [I, X]), _affine([-(1 + z) / 2, (1 - z) / 2], [I, X])
    if fn == "inv_one_plus_absr":
        return _affine([(1 + z) / 2, (1 - z) / 2], [I, X]), _affine([(1 + z) / 2], [I])
    if fn == "inv_one_plus_sqrt":
        t = (z + 1 / z) / 2
        return _affine([(1 + t) / 2, (1 - t) / 2], [I, X]), _affine([(1 + z) / 2], [I])
    raise ValueError(fn)


def _quadrature(fn, X, b: Quadrature, check=True):
    z = roots_of_unity(b.nodes)
    den, num = _pencils(fn, X, z)
    full, half, margin = circle_mean(den, num, b.pairwise, check)
    return full, _norm(full - half), margin


# ---------------------------------------------------------------------------
# oracle scalar functions


def _scalar_sgn(d):
    if abs(d.real) < 1e-14:
        raise SpectralClassError(f"eigenvalue {d} on the imaginary axis", 0.0)
    return 1.0 if d.real > 0 else -1.0


def _scalar_sqrt(d):
    if abs(d.imag) < 1e-14 and d.real <= 0:
        raise SpectralClassError(f"eigenvalue {d} on the closed negative axis", 0.0)
    return np.sqrt(complex(d))


def _scalar_idem(d):
    if abs(d.real - 0.5) < 1e-14:
        raise SpectralClassError(f"eigenvalue {d} on Re = 1/2", 0.0)
    return 1.0 if d.real > 0.5 else 0.0


def _scalar_fsqrt(d):
    return 0.5 - _scalar_sqrt(0.25 - d)


ORACLE_FUNCS = {"sgn": _scalar_sgn, "sqrt": _scalar_sqrt, "idem": _scalar_idem, "fsqrt": _scalar_fsqrt}


def _oracle(fn, X, b: Oracle):
    if _norm(X - b.matrix()) > 1e-8 * max(1.0, _norm(X)):
        raise BackendError("oracle data does not reproduce the input element")
    return b.apply(ORACLE_FUNCS[fn])


# ---------------------------------------------------------------------------
# series backend


def _one_sided_inverse(R: Ring, W, b: SeriesCayley):
    try:
        return invert_unit_pencil(R, W, b.order, b.tail_tol)
    except DecayCertificateError:
        return None


def _series_sgn(R: Ring, q, b: SeriesCayley):
    """z^0 of ``(1 - Wz)(1 + Wz)^-1`` with ``W`` the Cayley transform of ``q``."""
    W = cayley(R, q)
    inv = _one_sided_inverse(R, W, b)
    sign = R.one()
    if inv is None:
        Wi = R.try_invert(W)
        inv = None if Wi is None else _one_sided_inverse(R, Wi, b)
        if inv is None:
            if b.sign is not None:
                return _series_sgn_split(R, q, b)
            raise DecayCertificateError("no one-sided expansion of the sign pencil; supply sign data or use quadrature")
        W, sign = Wi, R.neg(R.one())
    # ratio in the expansion variable u (u = z, or u = 1/z with an overall -1)
    num = LaurentSeries.from_coeffs(R, {0: R.one(), 1: R.neg(W)}, (0, 1))
    ratio = series_arith("mul", num, inv, clip=(0, b.order))
    value = R.mul(sign, ratio[0])
    tail = R.norm(inv[b.order]) * R.norm(W)
    return value, tail


def _series_sgn_split(R: Ring, q, b: SeriesCayley):
    F = b.sign
    exp = pencil_inverse_expansion(q, "pencil_sign_b", b.order, ring=R, sign=F)
    back = series_arith("mul", LaurentSeries.from_coeffs(
        R, {0: R.mul(R.half(), R.add(R.one(), q)), 1: R.mul(R.half(), R.sub(R.one(), q))}, (0, 1)), exp)
    target = {0: R.mul(R.half(), R.add(R.one(), q)), 1: R.mul(R.half(), R.sub(q, R.one()))}
    inner = [n for n in range(-b.order + 1, b.order)]
    tail = max(R.norm(R.sub(back[n], target.get(n, R.zero()))) for n in inner)
    return exp[0], tail


def _series_idem(R: Ring, p, b: SeriesCayley):
    one = R.one()
    q = R.sub(one, p)
    qi = R.try_invert(q)
    if qi is not None:
        W = R.mul(qi, p)
        inv = _one_sided_inverse(R, W, b)
        if inv is not None:
            # p z (1 + W z)^-1 (1-p)^-1 has no z^0 term
            integrand = series_arith("mul", LaurentSeries.from_coeffs(R, {1: p}, (1, 1)), inv)
            return integrand[0], R.norm(inv[b.order])
    pi = R.try_invert(p)
    if pi is not None:
        V = R.mul(pi, q)
        inv = _one_sided_inverse(R, V, b)
        if inv is not None:
            # (p z (1 + V/z))^-1 = z^-1 sum (-V)^n z^-n p^-1 ; times p z
            shifted = inv.map(lambda c: R.mul(R.mul(p, c), pi))
            return shifted[0], R.norm(inv[b.order])
    raise DecayCertificateError("idem pencil is not one-sided with a decay certificate")


# ---------------------------------------------------------------------------
# primitives


def _residuals(fn, W: Ring, v, x):
    one = W.one()
    if fn == "sgn":
        defect = W.sub(W.mul(v, v), one)
        name = "involution"
    elif fn == "sqrt":
        defect = W.sub(W.mul(v, v), x)
        name = "square"
    elif fn == "idem":
        defect = W.sub(W.mul(v, v), v)
        name = "idempotent"
    elif fn == "fsqrt":
        defect = W.sub(W.mul(v, W.sub(one, v)), x)
        name = "fsquare"
    else:
        raise ValueError(fn)
    comm = W.sub(W.mul(v, x), W.mul(x, v))
    return {name: W.norm(defect), "commutator": W.norm(comm)}


def _primitive(fn, x, backend, ring, assume_class=False):
    R = _ring(x, ring)
    flags = ("unverified-class",) if assume_class else ()
    if isinstance(backend, Quadrature):
        W, X = _embed(R, x)
        val, budget, margin = _quadrature(fn, X, backend, check=not assume_class)
        v = W.from_complex(val)
        xw = W.from_complex(X)
        return SpectralResult(v, W, _residuals(fn, W, v, xw), budget + W.tol, "quadrature",
                              backend.nodes, margin, flags)
    if isinstance(backend, Oracle):
        W, X = _embed(R, x)
        v = W.from_complex(_oracle(fn, X, backend))
        xw = W.from_complex(X)
        return SpectralResult(v, W, _residuals(fn, W, v, xw), W.tol, "oracle", None, None, flags)
    if isinstance(backend, SeriesCayley):
        if fn == "sgn":
            v, tail = _series_sgn(R, x, backend)
        elif fn == "idem":
            v, tail = _series_idem(R, x, backend)
        else:
            raise BackendError(f"the series backend does not evaluate {fn} (two-sided pencil)")
        return SpectralResult(v, R, _residuals(fn, R, v, x), float(tail) + R.tol, "series",
                              backend.order, None, flags)
    raise BackendError(f"unknown backend {backend!r}")


def sgn(q, b=Quadrature(), ring: Ring | None = None, assume_class=False) -> SpectralResult:
    """``int L(-z,q) L(z,q)^-1``: the sign of the real part."""
    return _primitive("sgn", q, b, ring, assume_class)


def sqrt_spec(s, b=Quadrature(), ring: Ring | None = None, assume_class=False) -> SpectralResult:
    """``int s L(z,s,1/z)^-1``: the principal square root."""
    return _primitive("sqrt", s, b, ring, assume_class)


def idem_spec(p, b=Quadrature(), ring: Ring | None = None, assume_class=False) -> SpectralResult:
    """``int p z ((1-p) + p z)^-1``: the spectral idempotent of Re > 1/2."""
    return _primitive("idem", p, b, ring, assume_class)


def fsqrt_spec(t, b=Quadrature(), ring: Ring | None = None, assume_class=False) -> SpectralResult:
    """``int (1+z) t (1 + (z-2+1/z) t)^-1``: the root ``x`` of ``x(1-x) = t`` near 0."""
    return _primitive("fsqrt", t, b, ring, assume_class)


PRIMITIVES = {"sgn": sgn, "sqrt": sqrt_spec, "idem": idem_spec, "fsqrt": fsqrt_spec}


# ---------------------------------------------------------------------------
# derived functions


def _combine(results, value, ring, residuals):
    budget = sum(r.error_budget for r in results)
    flags = tuple(sorted({f for r in results for f in r.flags}))
    first = results[0]
    margins = [r.margin for r in results if r.margin is not None]
    return SpectralResult(value, ring, residuals, budget, first.backend, first.nodes,
                          min(margins) if margins else None, flags)


def _lift(x, R: Ring, W: Ring):
    """Move ``x`` from ``R`` into the working ring ``W`` of a result."""
    if W is R:
        return x
    return W.from_complex(R.to_complex(x))


def derived_decomposition(kind: str, x, b=Quadrature(), ring: Ring | None = None) -> SpectralResult:
    """``abs_r``, ``pert_r``, ``abs_i``, ``pol`` or ``abs_F`` with its decomposition residual."""
    R = _ring(x, ring)
    one = R.one()
    if kind in ("abs_r", "pert_r"):
        s = sgn(x, b, R)
        W = s.ring
        xw = _lift(x, R, W)
        a = W.mul(xw, s.value)
        if kind == "abs_r":
            res = {"decomposition": W.norm(W.sub(W.mul(a, s.value), xw)),
                   "sgn_of_abs": W.norm(W.sub(W.mul(a, a), W.mul(xw, xw)))}
            return _combine([s], a, W, res)
        p = W.mul(W.sub(a, W.one()), W.inv(W.add(a, W.one())))
        res = {}
        if isinstance(b, Quadrature):
            _, X = _embed(R, x)
            direct, _, _ = _quadrature("pertr", X, b)
            res["integral_form"] = W.norm(W.sub(p, W.from_complex(direct)))
        return _combine([s], p, W, res)
    if kind in ("abs_i", "pol"):
        mx2 = R.neg(R.mul(x, x))
        r = sqrt_spec(mx2, b.mapped(lambda d: -d * d), R)
        W = r.ring
        xw = _lift(x, R, W)
        if kind == "abs_i":
            return _combine([r], r.value, W, {"square": r.residuals["square"]})
        pol = W.mul(xw, W.inv(r.value))
        res = {"decomposition": W.norm(W.sub(W.mul(r.value, pol), xw)),
               "skew_involution": W.norm(W.add(W.mul(pol, pol), W.one()))}
        return _combine([r], pol, W, res)
    if kind == "abs_F":
        h = R.half()
        y = R.sub(h, x)
        s = sgn(y, b.mapped(lambda d: 0.5 - d), R)
        W = s.ring
        yw = _lift(y, R, W)
        absF = W.sub(W.half(), W.mul(yw, s.value))
        xw = _lift(x, R, W)
        ip = W.mul(W.half(), W.sub(W.one(), s.value))  # idem x = 1/2 - 1/2 sgn(1/2 - x)
        recon = W.sub(W.add(ip, absF), W.mul_int(W.mul(absF, ip), 2))
        return _combine([s], absF, W, {"decomposition": W.norm(W.sub(recon, xw))})
    raise ValueError(f"unknown decomposition {kind!r}")


def spectral_split(q, b=Quadrature(), ring: Ring | None = None):
    """``(projector_minus, projector_plus, q_minus, q_plus)`` along ``sgn q``.

    ``q = q_plus - q_minus`` and ``|q|_r = q_plus + q_minus``; each block lives
    in the corner ring cut out by its projector.
    """
    R = _ring(q, ring)
    if not R.has_half:
        raise MissingHalfError("spectral_split needs 1/2")
    s = sgn(q, b, R)
    W = s.ring
    qw = _lift(q, R, W)
    h = W.half()
    pp = W.mul(h, W.add(W.one(), s.value))
    pm = W.mul(h, W.sub(W.one(), s.value))
    q_plus = W.mul(pp, qw)
    q_minus = W.neg(W.mul(pm, qw))
    return pm, pp, q_minus, q_plus


def split_residuals(q, b=Quadrature(), ring: Ring | None = None) -> dict:
    """Checks for :func:`spectral_split`: projector laws and block signs."""
    R = _ring(q, ring)
    pm, pp, qm, qp = spectral_split(q, b, R)
    W = R.complex_ring() if not isinstance(b, SeriesCayley) else R
    qw = _lift(q, R, W)
    out = {
        "idempotent_plus": W.norm(W.sub(W.mul(pp, pp), pp)),
        "idempotent_minus": W.norm(W.sub(W.mul(pm, pm), pm)),
        "sum_to_one": W.norm(W.sub(W.add(pp, pm), W.one())),
        "commutes": W.norm(W.sub(W.mul(pp, qw), W.mul(qw, pp))),
    }
    if isinstance(b, Quadrature):
        # sgn of each block, completed by the complementary projector, is 1
        sp = sgn(W.add(qp, pm), b, W).value
        sm = sgn(W.add(qm, pp), b, W).value
        out["sgn_plus_block"] = W.norm(W.sub(sp, W.one()))
        out["sgn_minus_block"] = W.norm(W.sub(sm, W.one()))
    return out


# ---------------------------------------------------------------------------
# exact expansions


def _exact_sign(R: Ring, x):
    if isinstance(R, (RationalRing, IntegerRing)):
        if x == 0:
            raise SpectralClassError("0 has no sign", 0.0)
        return R.from_int(1 if x > 0 else -1)
    return None


def _exact_sqrt(R: Ring, x):
    if isinstance(R, (RationalRing, IntegerRing)):
        q = Fraction(x)
        if q <= 0:
            raise SpectralClassError(f"{q} is on the closed negative axis", 0.0)
        n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
        if n * n == q.numerator and d * d == q.denominator:
            return R.coerce_fraction(Fraction(n, d)) if hasattr(R, "coerce_fraction") else Fraction(n, d)
    return None


def pencil_inverse_expansion(x, variant: str, M: int = DEFAULT_WINDOW, ring: Ring | None = None,
                             sign=None, root=None) -> LaurentSeries:
    """Closed-form coefficients of a pencil inverse on the window ``[-M, M]``.

    ``pencil_sign_a``: ``1/L(z,x)``; ``pencil_sign_b``: ``L(-z,x)/L(z,x)``;
    ``pencil_sqrt``: ``1/L(z,x,1/z)``.  Sign or root data is taken from the
    arguments, found exactly for rational scalars, or computed by quadrature.
    """
    R = _ring(x, ring)
    if R is not None and isinstance(R, IntegerRing):
        R, x = RationalRing(), Fraction(x)
    one = R.one()
    if variant in ("pencil_sign_a", "pencil_sign_b"):
        F = sign if sign is not None else _exact_sign(R, x)
        if F is None:
            res = sgn(x, Quadrature(128), R)
            R, x, F = res.ring, _lift(x, R, res.ring), res.value
            one = R.one()
        h = R.half()
        Pp = R.mul(h, R.add(one, F))
        Pm = R.mul(h, R.sub(one, F))
        A = R.mul(x, F)
        X = R.mul(R.sub(A, one), R.inv(R.add(A, one)))
        coeffs = {}
        if variant == "pencil_sign_a":
            a = R.mul_int(R.inv(R.add(A, one)), 2)
            pw = one
            for n in range(M + 1):
                coeffs[n] = R.mul(Pp, R.mul(a, pw))
                if n + 1 <= M:
                    coeffs[-(n + 1)] = R.mul(Pm, R.mul(a, pw))
                pw = R.mul(pw, X)
        else:
            coeffs[0] = F
            pw = X
            for n in range(1, M + 1):
                coeffs[n] = R.mul_int(R.mul(Pp, pw), 2)
                coeffs[-n] = R.neg(R.mul_int(R.mul(Pm, pw), 2))
                pw = R.mul(pw, X)
        return LaurentSeries.from_coeffs(R, coeffs, (-M, M), GrowthClass.RAPID_RING, False)
    if variant == "pencil_sqrt":
        r = root if root is not None else _exact_sqrt(R, x)
        if r is None:
            res = sqrt_spec(x, Quadrature(128), R)
            R, r = res.ring, res.value
            one = R.one()
        ri = R.inv(r)
        X = R.mul(R.sub(r, one), R.inv(R.add(r, one)))
        coeffs = {}
        pw = ri
        for n in range(M + 1):
            coeffs[n] = pw
            coeffs[-n] = pw
            pw = R.mul(pw, X)
        return LaurentSeries.from_coeffs(R, coeffs, (-M, M), GrowthClass.RAPID_RING, False)
    raise ValueError(f"unknown variant {variant!r}")


def pencil_series(x, variant: str, ring: Ring | None = None) -> LaurentSeries:
    """The pencil itself (the thing the expansion inverts), as a finite series."""
    R = _ring(x, ring)
    if isinstance(R, IntegerRing):
        R, x = RationalRing(), Fraction(x)
    h, one = R.half(), R.one()
    if variant in ("pencil_sign_a", "pencil_sign_b"):
        return LaurentSeries.from_coeffs(R, {0: R.mul(h, R.add(one, x)), 1: R.mul(h, R.sub(one, x))}, (0, 1))
    if variant == "pencil_sqrt":
        q = R.mul(R.mul(h, h), R.sub(one, x))   # (1-x)/4
        c = R.mul(R.mul(h, h), R.mul_int(R.add(one, x), 2))  # (1+x)/2
        return LaurentSeries.from_coeffs(R, {-1: q, 0: c, 1: q}, (-1, 1))
    raise ValueError(variant)


def aux_integral(kind: str, x, b=None, ring: Ring | None = None) -> SpectralResult:
    """``int (1+z)/2 * pencil^-1``: ``(1+|x|_r)^-1`` or ``(1+sqrt x)^-1``.

    With ``b=None`` the value is ``(a_0 + a_-1)/2`` from the exact expansion;
    otherwise the backend integrates directly and the closed form is the
    cross-check.
    """
    R = _ring(x, ring)
    variant = {"inv_one_plus_absr": "pencil_sign_a", "inv_one_plus_sqrt": "pencil_sqrt"}[kind]
    if b is None:
        exp = pencil_inverse_expansion(x, variant, 4, R)
        W = exp.ring
        v = W.mul(W.half(), W.add(exp[0], exp[-1]))
        return SpectralResult(v, W, {}, W.tol, "expansion")
    if isinstance(b, Quadrature):
        W, X = _embed(R, x)
        val, budget, margin = _quadrature(kind, X, b)
        v = W.from_complex(val)
        ref = derived_decomposition("abs_r", x, b, R).value if kind == "inv_one_plus_absr" else sqrt_spec(x, b, R).value
        check = W.inv(W.add(W.one(), ref))
        return SpectralResult(v, W, {"closed_form": W.norm(W.sub(v, check))}, budget + W.tol,
                              "quadrature", b.nodes, margin)
    raise BackendError("aux_integral supports the exact expansion or quadrature")


# ---------------------------------------------------------------------------
# homotopies


def homotopy_eval(kind: str, t, q, z_window: int = DEFAULT_WINDOW, ring: Ring | None = None,
                  sign=None) -> LaurentSeries:
    """``K``, ``H``, ``L`` or ``G`` at the scalar ``t`` as a series in ``z``.

    ``K`` and ``L`` are finite.  ``H`` and ``G`` use
    ``1/L(tz, R) = 2(1+R)^-1 sum (-tW)^n z^n`` with ``W = (1-R)(1+R)^-1``,
    truncated to ``|n| <= z_window``.
    """
    R0 = _ring(q, ring)
    if isinstance(R0, IntegerRing):
        R0, q = RationalRing(), Fraction(q)
    F = sign if sign is not None else _exact_sign(R0, q)
    R = R0
    if F is None:
        res = sgn(q, Quadrature(128), R0)
        R, F = res.ring, res.value
        q = _lift(q, R0, R)
    one, h = R.one(), R.half()
    tt = R.from_fraction(Fraction(t))
    Pp = R.mul(h, R.add(one, F))
    Pm = R.mul(h, R.sub(one, F))
    A = R.mul(q, F)  # |q|_r
    lam = lambda u: R.add(R.mul(h, R.add(one, u)), R.mul(R.mul(h, R.sub(one, u)), A))  # L(u, A) for scalar u
    c0 = R.mul(h, R.add(one, A))          # L(u, A) = c0 + c1 u
    c1 = R.mul(h, R.sub(one, A))
    M = z_window
    coeffs = {}

    def put(n, v):
        coeffs[n] = R.add(coeffs[n], v) if n in coeffs else v

    if kind in ("K", "L"):
        # P+ L(tz, A) + P- z L(t/z, A)
        put(0, R.mul(Pp, c0))
        put(1, R.mul(Pp, R.mul(c1, tt)))
        put(1, R.mul(Pm, c0))
        put(0, R.mul(Pm, R.mul(c1, tt)))
        if kind == "K":
            li = R.inv(lam(tt))
            coeffs = {n: R.mul(v, li) for n, v in coeffs.items()}
        return LaurentSeries.from_coeffs(R, coeffs, (0, 1))
    if kind in ("H", "G"):
        Wc = R.mul(R.sub(one, A), R.inv(R.add(one, A)))
        a = R.mul_int(R.inv(R.add(one, A)), 2)
        step = R.neg(R.mul(tt, Wc))
        pw = one
        scale = lam(tt) if kind == "H" else one
        for n in range(M + 1):
            base = R.mul(scale, R.mul(a, pw))
            put(n, R.mul(Pp, base))            # P+ / L(tz, A)
            if -n - 1 >= -M - 1:
                put(-n - 1, R.mul(Pm, base))   # P- z^-1 / L(t/z, A)
            pw = R.mul(pw, step)
        return LaurentSeries.from_coeffs(R, coeffs, (-M - 1, M))
    raise ValueError(f"unknown homotopy {kind!r}")


def homotopy_endpoint(kind: str, t, zval: int, q, ring: Ring | None = None, sign=None):
    """Evaluate the finite homotopies ``K`` or ``L`` at ``z = zval``."""
    if kind not in ("K", "L"):
        raise ValueError("only K and L are finite in z")
    s = homotopy_eval(kind, t, q, 1, ring, sign)
    return evaluate(s, s.ring.from_int(zval))


def homotopy_product_defect(pair: str, t, q, z_window: int = DEFAULT_WINDOW, ring: Ring | None = None,
                            sign=None) -> float:
    """Largest deviation of ``K*H`` (or ``L*G``) from 1 inside ``[-z_window, z_window]``."""
    a, b = {"KH": ("K", "H"), "LG": ("L", "G")}[pair]
    x = homotopy_eval(a, t, q, z_window, ring, sign)
    y = homotopy_eval(b, t, q, z_window, ring, sign)
    R = x.ring
    prod = series_arith("mul", x, y)
    worst = 0.0
    for n in range(-z_window, z_window + 1):
        want = R.one() if n == 0 else R.zero()
        worst = max(worst, R.norm(R.sub(prod[n], want)))
    return worst


# ---------------------------------------------------------------------------
# contraction and geometric mean


def _contraction(t, s, b, ring, root=None):
    R = _ring(s, ring)
    if isinstance(R, IntegerRing):
        R, s = RationalRing(), Fraction(s)
    r0 = root if root is not None else _exact_sqrt(R, s)
    if r0 is None:
        res = sqrt_spec(s, b, R)
        R, r0 = res.ring, res.value
    one = R.one()
    tt = R.from_fraction(Fraction(t))
    r = R.mul(R.sub(r0, one), R.inv(R.add(r0, one)))
    tr = R.mul(tt, r)
    sqrtC = R.mul(R.add(one, tr), R.inv(R.sub(one, tr)))
    return R, R.mul(sqrtC, sqrtC), sqrtC, r0


def contraction_eval(t, s, b=Quadrature(), ring: Ring | None = None, root=None):
    """``(C(t,s), sqrt C(t,s))`` with ``sqrt C = (1 + t r)(1 - t r)^-1``, ``r = (sqrt s - 1)/(sqrt s + 1)``.

    Exact for rational scalars with a rational root; otherwise the root comes
    from the backend.
    """
    _, C, sqrtC, _ = _contraction(t, s, b, ring, root)
    return C, sqrtC


def contraction_poisson_defect(t, s, M: int = 16, nodes: int = 256, ring: Ring | None = None) -> float:
    """Compare both sides of the Poisson-transform property of the contraction.

    Left: Fourier coefficients of ``1/L(w, C, 1/w)`` computed from ``C``.
    Right: ``sqrt s / sqrt C * t^|n| *`` Fourier coefficients of ``1/L(u, s, 1/u)``.
    """
    R0 = _ring(s, ring)
    R, C, sqrtC, r0 = _contraction(t, s, Quadrature(nodes), R0)
    Cn, sC, sS = (np.asarray(R.to_complex(v), dtype=complex) for v in (C, sqrtC, r0))
    Sn = np.asarray(R0.to_complex(s), dtype=complex)
    z = roots_of_unity(nodes)
    ident = np.broadcast_to(np.eye(Sn.shape[0], dtype=complex), (nodes,) + Sn.shape).copy()
    lhs = circle_coefficients(_pencils("sqrt", Cn, z)[0], ident)
    rhs = circle_coefficients(_pencils("sqrt", Sn, z)[0], ident)
    fac = sS @ np.linalg.inv(sC)
    tf = float(Fraction(t))
    worst = 0.0
    for n in range(-M, M + 1):
        want = (tf ** abs(n)) * (fac @ rhs[n % nodes])
        worst = max(worst, _norm(lhs[n % nodes] - want))
    return worst


def geometric_mean(a, b_el, b=Quadrature(), ring: Ring | None = None) -> SpectralResult:
    """``int ((1/z)(((1+z)/2)^2 a^-1 - ((1-z)/2)^2 b^-1))^-1``."""
    if not isinstance(b, Quadrature):
        raise BackendError("the geometric mean is computed by quadrature")
    R = _ring(a, ring)
    W, A = _embed(R, a)
    _, B = _embed(R, b_el)
    Ai, Bi = np.linalg.inv(A), np.linalg.inv(B)
    z = roots_of_unity(b.nodes)
    I = np.eye(A.shape[0], dtype=complex)
    den = _affine([((1 + z) / 2) ** 2 / z, -((1 - z) / 2) ** 2 / z], [Ai, Bi])
    num = np.broadcast_to(I, den.shape).copy()
    full, half, margin = circle_mean(den, num, b.pairwise)
    v = W.from_complex(full)
    res = {}
    if _norm(A @ B - B @ A) <= 1e-12 * max(1.0, _norm(A) * _norm(B)):
        res["square"] = _norm(full @ full - A @ B)
    den2 = _affine([((1 + z) / 2) ** 2 / z, -((1 - z) / 2) ** 2 / z], [Bi, Ai])
    swapped, _, _ = circle_mean(den2, num, b.pairwise)
    res["symmetry"] = _norm(full - swapped)
    return SpectralResult(v, W, res, _norm(full - half) + W.tol, "quadrature", b.nodes, margin)


def sqrt_real_segment(s, nodes: int = 64, ring: Ring | None = None) -> SpectralResult:
    """``int_{-1}^{1} s ((1+t)/2 + (1-t)/2 s)^-1 dt / (pi sqrt(1-t^2))`` by Chebyshev-Gauss nodes."""
    R = _ring(s, ring)
    W, S = _embed(R, s)
    I = np.eye(S.shape[0], dtype=complex)

    def rule(N):
        k = np.arange(1, N + 1)
        t = np.cos((2 * k - 1) * np.pi / (2 * N))
        den = _affine([(1 + t) / 2, (1 - t) / 2], [I, S])
        num = np.broadcast_to(S, den.shape).copy()
        margin = float(np.linalg.svd(den, compute_uv=False)[:, -1].min())
        if margin < SINGULAR_MARGIN:
            raise SpectralClassError(f"segment pencil singular at a node (margin {margin:.3e})", margin)
        vals = np.linalg.solve(den, num)
        acc = np.zeros_like(S)
        for v in vals:
            acc += v
        return acc / N, margin

    full, margin = rule(nodes)
    half, _ = rule(max(1, nodes // 2))
    v = W.from_complex(full)
    return SpectralResult(v, W, {"square": _norm(full @ full - S)}, _norm(full - half) + W.tol,
                          "chebyshev", nodes, margin)


# ---------------------------------------------------------------------------
# class membership


TAGS = {
    # tag: (pencil kind, one_sided)
    "AvoidRealAxis": ("skew", False),
    "AvoidImagAxis": ("sign", False),
    "AvoidLeftHalf": ("sign", True),
    "AvoidNegReals": ("sqrt", False),
    "AvoidShiftedImagAxis": ("idem", False),
    "AvoidShiftedLeftHalf": ("idem", True),
    "AvoidQuarterShiftedNegReals": ("fsqrt", False),
    "DiskComplementAvoided": ("disk", True),
}
ALGEBRAIC_TAGS = ("Involution", "SkewInvolution", "Idempotent")


@dataclass
class Certificate:
    tag: str
    status: str          # certified | refuted | inconclusive
    method: str
    margin: float | None = None
    detail: str = ""

    def to_dict(self):
        return {"tag": self.tag, "status": self.status, "method": self.method,
                "margin": self.margin, "detail": self.detail}


def _class_pencil(kind, X, z):
    I = np.eye(X.shape[0], dtype=complex)
    if kind == "skew":
        return _affine([((1 + z) / 2) ** 2 / z, ((1 - z) / 2) ** 2 / z], [I, X @ X])
    if kind == "sign":
        return _affine([(1 + z) / 2, (1 - z) / 2], [I, X])
    if kind == "sqrt":
        return _pencils("sqrt", X, z)[0]
    if kind == "idem":
        return _affine([np.ones_like(z), z - 1], [I, X])
    if kind == "fsqrt":
        return _pencils("fsqrt", X, z)[0]
    if kind == "disk":
        return _affine([np.ones_like(z), z], [I, X])
    raise ValueError(kind)


def _algebraic(tag, R: Ring, x):
    one = R.one()
    if tag == "Involution":
        d = R.sub(R.mul(x, x), one)
    elif tag == "SkewInvolution":
        d = R.add(R.mul(x, x), one)
    else:
        d = R.sub(R.mul(x, x), x)
    defect = R.norm(d)
    ok = R.is_zero(d) if R.exact else defect <= max(R.tol, 1e-10)
    return Certificate(tag, "certified" if ok else "refuted", "multiplication", None,
                       f"defect {defect:.3e}")


def class_membership(x, tag: str, b=Quadrature(256), ring: Ring | None = None,
                     inconclusive_below: float = 1e-6) -> Certificate:
    """Certify, refute, or give up on spectral-class membership."""
    R = _ring(x, ring)
    if tag in ALGEBRAIC_TAGS:
        return _algebraic(tag, R, x)
    if tag not in TAGS:
        raise ValueError(f"unknown class tag {tag!r}")
    kind, one_sided = TAGS[tag]
    if isinstance(b, SeriesCayley):
        return _series_certificate(tag, kind, one_sided, R, x, b)
    if isinstance(b, Oracle):
        return _oracle_certificate(tag, kind, one_sided, b)
    _, X = _embed(R, x)
    N = b.nodes
    z = roots_of_unity(N)
    den = _class_pencil(kind, X, z)
    margin = float(np.linalg.svd(den, compute_uv=False)[:, -1].min())
    if margin < SINGULAR_MARGIN:
        return Certificate(tag, "refuted", "quadrature", margin, "pencil singular at a node")
    if margin < inconclusive_below:
        return Certificate(tag, "inconclusive", "quadrature", margin, "margin below resolution")
    if one_sided:
        I = np.eye(X.shape[0], dtype=complex)
        coeffs = circle_coefficients(den, np.broadcast_to(I, den.shape).copy())
        neg = sum(_norm(coeffs[N - n]) for n in range(1, N // 2))
        total = sum(_norm(c) for c in coeffs)
        if neg > 1e-8 * total:
            return Certificate(tag, "refuted", "quadrature", margin,
                               f"inverse has negative-power mass {neg:.3e}")
    return Certificate(tag, "certified", "quadrature", margin, f"N={N}")


def _series_certificate(tag, kind, one_sided, R, x, b: SeriesCayley):
    if not one_sided:
        return Certificate(tag, "inconclusive", "series", None,
                           "two-sided class: needs quadrature or splitting data")
    one = R.one()
    if kind == "sign":
        W = cayley(R, x)
    elif kind == "idem":
        qi = R.try_invert(R.sub(one, x))
        if qi is None:
            return Certificate(tag, "refuted", "series", None, "1-p is not invertible")
        W = R.mul(qi, x)
    else:
        W = x
    try:
        inv = invert_unit_pencil(R, W, b.order, b.tail_tol)
    except DecayCertificateError as exc:
        return Certificate(tag, "inconclusive", "series", None, str(exc))
    return Certificate(tag, "certified", "series", 1 - R.norm(W) if R.norm(W) < 1 else None,
                       f"tail bound {inv.tail_bound:.3e}")


def _oracle_certificate(tag, kind, one_sided, b: Oracle):
    d = b.D
    if kind == "skew":
        dist = np.abs(d.imag)
    elif kind == "sign":
        dist = d.real if one_sided else np.abs(d.real)
    elif kind == "sqrt":
        dist = np.where(d.real > 0, np.abs(d), np.abs(d.imag))
    elif kind == "idem":
        dist = (d.real - 0.5) * -1 if one_sided else np.abs(d.real - 0.5)
    elif kind == "fsqrt":
        e = 0.25 - d
        dist = np.where(e.real > 0, np.abs(e), np.abs(e.imag))
    else:
        dist = 1 - np.abs(d)  # W avoids the closed disk complement: |d| < 1
    m = float(np.min(dist))
    return Certificate(tag, "certified" if m > 0 else "refuted", "oracle", m, "distance to excluded set")
