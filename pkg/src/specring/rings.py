"""Concrete unital rings, seminorm families and the Cayley correspondence.

A ring here is a *structure object*: elements are plain values (``int``,
``Fraction``, ``complex``, tuples of tuples, numpy arrays) and all arithmetic
goes through the ring, e.g. ``R.mul(a, b)``.  This keeps elements cheap and
immutable and lets one algorithm run over integers, rationals, complex
scalars and matrices alike.

>>> from fractions import Fraction
>>> R = RationalRing()
>>> cayley(R, Fraction(3))
Fraction(-1, 2)
>>> cayley_inv(R, Fraction(-1, 2))
Fraction(3, 1)
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping

import numpy as np

from .errors import (
    MissingHalfError,
    NotInvertibleError,
    SpectralClassError,
    UnknownSeminormError,
)

DEFAULT_TOL = 1e-10


# ---------------------------------------------------------------------------
# seminorms


@dataclass(frozen=True)
class SeminormFamily:
    """Finite indexed family of seminorms with designated companions.

    ``companion[p]`` names the seminorm ``p~`` with ``p(XY) <= p~(X) p~(Y)``.
    """

    maps: Mapping[str, Callable[[Any], float]]
    companion: Mapping[str, str] = field(default_factory=dict)

    def __contains__(self, index):
        return index in self.maps

    @property
    def indices(self):
        return tuple(self.maps)

    def companion_of(self, index):
        return self.companion.get(index, index)


def seminorm_eval(family: SeminormFamily, index: str, x) -> float:
    if index not in family.maps:
        raise UnknownSeminormError(index)
    return float(family.maps[index](x))


# ---------------------------------------------------------------------------
# the ring contract


class Ring:
    """Base class; subclasses provide the arithmetic primitives."""

    name = "ring"
    exact = True
    tol = 0.0

    # -- primitives -------------------------------------------------------
    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def from_int(self, n: int):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def try_invert(self, x):
        """Return ``x**-1`` or ``None`` when ``x`` is not a unit."""
        raise NotImplementedError

    @property
    def has_half(self) -> bool:
        return False

    def half(self):
        raise MissingHalfError(f"{self.name} has no multiplicative 1/2")

    @property
    def seminorms(self) -> SeminormFamily:
        raise NotImplementedError

    # -- derived ----------------------------------------------------------
    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def norm(self, x) -> float:
        family = self.seminorms
        return seminorm_eval(family, family.indices[0], x)

    def eq(self, a, b, tol=None) -> bool:
        if self.exact:
            return self.is_zero(self.sub(a, b))
        tol = self.tol if tol is None else tol
        return self.norm(self.sub(a, b)) <= tol

    def is_zero(self, a) -> bool:
        return self.eq(a, self.zero())

    def inv(self, x):
        y = self.try_invert(x)
        if y is None:
            raise NotInvertibleError(f"element is not invertible in {self.name}")
        return y

    def mul_int(self, x, n: int):
        return self.mul(self.from_int(n), x)

    def from_fraction(self, q):
        q = Fraction(q)
        num = self.from_int(q.numerator)
        if q.denominator == 1:
            return num
        den = q.denominator
        # powers of two go through half() so that rings without 1/2 trap
        scale = self.one()
        while den % 2 == 0:
            scale = self.mul(scale, self.half())
            den //= 2
        if den != 1:
            scale = self.mul(scale, self.inv(self.from_int(den)))
        return self.mul(num, scale)

    def power(self, x, k: int):
        if k < 0:
            return self.power(self.inv(x), -k)
        out = self.one()
        base = x
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def sum(self, items: Iterable):
        out = self.zero()
        for item in items:
            out = self.add(out, item)
        return out

    def exact_div(self, a, b):
        """``a * b**-1`` if it exists in the ring, else ``None``."""
        inv = self.try_invert(b)
        return None if inv is None else self.mul(a, inv)

    def commutes(self, a, b, tol=None) -> bool:
        return self.eq(self.mul(a, b), self.mul(b, a), tol)

    # -- complex embedding (quadrature) -----------------------------------
    embeds_in_complex = False

    def to_complex(self, x) -> np.ndarray:
        raise TypeError(f"{self.name} does not embed in complex matrices")

    def complex_ring(self) -> "Ring":
        raise TypeError(f"{self.name} does not embed in complex matrices")

    def from_complex(self, arr: np.ndarray):
        raise TypeError(f"{self.name} cannot take values from complex arrays")

    def __repr__(self):
        return f"{type(self).__name__}()"


class IntegerRing(Ring):
    """Plain integers.  There is no 1/2; the only units are +-1."""

    name = "integers"

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return int(n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a == 0

    def try_invert(self, x):
        return x if x in (1, -1) else None

    def exact_div(self, a, b):
        if b == 0 or a % b:
            return None
        return a // b

    def coerce_fraction(self, q):
        q = Fraction(q)
        return q.numerator if q.denominator == 1 else None

    @property
    def seminorms(self):
        return SeminormFamily({"abs": lambda x: abs(x)})

    embeds_in_complex = True

    def to_complex(self, x):
        return np.array([[complex(x)]])

    def complex_ring(self):
        return ComplexRing()

    def from_complex(self, arr):
        return complex(np.asarray(arr).reshape(-1)[0])


class RationalRing(Ring):
    name = "rationals"

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a == 0

    def try_invert(self, x):
        return None if x == 0 else 1 / Fraction(x)

    @property
    def has_half(self):
        return True

    def half(self):
        return Fraction(1, 2)

    def coerce_fraction(self, q):
        return Fraction(q)

    @property
    def seminorms(self):
        return SeminormFamily({"abs": lambda x: abs(x)})

    embeds_in_complex = True

    def to_complex(self, x):
        return np.array([[complex(x)]])

    def complex_ring(self):
        return ComplexRing()

    def from_complex(self, arr):
        return complex(np.asarray(arr).reshape(-1)[0])


class ComplexRing(Ring):
    """Complex floating point scalars with an absolute comparison tolerance."""

    name = "complex"
    exact = False

    def __init__(self, tol=DEFAULT_TOL):
        self.tol = tol

    def zero(self):
        return 0j

    def one(self):
        return 1 + 0j

    def from_int(self, n):
        return complex(n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def try_invert(self, x):
        return None if abs(x) <= 1e-300 else 1 / x

    @property
    def has_half(self):
        return True

    def half(self):
        return 0.5 + 0j

    def from_fraction(self, q):
        return complex(Fraction(q))

    @property
    def seminorms(self):
        return SeminormFamily({"modulus": lambda x: abs(x)})

    embeds_in_complex = True

    def to_complex(self, x):
        return np.array([[complex(x)]])

    def complex_ring(self):
        return self

    def from_complex(self, arr):
        return complex(np.asarray(arr).reshape(-1)[0])

    def __repr__(self):
        return f"ComplexRing(tol={self.tol})"


def _row_sum_exact(m):
    return max(sum(abs(v) for v in row) for row in m)


class MatrixRing(Ring):
    """Dense ``n x n`` matrices over an exact base ring, stored as tuples of tuples."""

    def __init__(self, base: Ring, n: int):
        if not base.exact:
            raise TypeError("use ComplexMatrixRing for floating point matrices")
        self.base = base
        self.n = n
        self.name = f"{base.name}^{n}x{n}"

    def __repr__(self):
        return f"MatrixRing({self.base!r}, {self.n})"

    def __eq__(self, other):
        return isinstance(other, MatrixRing) and other.n == self.n and type(other.base) is type(self.base)

    def __hash__(self):
        return hash((type(self.base), self.n))

    def make(self, rows):
        return tuple(tuple(r) for r in rows)

    def diag(self, entries):
        z = self.base.zero()
        return self.make(
            [[entries[i] if i == j else z for j in range(self.n)] for i in range(self.n)]
        )

    def zero(self):
        return self.diag([self.base.zero()] * self.n)

    def one(self):
        return self.diag([self.base.one()] * self.n)

    def from_int(self, k):
        return self.diag([self.base.from_int(k)] * self.n)

    def add(self, a, b):
        B = self.base
        return tuple(tuple(B.add(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b))

    def neg(self, a):
        return tuple(tuple(self.base.neg(x) for x in r) for r in a)

    def mul(self, a, b):
        B = self.base
        cols = list(zip(*b))
        return tuple(
            tuple(B.sum(B.mul(x, y) for x, y in zip(row, col)) for col in cols) for row in a
        )

    def is_zero(self, a):
        return all(self.base.is_zero(x) for r in a for x in r)

    @property
    def has_half(self):
        return self.base.has_half

    def half(self):
        return self.diag([self.base.half()] * self.n)

    def scalar(self, c):
        return self.diag([c] * self.n)

    def try_invert(self, x):
        inv = _fraction_inverse([[Fraction(v) for v in row] for row in x])
        if inv is None:
            return None
        out = []
        for row in inv:
            conv = [self.base.coerce_fraction(v) for v in row]
            if any(v is None for v in conv):
                return None
            out.append(conv)
        return self.make(out)

    def exact_div(self, a, b):
        inv = _fraction_inverse([[Fraction(v) for v in row] for row in b])
        if inv is None:
            return None
        prod = [
            [sum(Fraction(a[i][k]) * inv[k][j] for k in range(self.n)) for j in range(self.n)]
            for i in range(self.n)
        ]
        conv = [[self.base.coerce_fraction(v) for v in row] for row in prod]
        if any(v is None for row in conv for v in row):
            return None
        return self.make(conv)

    @property
    def seminorms(self):
        return SeminormFamily({"row_sum": _row_sum_exact})

    embeds_in_complex = True

    def to_complex(self, x):
        return np.array([[complex(v) for v in row] for row in x])

    def complex_ring(self):
        return ComplexMatrixRing(self.n)

    def from_complex(self, arr):
        return np.asarray(arr, dtype=complex)


def _fraction_inverse(m):
    """Gauss-Jordan inverse over the rationals; ``None`` if singular."""
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


class ComplexMatrixRing(Ring):
    """Dense complex ``n x n`` matrices (numpy), max-row-sum seminorm."""

    exact = False
    embeds_in_complex = True

    def __init__(self, n: int, tol=DEFAULT_TOL, cond_limit=1e13):
        self.n = n
        self.tol = tol
        self.cond_limit = cond_limit
        self.name = f"complex^{n}x{n}"

    def __repr__(self):
        return f"ComplexMatrixRing({self.n}, tol={self.tol})"

    def zero(self):
        return np.zeros((self.n, self.n), dtype=complex)

    def one(self):
        return np.eye(self.n, dtype=complex)

    def from_int(self, k):
        return k * np.eye(self.n, dtype=complex)

    def from_fraction(self, q):
        return complex(Fraction(q)) * np.eye(self.n, dtype=complex)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a @ b

    def mul_int(self, x, k):
        return k * x

    @property
    def has_half(self):
        return True

    def half(self):
        return 0.5 * np.eye(self.n, dtype=complex)

    def try_invert(self, x):
        if not np.all(np.isfinite(x)) or np.linalg.cond(x) > self.cond_limit:
            return None
        return np.linalg.inv(x)

    @property
    def seminorms(self):
        return SeminormFamily({"row_sum": lambda x: float(np.linalg.norm(x, np.inf))})

    def norm(self, x):
        return float(np.linalg.norm(x, np.inf))

    def to_complex(self, x):
        return np.asarray(x, dtype=complex)

    def complex_ring(self):
        return self

    def from_complex(self, arr):
        return np.asarray(arr, dtype=complex)


class NoHalf(Ring):
    """Wrap a ring and make its 1/2 capability trap.

    Every call to :meth:`half` is counted in ``half_requests`` before raising,
    so tests can assert a computation never asked for 1/2.
    """

    def __init__(self, inner: Ring):
        self.inner = inner
        self.name = f"nohalf({inner.name})"
        self.exact = inner.exact
        self.tol = inner.tol
        self.embeds_in_complex = inner.embeds_in_complex
        self.half_requests = 0

    def __repr__(self):
        return f"NoHalf({self.inner!r})"

    @property
    def has_half(self):
        return False

    def half(self):
        self.half_requests += 1
        raise MissingHalfError(f"1/2 requested from {self.name}")

    def __getattr__(self, attr):
        return getattr(self.inner, attr)

    def zero(self):
        return self.inner.zero()

    def one(self):
        return self.inner.one()

    def from_int(self, n):
        return self.inner.from_int(n)

    def add(self, a, b):
        return self.inner.add(a, b)

    def neg(self, a):
        return self.inner.neg(a)

    def sub(self, a, b):
        return self.inner.sub(a, b)

    def mul(self, a, b):
        return self.inner.mul(a, b)

    def is_zero(self, a):
        return self.inner.is_zero(a)

    def eq(self, a, b, tol=None):
        return self.inner.eq(a, b, tol)

    def norm(self, x):
        return self.inner.norm(x)

    def try_invert(self, x):
        return self.inner.try_invert(x)

    def exact_div(self, a, b):
        return self.inner.exact_div(a, b)

    @property
    def seminorms(self):
        return self.inner.seminorms

    def to_complex(self, x):
        return self.inner.to_complex(x)

    def complex_ring(self):
        return self.inner.complex_ring()

    def from_complex(self, arr):
        return self.inner.from_complex(arr)


# ---------------------------------------------------------------------------
# axioms


@dataclass
class AxiomResult:
    name: str
    passed: bool
    worst: float


@dataclass
class AxiomReport:
    results: list

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def failures(self):
        return [r.name for r in self.results if not r.passed]


def axiom_check(ring: Ring, samples, family: SeminormFamily | None = None, tol=None) -> AxiomReport:
    """Check ring, 1/2, inverse and seminorm axioms on all sample triples/pairs.

    Violations are measured with the ring's default seminorm (exact rings
    report 0 or the size of the discrepancy).
    """
    samples = list(samples)
    if len(samples) < 3:
        raise ValueError("axiom_check needs at least 3 samples")
    tol = ring.tol if tol is None else tol
    R = ring
    worst: dict[str, float] = {}

    def record(name, a, b):
        d = R.norm(R.sub(a, b))
        worst[name] = max(worst.get(name, 0.0), d)

    one, zero = R.one(), R.zero()
    for x in samples:
        record("add_identity", R.add(x, zero), x)
        record("mul_identity", R.mul(one, x), x)
        record("mul_identity_right", R.mul(x, one), x)
        record("add_inverse", R.add(x, R.neg(x)), zero)
        inv = R.try_invert(x)
        if inv is not None:
            record("inverse", R.mul(x, inv), one)
            record("inverse", R.mul(inv, x), one)
    for x, y in itertools.product(samples, repeat=2):
        record("add_commutative", R.add(x, y), R.add(y, x))
    for x, y, z in itertools.product(samples, repeat=3):
        record("add_associative", R.add(R.add(x, y), z), R.add(x, R.add(y, z)))
        record("mul_associative", R.mul(R.mul(x, y), z), R.mul(x, R.mul(y, z)))
        record("left_distributive", R.mul(x, R.add(y, z)), R.add(R.mul(x, y), R.mul(x, z)))
        record("right_distributive", R.mul(R.add(x, y), z), R.add(R.mul(x, z), R.mul(y, z)))
    if R.has_half:
        h = R.half()
        record("half", R.add(h, h), one)

    results = [AxiomResult(k, v <= tol, v) for k, v in worst.items()]

    if family is not None:
        results.extend(_seminorm_axioms(R, samples, family, tol))
    return AxiomReport(results)


def _seminorm_axioms(R, samples, family, tol):
    out = []
    for idx in family.indices:
        p = family.maps[idx]
        pt = family.maps[family.companion_of(idx)]
        bad = {"nonnegative": 0.0, "zero": abs(p(R.zero())), "symmetric": 0.0,
               "triangle": 0.0, "submultiplicative": 0.0}
        for x in samples:
            bad["nonnegative"] = max(bad["nonnegative"], -float(p(x)))
            bad["symmetric"] = max(bad["symmetric"], abs(float(p(R.neg(x))) - float(p(x))))
        for x, y in itertools.product(samples, repeat=2):
            bad["triangle"] = max(bad["triangle"], float(p(R.add(x, y)) - p(x) - p(y)))
            bad["submultiplicative"] = max(
                bad["submultiplicative"], float(p(R.mul(x, y)) - pt(x) * pt(y))
            )
        slack = 1e-9 if not R.exact else 0.0
        for name, v in bad.items():
            out.append(AxiomResult(f"seminorm[{idx}].{name}", v <= max(tol, slack), max(v, 0.0)))
    return out


# ---------------------------------------------------------------------------
# Cayley correspondence


def _cayley_map(R: Ring, x):
    one = R.one()
    inv = R.try_invert(R.add(one, x))
    if inv is None:
        raise SpectralClassError("1 + x is not invertible (pencil 1 + zW singular at z = -1)")
    return R.mul(R.sub(one, x), inv)


def cayley(R: Ring, q):
    """``(1 - q)(1 + q)**-1``: right half-plane to outside the closed unit disk."""
    return _cayley_map(R, q)


def cayley_inv(R: Ring, w):
    # the map is an involution, so the inverse has the same formula
    return _cayley_map(R, w)


# ---------------------------------------------------------------------------
# JSON element schema


def element_to_json(R: Ring, x) -> dict:
    if isinstance(R, NoHalf):
        R = R.inner
    if isinstance(R, (RationalRing, IntegerRing)):
        q = Fraction(x)
        return {"kind": "rational_matrix", "n": 1, "data": [[q.numerator, q.denominator]]}
    if isinstance(R, MatrixRing):
        data = [[Fraction(v).numerator, Fraction(v).denominator] for row in x for v in row]
        return {"kind": "rational_matrix", "n": R.n, "data": data}
    arr = R.to_complex(x)
    data = [[float(v.real), float(v.imag)] for v in arr.reshape(-1)]
    return {"kind": "complex_matrix", "n": arr.shape[0], "data": data}


def element_from_json(obj) -> tuple[Ring, Any]:
    """Parse the matrix/scalar JSON schema; ``n == 1`` yields a scalar ring."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    kind, n, data = obj["kind"], int(obj["n"]), obj["data"]
    if len(data) != n * n:
        raise ValueError(f"expected {n * n} entries, got {len(data)}")
    if kind == "complex_matrix":
        vals = np.array([complex(re, im) for re, im in data]).reshape(n, n)
        if n == 1:
            return ComplexRing(), complex(vals[0, 0])
        return ComplexMatrixRing(n), vals
    if kind == "rational_matrix":
        vals = [Fraction(int(num), int(den)) for num, den in data]
        if n == 1:
            return RationalRing(), vals[0]
        R = MatrixRing(RationalRing(), n)
        return R, R.make([vals[i * n:(i + 1) * n] for i in range(n)])
    raise ValueError(f"unknown element kind {kind!r}")
