"""Seeded test matrices built by conjugation, with their oracle data.

``A = V diag(D) V^-1`` where ``V`` is unit upper triangular with integer
entries in [-3, 3].  The sidecar keeps ``V`` and ``D`` so that every scalar
function can be checked as ``V f(D) V^-1`` without an eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rings import ComplexMatrixRing, ComplexRing, MatrixRing, RationalRing, element_to_json

# distance from an eigenvalue to the set a function excludes
EXCLUDED_DISTANCE = {
    "sgn": lambda d: abs(d.real),
    "sqrt": lambda d: abs(d) if d.real > 0 else abs(d.imag),
    "idem": lambda d: abs(d.real - 0.5),
    "fsqrt": lambda d: abs(0.25 - d) if (0.25 - d).real > 0 else abs((0.25 - d).imag),
}
EXCLUDED_DISTANCE["absr"] = EXCLUDED_DISTANCE["pertr"] = EXCLUDED_DISTANCE["split"] = EXCLUDED_DISTANCE["sgn"]
EXCLUDED_DISTANCE["sqrt-segment"] = EXCLUDED_DISTANCE["sqrt"]
EXCLUDED_DISTANCE["absF"] = EXCLUDED_DISTANCE["idem"]


class MarginError(ValueError):
    pass


@dataclass
class Fixture:
    matrix: np.ndarray
    V: np.ndarray
    D: np.ndarray
    seed: int | None = None

    @property
    def n(self):
        return len(self.D)

    def oracle(self, f):
        vals = np.array([f(d) for d in self.D], dtype=complex)
        return self.V @ np.diag(vals) @ np.linalg.inv(self.V)

    def element(self):
        """``(ring, element)``: exact rationals when every eigenvalue is an integer."""
        if all(d.imag == 0 and float(d.real).is_integer() for d in self.D):
            n = self.n
            Vi = np.round(np.linalg.inv(self.V)).astype(int)  # unit triangular: integral inverse
            A = self.V.astype(int) @ np.diag([int(d.real) for d in self.D]) @ Vi
            if n == 1:
                return RationalRing(), Fraction(int(A[0, 0]))
            R = MatrixRing(RationalRing(), n)
            return R, R.make([[Fraction(int(v)) for v in row] for row in A])
        if self.n == 1:
            return ComplexRing(), complex(self.matrix[0, 0])
        return ComplexMatrixRing(self.n), self.matrix.copy()

    def to_json(self) -> dict:
        R, x = self.element()
        return element_to_json(R, x)

    def sidecar(self) -> dict:
        return {"V": [[int(v) for v in row] for row in self.V.real],
                "D": [[float(d.real), float(d.imag)] for d in self.D],
                "seed": self.seed}


def unit_upper_triangular(n: int, rng) -> np.ndarray:
    V = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            V[i, j] = rng.integers(-3, 4)
    return V


def generate_test_matrix(n: int, eigenvalues, seed: int = 0, exclude: str | None = None,
                         margin: float = 0.0) -> Fixture:
    """Conjugate ``diag(eigenvalues)`` by a seeded integer unit triangular matrix."""
    D = np.asarray(eigenvalues, dtype=complex).reshape(-1)
    if len(D) != n:
        raise ValueError(f"need {n} eigenvalues, got {len(D)}")
    if exclude is not None:
        dist = min(EXCLUDED_DISTANCE[exclude](d) for d in D)
        if dist < margin:
            raise MarginError(f"eigenvalue within {dist:.3g} of the set excluded for {exclude} (need {margin})")
    rng = np.random.default_rng(seed)
    V = unit_upper_triangular(n, rng)
    A = V @ np.diag(D) @ np.linalg.inv(V)
    return Fixture(A, V, D, seed)


def _box(rng, re_lo, re_hi, im):
    return complex(rng.uniform(re_lo, re_hi), rng.uniform(-im, im))


def random_eigenvalues(fn: str, n: int, rng) -> np.ndarray:
    """Eigenvalues at distance >= 0.3 from the excluded set of ``fn``."""
    out = []
    for _ in range(n):
        mu = _box(rng, 0.6, 2.0, 0.5)
        if fn in ("sgn", "absr", "pertr", "split"):
            d = mu if rng.integers(2) else -mu
        elif fn in ("sqrt", "sqrt-segment"):
            d = mu * mu
        elif fn in ("idem", "absF"):
            d = (1 - (mu if rng.integers(2) else -mu)) / 2
        elif fn == "fsqrt":
            mu = _box(rng, 1.1, 2.0, 0.5)  # |mu^2|/4 >= 0.3
            d = (1 - mu * mu) / 4
        else:
            raise ValueError(f"no eigenvalue box for {fn!r}")
        out.append(d)
    return np.array(out)


def random_fixture(fn: str, n: int = 4, seed: int = 0, margin: float = 0.3) -> Fixture:
    rng = np.random.default_rng(seed)
    D = random_eigenvalues(fn, n, rng)
    return generate_test_matrix(n, D, seed, fn if fn in EXCLUDED_DISTANCE else None, margin)


def fixture_from_sidecar(side: dict) -> Fixture:
    V = np.asarray(side["V"], dtype=float)
    D = np.array([complex(re, im) for re, im in side["D"]])
    return Fixture(V @ np.diag(D) @ np.linalg.inv(V), V, D, side.get("seed"))
