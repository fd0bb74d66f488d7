"""Sign, square root, idem and the F-square root on a small matrix."""

# %%
import numpy as np

from specring import fsqrt_spec, idem_spec, sgn, sqrt_spec
from specring.fixtures import generate_test_matrix
from specring.spectral import Quadrature

np.set_printoptions(precision=6, suppress=True)

# %% a 2x2 matrix with eigenvalues 3 and -2, built by conjugation
fx = generate_test_matrix(2, [3, -2], seed=7)
Q = fx.matrix
print("Q =\n", Q.real)
print("V =\n", fx.V.real)

# %% sgn picks the sign of the real part of each eigenvalue
res = sgn(Q, Quadrature(64))
S = np.asarray(res.value).real
print("sgn Q =\n", S)
print("sgn(Q)^2 - 1:", np.abs(S @ S - np.eye(2)).max())
print("oracle error:", np.abs(S - fx.oracle(lambda d: np.sign(d.real)).real).max())
print("error budget:", res.error_budget, " margin:", res.margin)

# %% a Jordan block has a root too
J = np.array([[2.0, 1.0], [0.0, 2.0]])
R = np.asarray(sqrt_spec(J, Quadrature(128)).value).real
print("sqrt J =\n", R)
print("1/(2 sqrt 2) =", 1 / (2 * np.sqrt(2)))

# %% idem: the projector onto the Re > 1/2 part
P = np.array([[2.0, 1.0], [0.0, -1.0]])
E = np.asarray(idem_spec(P, Quadrature(128)).value).real
print("idem P =\n", E)
print("E^2 - E:", np.abs(E @ E - E).max())

# %% the F-square root solves x(1 - x) = t
for t in (-2.0, 0.0, 3 / 16):
    x = fsqrt_spec(t, Quadrature(128)).value
    print(f"t = {t:7.4f}  x = {x.real: .6f}  x(1-x) = {(x * (1 - x)).real: .6f}")

# %% sgn Q equals Q^-1 sqrt(Q^2)
alt = np.linalg.inv(Q) @ np.asarray(sqrt_spec(Q @ Q, Quadrature(128)).value)
print("| sgn Q - Q^-1 sqrt(Q^2) | =", np.abs(S - alt.real).max())
