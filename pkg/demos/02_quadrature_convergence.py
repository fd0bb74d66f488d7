"""How fast the unit-circle rule converges, and what the budget says."""

# %%
import numpy as np

from specring import sgn
from specring.fixtures import generate_test_matrix
from specring.spectral import Quadrature

fx = generate_test_matrix(2, [3, -2], seed=7)
want = fx.oracle(lambda d: np.sign(d.real))

# %% error roughly squares at each doubling: the integrand is analytic in an annulus
print(f"{'N':>5} {'oracle error':>14} {'budget':>12}")
for N in (8, 16, 32, 64, 128):
    res = sgn(fx.matrix, Quadrature(N))
    err = np.abs(np.asarray(res.value) - want).max()
    print(f"{N:5d} {err:14.3e} {res.error_budget:12.3e}")

# %% eigenvalues near the imaginary axis shrink the annulus
# the pencil root sits at |z| = |(1+d)/(1-d)|, close to 1 when Re d is small
for d in (3.0, 1.0, 0.3, 0.1):
    res = sgn(complex(d), Quadrature(64))
    print(f"d = {d:4.1f}  margin {res.margin:.3f}  error {abs(res.value - 1):.2e}")

# %% pairwise summation gives the same answer with a fixed reduction order
a = sgn(fx.matrix, Quadrature(64)).value
b = sgn(fx.matrix, Quadrature(64, pairwise=True)).value
print("sequential vs pairwise:", np.abs(np.asarray(a) - np.asarray(b)).max())
