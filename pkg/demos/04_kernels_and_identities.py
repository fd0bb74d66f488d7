"""Exact checks: the identity catalog, the kernels and the homotopies."""

# %%
from fractions import Fraction

from specring import identities, kernels
from specring import spectral as sp

# %% every catalog entry reduces to the zero polynomial
for r in identities.verify_all():
    print(f"{r.name:14s} {'zero' if r.verified else 'NONZERO'}  {r.seconds * 1e3:6.1f} ms")

# %% the Poisson kernel times (1 - tz)(1 - t/z) is 1 - t^2
k = kernels.TransformationKernel("Poisson", 6, 8)
print("Poisson column z^0:", [str(k.coefficient(d, 0)) for d in range(7)])
print("closed-form mismatches:", kernels.closed_form_residual("Poisson", 6, 8))

# %% the resolvent-analytic reduction vanishes for scalar Q
for Q in (2, 3, -3):
    rep = kernels.resolvent_analytic_check(Q)
    print(f"Q = {Q:2d}: vanishes = {rep.vanishes}")

# %% the homotopy K(t, -1, Q) runs from Q^-1 through sgn Q to Q
Q = Fraction(3)
for t in (-1, Fraction(-1, 2), 0, Fraction(1, 2), 1):
    print(f"t = {str(t):5s} K = {sp.homotopy_endpoint('K', t, -1, Q)}")

# %% K H = 1 exactly on the truncation window
print("KH defect:", sp.homotopy_product_defect("KH", Fraction(1, 2), Q, 12))
