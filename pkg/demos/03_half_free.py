"""Working over the integers, where 1/2 does not exist."""

# %%
from specring import halffree as hf
from specring.rings import IntegerRing, MatrixRing, NoHalf

# NoHalf counts (and refuses) any request for 1/2
Z = NoHalf(IntegerRing())

# %% the F-square root of -2 is -1, because (-1)(1 - (-1)) = -2
print("fsqrt(-2) =", hf.fsqrt_nohalf(-2, ring=Z))
print("fsqrt(-6) =", hf.fsqrt_nohalf(-6, ring=Z))

# %% idem from the F-square root: (fsqrt(p(1-p)) - p) / (1 - 2p)
print("idem(2) via fsqrt =", hf.idem_from_fsqrt(2, ring=Z))
print("idem(2) directly  =", hf.idem_nohalf(2, ring=Z))
print("half requests:", Z.half_requests)

# %% integer matrices: the answer is found numerically, then checked exactly
M2 = MatrixRing(IntegerRing(), 2)
out = hf.idem_nohalf(M2.make([[2, 3], [0, -1]]), ring=M2, report=True)
print("idem [[2,3],[0,-1]] =", out.value, "via", out.route, out.checks)

# %% when the projector has thirds in it, there is no integer answer
try:
    hf.idem_nohalf(M2.make([[2, 1], [0, -1]]), ring=M2)
except Exception as exc:
    print("refused:", exc)

# %% the pencil expansion lives in the fraction field
e = hf.fsqrt_pencil_expansion(-2, 4, Z)
print("coefficients:", [str(e[n]) for n in range(-4, 5)])
print("(1+z)-integral:", hf.fsqrt_aux_integral(-2, 8, Z))

# %% the double Hilbert product table, all entries integral
for n in (1, 2, 3):
    row = [hf.format_d(hf.hilbert_product_double({(n, m): 1})) for m in range(4)]
    print(f"n={n}:", " | ".join(row))
