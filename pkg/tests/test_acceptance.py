"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run under pytest (lines are printed with capture disabled) or directly:
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from specring import halffree as hf
from specring import identities, kernels
from specring import spectral as sp
from specring.fixtures import generate_test_matrix, random_fixture
from specring.laurent import series_arith
from specring.rings import IntegerRing, NoHalf

F = Fraction
TOL = 1e-8
N = 128
FIXTURES = 50


def norm(a):
    return sp._norm(np.atleast_2d(np.asarray(a, dtype=complex)))


# scalar oracles, written from the definitions and not from the library
ORACLE = {
    "sgn": lambda d: np.sign(d.real),
    "idem": lambda d: 1.0 if d.real > 0.5 else 0.0,
    "sqrt": np.sqrt,
    "fsqrt": lambda d: 0.5 - np.sqrt(0.25 - d),
}


def c1_identities():
    start = time.perf_counter()
    results = identities.verify_all("all")
    secs = time.perf_counter() - start
    bad = [r.name for r in results if not r.verified]
    return not bad and secs < 5, f"{len(results) - len(bad)}/{len(results)} zero, {secs:.2f}s"


def c2_laws():
    law = {
        "sgn": ("involution", lambda A, v: v @ v - np.eye(len(A))),
        "idem": ("idempotent", lambda A, v: v @ v - v),
        "sqrt": ("square", lambda A, v: v @ v - A),
        "fsqrt": ("fsquare", lambda A, v: v @ (np.eye(len(A)) - v) - A),
    }
    fn_of = {"sgn": sp.sgn, "idem": sp.idem_spec, "sqrt": sp.sqrt_spec, "fsqrt": sp.fsqrt_spec}
    worst_law = worst_oracle = 0.0
    for fn, (_, resid) in law.items():
        for seed in range(FIXTURES):
            fx = random_fixture(fn, 4, seed, margin=0.3)
            v = np.asarray(fn_of[fn](fx.matrix, sp.Quadrature(N)).value)
            worst_law = max(worst_law, norm(resid(fx.matrix, v)))
            worst_oracle = max(worst_oracle, norm(v - fx.oracle(ORACLE[fn])))
    ok = worst_law <= TOL and worst_oracle <= TOL
    return ok, f"4x{FIXTURES} fixtures, worst law {worst_law:.1e}, worst oracle {worst_oracle:.1e}"


def c3_convergence():
    fx = generate_test_matrix(2, [3, -2], seed=7)
    want = fx.oracle(ORACLE["sgn"])
    errs, slowest = [], 0.0
    for nodes in (32, 64, 128):
        start = time.perf_counter()
        errs.append(norm(np.asarray(sp.sgn(fx.matrix, sp.Quadrature(nodes)).value) - want))
        slowest = max(slowest, time.perf_counter() - start)
    ok = (errs[0] > errs[1] > errs[2] or errs[2] == 0.0) and errs[1] <= errs[0] / 10 and errs[2] <= TOL
    ok = ok and slowest < 1.0
    return ok, "errors " + ", ".join(f"{e:.1e}" for e in errs) + f", slowest job {slowest:.3f}s"


def c4_coherence():
    b = sp.Quadrature(N)
    worst = {"sgn": 0.0, "idem": 0.0, "segment": 0.0}
    for seed in range(FIXTURES):
        q = random_fixture("sgn", 4, seed).matrix
        lhs = np.asarray(sp.sgn(q, b).value)
        rhs = np.linalg.inv(q) @ np.asarray(sp.sqrt_spec(q @ q, b).value)
        worst["sgn"] = max(worst["sgn"], norm(lhs - rhs))
        p = random_fixture("idem", 4, seed).matrix
        half = 0.5 * np.eye(4)
        rhs = half - 0.5 * np.asarray(sp.sgn(half - p, b).value)
        worst["idem"] = max(worst["idem"], norm(np.asarray(sp.idem_spec(p, b).value) - rhs))
        s = random_fixture("sqrt", 4, seed).matrix
        seg = np.asarray(sp.sqrt_real_segment(s, N).value)
        worst["segment"] = max(worst["segment"], norm(seg - np.asarray(sp.sqrt_spec(s, b).value)))
    ok = max(worst.values()) <= TOL
    return ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items())


def c5_expansions():
    M = 12
    a = sp.pencil_inverse_expansion(F(3), "pencil_sign_a", M)
    ok_a = all(a[n] == F(1, 2 ** (n + 1)) for n in range(M + 1)) and all(a[-n] == 0 for n in range(1, M + 1))
    back = series_arith("mul", sp.pencil_series(F(3), "pencil_sign_a"), a)
    tail_a = {n: back[n] for n in back.support()} == {0: 1, M + 1: -F(1, 2 ** (M + 1))}
    s = sp.pencil_inverse_expansion(F(9), "pencil_sqrt", M)
    ok_s = all(s[n] == s[-n] == F(1, 3 * 2 ** n) for n in range(M + 1))
    back = series_arith("mul", sp.pencil_series(F(9), "pencil_sqrt"), s)
    tail_s = back[0] == 1 and all(abs(n) >= M for n in back.support() if n)
    ok = ok_a and tail_a and ok_s and tail_s
    return ok, f"sign {ok_a}/{tail_a}, sqrt {ok_s}/{tail_s}, window {M}"


def c6_table():
    bad = hf.table_check()
    rep = hf.lemma_report(seed=0, trials=50, integrality_trials=200)
    failing = [k for k, (p, t) in rep.items() if p != t]
    ok = not bad and not failing
    return ok, f"table {12 - len(bad)}/12, lemma checks {len(rep) - len(failing)}/{len(rep)}"


def c7_kernels():
    bad = kernels.closed_form_residual("Poisson", 12, 16)
    lim = kernels.kernel_limit_t1(kernels.TransformationKernel("VariantRegularization", 12, 16))
    lim_ok = {n: lim[n] for n in lim.support()} == {0: 1}
    reps = {Q: kernels.resolvent_analytic_check(Q) for Q in (2, 3, -3)}
    res_ok = all(r.vanishes for r in reps.values())
    ok = not bad and lim_ok and res_ok
    return ok, f"Poisson mismatches {len(bad)}, limit {lim_ok}, resolvent {sum(r.vanishes for r in reps.values())}/3"


def c8_homotopy():
    worst = 0.0
    for seed in range(10):
        q = random_fixture("sgn", 4, seed).matrix
        s = np.asarray(sp.sgn(q, sp.Quadrature(N)).value)
        pairs = [
            (sp.homotopy_endpoint("K", 1, -1, q), q),
            (sp.homotopy_endpoint("K", 0, -1, q), s),
            (sp.homotopy_endpoint("K", -1, -1, q), np.linalg.inv(q)),
            (sp.homotopy_endpoint("L", 0, -1, q), (q + s) / 2),
        ]
        worst = max(worst, *(norm(np.asarray(got) - want) for got, want in pairs))
    exact = all(sp.homotopy_product_defect(kind, t, q, 12) == 0
                for kind in ("KH", "LG") for q in (F(3), F(-5, 2), F(1, 3)) for t in (F(0), F(1, 2), F(-2, 3)))
    return worst <= TOL and exact, f"endpoint error {worst:.1e}, exact inverse pairs {exact}"


def c9_nohalf():
    R = NoHalf(IntegerRing())
    vals = {
        "fsqrt(-2)": hf.fsqrt_nohalf(-2, ring=R),
        "fsqrt(-6)": hf.fsqrt_nohalf(-6, ring=R),
        "idem(2)": hf.idem_nohalf(2, ring=R),
        "idem_from_fsqrt(2)": hf.idem_from_fsqrt(2, ring=R),
        "idem(-1)": hf.idem_nohalf(-1, ring=R),
    }
    want = {"fsqrt(-2)": -1, "fsqrt(-6)": -2, "idem(2)": 1, "idem_from_fsqrt(2)": 1, "idem(-1)": 0}
    ok = vals == want and R.half_requests == 0
    return ok, f"values {'ok' if vals == want else vals}, half requests {R.half_requests}"


def c10_geomean():
    err = abs(sp.geometric_mean(4.0, 9.0, sp.Quadrature(N)).value - 6)
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(20):
        th = rng.uniform(0, np.pi)
        U = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        a, b = rng.uniform(0.5, 4, 2), rng.uniform(0.5, 4, 2)
        A, B = U @ np.diag(a) @ U.T, U @ np.diag(b) @ U.T
        want = U @ np.diag(np.sqrt(a * b)) @ U.T
        worst = max(worst, norm(np.asarray(sp.geometric_mean(A, B, sp.Quadrature(N)).value) - want))
    return err <= TOL and worst <= TOL, f"scalar error {err:.1e}, 2x2 pairs worst {worst:.1e}"


CRITERIA = [
    (1, "identity catalog", c1_identities),
    (2, "involution/idempotent/root laws", c2_laws),
    (3, "quadrature convergence", c3_convergence),
    (4, "cross-formula coherence", c4_coherence),
    (5, "expansion closed forms", c5_expansions),
    (6, "half-free table and lemmas", c6_table),
    (7, "kernel algebra", c7_kernels),
    (8, "homotopy endpoints and inverses", c8_homotopy),
    (9, "half-free discipline", c9_nohalf),
    (10, "geometric mean", c10_geomean),
]


def evaluate(check):
    try:
        return check()
    except Exception as exc:  # a crash is a FAIL line, not a missing one
        return False, f"{type(exc).__name__}: {exc}"


def line(num, title, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {num:2d} ({title}): {detail}"


@pytest.mark.parametrize("num, title, check", CRITERIA, ids=[f"c{n}" for n, _, _ in CRITERIA])
def test_criterion(num, title, check, capsys):
    ok, detail = evaluate(check)
    with capsys.disabled():
        print("\n" + line(num, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for num, title, check in CRITERIA:
        ok, detail = evaluate(check)
        failed += not ok
        print(line(num, title, ok, detail))
    sys.exit(1 if failed else 0)
