"""Invariant suites run by ``specring verify``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import halffree, identities, kernels, spectral
from .fixtures import generate_test_matrix


@dataclass
class Check:
    suite: str
    name: str
    ok: bool
    detail: str = ""

    def to_dict(self):
        return {"suite": self.suite, "name": self.name, "ok": self.ok, "detail": self.detail}


def identities_suite(tol: float | None = None) -> list[Check]:
    out = []
    for r in identities.verify_all():
        out.append(Check("identities", r.name, r.verified, f"{r.seconds:.3f}s"))
    return out


def kernels_suite(tol: float | None = None) -> list[Check]:
    out = []
    for kind in kernels.KINDS:
        if kind == "HilbertTwoVar":
            continue
        bad = kernels.closed_form_residual(kind, 12, 16)
        out.append(Check("kernels", f"closed_form[{kind}]", not bad, f"{len(bad)} mismatches"))
    out.append(Check("kernels", "variant_hilbert_relation", kernels.variant_hilbert_relation_holds(12, 16)))
    # the Poisson kernel tends to the delta series sum_s z^s, the regularization to 1
    lim = kernels.kernel_limit_t1(kernels.TransformationKernel("Poisson", 12, 16))
    lo, hi = lim.window
    out.append(Check("kernels", "limit_t1[Poisson]",
                     all(lim[n] == 1 for n in range(lo, hi + 1)), f"window {lo}..{hi}"))
    lim = kernels.kernel_limit_t1(kernels.TransformationKernel("VariantRegularization", 12, 16))
    got = {n: lim[n] for n in range(lim.window[0], lim.window[1] + 1) if lim[n]}
    out.append(Check("kernels", "limit_t1[VariantRegularization]", got == {0: 1}, str(got)))
    for Q in (2, 3, -3):
        rep = kernels.resolvent_analytic_check(Q)
        out.append(Check("kernels", f"resolvent_analytic[Q={Q}]", rep.vanishes,
                         f"{rep.integrand_mismatches}/{rep.checked_entries} mismatches"))
    return out


def halffree_suite(tol: float | None = None) -> list[Check]:
    out = []
    bad = halffree.table_check()
    out.append(Check("halffree", "table", not bad, f"{12 - len(bad)}/12 entries match"))
    for name, (passed, total) in halffree.lemma_report().items():
        out.append(Check("halffree", name, passed == total, f"{passed}/{total}"))
    from .rings import IntegerRing, NoHalf
    R = NoHalf(IntegerRing())
    vals = (halffree.fsqrt_nohalf(-2, ring=R), halffree.fsqrt_nohalf(-6, ring=R),
            halffree.idem_from_fsqrt(2, ring=R), halffree.idem_nohalf(2, ring=R))
    out.append(Check("halffree", "nohalf_values", vals == (-1, -2, 1, 1), str(vals)))
    out.append(Check("halffree", "nohalf_no_half_requests", R.half_requests == 0, str(R.half_requests)))
    return out


def spectral_suite(tol: float | None = None) -> list[Check]:
    tol = 1e-8 if tol is None else tol
    out = []

    def add(name, err):
        out.append(Check("spectral", name, err <= tol, f"{err:.3e}"))

    fx = generate_test_matrix(2, [3, -2], seed=7)
    res = spectral.sgn(fx.matrix, spectral.Quadrature(64))
    add("sgn_oracle", spectral._norm(np.asarray(res.value) - fx.oracle(lambda d: np.sign(d.real))))
    add("sgn_involution", res.residuals["involution"])
    s = spectral.sqrt_spec(9.0, spectral.Quadrature(64))
    add("sqrt_scalar", abs(s.value - 3))
    add("geomean_scalar", abs(spectral.geometric_mean(4.0, 9.0, spectral.Quadrature(128)).value - 6))
    p = spectral.idem_spec(np.array([[2.0, 1.0], [0.0, -1.0]]), spectral.Quadrature(64))
    add("idem_idempotent", p.residuals["idempotent"])
    f = spectral.fsqrt_spec(-2.0, spectral.Quadrature(64))
    add("fsqrt_scalar", abs(f.value + 1))
    for key, err in spectral.split_residuals(fx.matrix, spectral.Quadrature(64)).items():
        add(f"split_{key}", err)
    add("contraction_poisson", spectral.contraction_poisson_defect(0.5, 9.0))
    return out


SUITES = {
    "identities": identities_suite,
    "kernels": kernels_suite,
    "halffree": halffree_suite,
    "spectral": spectral_suite,
}


def run_suite(name: str, tol: float | None = None) -> list[Check]:
    names = list(SUITES) if name == "all" else [name]
    out = []
    for n in names:
        out.extend(SUITES[n](tol))
    return out
