from fractions import Fraction

import numpy as np
import pytest

from specring import spectral as sp
from specring.errors import BackendError, MissingHalfError, SpectralClassError
from specring.fixtures import generate_test_matrix, random_fixture
from specring.laurent import series_arith
from specring.rings import ComplexRing, IntegerRing, MatrixRing, RationalRing

F = Fraction
QUAD = sp.Quadrature(128)
Q23 = np.array([[3.0, 1.0], [0.0, -2.0]])
SGN23 = np.array([[1.0, 0.4], [0.0, -1.0]])


def close(a, b, tol=1e-8):
    return sp._norm(np.atleast_2d(np.asarray(a, dtype=complex)) - np.atleast_2d(np.asarray(b, dtype=complex))) <= tol


class TestPrimitives:
    def test_sgn_examples(self):
        assert close(sp.sgn(3.0).value, 1) and close(sp.sgn(-3.0).value, -1)
        assert close(sp.sgn(Q23, sp.Quadrature(64)).value, SGN23)

    def test_sgn_series_exact(self):
        assert sp.sgn(F(3), sp.SeriesCayley()).value == 1
        assert sp.sgn(F(-3), sp.SeriesCayley()).value == -1

    def test_sqrt_examples(self):
        assert close(sp.sqrt_spec(4.0, QUAD).value, 2)
        assert close(sp.sqrt_spec(np.diag([4.0, 9.0]), QUAD).value, np.diag([2.0, 3.0]))
        r2 = np.sqrt(2)
        jordan = np.array([[r2, 1 / (2 * r2)], [0, r2]])
        assert close(sp.sqrt_spec(np.array([[2.0, 1.0], [0.0, 2.0]]), QUAD).value, jordan)

    def test_idem_examples(self):
        assert close(sp.idem_spec(2.0, QUAD).value, 1)
        assert close(sp.idem_spec(0.25, QUAD).value, 0)
        P = np.array([[1.0, 1.0], [0.0, 0.0]])
        assert close(sp.idem_spec(P, QUAD).value, P)
        assert sp.idem_spec(F(2), sp.SeriesCayley()).value == 1
        assert sp.idem_spec(F(1, 4), sp.SeriesCayley()).value == 0

    def test_fsqrt_examples(self):
        assert close(sp.fsqrt_spec(0.0, QUAD).value, 0)
        assert close(sp.fsqrt_spec(-2.0, QUAD).value, -1)
        assert close(sp.fsqrt_spec(3 / 16, QUAD).value, 0.25)

    def test_series_backend_scope(self):
        with pytest.raises(BackendError):
            sp.sqrt_spec(F(4), sp.SeriesCayley())

    def test_singular_pencil(self):
        with pytest.raises(SpectralClassError):
            sp.sgn(np.array([[0.0, 1.0], [-1.0, 0.0]]), sp.Quadrature(64))

    def test_assumed_class_flag(self):
        assert "unverified-class" in sp.sgn(3.0, assume_class=True).flags

    def test_oracle_backend(self):
        fx = generate_test_matrix(2, [3, -2], seed=7)
        res = sp.sgn(fx.matrix, sp.Oracle(fx.V, fx.D))
        assert close(res.value, fx.oracle(lambda d: np.sign(d.real)), 1e-12)


class TestInvariants:
    @pytest.mark.parametrize("seed", range(5))
    def test_sign_laws(self, seed):
        q = random_fixture("sgn", 3, seed).matrix
        s = sp.sgn(q, QUAD).value
        assert close(s @ s, np.eye(3))
        assert close(sp.sgn(np.linalg.inv(q), QUAD).value, s)
        assert close(sp.sgn(-q, QUAD).value, -s)
        assert close(sp.sgn(2.5 * q, QUAD).value, s)
        root = sp.sqrt_spec(q @ q, QUAD).value
        assert close(np.linalg.inv(q) @ root, s)

    @pytest.mark.parametrize("seed", range(5))
    def test_sqrt_laws(self, seed):
        s = random_fixture("sqrt", 3, seed).matrix
        r = sp.sqrt_spec(s, QUAD).value
        assert close(r @ r, s)
        assert close(sp.sqrt_spec(np.linalg.inv(s), QUAD).value, np.linalg.inv(r))
        assert close(r @ s, s @ r)

    @pytest.mark.parametrize("seed", range(5))
    def test_idem_laws(self, seed):
        p = random_fixture("idem", 3, seed).matrix
        I = np.eye(3)
        e = sp.idem_spec(p, QUAD).value
        assert close(e @ e, e)
        assert close(sp.idem_spec(I - p, QUAD).value, I - e)
        assert close(sp.idem_spec(-p @ np.linalg.inv(I - 2 * p), QUAD).value, e)
        assert close(e, 0.5 * I - 0.5 * sp.sgn(0.5 * I - p, QUAD).value)

    @pytest.mark.parametrize("seed", range(5))
    def test_fsqrt_laws(self, seed):
        t = random_fixture("fsqrt", 3, seed).matrix
        I = np.eye(3)
        x = sp.fsqrt_spec(t, QUAD).value
        assert close(x @ (I - x), t)
        lhs = sp.fsqrt_spec(-t @ np.linalg.inv(I - 4 * t), QUAD).value
        assert close(lhs, -x @ np.linalg.inv(I - 2 * x))

    def test_scalar_diagram_coherence(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            p = complex(rng.uniform(-2, 3), rng.uniform(-0.5, 0.5))
            if abs(p.real - 0.5) < 0.3:
                continue
            assert close(sp.idem_spec(p, QUAD).value, 0.5 - 0.5 * sp.sgn(0.5 - p, QUAD).value)

    def test_convergence(self):
        fx = generate_test_matrix(2, [3, -2], seed=7)
        want = fx.oracle(lambda d: np.sign(d.real))
        errs = [sp._norm(sp.sgn(fx.matrix, sp.Quadrature(N)).value - want) for N in (32, 64, 128)]
        assert errs[1] <= errs[0] / 10 and errs[2] <= 1e-8

    def test_pairwise_matches_sequential(self):
        a = sp.sgn(Q23, sp.Quadrature(64)).value
        b = sp.sgn(Q23, sp.Quadrature(64, pairwise=True)).value
        assert close(a, b, 1e-13)


class TestDerived:
    def test_examples(self):
        assert close(sp.derived_decomposition("abs_r", -3.0).value, 3)
        assert close(sp.derived_decomposition("pert_r", 1.0, QUAD).value, 0)
        assert close(sp.derived_decomposition("pert_r", 3.0, QUAD).value, 0.5)
        assert close(sp.derived_decomposition("abs_i", 2j, QUAD).value, 2)
        assert close(sp.derived_decomposition("pol", 2j, QUAD).value, 1j)

    def test_decomposition_residuals(self):
        for kind, x in [("abs_r", Q23), ("pol", np.array([[0.0, 2.0], [-1.0, 0.5]])),
                        ("abs_F", np.array([[2.0, 1.0], [0.0, -1.0]]))]:
            res = sp.derived_decomposition(kind, x, QUAD)
            assert res.residuals["decomposition"] <= 1e-8
        res = sp.derived_decomposition("pert_r", Q23, QUAD)
        assert res.residuals["integral_form"] <= 1e-8


class TestSplit:
    def test_diag(self):
        pm, pp, qm, qp = sp.spectral_split(np.diag([3.0, -2.0]), QUAD)
        assert close(pp, np.diag([1, 0])) and close(pm, np.diag([0, 1]))
        assert close(qp, np.diag([3, 0])) and close(qm, np.diag([0, 2]))

    def test_scalar_and_matrix(self):
        pm, pp, _, _ = sp.spectral_split(3.0, QUAD)
        assert close(pp, 1) and close(pm, 0)
        _, pp, _, _ = sp.spectral_split(Q23, QUAD)
        assert close(pp, [[1, 0.2], [0, 0]])

    def test_residuals(self):
        assert max(sp.split_residuals(Q23, QUAD).values()) <= 1e-8

    def test_needs_half(self):
        with pytest.raises(MissingHalfError):
            sp.spectral_split(3, QUAD, IntegerRing())


class TestExpansions:
    def test_sign_a(self):
        e = sp.pencil_inverse_expansion(F(3), "pencil_sign_a", 6)
        assert [e[n] for n in range(6)] == [F(1, 2 ** (n + 1)) for n in range(6)]
        assert all(e[-n] == 0 for n in range(1, 6))
        prod = series_arith("mul", sp.pencil_series(F(3), "pencil_sign_a"), e)
        assert {n: prod[n] for n in prod.support()} == {0: 1, 7: -F(1, 2 ** 7)}

    def test_sign_b(self):
        e = sp.pencil_inverse_expansion(F(3), "pencil_sign_b", 6)
        assert e[0] == 1 and [e[n] for n in range(1, 6)] == [F(2, 2 ** n) for n in range(1, 6)]

    def test_sqrt(self):
        e = sp.pencil_inverse_expansion(F(9), "pencil_sqrt", 6)
        assert (e[0], e[1], e[-1], e[2], e[-2]) == (F(1, 3), F(1, 6), F(1, 6), F(1, 12), F(1, 12))
        prod = series_arith("mul", sp.pencil_series(F(9), "pencil_sqrt"), e)
        assert prod[0] == 1 and all(prod[n] == 0 for n in range(-5, 6) if n)

    def test_aux_integral(self):
        assert sp.aux_integral("inv_one_plus_absr", F(3)).value == F(1, 4)
        assert sp.aux_integral("inv_one_plus_sqrt", F(9)).value == F(1, 4)
        assert sp.aux_integral("inv_one_plus_absr", F(1)).value == F(1, 2)
        assert sp.aux_integral("inv_one_plus_sqrt", F(1)).value == F(1, 2)
        res = sp.aux_integral("inv_one_plus_sqrt", 9.0, QUAD)
        assert close(res.value, 0.25) and res.residuals["closed_form"] <= 1e-8


class TestHomotopy:
    def test_endpoints_scalar(self):
        assert sp.homotopy_endpoint("K", 1, -1, F(3)) == 3
        assert sp.homotopy_endpoint("K", 0, -1, F(-3)) == -1
        assert sp.homotopy_endpoint("K", -1, -1, F(3)) == F(1, 3)
        assert sp.homotopy_endpoint("K", F(1, 2), 1, F(3)) == 1

    def test_endpoints_matrix(self):
        L = sp.homotopy_endpoint("L", 0, -1, Q23)
        assert close(L, [[2, 0.7], [0, -1.5]])
        assert close(sp.homotopy_endpoint("K", 1, -1, Q23), Q23)
        assert close(sp.homotopy_endpoint("K", 0, -1, Q23), SGN23)
        assert close(sp.homotopy_endpoint("K", -1, -1, Q23), np.linalg.inv(Q23))

    @pytest.mark.parametrize("q", [F(3), F(-5, 2), F(1, 3)])
    @pytest.mark.parametrize("t", [F(0), F(1, 2), F(-2, 3)])
    def test_inverse_pairs_exact(self, q, t):
        assert sp.homotopy_product_defect("KH", t, q, 12) == 0
        assert sp.homotopy_product_defect("LG", t, q, 12) == 0


class TestContraction:
    def test_examples(self):
        assert sp.contraction_eval(0, F(9)) == (1, 1)
        assert sp.contraction_eval(1, F(9)) == (9, 3)
        for t in (F(1, 3), F(-1, 2), F(2)):
            assert sp.contraction_eval(t, F(1))[0] == 1

    def test_inverse_under_t_flip(self):
        C1, r1 = sp.contraction_eval(F(1, 3), F(9))
        C2, r2 = sp.contraction_eval(F(-1, 3), F(9))
        assert C1 * C2 == 1 and r1 * r1 == C1

    def test_poisson_property(self):
        assert sp.contraction_poisson_defect(F(1, 2), 9.0) <= 1e-10
        assert sp.contraction_poisson_defect(F(1, 3), np.diag([4.0, 2.0])) <= 1e-10


class TestGeometricMean:
    def test_scalars(self):
        assert close(sp.geometric_mean(4.0, 9.0, QUAD).value, 6)
        assert close(sp.geometric_mean(1.0, 9.0, QUAD).value, 3)

    def test_equal_and_commuting(self):
        M = np.array([[2.0, 1.0], [1.0, 3.0]])
        assert close(sp.geometric_mean(M, M, QUAD).value, M)
        B = M @ M + np.eye(2)
        res = sp.geometric_mean(M, B, QUAD)
        assert res.residuals["square"] <= 1e-8 and res.residuals["symmetry"] <= 1e-8


class TestSegment:
    def test_examples(self):
        assert close(sp.sqrt_real_segment(9.0, 128).value, 3)
        assert close(sp.sqrt_real_segment(1.0, 8).value, 1)
        assert close(sp.sqrt_real_segment(np.diag([4.0, 9.0]), 128).value, np.diag([2.0, 3.0]))

    def test_matches_circle_rule(self):
        s = random_fixture("sqrt", 3, 11).matrix
        assert close(sp.sqrt_real_segment(s, 64).value, sp.sqrt_spec(s, QUAD).value)


class TestCertificates:
    def test_examples(self):
        c = sp.class_membership(3.0, "AvoidImagAxis")
        assert c.status == "certified" and c.margin == pytest.approx(1.0, abs=1e-6)
        assert sp.class_membership(1j, "AvoidImagAxis").status == "refuted"
        P = MatrixRing(RationalRing(), 2).make([[1, 1], [0, 0]])
        assert sp.class_membership(P, "Idempotent").status == "certified"

    def test_one_sided(self):
        assert sp.class_membership(3.0, "AvoidLeftHalf").status == "certified"
        assert sp.class_membership(-3.0, "AvoidLeftHalf").status == "refuted"
        assert sp.class_membership(F(3), "AvoidLeftHalf", sp.SeriesCayley()).status == "certified"
        assert sp.class_membership(F(3), "AvoidImagAxis", sp.SeriesCayley()).status == "inconclusive"

    def test_oracle_certificate(self):
        fx = generate_test_matrix(2, [3, -2], seed=7)
        assert sp.class_membership(fx.matrix, "AvoidImagAxis", sp.Oracle(fx.V, fx.D)).status == "certified"
        assert sp.class_membership(fx.matrix, "AvoidLeftHalf", sp.Oracle(fx.V, fx.D)).status == "refuted"

    def test_complex_ring_result(self):
        res = sp.sgn(F(3))
        assert isinstance(res.ring, ComplexRing)
