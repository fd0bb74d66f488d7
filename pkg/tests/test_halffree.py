from fractions import Fraction

import numpy as np
import pytest

from specring import halffree as hf
from specring.errors import PencilInversionError
from specring.rings import IntegerRing, MatrixRing, NoHalf, RationalRing

F = Fraction
S = hf.SymmetrizedSeries


class TestPairing:
    def test_examples(self):
        assert hf.integral_pairing(S("Angle", {0: 1, 1: 1}), S("Bracket", {0: 5, 1: 7})) == 12
        assert hf.integral_pairing(S("Angle", {0: 2, 1: 3}), S("Bracket", {0: 5, 1: 7})) == 31
        assert hf.integral_pairing(S("Angle", {0: 2, 1: 3}), S("Bracket", {})) == 0

    def test_matches_constant_term(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a = S("Angle", {k: int(rng.integers(-4, 5)) for k in range(-3, 4)}, RationalRing())
            b = S("Bracket", {k: int(rng.integers(-4, 5)) for k in range(-3, 4)}, RationalRing())
            prod = hf.laurent_mul2({(n, 0): v for n, v in a.to_laurent().items()},
                                   {(n, 0): v for n, v in b.to_laurent().items()})
            assert hf.integral_pairing(a, b) == prod.get((0, 0), 0)

    def test_space_mismatch(self):
        with pytest.raises(ValueError):
            hf.integral_pairing(S("Bracket", {0: 1}), S("Bracket", {0: 1}))

    def test_unit_pairing_is_integral(self):
        b = S("Bracket", {0: 5, 1: 7, -2: 3})
        assert hf.integral_pairing(S("Angle", {0: 1}), b) == 5


class TestModule:
    def test_embedding_doubles(self):
        b = S("Bracket", {0: 5, 1: 7, -2: 3})
        e = hf.embed_bracket(b)
        assert e.coeffs == {0: 5, 1: 14, -2: 6}
        assert e.to_laurent() == b.to_laurent()

    def test_action_matches_laurent_product(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            b = S("Bracket", {k: int(rng.integers(-3, 4)) for k in range(-3, 4)})
            a = S("Angle", {k: int(rng.integers(-3, 4)) for k in range(-3, 4)})
            got = hf.module_action(b, a).to_laurent()
            want = hf.laurent_mul2({(n, 0): v for n, v in b.to_laurent().items()},
                                   {(n, 0): v for n, v in a.to_laurent().items()})
            assert got == {n: v for (n, _), v in want.items()}

    def test_grading_adds(self):
        out = hf.module_action(S("Bracket", {-1: 1}), S("Angle", {-2: 1}))
        assert all(k >= 0 for k in out.coeffs)
        out = hf.module_action(S("Bracket", {-1: 1}), S("Angle", {2: 1}))
        assert all(k < 0 for k in out.coeffs)

    def test_angle_from_laurent(self):
        a = hf.angle_from_laurent({2: 3, -2: 1, 0: 4})
        assert a.to_laurent() == {2: 3, -2: 1, 0: 4}


class TestSingleColon:
    def test_examples(self):
        assert hf.normal_order_single({(1, 3): 1}) == {(3, 1): 1}
        assert hf.normal_order_single({(2, 2): 1}) == {(2, 2): 1}

    def test_integral_preserved(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a = hf.random_laurent2(rng)
            assert hf.double_integral(hf.normal_order_single(a)) == hf.double_integral(a)

    @pytest.mark.parametrize("nm, want", [
        ((3, 0), {(3, 0): 1, (2, 1): 2}),
        ((2, 0), {(2, 0): 1, (1, 1): 1}),
        ((3, 1), {(3, 1): 1, (2, 2): 1}),
    ])
    def test_hilbert_examples(self, nm, want):
        n, m = nm
        assert hf.hilbert_product_single({(n, m): 1, (m, n): -1}) == want

    def test_hilbert_matches_natural(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            n, m = sorted(rng.integers(-5, 6, size=2), reverse=True)
            if n == m:
                continue
            a = {(int(n), int(m)): 1, (int(m), int(n)): -1}
            assert hf.hilbert_product_single(a) == {
                k: int(v) for k, v in hf.normal_order_single(hf.hilbert_natural(a)).items()}

    def test_not_antisymmetric(self):
        with pytest.raises(ValueError):
            hf.hilbert_product_single({(2, 0): 1})
        with pytest.raises(ValueError):
            hf.hilbert_product_single({(1, 1): 1})


class TestDoubleColon:
    def test_examples(self):
        assert hf.normal_order_double({(-2, 1): 1}) == {(2, 1): 1}
        assert hf.normal_order_double(S("TwoVarAngle", {(1, -2): 3})) == {}
        assert hf.normal_order_double(S("TwoVarAngle", {(1, 2): 3})) == {(2, 1): 3}

    def test_symmetrized_matches_laurent(self):
        rng = np.random.default_rng(5)
        for space in ("TwoVarAngle", "TwoVarMixed", "TwoVarBracket"):
            for _ in range(10):
                keys = [(int(j), int(k)) for j, k in rng.integers(-3, 4, size=(4, 2))]
                s = S(space, {k: int(rng.integers(1, 4)) for k in keys}, RationalRing())
                via_laurent = hf.normal_order_double(s.to_laurent())
                assert via_laurent == hf.normal_order_double(s)

    def test_d_integral(self):
        assert hf.d_integral({(0, 0): 4, (2, 1): 7}) == 4


class TestDoubleHilbert:
    def test_table(self):
        assert hf.table_check() == {}
        assert hf.hilbert_product_double({(1, 1): 1}) == {(1, 1): 1, (0, 0): 1}
        assert hf.hilbert_product_double({(1, 3): 1}) == {(2, 2): -1, (1, 1): 1, (2, 0): 2}
        assert hf.hilbert_product_double({(3, 3): 1}) == {(3, 3): 1, (2, 2): 2, (1, 1): 2, (0, 0): 1}

    def test_format(self):
        assert hf.format_d(hf.hilbert_product_double({(1, 3): 1})) == "-d^2_2 + 2d^2_0 + d^1_1"

    def test_mixed_input(self):
        c = S("TwoVarMixed", {(-2, 1): 3, (1, -2): -3})
        assert hf.hilbert_product_double(c) == {k: 3 * v for k, v in hf.PRINTED_TABLE[(2, 1)].items()}

    def test_two_var_angle_rejected(self):
        with pytest.raises(ValueError):
            hf.hilbert_product_double(S("TwoVarAngle", {(-2, 1): 1, (1, -2): -1}))

    def test_not_odd(self):
        with pytest.raises(ValueError):
            hf.to_c_basis(S("TwoVarMixed", {(2, 1): 1, (1, 2): -1}))

    def test_json_roundtrip(self):
        d = hf.hilbert_product_double({(3, 1): 1})
        text = hf.basis_json(d)
        assert '"d[3,1]": 2' in text
        assert hf.basis_from_json(text) == d


class TestLemmas:
    def test_report(self):
        rep = hf.lemma_report(seed=1, trials=20, integrality_trials=60)
        assert all(p == t for p, t in rep.values()), rep


class TestNoHalf:
    def test_fsqrt_values(self):
        R = NoHalf(IntegerRing())
        assert hf.fsqrt_nohalf(0, ring=R) == 0
        assert hf.fsqrt_nohalf(-2, ring=R) == -1
        assert hf.fsqrt_nohalf(-6, ring=R) == -2
        assert R.half_requests == 0

    def test_fsqrt_rational(self):
        x = hf.fsqrt_nohalf(F(3, 16), ring=RationalRing())
        assert x == F(1, 4)

    def test_idem_values(self):
        R = NoHalf(IntegerRing())
        assert hf.idem_nohalf(0, ring=R) == 0
        assert hf.idem_nohalf(1, ring=R) == 1
        assert hf.idem_nohalf(2, ring=R) == 1
        assert hf.idem_from_fsqrt(2, ring=R) == 1
        assert hf.idem_from_fsqrt(0, ring=R) == 0
        assert R.half_requests == 0

    def test_idempotent_matrix(self):
        R = NoHalf(MatrixRing(IntegerRing(), 2))
        P = R.make([[1, 1], [0, 0]])
        out = hf.idem_nohalf(P, ring=R, report=True)
        assert R.eq(out.value, P) and out.route == "idempotent"
        assert R.eq(hf.idem_from_fsqrt(P, ring=R), P)
        assert R.half_requests == 0

    def test_matrix_quadrature_route(self):
        R = MatrixRing(IntegerRing(), 2)
        out = hf.idem_nohalf(R.make([[2, 3], [0, -1]]), ring=R, report=True)
        assert R.eq(out.value, R.make([[1, 1], [0, 0]]))
        x = hf.fsqrt_nohalf(R.make([[-2, 4], [0, -6]]), ring=R)
        assert R.eq(x, R.make([[-1, 1], [0, -2]]))

    def test_projector_outside_ring(self):
        R = MatrixRing(IntegerRing(), 2)
        with pytest.raises(PencilInversionError):
            hf.idem_nohalf(R.make([[2, 1], [0, -1]]), ring=R)

    @pytest.mark.parametrize("p", [2, -1, 3, F(3, 4), F(-1, 3)])
    def test_complement(self, p):
        R = RationalRing()
        assert hf.idem_nohalf(p, ring=R) + hf.idem_nohalf(1 - F(p), ring=R) == 1

    @pytest.mark.parametrize("p", [0, 2, -1, 3])
    def test_decomposition(self, p):
        assert hf.decomposition_defect(p, NoHalf(IntegerRing())) == 0

    def test_agrees_with_spectral(self):
        from specring.spectral import idem_spec
        for p in (2.0, -1.0, 0.75, -0.3):
            assert abs(idem_spec(p).value - hf.idem_nohalf(F(p).limit_denominator(), ring=RationalRing())) < 1e-8


class TestExpansion:
    def test_t_minus_two(self):
        e = hf.fsqrt_pencil_expansion(-2, 6, NoHalf(IntegerRing()))
        assert (e[0], e[1], e[-1], e[2]) == (F(1, 3), F(1, 6), F(1, 6), F(1, 12))
        assert hf.fsqrt_aux_integral(-2, 6, IntegerRing()) == F(1, 2)

    def test_t_zero(self):
        e = hf.fsqrt_pencil_expansion(0, 6, IntegerRing())
        assert [e[n] for n in range(-6, 7)] == [0] * 6 + [1] + [0] * 6

    @pytest.mark.parametrize("t", [-2, -6, F(3, 16), F(-3, 4)])
    def test_inverts_pencil(self, t):
        from specring.laurent import series_arith
        R = RationalRing()
        e = hf.fsqrt_pencil_expansion(F(t), 10, R)
        prod = series_arith("mul", hf.fsqrt_pencil(F(t), R), e)
        assert prod[0] == 1 and all(prod[n] == 0 for n in range(-9, 10) if n)
        x = hf.fsqrt_nohalf(F(t), ring=R)
        assert hf.fsqrt_aux_integral(F(t), 10, R) == 1 / (1 - x)

    def test_irrational_root_rejected(self):
        with pytest.raises(PencilInversionError):
            hf.fsqrt_nohalf(F(-5, 4), ring=RationalRing())
