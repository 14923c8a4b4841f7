import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from apalgebra.corona import (
    CoronaError,
    HypothesisViolated,
    Invertibility,
    WindingAmbiguous,
    approximation_resistance_check,
    bezout,
    bezout_polynomial,
    example_fundamental,
    example_general,
    example_tuple,
    exact_bezout_bound,
    f_map,
    fundamental_on_line,
    g_map,
    g_map_array,
    invertible,
    lift_to_torus,
    locate_zero_by_winding,
    reduction_zero_witness,
    stable_rank_reference,
    unimodular,
    winding_number,
    witness_residual,
)
from apalgebra.freqmod import FrequencyError, default_table
from apalgebra.torus import LaurentPoly
from apalgebra.trigpoly import CRational, TrigPoly

TABLE = default_table(8)
W = TABLE.gens()
W1, W2, W3, W4 = W[:4]


def e(lam, c=1):
    return TrigPoly.exp(lam, c)


def const(c):
    return TrigPoly.constant(c, TABLE)


F1 = e(W1) + e(W2) - 1


class TestInvertible:
    def test_shifted_exponential(self):
        rep = invertible(e(W1) + 3)
        assert rep.verdict is Invertibility.INVERTIBLE
        assert rep.delta == pytest.approx(2, abs=1e-12)
        assert 0 < rep.certified_delta <= rep.delta

    def test_fundamental(self):
        rep = invertible(F1)
        assert rep.verdict is Invertibility.NOT_INVERTIBLE
        assert rep.delta <= 1e-9

    def test_zero(self):
        assert invertible(TrigPoly.zero(TABLE)).verdict is Invertibility.NOT_INVERTIBLE

    @pytest.mark.parametrize("F", [e(W1) + 3, F1, e(W1, CRational(Fraction(1), Fraction(2))) - e(W3 / 2) + 4])
    def test_conjugate_invariance(self, F):
        assert invertible(F.conj()).verdict is invertible(F).verdict

    def test_uncertain_is_possible(self):
        # |z + 1 + 1e-4| has a tiny positive minimum the coarse certificate cannot see
        rep = invertible(e(W1) + const(Fraction(10001, 10000)), refinements=0)
        assert rep.verdict in (Invertibility.UNCERTAIN, Invertibility.INVERTIBLE)
        assert rep.delta > 1e-9

    def test_report_dict(self):
        d = invertible(e(W1) + 3).to_dict()
        assert d["verdict"] == "Invertible" and set(d) >= {"delta", "certified_delta", "extremum"}


class TestUnimodular:
    def test_exponential_and_one(self):
        rep = unimodular([e(W1), const(1)])
        assert rep.verdict is Invertibility.INVERTIBLE
        assert rep.delta == pytest.approx(2)  # |e^{it}| + 1

    def test_single_fundamental(self):
        assert unimodular([F1]).verdict is Invertibility.NOT_INVERTIBLE

    def test_fundamental_with_g_exact_certificate(self):
        Fs, G = example_tuple([W1, W2, W3, W4])
        assert Fs[1] * Fs[0] + G == const(Fraction(1, 4))
        assert exact_bezout_bound([Fs[0], G], [Fs[1], const(1)]) == pytest.approx(1 / 12)
        rep = unimodular([Fs[0], G], grid=16, bezout_coefficients=[Fs[1], const(1)])
        assert rep.verdict is Invertibility.INVERTIBLE
        assert rep.certificate == "exact-bezout"
        assert rep.certified_delta == pytest.approx(1 / 12)
        assert rep.delta >= rep.certified_delta

    def test_exact_bound_rejects_nonconstant(self):
        assert exact_bezout_bound([e(W1)], [const(1)]) is None

    def test_empty(self):
        with pytest.raises(ValueError):
            unimodular([])


class TestBezout:
    def test_constant(self):
        rep = invertible(const(2))
        sol = bezout([const(2)], rep)
        assert sol.residual_bound == 0
        assert np.allclose(sol.solvers[0](np.array([0.0, 5.0])), 0.5)

    def test_shifted_exponential(self):
        F = e(W1) + 3
        sol = bezout([F], invertible(F))
        assert sol.residual_bound <= 1e-12
        t = np.linspace(0, 10, 7)
        np.testing.assert_allclose(sol.solvers[0](t), (np.exp(-1j * t) + 3) / np.abs(np.exp(1j * t) + 3) ** 2)

    def test_fundamental_pair(self):
        Fs, G = example_tuple([W1, W2, W3, W4])
        rep = unimodular([Fs[0], G], grid=16, bezout_coefficients=[Fs[1], const(1)])
        sol = bezout([Fs[0], G], rep)
        assert sol.residual_bound <= 1e-10

    def test_requires_invertible(self):
        with pytest.raises(CoronaError):
            bezout([F1], invertible(F1))

    def test_polynomial_form(self):
        F = e(W1) + 3
        Q = bezout_polynomial([F], invertible(F), tol=1e-6)
        t = np.linspace(0, 100, 2001)
        assert np.max(np.abs(Q[0].eval(t) * F.eval(t) - 1)) <= 1e-6

    def test_polynomial_form_pair(self):
        Fs = [e(W1) + 3, e(W2)]
        rep = unimodular(Fs)
        Q = bezout_polynomial(Fs, rep, tol=1e-4)
        t = np.linspace(0, 100, 2001)
        comb = sum(q.eval(t) * f.eval(t) for q, f in zip(Q, Fs))
        assert np.max(np.abs(comb - 1)) <= 1e-4

    def test_polynomial_degree_cap(self):
        Fs = [e(W1) + 2, e(W2) - e(W1)]
        with pytest.raises(CoronaError):
            bezout_polynomial(Fs, unimodular(Fs), tol=1e-6, max_degree=10)


class TestMaps:
    def test_examples(self):
        assert np.allclose(g_map(2, 1), (1, 1))
        assert np.allclose(g_map(2, 2), (1, 1))
        a, b = g_map(1j, 1)
        assert a == pytest.approx(cmath.exp(5j * math.pi / 6), abs=1e-15)
        assert b == pytest.approx(cmath.exp(1j * math.pi / 6), abs=1e-15)
        assert f_map(a, b, 1) == pytest.approx(1j, abs=1e-15)
        assert f_map(1, 1, 1) == 2
        assert f_map(cmath.exp(1j * math.pi / 3), cmath.exp(-1j * math.pi / 3), 1) == pytest.approx(1, abs=1e-15)

    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_right_inverse(self, s):
        rng = np.random.default_rng(s)
        r = 2 * np.sqrt(rng.uniform(size=200))
        th = rng.uniform(-math.pi + 1e-3, math.pi - 1e-3, size=200)
        for z in r * np.exp(1j * th):
            a, b = g_map(z, s)
            assert abs(abs(a) - 1) < 1e-15 and abs(abs(b) - 1) < 1e-15
            assert abs(f_map(a, b, s) - z) <= 1e-12

    def test_vectorised_agrees(self):
        z = np.array([0.3 + 0.1j, 1.2 - 1j, 2.0])
        G1, G2 = g_map_array(z, 2)
        for k, zk in enumerate(z):
            assert np.allclose((G1[k], G2[k]), g_map(zk, 2))

    @pytest.mark.parametrize("z", [-1, 0, 3, 2.5j])
    def test_domain(self, z):
        with pytest.raises(ValueError):
            g_map(z, 1)

    def test_bad_s_and_off_circle(self):
        with pytest.raises(ValueError):
            g_map(1, 0)
        with pytest.raises(ValueError):
            f_map(1.1, 1, 1)


class TestExamples:
    def test_n1_s1(self):
        ex = example_fundamental(1, 1)
        z = [LaurentPoly.variable(4, n) for n in range(4)]
        assert ex.f[0] == z[0] + z[1] - 1
        assert ex.g == LaurentPoly.constant(4, Fraction(1, 4)) - (z[0] + z[1] - 1) * (z[2] + z[3] - 1)

    @pytest.mark.parametrize("N", [1, 2, 3])
    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_identity(self, N, s):
        assert example_fundamental(N, s).identity_holds()

    def test_term_counts(self):
        ex = example_fundamental(2, 2)
        assert len(ex.f[0].terms) == 3
        # 1/4 − Σ_{j≤2} f_j f_{j+2}: two 9-term products sharing the constant 1 → 17
        assert len(ex.g.terms) == 17
        assert len(example_fundamental(1, 1).g.terms) == 9

    def test_general(self):
        (F,) = example_general([W1, W2])
        assert F == F1
        assert F.wiener_norm() == 3
        assert invertible(F).verdict is Invertibility.NOT_INVERTIBLE

    def test_general_dependent(self):
        with pytest.raises(FrequencyError):
            example_general([W1, 2 * W1])
        with pytest.raises(ValueError):
            example_general([W1])

    def test_on_line(self):
        ex = example_fundamental(1, 1)
        fs, g = fundamental_on_line(ex, [W1, W2, W3, W4])
        Fs, G = example_tuple([W1, W2, W3, W4])
        assert fs == Fs and g == G


class TestWinding:
    def test_identity_degree(self):
        circle = [0.5 * np.exp(2j * math.pi * k / 512) for k in range(512)]
        assert winding_number(lambda w: w, circle) == 1
        assert winding_number(lambda w: w**3, circle) == 3
        assert winding_number(lambda w: w - 2, circle) == 0

    def test_boundary_zero(self):
        with pytest.raises(WindingAmbiguous):
            winding_number(lambda w: w - 1, [0, 2, 2 + 2j, 2j])

    def test_locate(self):
        square = [-1 - 1j, 1 - 1j, 1 + 1j, -1 + 1j]
        w, deg = locate_zero_by_winding(lambda w: (w - 0.3 + 0.2j) * (w + 5), square)
        assert deg == 1 and abs(w - (0.3 - 0.2j)) < 1e-9

    def test_no_zero(self):
        with pytest.raises(WindingAmbiguous):
            locate_zero_by_winding(lambda w: w + 5, [-1 - 1j, 1 - 1j, 1 + 1j, -1 + 1j])


class TestWitness:
    def test_unperturbed(self):
        z = LaurentPoly.constant(4, 0)
        wit = reduction_zero_witness(1, 1, [z])
        assert wit.residual <= 1e-6
        assert wit.boundary_winding == 1
        assert wit.method == "WindingSubdivision"
        ex = example_fundamental(1, 1)
        th = np.array(wit.torus_point)
        assert abs(ex.f[0].eval_angles(th)) <= 1e-6
        assert ex.g.eval_angles(th) == pytest.approx(0.25, abs=1e-6)
        # the explicit zero (π/3, −π/3, −π/3, π/3)
        ref = np.array([math.pi / 3, -math.pi / 3, -math.pi / 3, math.pi / 3])
        assert np.allclose(np.exp(1j * th), np.exp(1j * ref), atol=1e-6)

    def test_random_constants(self):
        rng = np.random.default_rng(3)
        ex = example_fundamental(1, 1)
        for _ in range(5):
            c = complex(*rng.uniform(-0.7, 0.7, 2))
            h = LaurentPoly.constant(4, c)
            wit = reduction_zero_witness(1, 1, [h])
            assert abs(witness_residual(ex, [h], wit.torus_point) - wit.residual) <= 1e-12
            assert wit.residual <= 1e-6

    def test_lift_structure(self):
        th = lift_to_torus(np.array([0.1 + 0.2j]), 1)
        z = np.exp(1j * th)
        assert np.allclose(z[2:], np.conj(z[:2]))
        assert z[0] + z[1] == pytest.approx(1.1 + 0.2j)

    def test_two_components(self):
        h = LaurentPoly.variable(8, 0) * Fraction(1, 3)
        wit = reduction_zero_witness(2, 1, [h, LaurentPoly.constant(8, Fraction(-1, 5))], starts=16)
        assert wit.heuristic and wit.residual <= 1e-6

    def test_bad_arity(self):
        with pytest.raises(ValueError):
            reduction_zero_witness(1, 1, [LaurentPoly.constant(8, 0)])


class TestResistance:
    def test_exact(self):
        Fs, _ = example_tuple([W1, W2, W3, W4])
        rep = approximation_resistance_check(1, [W1, W2, W3, W4], [Fs[0]])
        assert rep.certified_max == 0 and rep.holds

    def test_offset(self):
        Fs, _ = example_tuple([W1, W2, W3, W4])
        H = Fs[0] + const(Fraction(1, 48))
        rep = approximation_resistance_check(1, [W1, W2, W3, W4], [H])
        assert rep.holds and rep.certified_max <= 0.5 + 1e-9
        assert rep.difference_bounds[0] == pytest.approx(1 / 48)

    def test_violation(self):
        Fs, _ = example_tuple([W1, W2, W3, W4])
        with pytest.raises(HypothesisViolated):
            approximation_resistance_check(1, [W1, W2, W3, W4], [Fs[0] + const(Fraction(1, 20))])


class TestStableRanks:
    @pytest.mark.parametrize("N,poly,torus", [(1, (1, 2), (1, 1)), (2, (2, 3), (2, 2)), (4, (3, 5), (3, 3))])
    def test_reference(self, N, poly, torus):
        r = stable_rank_reference(N)
        assert (r["polydisk_algebra"]["bsr"], r["polydisk_algebra"]["tsr"]) == poly
        assert (r["torus_continuous"]["bsr"], r["torus_continuous"]["tsr"]) == torus
        assert r["AP_Lambda1"] == r["polydisk_algebra"]
        assert r["AP_Lambda2"] == r["torus_continuous"]
        for key in ("AP", "AP_Lambda_infinite_dim", "AP_plus", "APW_plus"):
            assert r[key] == {"bsr": "infinite", "tsr": "infinite"}

    def test_invalid(self):
        with pytest.raises(ValueError):
            stable_rank_reference(0)
