import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apalgebra.bohr import SpectrumVerdict, fb_exact, fb_numeric, simpson_mean, spectrum_in
from apalgebra.freqmod import SemigroupSpec, default_table
from apalgebra.trigpoly import CRational, TrigPoly

from conftest import frequencies, trigpolys

TABLE = default_table(3)
W1, W2, W3 = TABLE.gens()


def e(lam, c=1):
    return TrigPoly.exp(lam, c)


def simpson_oracle(f, T, n=200_000):
    t = np.linspace(-T, T, n + 1)
    y = f(t)
    h = 2 * T / n
    return (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()) * h / 3 / (2 * T)


class TestExact:
    def test_readoff(self):
        p = e(W2, 2) + TrigPoly.constant(CRational(0, -1), TABLE)
        assert fb_exact(p, W2) == 2
        assert fb_exact(p, TABLE.zero()) == -1j
        assert fb_exact(p, W1) == 0


class TestNumeric:
    def test_closed_form_example(self):
        est = fb_numeric(e(W1), TABLE.zero(), 100)
        assert est.value == pytest.approx(math.sin(100) / 100, abs=1e-15)
        assert est.value.real == pytest.approx(-0.00506, abs=1e-5)
        assert est.error_bound == pytest.approx(0.01)
        # independent cross-check by composite quadrature
        assert est.value == pytest.approx(simpson_oracle(lambda t: np.exp(1j * t), 100), abs=1e-9)

    def test_constant(self):
        for T in (0.5, 10, 1e4):
            est = fb_numeric(TrigPoly.constant(1, TABLE), TABLE.zero(), T)
            assert est.value == 1 and est.error_bound == 0

    def test_bad_T(self):
        with pytest.raises(ValueError):
            fb_numeric(e(W1), W1, 0)

    def test_indistinguishable(self):
        from apalgebra.freqmod import GeneratorTable

        t = GeneratorTable.from_pairs([("a", "1"), ("b", "1.0000000000001")])
        with pytest.raises(ValueError):
            fb_numeric(TrigPoly.exp(t.gen("a")), t.gen("b"), 10)

    @given(trigpolys(TABLE, max_terms=5), frequencies(TABLE), st.floats(1, 1e4))
    @settings(max_examples=50, deadline=None)
    def test_within_bound(self, p, lam, T):
        est = fb_numeric(p, lam, T)
        assert abs(est.value - fb_exact(p, lam)) <= est.error_bound + 1e-12
        assert est.error_bound >= 0

    def test_converges_like_one_over_T(self):
        p = e(W1, 3) + e(W2 - W1) + 2
        prev = None
        for T in (1e2, 1e3, 1e4):
            est = fb_numeric(p, W1, T)
            assert abs(est.value - 3) <= est.error_bound
            if prev is not None:
                assert prev.error_bound / est.error_bound == pytest.approx(10)
            prev = est

    def test_matches_quadrature_path(self):
        p = e(W1, CRational(1, 2)) + e(W2 * 2) - 1
        T = 50.0
        est = fb_numeric(p, W2 * 2, T)
        q = simpson_mean(p.eval, (W2 * 2).shadow, T, max(abs(l.shadow) for l in p.spectrum()))
        assert q == pytest.approx(est.value, abs=1e-5)


class TestSpectrumIn:
    def test_nonneg(self):
        assert spectrum_in(e(W1) + e(W2) - 1, SemigroupSpec.nonneg_reals()) is SpectrumVerdict.YES

    def test_negative(self):
        assert spectrum_in(e(-W1), SemigroupSpec.nonneg_reals()) is SpectrumVerdict.NO

    def test_lattice(self):
        assert spectrum_in(e(W1 - 2 * W2), SemigroupSpec.nspan(W1, W2)) is SpectrumVerdict.NO
        assert spectrum_in(e(W1 + 2 * W2) + 1, SemigroupSpec.nspan(W1, W2)) is SpectrumVerdict.YES

    def test_no_beats_inconclusive(self):
        spec = SemigroupSpec.nspan(2 * W1, 3 * W1)
        assert spectrum_in(e(W1), spec) is SpectrumVerdict.INCONCLUSIVE
        assert spectrum_in(e(W1) + e(W1 / 2), spec) is SpectrumVerdict.NO

    def test_spectrum_is_finite(self):
        p = e(W1) + e(W2) + e(W3) - 1
        assert len(p.spectrum()) == len(p.terms) == 4

    def test_group_case_conjugation_closed(self):
        # AP over a group Λ is closed under conjugation: σ(p̄) = -σ(p)
        spec = SemigroupSpec.zspan(W1, W2)
        p = e(W1 - 3 * W2, CRational(1, 2)) + e(2 * W1)
        assert spectrum_in(p, spec) is SpectrumVerdict.YES
        assert spectrum_in(p.conj(), spec) is SpectrumVerdict.YES
        assert spectrum_in(p.conj(), SemigroupSpec.nspan(W1, W2)) is SpectrumVerdict.NO
