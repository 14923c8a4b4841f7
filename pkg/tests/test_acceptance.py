"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line with its runtime; the
lines are repeated in the terminal summary (see ``conftest.py``).
Run alone with ``pytest tests/test_acceptance.py -s``.
"""

import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from apalgebra.aplus import HalfPlanePoint, extend, negative_spectrum_decay, poisson_integral
from apalgebra.bohr import fb_exact, fb_numeric
from apalgebra.corona import (
    Invertibility,
    approximation_resistance_check,
    bezout,
    example_fundamental,
    example_tuple,
    f_map,
    g_map,
    reduction_zero_witness,
    stable_rank_reference,
    unimodular,
    witness_residual,
)
from apalgebra.freqmod import Frequency, default_table
from apalgebra.torus import LaurentPoly, back_substitute, torus_max_abs, torus_min_abs, transfer
from apalgebra.trigpoly import CRational, TrigPoly

from conftest import ACCEPTANCE_LINES

TABLE = default_table(8)
W = TABLE.gens()


@contextmanager
def criterion(number, title, limit):
    """Time the block, record one pass/fail line, and enforce the time limit."""
    start = time.perf_counter()
    ok = False
    detail = ""
    try:
        yield
        elapsed = time.perf_counter() - start
        ok = limit is None or elapsed < limit
        if not ok:
            detail = f" (over the {limit:g}s limit)"
    except Exception as exc:  # noqa: BLE001 - report, then re-raise
        detail = f" ({type(exc).__name__}: {exc})"
        raise
    finally:
        elapsed = time.perf_counter() - start
        line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title} — {elapsed:.2f}s{detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    assert ok, line


def random_rational(rng, max_den, bound=3):
    d = int(rng.integers(1, max_den + 1))
    return Fraction(int(rng.integers(-bound * d, bound * d + 1)), d)


def random_coeff(rng, radius=1.0):
    r, th = radius * math.sqrt(rng.uniform()), rng.uniform(0, 2 * math.pi)
    return CRational(Fraction(round(r * math.cos(th) * 256), 256), Fraction(round(r * math.sin(th) * 256), 256))


def random_poly(rng, ngen=3, terms=6, max_den=6):
    items = []
    for _ in range(int(rng.integers(1, terms + 1))):
        coords = tuple(random_rational(rng, max_den) for _ in range(ngen)) + (Fraction(0),) * (len(TABLE) - ngen)
        items.append((Frequency(coords, TABLE), random_coeff(rng, 3)))
    return TrigPoly(items, TABLE)


def random_aplus(rng, terms=4, max_lam=3.0):
    p = TrigPoly.zero(TABLE)
    while len(p.terms) < terms:
        lam = Fraction(int(rng.integers(0, 7)), 3) * W[0] + Fraction(int(rng.integers(0, 4)), 2) * W[1]
        if lam.shadow <= max_lam:
            p = p + TrigPoly.exp(lam, random_coeff(rng))
    return p


def test_01_exact_identity():
    with criterion(1, "exact identity Σ f_{N+j} f_j + g = 1/4, N,s ∈ {1,2,3}", 1.0):
        for N in (1, 2, 3):
            for s in (1, 2, 3):
                ex = example_fundamental(N, s)
                acc = ex.g
                for j in range(N):
                    acc = acc + ex.f[N + j] * ex.f[j]
                assert acc == LaurentPoly.constant(4 * N, Fraction(1, 4)), (N, s)


def test_02_transfer_round_trip():
    rng = np.random.default_rng(2)
    with criterion(2, "transfer + back-substitution is exact on 100 random polynomials", 5.0):
        for _ in range(100):
            p = random_poly(rng)
            assert back_substitute(transfer(p), TABLE) == [p], p.render()


def test_03_right_inverse():
    rng = np.random.default_rng(3)
    with criterion(3, "f_s ∘ g_s = id on 200 slit-disk points, s ∈ {1,2,3}, error ≤ 1e-12", 1.0):
        worst = 0.0
        for s in (1, 2, 3):
            r = 2 * np.sqrt(rng.uniform(size=200))
            th = rng.uniform(-math.pi, math.pi, size=200)
            for z in r * np.exp(1j * th):
                if z.imag == 0 and z.real <= 0:
                    continue
                worst = max(worst, abs(f_map(*g_map(z, s), s) - z))
        assert worst <= 1e-12, worst


def test_04_kronecker_extrema():
    F1 = TrigPoly.exp(W[0]) + TrigPoly.exp(W[1]) - 1
    with criterion(4, "F1 torus min 0 (1e-6), max 3 (1e-9); line sampling reaches both (1e-2)", 30.0):
        q = transfer(F1).q
        lo, hi = torus_min_abs(q), torus_max_abs(q)
        assert abs(lo.value) <= 1e-6 and abs(hi.value - 3) <= 1e-9
        sup, inf = 0.0, math.inf
        for k in range(10):  # t ∈ [0, 10⁴] with step 1e-3, in chunks
            t = np.arange(k * 10**6, (k + 1) * 10**6) * 1e-3
            v = np.abs(F1.eval(t))
            sup, inf = max(sup, v.max()), min(inf, v.min())
        assert sup >= 3 - 1e-2 and inf <= 1e-2, (sup, inf)


def test_05_fourier_bohr_convergence():
    rng = np.random.default_rng(5)
    with criterion(5, "fb_numeric within error_bound of fb_exact; bound ∝ 1/T within 1.01", 1.0):
        for _ in range(10):
            p = random_poly(rng, ngen=2, terms=5)
            spec = p.spectrum()
            lam = spec[int(rng.integers(len(spec)))] if spec and rng.uniform() < 0.7 else W[2] / 3
            exact = fb_exact(p, lam)
            scaled = []
            for T in (1e2, 1e3, 1e4):
                est = fb_numeric(p, lam, T)
                assert abs(est.value - exact) <= est.error_bound + 1e-15
                scaled.append(est.error_bound * T)
            if max(scaled) > 0:
                assert max(scaled) / min(scaled) <= 1.01


def test_06_bezout_residuals():
    rng = np.random.default_rng(6)
    samples = np.linspace(0.0, 1e3, 10**4)
    with criterion(6, "20 certified tuples (δ ≥ 0.1): |Σ Q_j F_j − 1| ≤ 1e-8 at 10⁴ points", 10.0):
        done = attempts = 0
        while done < 20:
            attempts += 1
            assert attempts < 200, "could not generate enough certified tuples"
            Fs = []
            for _ in range(int(rng.integers(1, 4))):
                F = TrigPoly.constant(random_coeff(rng, 2), TABLE)
                for _ in range(2):
                    lam = int(rng.integers(-2, 3)) * W[0] + int(rng.integers(-1, 2)) * W[1]
                    F = F + TrigPoly.exp(lam, random_coeff(rng, 0.5))
                Fs.append(F)
            rep = unimodular(Fs, grid=64)
            if rep.verdict is not Invertibility.INVERTIBLE or rep.certified_delta < 0.1:
                continue
            sol = bezout(Fs, rep, samples)
            assert sol.residual_bound <= 1e-8
            done += 1


def test_07_zero_witnesses():
    rng = np.random.default_rng(7)
    hs = [LaurentPoly.constant(4, 0)]
    for _ in range(20):
        terms = {}
        for _ in range(int(rng.integers(1, 4))):
            r, th = rng.uniform(0, 1), rng.uniform(0, 2 * math.pi)
            terms[tuple(int(x) for x in rng.integers(-2, 3, 4))] = complex(r * math.cos(th), r * math.sin(th))
        hs.append(LaurentPoly(4, terms))
    ex = example_fundamental(1, 1)
    with criterion(7, "N=1 witnesses for h=0 and 20 random h: residual ≤ 1e-6, winding 1, ≤ 10s each", None):
        for h in hs:
            start = time.perf_counter()
            wit = reduction_zero_witness(1, 1, [h], tol=1e-6)
            assert time.perf_counter() - start <= 10.0
            assert wit.boundary_winding == 1
            # independent re-verification straight from the Laurent polynomials
            th = np.array(wit.torus_point)
            resid = abs(ex.f[0].eval_angles(th) + h.eval_angles(th) * ex.g.eval_angles(th))
            assert resid <= 1e-6
            assert abs(resid - wit.residual) <= 1e-12
            assert abs(witness_residual(ex, [h], th) - resid) <= 1e-12


def test_08_approximation_resistance():
    with criterion(8, "|4F − 1| ≤ 1/2 certified for H_j = F_j + c, |c| = 1/(48N), N ∈ {1,2}", 20.0):
        for N in (1, 2):
            lams = W[: 4 * N]
            Fs, _ = example_tuple(lams)
            for c in (CRational(Fraction(1, 48 * N)), CRational(Fraction(0), Fraction(-1, 48 * N))):
                Hs = [F + TrigPoly.constant(c, TABLE) for F in Fs[:N]]
                rep = approximation_resistance_check(N, lams, Hs)
                assert rep.certified_max <= 0.5 + 1e-9


def test_09_negative_decay():
    rng = np.random.default_rng(9)
    lam = -W[0]
    with criterion(9, "negative coefficients decay: |fb(T)| ≤ Σ|a|/(min gap · T) at λ = −w1", 1.0):
        for _ in range(10):
            p = random_aplus(rng)
            lams, a = p.arrays()
            C = np.abs(a).sum() / np.min(lams - lam.shadow)
            for est in negative_spectrum_decay(p, lam, [1e2, 1e3, 1e4]):
                assert abs(est.value) <= C / est.T + 1e-15


def test_10_stable_ranks():
    with criterion(10, "stable-rank table matches ⌊N/2⌋+1 and N+1 for N = 1..8", 1.0):
        for N in range(1, 9):
            r = stable_rank_reference(N)
            assert r["polydisk_algebra"] == {"bsr": N // 2 + 1, "tsr": N + 1}
            assert r["torus_continuous"] == {"bsr": N // 2 + 1, "tsr": N // 2 + 1}
            for key in ("AP", "AP_Lambda_infinite_dim", "AP_plus", "APW_plus"):
                assert r[key] == {"bsr": "infinite", "tsr": "infinite"}


def test_11_poisson_consistency():
    rng = np.random.default_rng(11)
    with criterion(11, "extend agrees with truncated Poisson quadrature ≤ 1e-3 (20 polys × 5 points)", 30.0):
        worst = 0.0
        for _ in range(20):
            p = random_aplus(rng)
            for _ in range(5):
                z = HalfPlanePoint(rng.uniform(-10, 10), rng.uniform(0.3, 1.0))
                worst = max(worst, abs(extend(p, z) - poisson_integral(p, z)))
        assert worst <= 1e-3, worst
