"""Invertibility and Bézout data for trig-polynomial tuples, and the
non-reducible tuple family with its common-zero witnesses.

For a tuple (F_1, …, F_n) of almost periodic functions, Σ|F_j| ≥ δ > 0 on ℝ
is equivalent to a Bézout relation Σ Q_j F_j = 1, with Q_j = F̄_j / Σ|F_k|².
Trig polynomials are moved to a torus first, where inf Σ|F_j| becomes a
certified minimum.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .freqmod import Frequency, FrequencyError, extract_basis
from .torus import (
    ExtremumReport,
    LaurentPoly,
    phi,
    torus_max_abs,
    torus_min_abs,
    torus_min_sumabs,
    transfer,
    transfer_many,
)
from .trigpoly import CRational, TrigPoly

ZERO_TOL = 1e-9
# boundary values this small relative to the boundary maximum count as a zero on the boundary
NEAR_ZERO_RATIO = 1e-6


class CoronaError(ValueError):
    pass


class WindingAmbiguous(CoronaError):
    pass


class DescentFailed(CoronaError):
    pass


class HypothesisViolated(CoronaError):
    pass


class Invertibility(enum.Enum):
    INVERTIBLE = "Invertible"
    NOT_INVERTIBLE = "NotInvertible"
    UNCERTAIN = "Uncertain"


@dataclass(frozen=True)
class InvertibilityReport:
    delta: float
    certified_delta: float
    verdict: Invertibility
    extremum: ExtremumReport
    certificate: str = "lipschitz"

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "certified_delta": self.certified_delta,
            "verdict": self.verdict.value,
            "certificate": self.certificate,
            "extremum": self.extremum.to_dict(),
        }


def _verdict(value: float, certified: float) -> Invertibility:
    if certified > 0:
        return Invertibility.INVERTIBLE
    if value <= ZERO_TOL:
        return Invertibility.NOT_INVERTIBLE
    return Invertibility.UNCERTAIN


def invertible(F: TrigPoly, grid: int | None = None, refinements: int | None = None) -> InvertibilityReport:
    """F is invertible in AP iff inf_ℝ |F| > 0."""
    rep = torus_min_abs(transfer(F).q, grid, refinements)
    return InvertibilityReport(rep.value, rep.certified_bound, _verdict(rep.value, rep.certified_bound), rep)


def unimodular_torus(qs: Sequence[LaurentPoly], grid=None, refinements=None) -> InvertibilityReport:
    rep = torus_min_sumabs(qs, grid, refinements)
    return InvertibilityReport(rep.value, rep.certified_bound, _verdict(rep.value, rep.certified_bound), rep)


def unimodular(Fs: Sequence[TrigPoly], grid: int | None = None, refinements: int | None = None,
               bezout_coefficients: Sequence[TrigPoly] | None = None) -> InvertibilityReport:
    """Joint transfer over one basis, then min of Σ|q_j| on the torus.

    If exact coefficients X_j with Σ X_j F_j = c ≠ 0 (a constant) are
    supplied, |c| / max_j ‖X_j‖_W also bounds inf Σ|F_j| from below.
    """
    if not Fs:
        raise ValueError("need a nonempty tuple")
    res = transfer_many(list(Fs))
    rep = torus_min_sumabs(res.qs, grid, refinements)
    cert = rep.certified_bound
    how = "lipschitz"
    if bezout_coefficients is not None:
        exact = exact_bezout_bound(Fs, bezout_coefficients)
        if exact is not None and exact > cert:
            cert, how = min(exact, rep.value), "exact-bezout"
    return InvertibilityReport(rep.value, cert, _verdict(rep.value, cert), rep, how)


def exact_bezout_bound(Fs: Sequence[TrigPoly], Xs: Sequence[TrigPoly]) -> float | None:
    if len(Fs) != len(Xs):
        raise ValueError("need one coefficient per tuple entry")
    total = TrigPoly.zero(Fs[0].table)
    for f, x in zip(Fs, Xs):
        total = total + f * x
    terms = total.terms
    if len(terms) != 1:
        return None
    (lam, c), = terms.items()
    if not lam.is_zero():
        return None
    return abs(complex(c)) / max(x.wiener_norm() for x in Xs)


# --------------------------------------------------------------------------
# Bézout solutions


STANDARD_SAMPLES = np.linspace(0.0, 1e3, 10**4)


@dataclass(frozen=True)
class BezoutSolution:
    tuple: tuple[TrigPoly, ...]
    solvers: tuple[Callable, ...]
    delta: float
    residual_bound: float

    def combination(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return sum(Q(t) * F.eval(t) for Q, F in zip(self.solvers, self.tuple))


def bezout(Fs: Sequence[TrigPoly], report: InvertibilityReport, samples=None) -> BezoutSolution:
    if report.verdict is not Invertibility.INVERTIBLE:
        raise CoronaError(f"tuple is not certified invertible (verdict {report.verdict.value})")
    Fs = tuple(Fs)

    def make(j):
        def Q(t):
            vals = [F.eval(t) for F in Fs]
            denom = sum(np.abs(v) ** 2 for v in vals)
            return np.conj(vals[j]) / denom

        return Q

    solvers = tuple(make(j) for j in range(len(Fs)))
    sol = BezoutSolution(Fs, solvers, report.delta, 0.0)
    t = STANDARD_SAMPLES if samples is None else np.asarray(samples, dtype=float)
    resid = float(np.max(np.abs(sol.combination(t) - 1)))
    return BezoutSolution(Fs, solvers, report.delta, resid)


def _chebyshev_reciprocal(a: float, b: float, tol: float, max_degree: int):
    for n in range(1, max_degree + 1):
        cheb = np.polynomial.Chebyshev.interpolate(lambda x: 1 / x, n, domain=[a, b])
        xs = np.linspace(a, b, 4001)
        if np.max(np.abs(cheb(xs) - 1 / xs)) <= tol:
            return cheb
    raise CoronaError(f"no Chebyshev degree ≤ {max_degree} reaches {tol:g} on [{a:g}, {b:g}]")


def bezout_polynomial(Fs: Sequence[TrigPoly], report: InvertibilityReport, tol: float = 1e-6,
                      max_degree: int = 40) -> list[TrigPoly]:
    """Trig-polynomial Q_j ≈ F̄_j · P(Σ|F_k|²), P a Chebyshev fit of 1/x.

    The fit lives on [δ²/n, (Σ‖F_k‖_W)²] and is accurate enough that
    |Σ Q_j F_j − 1| ≤ tol whenever Σ|F_k|² stays in that interval.
    """
    if report.verdict is not Invertibility.INVERTIBLE:
        raise CoronaError("tuple is not certified invertible")
    Fs = list(Fs)
    table = Fs[0].table
    S = TrigPoly.zero(table)
    for F in Fs:
        S = S + F * F.conj()
    a = report.certified_delta**2 / len(Fs)
    b = sum(F.wiener_norm() for F in Fs) ** 2
    cheb = _chebyshev_reciprocal(a, b, tol / b, max_degree)
    # Clenshaw recurrence in exact arithmetic on u = (2S - (a+b)) / (b-a)
    mid, half = Fraction(a + b) / 2, Fraction(b - a) / 2
    u = (S - TrigPoly.constant(mid, table)) * CRational(1 / half)
    coeffs = [Fraction(float(c)) for c in cheb.coef]
    b1 = TrigPoly.zero(table)
    b2 = TrigPoly.zero(table)
    for c in reversed(coeffs[1:]):
        b1, b2 = u * b1 * 2 - b2 + TrigPoly.constant(c, table), b1
    P = u * b1 - b2 + TrigPoly.constant(coeffs[0], table)
    return [F.conj() * P for F in Fs]


# --------------------------------------------------------------------------
# the maps g_s and f_s


def g_map(z: complex, s: int) -> tuple[complex, complex]:
    """Continuous right inverse of (z1, z2) ↦ z1^s + z2^s on 2D̄ minus the cut [-2, 0]."""
    if s < 1:
        raise ValueError("s must be a positive integer")
    z = complex(z)
    r = abs(z)
    if r > 2 * (1 + 1e-12):
        raise ValueError(f"|z| = {r} exceeds 2")
    if z.imag == 0 and z.real <= 0:
        raise ValueError("z lies on the cut (-∞, 0]")
    G1, G2 = g_map_array(np.array([z]), s)
    return complex(G1[0]), complex(G2[0])


def g_map_array(z: np.ndarray, s: int) -> tuple[np.ndarray, np.ndarray]:
    r = np.abs(z)
    theta = np.angle(z)
    a = np.arccos(np.clip(r / 2, -1.0, 1.0))
    return np.exp(1j * (a + theta) / s), np.exp(1j * (theta - a) / s)


def f_map(z1: complex, z2: complex, s: int) -> complex:
    if abs(abs(z1) - 1) > 1e-9 or abs(abs(z2) - 1) > 1e-9:
        raise ValueError("f_map inputs must lie on the unit circle")
    return complex(z1) ** s + complex(z2) ** s


# --------------------------------------------------------------------------
# example tuples


@dataclass(frozen=True)
class FundamentalExample:
    """f_j = z_{2j-1}^s + z_{2j}^s − 1 (j = 1..2N) and g = 1/4 − Σ_{j≤N} f_j f_{N+j} on T^{4N}."""

    N: int
    s: int
    f: tuple[LaurentPoly, ...]
    g: LaurentPoly

    @property
    def fs(self) -> tuple[LaurentPoly, ...]:
        return self.f[: self.N]

    def identity_holds(self) -> bool:
        acc = self.g
        for j in range(self.N):
            acc = acc + self.f[self.N + j] * self.f[j]
        return acc == LaurentPoly.constant(4 * self.N, Fraction(1, 4))


def example_fundamental(N: int, s: int) -> FundamentalExample:
    if N < 1 or s < 1:
        raise ValueError("N and s must be positive")
    dim = 4 * N
    f = tuple(
        LaurentPoly.variable(dim, 2 * j, s) + LaurentPoly.variable(dim, 2 * j + 1, s) - 1 for j in range(2 * N)
    )
    g = LaurentPoly.constant(dim, Fraction(1, 4))
    for j in range(N):
        g = g - f[j] * f[N + j]
    return FundamentalExample(N, s, f, g)


def _require_independent(lams: Sequence[Frequency]):
    b = extract_basis(list(lams))
    if b.dim != len(lams):
        raise FrequencyError("frequencies must be ℚ-linearly independent")


def example_general(lams: Sequence[Frequency]) -> list[TrigPoly]:
    """F_j(t) = e^{iλ_{2j-1}t} + e^{iλ_{2j}t} − 1 from 2N independent frequencies."""
    lams = list(lams)
    if not lams or len(lams) % 2:
        raise ValueError("need an even, positive number of frequencies")
    _require_independent(lams)
    table = lams[0].table
    return [TrigPoly.exp(lams[2 * j]) + TrigPoly.exp(lams[2 * j + 1]) - TrigPoly.constant(1, table)
            for j in range(len(lams) // 2)]


def example_tuple(lams: Sequence[Frequency]) -> tuple[list[TrigPoly], TrigPoly]:
    """(F_1, …, F_2N) and G = 1/4 − Σ_{j≤N} F_j F_{N+j} from 4N independent frequencies."""
    lams = list(lams)
    if not lams or len(lams) % 4:
        raise ValueError("need 4N frequencies")
    N = len(lams) // 4
    Fs = example_general(lams)
    table = lams[0].table
    G = TrigPoly.constant(Fraction(1, 4), table)
    for j in range(N):
        G = G - Fs[j] * Fs[N + j]
    return Fs, G


def fundamental_on_line(ex: FundamentalExample, lams: Sequence[Frequency]) -> tuple[list[TrigPoly], TrigPoly]:
    """Φ_Λ images of the torus example (z_n ↦ e^{iλ_n t})."""
    return [phi(f, lams) for f in ex.f], phi(ex.g, lams)


# --------------------------------------------------------------------------
# winding numbers


def _arg_increments(F, a: complex, b: complex, n: int, depth: int = 48):
    ts = np.linspace(0.0, 1.0, n + 1)
    pts = a + (b - a) * ts
    vals = F(pts)
    total = 0.0
    mags = np.abs(vals)
    lo, hi = float(mags.min()), float(mags.max())
    stack = [(pts[k], pts[k + 1], vals[k], vals[k + 1], 0) for k in range(n - 1, -1, -1)]
    while stack:
        p, q, fp, fq, d = stack.pop()
        if fp == 0 or fq == 0:
            raise WindingAmbiguous("map vanishes on the boundary")
        inc = float(np.angle(fq / fp))
        if abs(inc) > math.pi / 2:
            if d >= depth:
                raise WindingAmbiguous("argument increment unresolved near a boundary zero")
            m = (p + q) / 2
            fm = complex(F(np.array([m]))[0])
            lo, hi = min(lo, abs(fm)), max(hi, abs(fm))
            stack.append((m, q, fm, fq, d + 1))
            stack.append((p, m, fp, fm, d + 1))
            continue
        total += inc
    return total, lo, hi


def winding_number(F, vertices: Sequence[complex], samples: int = 512) -> int:
    """Degree of F around the closed polygon ``vertices`` (counterclockwise).

    ``F`` maps a complex array to a complex array.  Samples are spread by
    edge length; increments above π/2 are bisected adaptively.
    """
    v = list(vertices)
    lengths = [abs(v[(k + 1) % len(v)] - v[k]) for k in range(len(v))]
    perim = sum(lengths)
    if perim == 0:
        raise WindingAmbiguous("degenerate boundary")
    total = 0.0
    lo, hi = math.inf, 0.0
    for k in range(len(v)):
        n = max(2, round(samples * lengths[k] / perim))
        inc, elo, ehi = _arg_increments(F, v[k], v[(k + 1) % len(v)], n)
        total += inc
        lo, hi = min(lo, elo), max(hi, ehi)
    if lo < NEAR_ZERO_RATIO * hi:
        raise WindingAmbiguous(f"|F| drops to {lo:.3e} on the boundary (max {hi:.3e})")
    w = total / (2 * math.pi)
    if abs(w - round(w)) > 1e-6:
        raise WindingAmbiguous(f"non-integral winding {w}")
    return int(round(w))


def _clip(poly: list[complex], normal: complex, offset: float) -> list[complex]:
    """Part of a convex polygon with Re(conj(normal)·p) ≤ offset."""

    def side(p):
        return (normal.conjugate() * p).real - offset

    out = []
    for k in range(len(poly)):
        p, q = poly[k], poly[(k + 1) % len(poly)]
        sp, sq = side(p), side(q)
        if sp <= 0:
            out.append(p)
        if (sp < 0 < sq) or (sq < 0 < sp):
            out.append(p + (q - p) * (sp / (sp - sq)))
    return out


def locate_zero_by_winding(F, polygon: Sequence[complex], stop_diameter: float = 1e-10, max_retries: int = 5,
                           seed: int = 0) -> tuple[complex, int]:
    """Bisect a convex polygon region keeping a part with nonzero winding.

    Returns (approximate zero, winding number of the initial polygon).
    """
    rng = np.random.default_rng(seed)
    region = list(polygon)
    w_total = winding_number(F, region)
    if w_total == 0:
        raise WindingAmbiguous("zero winding on the initial boundary: no zero certified")
    w_region = w_total
    while True:
        xs = [p.real for p in region]
        ys = [p.imag for p in region]
        wx, wy = max(xs) - min(xs), max(ys) - min(ys)
        if max(wx, wy) < stop_diameter:
            break
        normal = 1 + 0j if wx >= wy else 1j
        lo, hi = (min(xs), max(xs)) if wx >= wy else (min(ys), max(ys))
        for attempt in range(max_retries + 1):
            jitter = 0.0137 if attempt == 0 else rng.uniform(-0.2, 0.2)
            cut = (lo + hi) / 2 + jitter * (hi - lo)
            left = _clip(region, normal, cut)
            right = _clip(region, -normal, -cut)
            try:
                wl = winding_number(F, left, samples=64) if len(left) >= 3 else 0
                wr = winding_number(F, right, samples=64) if len(right) >= 3 else 0
            except WindingAmbiguous:
                continue
            if wl + wr != w_region:
                continue
            break
        else:
            raise WindingAmbiguous(f"cut line kept hitting near-zeros after {max_retries} jittered retries")
        region, w_region = (left, wl) if wl != 0 else (right, wr)
    centre = complex(np.mean(region))
    return centre, w_total


# --------------------------------------------------------------------------
# zero witnesses for perturbed tuples


@dataclass(frozen=True)
class ZeroWitness:
    torus_point: tuple[float, ...]
    w: tuple[complex, ...]
    residual: float
    method: str
    boundary_winding: int | None = None
    line_t: float | None = None
    heuristic: bool = False

    def to_dict(self) -> dict:
        return {
            "torus_point": list(self.torus_point),
            "w": [[z.real, z.imag] for z in self.w],
            "residual": self.residual,
            "method": self.method,
            "boundary_winding": self.boundary_winding,
            "line_t": self.line_t,
            "heuristic": self.heuristic,
        }


def lift_to_torus(w: np.ndarray, s: int) -> np.ndarray:
    """Angles on T^{4N}: z_{2j-1}, z_{2j} = g_s(w_j + 1), z_{j+2N} = conj(z_j).

    ``w`` has trailing axis N; the result has trailing axis 4N.
    """
    w = np.asarray(w, dtype=complex)
    G1, G2 = g_map_array(w + 1, s)
    first = np.stack([np.angle(G1), np.angle(G2)], axis=-1).reshape(*w.shape[:-1], 2 * w.shape[-1])
    return np.mod(np.concatenate([first, -first], axis=-1), 2 * math.pi)


def _reduced_map(N: int, s: int, hs: Sequence[LaurentPoly]):
    """w ↦ (w_j + h_j(lift(w)) · (1/4 − Σ|w_k|²))_j, vectorised over leading axes."""

    def F(w):
        w = np.asarray(w, dtype=complex)
        theta = lift_to_torus(w, s)
        damp = 0.25 - np.sum(np.abs(w) ** 2, axis=-1)
        out = np.empty_like(w)
        for j in range(N):
            out[..., j] = w[..., j] + hs[j].eval_angles(theta) * damp
        return out

    return F


def witness_residual(ex: FundamentalExample, hs: Sequence[LaurentPoly], theta) -> float:
    """max_j |f_j + h_j g| at torus angles ``theta``, from the Laurent polynomials directly."""
    theta = np.asarray(theta, dtype=float)
    g = ex.g.eval_angles(theta)
    return float(max(abs(ex.f[j].eval_angles(theta) + hs[j].eval_angles(theta) * g) for j in range(ex.N)))


def reduction_zero_witness(N: int, s: int, hs: Sequence[LaurentPoly], tol: float = 1e-6, starts: int = 64,
                           seed: int = 0) -> ZeroWitness:
    """Common zero on T^{4N} of f_j + h_j g, found on the subtorus z_{j+2N} = z̄_j."""
    if N < 1:
        raise ValueError("N must be positive")
    hs = list(hs)
    if len(hs) != N or any(h.dim != 4 * N for h in hs):
        raise ValueError(f"need {N} perturbations on a {4 * N}-torus")
    ex = example_fundamental(N, s)
    Fmap = _reduced_map(N, s, hs)
    if N == 1:
        def F1(w):
            return Fmap(np.asarray(w)[..., None])[..., 0]

        circle = [0.5 * np.exp(2j * math.pi * k / 512) for k in range(512)]
        w0, deg = locate_zero_by_winding(F1, circle, seed=seed)
        if deg != 1:
            raise WindingAmbiguous(f"boundary winding is {deg}, expected 1")
        w = np.array([w0])
        theta = lift_to_torus(w, s)
        res = witness_residual(ex, hs, theta)
        if res > tol:
            raise WindingAmbiguous(f"subdivision converged to residual {res:.3e} > tol {tol:g}")
        return ZeroWitness(tuple(float(x) for x in theta), (complex(w0),), res, "WindingSubdivision", deg)

    rng = np.random.default_rng(seed)

    def to_w(x):
        w = x[:N] + 1j * x[N:]
        r = math.sqrt(float(np.sum(np.abs(w) ** 2)))
        return w * (0.5 / r) if r > 0.5 else w

    def sq(x):
        return float(np.sum(np.abs(Fmap(to_w(x))) ** 2))

    def system(x):
        v = Fmap(to_w(x))
        return np.concatenate([v.real, v.imag])

    for k in range(starts):
        d = rng.normal(size=2 * N)
        x0 = d / np.linalg.norm(d) * 0.5 * rng.uniform() ** (1 / (2 * N))
        nm = optimize.minimize(sq, x0, method="Nelder-Mead",
                               options={"xatol": 1e-12, "fatol": 1e-24, "maxiter": 4000 * N})
        x = nm.x
        polished = optimize.root(system, x, method="hybr")
        if polished.success and sq(polished.x) < sq(x):
            x = polished.x
        w = to_w(x)
        theta = lift_to_torus(w, s)
        res = witness_residual(ex, hs, theta)
        if res <= tol:
            return ZeroWitness(tuple(float(t) for t in theta), tuple(complex(z) for z in w), res,
                               "MultistartDescent", None, heuristic=True)
    raise DescentFailed(f"no start of {starts} reached residual ≤ {tol:g}")


# --------------------------------------------------------------------------
# approximation resistance


@dataclass(frozen=True)
class ResistanceReport:
    N: int
    difference_bounds: tuple[float, ...]
    threshold: float
    max_report: ExtremumReport
    certified_max: float
    holds: bool

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "difference_bounds": list(self.difference_bounds),
            "threshold": self.threshold,
            "certified_max": self.certified_max,
            "holds": self.holds,
            "max_report": self.max_report.to_dict(),
        }


def approximation_resistance_check(N: int, lams: Sequence[Frequency], Hs: Sequence[TrigPoly],
                                   grid: int | None = None, refinements: int | None = None) -> ResistanceReport:
    """With ‖F_j − H_j‖ < 1/(24N), bound |4F − 1| for F = Σ H_j F_{N+j} + G on the torus."""
    lams = list(lams)
    if len(lams) != 4 * N or len(Hs) != N:
        raise ValueError(f"need 4N = {4 * N} frequencies and N = {N} approximants")
    Fs, G = example_tuple(lams)
    threshold = 1 / (24 * N)
    bounds = []
    for j in range(N):
        diff = Fs[j] - Hs[j]
        b = torus_max_abs(transfer(diff).q, grid, refinements).certified_bound
        if not b < threshold:
            raise HypothesisViolated(f"‖F_{j + 1} − H_{j + 1}‖ ≤ {b:.6g} is not below 1/(24N) = {threshold:.6g}")
        bounds.append(b)
    F = G
    for j in range(N):
        F = F + Hs[j] * Fs[N + j]
    E = F * 4 - 1
    rep = torus_max_abs(transfer(E).q, grid, refinements)
    return ResistanceReport(N, tuple(bounds), threshold, rep, rep.certified_bound, rep.certified_bound <= 0.5)


# --------------------------------------------------------------------------
# stable ranks


INFINITE = "infinite"


def stable_rank_reference(N: int) -> dict:
    if N < 1:
        raise ValueError("N must be positive")
    half = N // 2 + 1
    inf = {"bsr": INFINITE, "tsr": INFINITE}
    return {
        "N": N,
        "polydisk_algebra": {"bsr": half, "tsr": N + 1},
        "torus_continuous": {"bsr": half, "tsr": half},
        "AP_Lambda1": {"bsr": half, "tsr": N + 1},
        "AP_Lambda2": {"bsr": half, "tsr": half},
        "AP": dict(inf),
        "AP_Lambda_infinite_dim": dict(inf),
        "AP_plus": dict(inf),
        "APW_plus": dict(inf),
    }
