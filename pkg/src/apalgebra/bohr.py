"""Fourier–Bohr coefficients, mean values and spectrum containment."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .freqmod import EPS_SIGN, NSPAN_BOUND, Frequency, SemigroupSpec, Verdict, membership
from .trigpoly import TrigPoly


class SpectrumVerdict(enum.Enum):
    YES = "Yes"
    NO = "No"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class MeanValueEstimate:
    lam: Frequency
    T: float
    value: complex
    error_bound: float


def fb_exact(p: TrigPoly, lam: Frequency) -> complex:
    """Mean of p(t)e^{-iλt}: by orthogonality of characters, the λ-coefficient."""
    return complex(p.coefficient(lam))


def fb_numeric(p: TrigPoly, lam: Frequency, T: float, eps: float = EPS_SIGN) -> MeanValueEstimate:
    """(1/2T)∫_{-T}^{T} p(t)e^{-iλt}dt in closed form, Σ a_j sinc((λ_j-λ)T).

    The error bound Σ_{λ_j≠λ} |a_j| / (|λ_j-λ| T) dominates the distance to
    the exact coefficient, since |sinc(x)| ≤ 1/|x|.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    value = 0j
    bound = 0.0
    for mu, a in p.terms.items():
        ac = complex(a)
        if mu == lam:
            value += ac
            continue
        gap = (mu - lam).shadow
        if abs(gap) < eps:
            raise ValueError(f"frequencies {mu} and {lam} are numerically indistinguishable (gap {gap:.3e})")
        x = gap * T
        value += ac * math.sin(x) / x
        bound += abs(ac) / (abs(gap) * T)
    return MeanValueEstimate(lam, float(T), value, bound)


def simpson_mean(sampler: Callable[[np.ndarray], np.ndarray], lam: float, T: float, max_freq: float) -> complex:
    """Composite Simpson mean of a black-box f(t)e^{-iλt} over [-T, T].

    Step ≤ 2π / (8 · max(|λ|, max_freq)), panel count rounded up to even.
    """
    wmax = max(abs(lam), abs(max_freq), 1e-12)
    h_max = 2 * math.pi / (8 * wmax)
    n = max(2, math.ceil(2 * T / h_max))
    n += n % 2
    t = np.linspace(-T, T, n + 1)
    y = np.asarray(sampler(t)) * np.exp(-1j * lam * t)
    h = 2 * T / n
    s = y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()
    return complex(s * h / 3 / (2 * T))


def spectrum_in(p: TrigPoly, spec: SemigroupSpec, K: int = NSPAN_BOUND, eps: float = EPS_SIGN) -> SpectrumVerdict:
    verdict = SpectrumVerdict.YES
    for lam in p.spectrum():
        v = membership(lam, spec, K=K, eps=eps)
        if v is Verdict.NON_MEMBER:
            return SpectrumVerdict.NO
        if v is Verdict.INCONCLUSIVE:
            verdict = SpectrumVerdict.INCONCLUSIVE
    return verdict
