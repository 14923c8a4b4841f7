"""The analytic trace AP⁺: spectra in [0, ∞) and holomorphic extension to ℂ⁺."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bohr import MeanValueEstimate, SpectrumVerdict, fb_numeric
from .freqmod import EPS_SIGN, Frequency, Sign, sign_of
from .trigpoly import TrigPoly


class NotAPPlus(ValueError):
    pass


@dataclass(frozen=True)
class HalfPlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError("half-plane points need y > 0")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


def is_ap_plus(p: TrigPoly, eps: float = EPS_SIGN) -> SpectrumVerdict:
    verdict = SpectrumVerdict.YES
    for lam in p.spectrum():
        sg = sign_of(lam, eps)
        if sg is Sign.NEGATIVE:
            return SpectrumVerdict.NO
        if sg is Sign.UNCERTAIN:
            verdict = SpectrumVerdict.INCONCLUSIVE
    return verdict


def extend(p: TrigPoly, z: HalfPlanePoint) -> complex:
    """Σ a_j e^{iλ_j z} = Σ a_j e^{-λ_j y} e^{iλ_j x}, the bounded holomorphic extension."""
    if is_ap_plus(p) is not SpectrumVerdict.YES:
        raise NotAPPlus("extension needs a spectrum in [0, ∞)")
    lam, a = p.arrays()
    return complex(np.sum(a * np.exp(1j * lam * z.z)))


def poisson_integral(p: TrigPoly, z: HalfPlanePoint, reach: float = 1e3, panels: int = 10**5) -> complex:
    """∫ P_y(x−t) p(t) dt over |t − x| ≤ reach/y by composite Simpson.

    Independent of :func:`extend`; used to check the boundary/extension identity.
    """
    x, y = z.x, z.y
    R = reach / y
    n = panels + panels % 2
    t = np.linspace(x - R, x + R, n + 1)
    kernel = y / (math.pi * ((x - t) ** 2 + y**2))
    f = kernel * p.eval(t)
    h = 2 * R / n
    return complex(h / 3 * (f[0] + f[-1] + 4 * f[1:-1:2].sum() + 2 * f[2:-1:2].sum()))


def negative_spectrum_decay(p: TrigPoly, lam: Frequency, Ts: Sequence[float]) -> list[MeanValueEstimate]:
    """Mean values of p(t)e^{-iλt} for λ < 0; each is O(1/T) and the limit is 0."""
    if is_ap_plus(p) is not SpectrumVerdict.YES:
        raise NotAPPlus("decay check needs an AP⁺ polynomial")
    if sign_of(lam) is not Sign.NEGATIVE:
        raise ValueError("λ must be negative")
    return [fb_numeric(p, lam, T) for T in Ts]
