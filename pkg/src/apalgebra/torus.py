"""Kronecker transfer of trig polynomials to Laurent polynomials on tori.

A trig polynomial whose spectrum spans a ℚ-space with basis Ω is rewritten
as q(z_1, …, z_M) with z_n = e^{i(ω_n/s)t}.  When the ω_n are independent the
orbit of t ↦ (z_n(t)) is dense in T^M, so inf/sup of |Q| over ℝ equal the
min/max of |q| over the torus.  The extremum search here is a uniform grid,
a coordinate-wise golden-section polish, and a Lipschitz certificate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .freqmod import Frequency, FrequencyBasis, FrequencyError, extract_basis, integer_solve
from .trigpoly import ONE, ZERO, CRational, TrigPoly

MAX_EVALUATIONS = 10**8
DEFAULT_REFINEMENTS = 40
_CHUNK = 1 << 15
_GOLDEN = (math.sqrt(5) - 1) / 2


class LaurentPoly:
    """Finite map exponent vector (length ``dim``) -> exact complex coefficient."""

    __slots__ = ("dim", "_terms", "_arrays")

    def __init__(self, dim: int, terms: Mapping[tuple, object] | Iterable[tuple[tuple, object]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[int, ...], CRational] = {}
        for k, a in items:
            k = tuple(int(e) for e in k)
            if len(k) != dim:
                raise ValueError(f"exponent {k} has length {len(k)}, expected {dim}")
            acc[k] = acc.get(k, ZERO) + CRational.of(a)
        self.dim = dim
        self._terms = MappingProxyType(dict(sorted((k, v) for k, v in acc.items() if v)))
        self._arrays = None

    @classmethod
    def constant(cls, dim: int, c) -> "LaurentPoly":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def variable(cls, dim: int, n: int, power: int = 1) -> "LaurentPoly":
        k = [0] * dim
        k[n] = power
        return cls(dim, {tuple(k): 1})

    @property
    def terms(self) -> Mapping[tuple[int, ...], CRational]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.dim != self.dim:
                raise ValueError(f"dimension mismatch {self.dim} vs {other.dim}")
            return other
        return LaurentPoly.constant(self.dim, other)

    def __add__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        return LaurentPoly(self.dim, list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.dim, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other) -> "LaurentPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LaurentPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            c = CRational.of(other)
            return LaurentPoly(self.dim, {k: v * c for k, v in self._terms.items()})
        other = self._coerce(other)
        out = [
            (tuple(x + y for x, y in zip(a, b)), u * v)
            for a, u in self._terms.items()
            for b, v in other._terms.items()
        ]
        return LaurentPoly(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("negative powers only for monomials")
            (k, a), = self._terms.items()
            return LaurentPoly(self.dim, {tuple(-e for e in k): ONE / a}) ** (-n)
        result = LaurentPoly.constant(self.dim, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.dim == other.dim and dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash((self.dim, tuple(self._terms.items())))

    def conj_on_torus(self) -> "LaurentPoly":
        """q̄ on T^M: conjugate coefficients and negate exponents."""
        return LaurentPoly(self.dim, {tuple(-e for e in k): v.conjugate() for k, v in self._terms.items()})

    def power_substitute(self, s: int) -> "LaurentPoly":
        """q(z_1^s, …, z_M^s)."""
        return LaurentPoly(self.dim, {tuple(s * e for e in k): v for k, v in self._terms.items()})

    def embed(self, dim: int, positions: Sequence[int]) -> "LaurentPoly":
        """Re-index variables: variable n goes to ``positions[n]`` of a ``dim``-torus."""
        out = {}
        for k, v in self._terms.items():
            e = [0] * dim
            for n, p in enumerate(positions):
                e[p] += k[n]
            out[tuple(e)] = v
        return LaurentPoly(dim, out)

    # numerics
    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if self._arrays is None:
            K = np.array(list(self._terms), dtype=np.int64).reshape(len(self._terms), self.dim)
            c = np.array([complex(v) for v in self._terms.values()], dtype=complex)
            self._arrays = (K, c)
        return self._arrays

    def eval_angles(self, theta) -> np.ndarray | complex:
        """Evaluate at z_n = e^{iθ_n}; ``theta`` has trailing axis of length dim."""
        K, c = self.arrays()
        th = np.asarray(theta, dtype=float)
        if th.shape[-1:] != (self.dim,) and not (self.dim == 0 and th.shape[-1:] == (0,)):
            raise ValueError(f"expected trailing axis {self.dim}, got shape {th.shape}")
        if c.size == 0:
            out = np.zeros(th.shape[:-1], dtype=complex)
        else:
            out = np.exp(1j * (th @ K.T)) @ c
        return complex(out) if np.ndim(out) == 0 else out

    def eval_points(self, z) -> np.ndarray | complex:
        """Evaluate at arbitrary nonzero complex points (trailing axis dim)."""
        K, c = self.arrays()
        zz = np.asarray(z, dtype=complex)
        if c.size == 0:
            out = np.zeros(zz.shape[:-1], dtype=complex)
        else:
            mon = np.prod(zz[..., None, :] ** K, axis=-1)
            out = mon @ c
        return complex(out) if np.ndim(out) == 0 else out

    def wiener_norm(self) -> float:
        return float(sum(abs(complex(v)) for v in self._terms.values()))

    def lipschitz(self) -> float:
        """Σ|a_k|·‖k‖₁, a Lipschitz constant of q in the angle variables."""
        K, c = self.arrays()
        if c.size == 0:
            return 0.0
        return float(np.sum(np.abs(c) * np.abs(K).sum(axis=1)))

    def render(self, var: str = "z") -> str:
        if not self._terms:
            return "0"
        parts = []
        for k, v in self._terms.items():
            mono = "*".join(
                f"{var}{n + 1}" if e == 1 else f"{var}{n + 1}^{e}" for n, e in enumerate(k) if e != 0
            )
            if not mono:
                parts.append(v.render())
            elif v == ONE:
                parts.append(mono)
            else:
                parts.append(f"{v.render()}*{mono}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self) -> str:
        return f"LaurentPoly[{self.dim}]({self.render()})"


# --------------------------------------------------------------------------
# transfer


@dataclass(frozen=True)
class TransferResult:
    q: LaurentPoly
    basis: FrequencyBasis | None
    scaled_freqs: tuple[Frequency, ...]
    qs: tuple[LaurentPoly, ...] = field(default=())


def _nonzero_unique(freqs: Iterable[Frequency]) -> list[Frequency]:
    seen = {}
    for lam in freqs:
        if not lam.is_zero() and lam not in seen:
            seen[lam] = None
    return list(seen)


def transfer_many(polys: Sequence[TrigPoly], prefix: Sequence[Frequency] = ()) -> TransferResult:
    """Joint transfer of several polynomials over one shared basis.

    ``prefix`` frequencies are offered to the greedy basis extraction before
    the spectra, which lets callers pin the basis (e.g. to the generators).
    """
    if not polys:
        raise ValueError("need at least one polynomial")
    table = polys[0].table
    for p in polys:
        if p.table != table:
            raise FrequencyError("polynomials over different generator tables")
    freqs = _nonzero_unique(list(prefix) + [lam for p in polys for lam in p.spectrum()])
    if not freqs:
        qs = tuple(LaurentPoly(0, {(): p.coefficient(table.zero())} if not p.is_zero() else {}) for p in polys)
        return TransferResult(qs[0], None, (), qs)
    basis = extract_basis(freqs)
    rewrite = {lam: r for lam, r in zip(basis.freqs, basis.rewrite)}
    M = basis.dim
    qs = []
    for p in polys:
        terms = {}
        for lam, a in p.terms.items():
            k = (0,) * M if lam.is_zero() else rewrite[lam]
            terms[k] = a
        qs.append(LaurentPoly(M, terms))
    return TransferResult(qs[0], basis, basis.scaled_omegas(), tuple(qs))


def transfer(p: TrigPoly, prefix: Sequence[Frequency] = ()) -> TransferResult:
    res = transfer_many([p], prefix)
    return res


def phi(q: LaurentPoly, freqs: Sequence[Frequency], table=None) -> TrigPoly:
    """Evaluation homomorphism: substitute z_n = e^{iλ_n t}, exactly."""
    if len(freqs) != q.dim:
        raise ValueError("need one frequency per torus variable")
    if table is None:
        if not freqs:
            raise ValueError("a generator table is required for 0-dimensional tori")
        table = freqs[0].table
    terms = []
    for k, a in q.terms.items():
        lam = table.zero()
        for e, w in zip(k, freqs):
            if e:
                lam = lam + w * e
        terms.append((lam, a))
    return TrigPoly(terms, table)


def back_substitute(res: TransferResult, table) -> list[TrigPoly]:
    qs = res.qs or (res.q,)
    return [phi(q, res.scaled_freqs, table) for q in qs]


def lattice_coordinates(p: TrigPoly, lambdas: Sequence[Frequency]) -> LaurentPoly:
    """Inverse of Φ_{Λ0} for p with spectrum in the ℤ-span Λ₂ of independent λ's.

    Exponents are the integer coordinates of each spectral frequency; the
    result lies in the polydisk algebra exactly when p's spectrum is in the
    ℕ-span Λ₁ (all exponents nonnegative).
    """
    b = extract_basis(list(lambdas))
    if b.dim != len(lambdas):
        raise FrequencyError("Λ0 must be ℚ-linearly independent")
    terms = {}
    for lam, a in p.terms.items():
        sol = integer_solve(list(lambdas), lam)
        if sol is None:
            raise FrequencyError(f"frequency {lam} is not in the integer span of Λ0")
        terms[tuple(sol[0])] = a
    return LaurentPoly(len(lambdas), terms)


def is_polydisk(q: LaurentPoly) -> bool:
    return all(e >= 0 for k in q.terms for e in k)


# --------------------------------------------------------------------------
# extrema


class ExtremumKind(enum.Enum):
    MIN = "Min"
    MAX = "Max"


@dataclass(frozen=True)
class ExtremumReport:
    kind: ExtremumKind
    objective: str
    value: float
    point: tuple[float, ...]
    certified_bound: float
    grid_density: int
    refinements: int

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "objective": self.objective,
            "value": self.value,
            "point": list(self.point),
            "certified_bound": self.certified_bound,
            "grid_density": self.grid_density,
            "refinements": self.refinements,
        }


def default_grid(dim: int) -> int:
    if dim <= 3:
        return 64
    if dim <= 6:
        return 16
    return 8


def _sumabs_on_grid(qs: Sequence[LaurentPoly], idx: np.ndarray, grid: int, roots: np.ndarray) -> np.ndarray:
    total = np.zeros(idx.shape[0])
    for q in qs:
        K, c = q.arrays()
        if c.size == 0:
            continue
        phase = (idx @ K.T) % grid
        total += np.abs(roots[phase] @ c)
    return total


def _sumabs_at(qs: Sequence[LaurentPoly], theta: np.ndarray) -> float:
    return float(sum(abs(q.eval_angles(theta)) for q in qs))


def _golden_line(f, a: float, b: float, tol: float = 1e-13, max_iter: int = 90):
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def _polish(obj, theta: np.ndarray, value: float, h: float, rounds: int):
    theta = theta.copy()
    for _ in range(rounds):
        start = value
        for n in range(theta.size):
            base = theta[n]

            def line(x, n=n):
                theta[n] = x
                return obj(theta)

            x, fx = _golden_line(line, base - h, base + h)
            if fx < value:
                theta[n], value = x, fx
            else:
                theta[n] = base
        if value >= start:
            break
    return theta, value


def _extremum(qs: Sequence[LaurentPoly], kind: ExtremumKind, grid: int | None, refinements: int | None, objective: str,
              max_evaluations: int = MAX_EVALUATIONS) -> ExtremumReport:
    if not qs:
        raise ValueError("empty objective")
    dim = qs[0].dim
    if any(q.dim != dim for q in qs):
        raise ValueError("all Laurent polynomials must share the torus dimension")
    refinements = DEFAULT_REFINEMENTS if refinements is None else refinements
    if dim == 0:
        v = float(sum(abs(q.eval_angles(np.zeros(0))) for q in qs))
        return ExtremumReport(kind, objective, v, (), v, grid or 0, refinements)
    grid = default_grid(dim) if grid is None else grid
    if grid < 8:
        raise ValueError("grid must be at least 8")
    if dim * math.log(grid) > math.log(max_evaluations):
        raise ValueError(f"grid blow-up: {grid}^{dim} evaluations exceed the cap {max_evaluations:.0e}")
    total = grid**dim
    roots = np.exp(2j * np.pi * np.arange(grid) / grid)
    sign = 1.0 if kind is ExtremumKind.MIN else -1.0
    best_val = math.inf
    best_flat = 0
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        idx = np.stack(np.unravel_index(flat, (grid,) * dim), axis=1)
        vals = sign * _sumabs_on_grid(qs, idx, grid, roots)
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val, best_flat = float(vals[j]), int(flat[j])
    grid_val = sign * best_val
    h = 2 * math.pi / grid
    theta0 = np.array(np.unravel_index(best_flat, (grid,) * dim), dtype=float) * h

    def obj(th):
        return sign * _sumabs_at(qs, th)

    theta, pval = _polish(obj, theta0, obj(theta0), h, refinements)
    theta = np.mod(theta, 2 * math.pi)
    value = _sumabs_at(qs, theta)
    L = sum(q.lipschitz() for q in qs)
    slack = L * h * math.sqrt(dim) / 2
    if kind is ExtremumKind.MIN:
        cert = min(grid_val - slack, value)
    else:
        cert = min(grid_val + slack, sum(q.wiener_norm() for q in qs))
        cert = max(cert, value)
    return ExtremumReport(kind, objective, value, tuple(float(x) for x in theta), cert, grid, refinements)


def torus_min_abs(q: LaurentPoly, grid: int | None = None, refinements: int | None = None) -> ExtremumReport:
    return _extremum([q], ExtremumKind.MIN, grid, refinements, "Abs")


def torus_max_abs(q: LaurentPoly, grid: int | None = None, refinements: int | None = None) -> ExtremumReport:
    return _extremum([q], ExtremumKind.MAX, grid, refinements, "Abs")


def torus_min_sumabs(qs: Sequence[LaurentPoly], grid: int | None = None, refinements: int | None = None) -> ExtremumReport:
    return _extremum(list(qs), ExtremumKind.MIN, grid, refinements, "SumAbs")


def torus_max_sumabs(qs: Sequence[LaurentPoly], grid: int | None = None, refinements: int | None = None) -> ExtremumReport:
    return _extremum(list(qs), ExtremumKind.MAX, grid, refinements, "SumAbs")


# --------------------------------------------------------------------------
# Kronecker density diagnostic


@dataclass(frozen=True)
class OrbitReport:
    dim: int
    count: int
    dt: float
    cells_per_axis: int
    occupied: int
    total_cells: int

    @property
    def occupied_fraction(self) -> float:
        return self.occupied / self.total_cells

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "count": self.count,
            "dt": self.dt,
            "cells_per_axis": self.cells_per_axis,
            "occupied": self.occupied,
            "total_cells": self.total_cells,
            "occupied_fraction": self.occupied_fraction,
        }


def kronecker_orbit_sample(freqs: Sequence[Frequency], count: int, dt: float, cells: int = 8) -> OrbitReport:
    """Cell occupancy of the orbit t ↦ (e^{iλ_n t}) sampled at t = k·dt."""
    freqs = list(freqs)
    if not freqs:
        raise ValueError("need at least one frequency")
    b = extract_basis(freqs)
    if b.dim != len(freqs):
        raise FrequencyError("frequencies are ℚ-linearly dependent; Kronecker's hypothesis fails")
    lam = np.array([f.shadow for f in freqs])
    dim = len(freqs)
    seen = np.zeros(cells**dim, dtype=bool)
    weights = cells ** np.arange(dim - 1, -1, -1)
    for start in range(0, count, 1 << 18):
        t = np.arange(start, min(start + (1 << 18), count), dtype=float) * dt
        ang = np.mod(np.multiply.outer(t, lam), 2 * math.pi)
        cell = np.minimum((ang / (2 * math.pi) * cells).astype(np.int64), cells - 1)
        seen[cell @ weights] = True
    return OrbitReport(dim, count, dt, cells, int(seen.sum()), cells**dim)
