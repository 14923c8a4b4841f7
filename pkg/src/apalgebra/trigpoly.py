"""Generalized trigonometric polynomials Q(t) = Σ a_j e^{iλ_j t} with exact spectra."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .freqmod import Frequency, FrequencyError, GeneratorTable, format_rational


@dataclass(frozen=True, slots=True)
class CRational:
    """Exact complex number re + im·i with rational parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, x) -> "CRational":
        if isinstance(x, CRational):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(Fraction(x), Fraction(0))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __add__(self, o) -> "CRational":
        o = CRational.of(o)
        return CRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o) -> "CRational":
        o = CRational.of(o)
        return CRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, o) -> "CRational":
        return CRational.of(o) - self

    def __neg__(self) -> "CRational":
        return CRational(-self.re, -self.im)

    def __mul__(self, o) -> "CRational":
        o = CRational.of(o)
        return CRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o) -> "CRational":
        o = CRational.of(o)
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("division by exact zero")
        return self * o.conjugate() * CRational(1 / d)

    def conjugate(self) -> "CRational":
        return CRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return abs(complex(self))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __eq__(self, o) -> bool:
        if isinstance(o, (int, Fraction, float, complex)):
            o = CRational.of(o)
        if not isinstance(o, CRational):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def render(self) -> str:
        if self.im == 0:
            return format_rational(self.re)
        sign = "-" if self.im < 0 else "+"
        return f"({format_rational(self.re)}{sign}{format_rational(abs(self.im))}i)"

    def __repr__(self) -> str:
        return f"CRational({self.render()})"


ZERO = CRational(Fraction(0))
ONE = CRational(Fraction(1))


class TrigPoly:
    """Immutable finite sum Σ a_λ e^{iλt}; zero coefficients are never stored."""

    __slots__ = ("_terms", "table", "_hash")

    def __init__(self, terms: Mapping[Frequency, object] | Iterable[tuple[Frequency, object]], table: GeneratorTable):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Frequency, CRational] = {}
        for lam, a in items:
            if lam.table != table:
                raise FrequencyError("term frequency from a different generator table")
            a = CRational.of(a)
            acc[lam] = acc.get(lam, ZERO) + a
        ordered = sorted(((k, v) for k, v in acc.items() if v), key=lambda kv: kv[0].sort_key())
        self._terms = MappingProxyType(dict(ordered))
        self.table = table
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, table: GeneratorTable) -> "TrigPoly":
        return cls({}, table)

    @classmethod
    def constant(cls, c, table: GeneratorTable) -> "TrigPoly":
        return cls({table.zero(): c}, table)

    @classmethod
    def exp(cls, lam: Frequency, c=1) -> "TrigPoly":
        return cls({lam: c}, lam.table)

    @property
    def terms(self) -> Mapping[Frequency, CRational]:
        return self._terms

    def spectrum(self) -> tuple[Frequency, ...]:
        return tuple(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, lam: Frequency) -> CRational:
        return self._terms.get(lam, ZERO)

    def _coerce(self, other) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            if other.table != self.table:
                raise FrequencyError("trig polynomials over different generator tables")
            return other
        return TrigPoly.constant(other, self.table)

    def __add__(self, other) -> "TrigPoly":
        other = self._coerce(other)
        return TrigPoly(list(self._terms.items()) + list(other._terms.items()), self.table)

    __radd__ = __add__

    def __neg__(self) -> "TrigPoly":
        return TrigPoly({k: -v for k, v in self._terms.items()}, self.table)

    def __sub__(self, other) -> "TrigPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TrigPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "TrigPoly":
        if not isinstance(other, TrigPoly):
            c = CRational.of(other)
            return TrigPoly({k: v * c for k, v in self._terms.items()}, self.table)
        other = self._coerce(other)
        out = [(a + b, x * y) for a, x in self._terms.items() for b, y in other._terms.items()]
        return TrigPoly(out, self.table)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TrigPoly":
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("negative powers only for single-term polynomials")
            (lam, a), = self._terms.items()
            base = TrigPoly({-lam: ONE / a}, self.table)
            return base ** (-n)
        result = TrigPoly.constant(1, self.table)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> "TrigPoly":
        return TrigPoly({-k: v.conjugate() for k, v in self._terms.items()}, self.table)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self.table == other.table and dict(self._terms) == dict(other._terms)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    # numerics
    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        lam = np.array([k.shadow for k in self._terms], dtype=float)
        a = np.array([complex(v) for v in self._terms.values()], dtype=complex)
        return lam, a

    def eval(self, t):
        """Evaluate at real t (scalar or array) using the generator shadows."""
        lam, a = self.arrays()
        tt = np.asarray(t, dtype=float)
        if lam.size == 0:
            out = np.zeros(tt.shape, dtype=complex)
        else:
            out = np.exp(1j * np.multiply.outer(tt, lam)) @ a
        return complex(out) if np.ndim(out) == 0 else out

    __call__ = eval

    def wiener_norm(self) -> float:
        """Σ|a_j|; dominates sup_t |Q(t)|."""
        return float(sum(abs(complex(v)) for v in self._terms.values()))

    def render(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for lam, a in self._terms.items():
            coef = a.render()
            if lam.is_zero():
                parts.append(coef)
            elif a == ONE:
                parts.append(f"e({lam.render()})")
            else:
                parts.append(f"{coef}*e({lam.render()})")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") and not p.startswith("-(") else f" + {p}"
        return out

    def __repr__(self) -> str:
        return f"TrigPoly({self.render()})"

    __str__ = render


def spectrum_sum_set(*polys: TrigPoly) -> set[tuple]:
    """Coordinates of [[X]] = {a + b : a, b ∈ X} for X the union of spectra."""
    X = [lam for p in polys for lam in p.spectrum()]
    return {(a + b).coords for a in X for b in X}
