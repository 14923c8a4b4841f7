"""Exact real frequencies as rational vectors over declared generators.

A frequency is never a bare float: it is a vector of :class:`fractions.Fraction`
coordinates over a :class:`GeneratorTable` of named real numbers whose
ℚ-linear independence is declared by the user.  Algebra (basis extraction,
lattice membership) runs on the exact coordinates; the float ``shadow`` is
only consulted for signs and numerical evaluation.
"""

from __future__ import annotations

import enum
import itertools
import math
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation, localcontext
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

EPS_SIGN = 1e-9
NSPAN_BOUND = 32
# NSpan search gives up (Inconclusive) beyond this many lattice candidates.
NSPAN_MAX_CANDIDATES = 2_000_000


class FrequencyError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    value: str
    independent: bool = True


@dataclass(frozen=True)
class GeneratorTable:
    """Ordered, named real generators of the frequency module."""

    entries: tuple[Generator, ...]

    def __post_init__(self):
        if not self.entries:
            raise FrequencyError("generator table needs at least one entry")
        names = [g.name for g in self.entries]
        if len(set(names)) != len(names):
            raise FrequencyError(f"duplicate generator names in {names}")
        for g in self.entries:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", g.name):
                raise FrequencyError(f"bad generator name {g.name!r}")
            try:
                d = Decimal(g.value)
            except InvalidOperation:
                raise FrequencyError(f"generator {g.name}: unparseable value {g.value!r}") from None
            if not d.is_finite():
                raise FrequencyError(f"generator {g.name}: value must be finite")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]], independent: bool = True) -> "GeneratorTable":
        return cls(tuple(Generator(n, str(v), independent) for n, v in pairs))

    def __len__(self) -> int:
        return len(self.entries)

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.entries)

    @cached_property
    def exact_values(self) -> tuple[Fraction, ...]:
        # Decimal strings convert to Fraction without rounding.
        return tuple(Fraction(Decimal(g.value)) for g in self.entries)

    @cached_property
    def floats(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.exact_values)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise FrequencyError(f"unknown generator {name!r}") from None

    def zero(self) -> "Frequency":
        return Frequency((Fraction(0),) * len(self), self)

    def gen(self, name: str) -> "Frequency":
        coords = [Fraction(0)] * len(self)
        coords[self.index(name)] = Fraction(1)
        return Frequency(tuple(coords), self)

    def gens(self) -> list["Frequency"]:
        return [self.gen(n) for n in self.names]


def _sqrt_string(n: int, digits: int = 40) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(n).sqrt())


def default_table(count: int = 8) -> GeneratorTable:
    """w1 = 1 and w2, w3, … = square roots of the primes; ℚ-independent."""
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31]
    if not 1 <= count <= len(primes) + 1:
        raise FrequencyError(f"default table supports 1..{len(primes) + 1} generators")
    pairs = [("w1", "1")] + [(f"w{k + 2}", _sqrt_string(p)) for k, p in enumerate(primes)]
    return GeneratorTable.from_pairs(pairs[:count])


@dataclass(frozen=True)
class Frequency:
    """λ = Σ coords[k]·generator[k], held exactly."""

    coords: tuple[Fraction, ...]
    table: GeneratorTable = field(compare=False, repr=False)

    def __post_init__(self):
        if len(self.coords) != len(self.table):
            raise FrequencyError("coordinate length does not match generator table")

    @cached_property
    def shadow(self) -> float:
        return float(sum((c * v for c, v in zip(self.coords, self.table.exact_values)), Fraction(0)))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def _check(self, other: "Frequency"):
        if other.table != self.table:
            raise FrequencyError("frequencies come from different generator tables")

    def __add__(self, other: "Frequency") -> "Frequency":
        self._check(other)
        return Frequency(tuple(a + b for a, b in zip(self.coords, other.coords)), self.table)

    def __sub__(self, other: "Frequency") -> "Frequency":
        self._check(other)
        return Frequency(tuple(a - b for a, b in zip(self.coords, other.coords)), self.table)

    def __neg__(self) -> "Frequency":
        return Frequency(tuple(-a for a in self.coords), self.table)

    def __mul__(self, k) -> "Frequency":
        k = Fraction(k)
        return Frequency(tuple(k * a for a in self.coords), self.table)

    __rmul__ = __mul__

    def __truediv__(self, k) -> "Frequency":
        k = Fraction(k)
        return Frequency(tuple(a / k for a in self.coords), self.table)

    def sort_key(self) -> tuple[Fraction, ...]:
        return self.coords

    def render(self) -> str:
        parts = []
        for c, name in zip(self.coords, self.table.names):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = name if mag == 1 else f"{format_rational(mag)}*{name}"
            parts.append((sign, body))
        if not parts:
            return "0"
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.render()


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# --------------------------------------------------------------------------
# parsing

_FREQ_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*]))")


def _tokenize_freq(text: str):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _FREQ_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FrequencyError(f"malformed frequency {text!r} at position {pos}")
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return toks


def freq_parse(text: str, table: GeneratorTable) -> Frequency:
    """Parse ``sterm (("+"|"-") sterm)*`` into an exact frequency.

    >>> t = GeneratorTable.from_pairs([("w1", "1"), ("w2", "1.41421356237")])
    >>> freq_parse("3/2*w1 - w2", t).coords
    (Fraction(3, 2), Fraction(-1, 1))
    """
    toks = _tokenize_freq(text)
    if not toks:
        raise FrequencyError("empty frequency")
    coords = [Fraction(0)] * len(table)
    i = 0
    sign = 1
    if toks[0][0] == "op" and toks[0][1] in "+-":
        sign = -1 if toks[0][1] == "-" else 1
        i = 1
    while True:
        if i >= len(toks):
            raise FrequencyError(f"malformed frequency {text!r}: dangling operator")
        kind, val, at = toks[i]
        if kind == "num":
            try:
                coef = Fraction(val)
            except ZeroDivisionError:
                raise FrequencyError(f"malformed rational {val!r}") from None
            i += 1
            if i < len(toks) and toks[i][1] == "*":
                i += 1
                if i >= len(toks) or toks[i][0] != "name":
                    raise FrequencyError(f"malformed frequency {text!r}: expected generator after '*'")
                coords[table.index(toks[i][1])] += sign * coef
                i += 1
            else:
                # bare rational: only meaningful as 0
                if coef != 0:
                    raise FrequencyError(f"bare nonzero rational {val!r} in frequency; write {val}*<generator>")
        elif kind == "name":
            coords[table.index(val)] += sign
            i += 1
        else:
            raise FrequencyError(f"malformed frequency {text!r} at position {at}")
        if i == len(toks):
            break
        kind, val, at = toks[i]
        if kind != "op" or val not in "+-":
            raise FrequencyError(f"malformed frequency {text!r} at position {at}")
        sign = -1 if val == "-" else 1
        i += 1
    return Frequency(tuple(coords), table)


# --------------------------------------------------------------------------
# exact linear algebra over ℚ


def _express(basis: Sequence[Sequence[Fraction]], v: Sequence[Fraction]):
    """Coefficients c with Σ c_k basis[k] = v, or None if v is outside the span."""
    k = len(basis)
    n = len(v)
    if k == 0:
        return [] if not any(v) else None
    # augmented n x (k+1) system, columns = basis vectors
    rows = [[basis[c][r] for c in range(k)] + [v[r]] for r in range(n)]
    piv_cols = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(rows[i][k] != 0 for i in range(r, n)):
        return None
    coeffs = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        coeffs[c] = rows[i][k]
    return coeffs


def rational_rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    rows = [list(v) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        p = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        for i in range(rank + 1, len(rows)):
            if rows[i][c] != 0:
                f = rows[i][c] / rows[rank][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class FrequencyBasis:
    """ℚ-basis Ω of a frequency list with scaling s and integer rewrites.

    ``rewrite[j]`` satisfies ``s * freqs[j] == Σ_n rewrite[j][n] * freqs[basis_indices[n]]``.
    """

    freqs: tuple[Frequency, ...]
    basis_indices: tuple[int, ...]
    s: int
    rewrite: tuple[tuple[int, ...], ...]

    @property
    def omegas(self) -> tuple[Frequency, ...]:
        return tuple(self.freqs[i] for i in self.basis_indices)

    @property
    def dim(self) -> int:
        return len(self.basis_indices)

    def scaled_omegas(self) -> tuple[Frequency, ...]:
        return tuple(w / self.s for w in self.omegas)

    def verify(self) -> bool:
        """Exact check of every rewrite identity and of full rank."""
        om = self.omegas
        if om and rational_rank([w.coords for w in om]) != len(om):
            return False
        for lam, r in zip(self.freqs, self.rewrite):
            lhs = [self.s * c for c in lam.coords]
            rhs = [sum((Fraction(rn) * w.coords[k] for rn, w in zip(r, om)), Fraction(0)) for k in range(len(lhs))]
            if lhs != rhs:
                return False
        return True


def extract_basis(freqs: Sequence[Frequency]) -> FrequencyBasis:
    """Greedy left-to-right ℚ-basis with lcm scaling.

    >>> t = default_table(2)
    >>> b = extract_basis([t.gen("w1"), t.gen("w2"), t.gen("w1") + t.gen("w2") / 2])
    >>> b.basis_indices, b.s, b.rewrite[2]
    ((0, 1), 2, (2, 1))
    """
    freqs = tuple(freqs)
    if not freqs:
        raise FrequencyError("extract_basis needs at least one frequency")
    basis_idx: list[int] = []
    basis_vecs: list[tuple[Fraction, ...]] = []
    # coefficients over the basis *as it stood* when each frequency was seen
    partial: list[list[Fraction]] = []
    for j, lam in enumerate(freqs):
        if lam.is_zero():
            partial.append([])
            continue
        c = _express(basis_vecs, lam.coords)
        if c is None:
            basis_idx.append(j)
            basis_vecs.append(lam.coords)
            c = [Fraction(0)] * (len(basis_vecs) - 1) + [Fraction(1)]
        partial.append(c)
    m = len(basis_idx)
    full = [c + [Fraction(0)] * (m - len(c)) for c in partial]
    s = 1
    for c in full:
        for x in c:
            s = math.lcm(s, x.denominator)
    rewrite = tuple(tuple(int(x * s) for x in c) for c in full)
    return FrequencyBasis(freqs, tuple(basis_idx), s, rewrite)


# --------------------------------------------------------------------------
# signs and semigroup membership


class Sign(enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    ZERO = "Zero"
    UNCERTAIN = "Uncertain"

    def __neg__(self) -> "Sign":
        return {Sign.POSITIVE: Sign.NEGATIVE, Sign.NEGATIVE: Sign.POSITIVE}.get(self, self)


def sign_of(lam: Frequency, eps: float = EPS_SIGN) -> Sign:
    if lam.is_zero():
        return Sign.ZERO
    v = lam.shadow
    if abs(v) < eps:
        return Sign.UNCERTAIN
    return Sign.POSITIVE if v > 0 else Sign.NEGATIVE


class SemigroupKind(enum.Enum):
    NSPAN = "NSpan"
    ZSPAN = "ZSpan"
    NONNEG_REALS = "NonNegReals"
    ALL_REALS = "AllReals"


@dataclass(frozen=True)
class SemigroupSpec:
    kind: SemigroupKind
    generators: tuple[Frequency, ...] = ()

    def __post_init__(self):
        if self.kind in (SemigroupKind.NSPAN, SemigroupKind.ZSPAN) and not self.generators:
            raise FrequencyError(f"{self.kind.value} needs at least one generator")

    @classmethod
    def nspan(cls, *gens: Frequency) -> "SemigroupSpec":
        return cls(SemigroupKind.NSPAN, tuple(gens))

    @classmethod
    def zspan(cls, *gens: Frequency) -> "SemigroupSpec":
        return cls(SemigroupKind.ZSPAN, tuple(gens))

    @classmethod
    def nonneg_reals(cls) -> "SemigroupSpec":
        return cls(SemigroupKind.NONNEG_REALS)

    @classmethod
    def all_reals(cls) -> "SemigroupSpec":
        return cls(SemigroupKind.ALL_REALS)


class Verdict(enum.Enum):
    MEMBER = "Member"
    NON_MEMBER = "NonMember"
    INCONCLUSIVE = "Inconclusive"


def _column_hnf(A: list[list[int]]):
    """Column-style Hermite reduction: returns (H, U) with A·U = H.

    H is in column echelon form (pivot rows strictly increasing, entries to
    the right of a pivot zero); U is unimodular.  Zero columns of H sit at the
    end, and the matching columns of U span the integer kernel of A.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    H = [row[:] for row in A]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(dst, src, k):  # col[dst] -= k * col[src]
        for row in H:
            row[dst] -= k * row[src]
        for row in U:
            row[dst] -= k * row[src]

    def swap(a, b):
        for row in H:
            row[a], row[b] = row[b], row[a]
        for row in U:
            row[a], row[b] = row[b], row[a]

    def negate(a):
        for row in H:
            row[a] = -row[a]
        for row in U:
            row[a] = -row[a]

    col = 0
    pivots = []
    for r in range(m):
        if col >= n:
            break
        # Euclid across columns col..n-1 on row r
        while True:
            nz = [c for c in range(col, n) if H[r][c] != 0]
            if not nz:
                break
            cmin = min(nz, key=lambda c: abs(H[r][c]))
            if cmin != col:
                swap(col, cmin)
            done = True
            for c in range(col + 1, n):
                if H[r][c] != 0:
                    colop(c, col, H[r][c] // H[r][col])
                    if H[r][c] != 0:
                        done = False
            if done:
                break
        if H[r][col] == 0:
            continue
        if H[r][col] < 0:
            negate(col)
        # reduce entries left of the pivot into [0, pivot)
        for c in range(col):
            colop(c, col, H[r][c] // H[r][col])
        pivots.append((r, col))
        col += 1
    return H, U, pivots


def integer_solve(gens: Sequence[Frequency], lam: Frequency):
    """Solve Σ x_k gens[k] = lam over ℤ.

    Returns ``(x0, kernel)`` with a particular integer solution and a basis
    of the integer kernel, or ``None`` when no integer solution exists.
    """
    k = len(gens)
    g = len(lam.coords)
    den = 1
    for f in list(gens) + [lam]:
        for c in f.coords:
            den = math.lcm(den, c.denominator)
    A = [[int(gens[c].coords[r] * den) for c in range(k)] for r in range(g)]
    b = [int(lam.coords[r] * den) for r in range(g)]
    H, U, pivots = _column_hnf(A)
    # forward substitution H y = b
    y = [0] * k
    resid = b[:]
    pivot_rows = {r: c for r, c in pivots}
    for r in range(g):
        if r in pivot_rows:
            c = pivot_rows[r]
            q, rem = divmod(resid[r], H[r][c])
            if rem != 0:
                return None
            y[c] = q
            for rr in range(g):
                resid[rr] -= q * H[rr][c]
        elif resid[r] != 0:
            return None
    if any(resid):
        return None
    x0 = [sum(U[i][c] * y[c] for c in range(k)) for i in range(k)]
    rank = len(pivots)
    kernel = [[U[i][c] for i in range(k)] for c in range(rank, k)]
    return x0, kernel


def membership(lam: Frequency, spec: SemigroupSpec, K: int = NSPAN_BOUND, eps: float = EPS_SIGN) -> Verdict:
    kind = spec.kind
    if kind is SemigroupKind.ALL_REALS:
        return Verdict.MEMBER
    if kind is SemigroupKind.NONNEG_REALS:
        sg = sign_of(lam, eps)
        if sg in (Sign.POSITIVE, Sign.ZERO):
            return Verdict.MEMBER
        return Verdict.NON_MEMBER if sg is Sign.NEGATIVE else Verdict.INCONCLUSIVE
    for gen in spec.generators:
        lam._check(gen)
    sol = integer_solve(spec.generators, lam)
    if sol is None:
        return Verdict.NON_MEMBER
    if kind is SemigroupKind.ZSPAN:
        return Verdict.MEMBER
    x0, kernel = sol
    if all(x >= 0 for x in x0):
        return Verdict.MEMBER
    if not kernel:
        return Verdict.NON_MEMBER
    if (2 * K + 1) ** len(kernel) > NSPAN_MAX_CANDIDATES:
        return Verdict.INCONCLUSIVE
    for ys in itertools.product(range(-K, K + 1), repeat=len(kernel)):
        x = [x0[i] + sum(y * v[i] for y, v in zip(ys, kernel)) for i in range(len(x0))]
        if all(xi >= 0 for xi in x):
            return Verdict.MEMBER
    return Verdict.INCONCLUSIVE
