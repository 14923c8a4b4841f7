"""JSON persistence for generator tables, named polynomials and settings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .freqmod import EPS_SIGN, NSPAN_BOUND, Frequency, FrequencyError, Generator, GeneratorTable, default_table, format_rational
from .torus import DEFAULT_REFINEMENTS
from .trigpoly import CRational, TrigPoly

VERSION = 1


class WorkspaceError(ValueError):
    pass


DEFAULT_SETTINGS = {
    "grid": None,
    "refinements": DEFAULT_REFINEMENTS,
    "K": NSPAN_BOUND,
    "eps_sign": EPS_SIGN,
    "tol": 1e-6,
    "sample_t_max": 1e3,
    "sample_count": 10**4,
}


def _check_settings(settings: dict):
    unknown = set(settings) - set(DEFAULT_SETTINGS)
    if unknown:
        raise WorkspaceError(f"unknown settings {sorted(unknown)}")
    g = settings["grid"]
    if g is not None and (not isinstance(g, int) or g < 8):
        raise WorkspaceError("grid must be null or an integer ≥ 8")
    for key in ("refinements", "K", "sample_count"):
        if not isinstance(settings[key], int) or settings[key] < 0:
            raise WorkspaceError(f"{key} must be a nonnegative integer")
    for key in ("eps_sign", "tol", "sample_t_max"):
        if not isinstance(settings[key], (int, float)) or not settings[key] > 0:
            raise WorkspaceError(f"{key} must be positive")


@dataclass
class Workspace:
    table: GeneratorTable = field(default_factory=default_table)
    named_polys: dict[str, TrigPoly] = field(default_factory=dict)
    settings: dict = field(default_factory=lambda: dict(DEFAULT_SETTINGS))

    def define(self, name: str, p: TrigPoly):
        if p.table != self.table:
            raise WorkspaceError("polynomial is over a different generator table")
        if name in self.table.names or name in ("e", "i"):
            raise WorkspaceError(f"name {name!r} is reserved")
        self.named_polys[name] = p

    def declare(self, name: str, value: str, independent: bool = True):
        """Append a generator; existing polynomials get a zero coordinate for it."""
        table = GeneratorTable(self.table.entries + (Generator(name, value, independent),))
        self.named_polys = {k: _retable(p, table) for k, p in self.named_polys.items()}
        self.table = table

    def to_json(self) -> dict:
        return {
            "version": VERSION,
            "generators": [
                {"name": g.name, "value": g.value, "independent": g.independent} for g in self.table.entries
            ],
            "polys": {name: poly_to_json(p) for name, p in sorted(self.named_polys.items())},
            "settings": dict(self.settings),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Workspace":
        if not isinstance(doc, dict) or doc.get("version") != VERSION:
            raise WorkspaceError(f"unsupported workspace version {doc.get('version') if isinstance(doc, dict) else None!r}")
        try:
            table = GeneratorTable(
                tuple(Generator(g["name"], g["value"], bool(g.get("independent", True))) for g in doc["generators"])
            )
            polys = {name: poly_from_json(t, table) for name, t in doc.get("polys", {}).items()}
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise WorkspaceError(f"corrupted workspace: {exc}") from None
        settings = dict(DEFAULT_SETTINGS)
        settings.update(doc.get("settings", {}))
        _check_settings(settings)
        return cls(table, polys, settings)


def _retable(p: TrigPoly, table: GeneratorTable) -> TrigPoly:
    pad = len(table) - len(p.table)
    return TrigPoly([(Frequency(lam.coords + (Fraction(0),) * pad, table), a) for lam, a in p.terms.items()], table)


def poly_to_json(p: TrigPoly) -> list:
    return [
        {"freq": [format_rational(c) for c in lam.coords], "re": format_rational(a.re), "im": format_rational(a.im)}
        for lam, a in p.terms.items()
    ]


def poly_from_json(terms: list, table: GeneratorTable) -> TrigPoly:
    out = []
    for t in terms:
        coords = tuple(Fraction(c) for c in t["freq"])
        if len(coords) != len(table):
            raise FrequencyError("term coordinate length does not match the generator table")
        out.append((Frequency(coords, table), CRational(Fraction(t["re"]), Fraction(t["im"]))))
    return TrigPoly(out, table)


def save_workspace(ws: Workspace, path) -> None:
    Path(path).write_text(json.dumps(ws.to_json(), sort_keys=True, indent=2) + "\n")


def load_workspace(path) -> Workspace:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise WorkspaceError(f"cannot read workspace {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise WorkspaceError(f"corrupted workspace {path}: {exc}") from None
    return Workspace.from_json(doc)
