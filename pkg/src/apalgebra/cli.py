"""Command-line interface: ``apalgebra <command> [options]``.

Every command prints a report; with ``--json`` the report is key-sorted JSON.
Exit status is 0 on success, 1 on domain errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import aplus, bohr, corona, freqmod, torus
from .expr import ParseError, parse_expr, parse_laurent
from .freqmod import Generator, GeneratorTable, SemigroupSpec, freq_parse
from .trigpoly import TrigPoly
from .workspace import Workspace, WorkspaceError, load_workspace, save_workspace

DOMAIN_ERRORS = (ValueError, ArithmeticError)


def _complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _freq_json(lam) -> dict:
    return {"freq": lam.render(), "shadow": lam.shadow}


def _emit(obj, as_json: bool, out=sys.stdout):
    if as_json:
        out.write(json.dumps(obj, sort_keys=True) + "\n")
        return
    _human(obj, out, 0)


def _human(obj, out, indent):
    pad = "  " * indent
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in (v.values() if isinstance(v, dict) else v)):
                out.write(f"{pad}{k}:\n")
                _human(v, out, indent + 1)
            else:
                out.write(f"{pad}{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}\n")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                out.write(f"{pad}-\n")
                _human(v, out, indent + 1)
            else:
                out.write(f"{pad}- {v}\n")
    else:
        out.write(f"{pad}{obj}\n")


# --------------------------------------------------------------------------
# commands


class Context:
    def __init__(self, args):
        self.args = args
        self.path = Path(args.ws) if getattr(args, "ws", None) else None
        self.ws = load_workspace(self.path) if self.path and self.path.exists() else Workspace()
        s = self.ws.settings
        self.grid = args.grid if args.grid is not None else s["grid"]
        self.refine = args.refine if args.refine is not None else s["refinements"]
        self.tol = args.tol if args.tol is not None else s["tol"]

    def poly(self, text: str) -> TrigPoly:
        return parse_expr(text, self.ws.table, self.ws.named_polys)

    def freq(self, text: str):
        return freq_parse(text, self.ws.table)

    def save(self):
        if self.path is None:
            raise WorkspaceError("this command needs --ws <path>")
        save_workspace(self.ws, self.path)


def cmd_declare(ctx: Context):
    if ctx.path is None:
        raise WorkspaceError("declare needs --ws <path>")
    pairs = []
    for item in ctx.args.generators:
        if "=" not in item:
            raise WorkspaceError(f"expected NAME=VALUE, got {item!r}")
        name, value = item.split("=", 1)
        pairs.append(Generator(name.strip(), value.strip(), not ctx.args.dependent))
    if not ctx.path.exists():
        ctx.ws = Workspace(table=GeneratorTable(tuple(pairs)))
    else:
        for g in pairs:
            ctx.ws.declare(g.name, g.value, g.independent)
    ctx.save()
    return {"generators": [{"name": g.name, "value": g.value, "independent": g.independent} for g in ctx.ws.table.entries]}


def cmd_def(ctx: Context):
    p = ctx.poly(ctx.args.expr)
    ctx.ws.define(ctx.args.name, p)
    ctx.save()
    return {"name": ctx.args.name, "poly": p.render()}


def cmd_spectrum(ctx: Context):
    p = ctx.poly(ctx.args.expr)
    return {
        "poly": p.render(),
        "spectrum": [_freq_json(lam) for lam in p.spectrum()],
        "size": len(p),
        "wiener_norm": p.wiener_norm(),
    }


def cmd_fb(ctx: Context):
    p = ctx.poly(ctx.args.expr)
    lam = ctx.freq(ctx.args.freq)
    out = {"freq": lam.render(), "exact": _complex(bohr.fb_exact(p, lam))}
    if ctx.args.T is not None:
        est = bohr.fb_numeric(p, lam, ctx.args.T, ctx.ws.settings["eps_sign"])
        out["numeric"] = {"T": est.T, "value": _complex(est.value), "error_bound": est.error_bound}
    return out


def cmd_basis(ctx: Context):
    freqs = [ctx.freq(f) for f in ctx.args.freqs]
    b = freqmod.extract_basis(freqs)
    return {
        "basis_indices": list(b.basis_indices),
        "basis": [w.render() for w in b.omegas],
        "s": b.s,
        "rewrite": [list(r) for r in b.rewrite],
        "verified": b.verify(),
    }


def _transfer_json(res: torus.TransferResult) -> dict:
    return {
        "q": [q.render() for q in (res.qs or (res.q,))],
        "dim": res.q.dim,
        "s": res.basis.s if res.basis else 1,
        "scaled_freqs": [w.render() for w in res.scaled_freqs],
    }


def cmd_transfer(ctx: Context):
    polys = [ctx.poly(e) for e in ctx.args.exprs]
    prefix = [ctx.freq(f) for f in ctx.args.prefix or []]
    res = torus.transfer_many(polys, prefix)
    out = _transfer_json(res)
    out["round_trip"] = torus.back_substitute(res, ctx.ws.table) == polys
    return out


def cmd_inf(ctx: Context):
    q = torus.transfer(ctx.poly(ctx.args.expr)).q
    rep = torus.torus_min_abs(q, ctx.grid, ctx.refine)
    out = rep.to_dict()
    out["certified"] = rep.certified_bound > 0
    return out


def cmd_sup(ctx: Context):
    q = torus.transfer(ctx.poly(ctx.args.expr)).q
    rep = torus.torus_max_abs(q, ctx.grid, ctx.refine)
    out = rep.to_dict()
    out["certified"] = rep.certified_bound - rep.value <= ctx.tol
    return out


def cmd_invertible(ctx: Context):
    return corona.invertible(ctx.poly(ctx.args.expr), ctx.grid, ctx.refine).to_dict()


def cmd_unimodular(ctx: Context):
    Fs = [ctx.poly(e) for e in ctx.args.exprs]
    Xs = [ctx.poly(e) for e in ctx.args.bezout] if ctx.args.bezout else None
    return corona.unimodular(Fs, ctx.grid, ctx.refine, Xs).to_dict()


def cmd_bezout_check(ctx: Context):
    Fs = [ctx.poly(e) for e in ctx.args.exprs]
    rep = corona.unimodular(Fs, ctx.grid, ctx.refine)
    s = ctx.ws.settings
    samples = np.linspace(0.0, s["sample_t_max"], s["sample_count"])
    sol = corona.bezout(Fs, rep, samples)
    return {"report": rep.to_dict(), "residual_bound": sol.residual_bound, "samples": len(samples)}


def cmd_member(ctx: Context):
    lam = ctx.freq(ctx.args.freq)
    kind = ctx.args.kind
    gens = [ctx.freq(g) for g in ctx.args.gens or []]
    spec = {
        "nspan": lambda: SemigroupSpec.nspan(*gens),
        "zspan": lambda: SemigroupSpec.zspan(*gens),
        "nonneg": SemigroupSpec.nonneg_reals,
        "all": SemigroupSpec.all_reals,
    }[kind]()
    s = ctx.ws.settings
    v = freqmod.membership(lam, spec, K=s["K"], eps=s["eps_sign"])
    return {"freq": lam.render(), "kind": spec.kind.value, "verdict": v.value}


def cmd_aplus_check(ctx: Context):
    p = ctx.poly(ctx.args.expr)
    return {"poly": p.render(), "verdict": aplus.is_ap_plus(p, ctx.ws.settings["eps_sign"]).value}


def cmd_extend(ctx: Context):
    p = ctx.poly(ctx.args.expr)
    z = aplus.HalfPlanePoint(ctx.args.x, ctx.args.y)
    out = {"x": z.x, "y": z.y, "value": _complex(aplus.extend(p, z))}
    if ctx.args.poisson:
        out["poisson"] = _complex(aplus.poisson_integral(p, z))
    return out


def cmd_decay(ctx: Context):
    p = ctx.poly(ctx.args.expr)
    lam = ctx.freq(ctx.args.freq)
    ests = aplus.negative_spectrum_decay(p, lam, ctx.args.T)
    return {
        "freq": lam.render(),
        "estimates": [{"T": e.T, "value": _complex(e.value), "error_bound": e.error_bound} for e in ests],
    }


def cmd_example(ctx: Context):
    if ctx.args.which == "fundamental":
        ex = corona.example_fundamental(ctx.args.n, ctx.args.s)
        return {
            "N": ex.N,
            "s": ex.s,
            "f": [f.render() for f in ex.f],
            "g": ex.g.render(),
            "g_terms": len(ex.g),
            "identity_holds": ex.identity_holds(),
        }
    freqs = [ctx.freq(f) for f in ctx.args.freqs] if ctx.args.freqs else ctx.ws.table.gens()[: 2 * ctx.args.n]
    Fs = corona.example_general(freqs)
    return {"F": [F.render() for F in Fs], "wiener_norms": [F.wiener_norm() for F in Fs]}


def cmd_witness(ctx: Context):
    N = ctx.args.n
    hs_text = ctx.args.h or ["0"] * N
    if len(hs_text) == 1 and N > 1:
        hs_text = hs_text * N
    if len(hs_text) != N:
        raise WorkspaceError(f"need 1 or {N} --h expressions")
    hs = [parse_laurent(h, 4 * N) for h in hs_text]
    w = corona.reduction_zero_witness(N, ctx.args.s, hs, ctx.tol)
    out = w.to_dict()
    out["tol"] = ctx.tol
    return out


def cmd_resist(ctx: Context):
    N = ctx.args.n
    gens = ctx.ws.table.gens()
    if len(gens) < 4 * N:
        raise WorkspaceError(f"resist needs {4 * N} generators in the table")
    lams = gens[: 4 * N]
    Fs = corona.example_general(lams)
    c = Fraction(ctx.args.c) if ctx.args.c is not None else Fraction(1, 48 * N)
    Hs = [F + TrigPoly.constant(c, ctx.ws.table) for F in Fs[:N]]
    return corona.approximation_resistance_check(N, lams, Hs, ctx.grid, ctx.refine).to_dict()


def cmd_ranks(ctx: Context):
    return corona.stable_rank_reference(ctx.args.n)


def cmd_orbit(ctx: Context):
    freqs = [ctx.freq(f) for f in ctx.args.freqs]
    return torus.kronecker_orbit_sample(freqs, ctx.args.count, ctx.args.dt).to_dict()


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ws", help="workspace JSON file")
    common.add_argument("--grid", type=int, help="grid points per torus dimension")
    common.add_argument("--refine", type=int, help="coordinate-descent polish rounds")
    common.add_argument("--tol", type=float, help="zero tolerance")
    common.add_argument("--json", action="store_true", help="print JSON")

    parser = argparse.ArgumentParser(prog="apalgebra", description="Exact computations with almost periodic trig polynomials.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        return p

    p = add("declare", cmd_declare, "declare generators NAME=VALUE")
    p.add_argument("generators", nargs="+")
    p.add_argument("--dependent", action="store_true", help="do not claim ℚ-independence")
    p = add("def", cmd_def, "define a named polynomial")
    p.add_argument("name")
    p.add_argument("expr")
    add("spectrum", cmd_spectrum, "Bohr spectrum").add_argument("expr")
    p = add("fb", cmd_fb, "Fourier–Bohr coefficient")
    p.add_argument("expr")
    p.add_argument("--freq", required=True)
    p.add_argument("--T", type=float)
    add("basis", cmd_basis, "ℚ-basis and rewrite").add_argument("freqs", nargs="+")
    p = add("transfer", cmd_transfer, "Laurent polynomial on a torus")
    p.add_argument("exprs", nargs="+")
    p.add_argument("--prefix", nargs="*", help="frequencies offered to the basis first")
    add("inf", cmd_inf, "inf over ℝ of |p|").add_argument("expr")
    add("sup", cmd_sup, "sup over ℝ of |p|").add_argument("expr")
    add("invertible", cmd_invertible, "invertibility in AP").add_argument("expr")
    p = add("unimodular", cmd_unimodular, "unimodularity of a tuple")
    p.add_argument("exprs", nargs="+")
    p.add_argument("--bezout", nargs="+", help="exact coefficients X_j with Σ X_j F_j constant")
    add("bezout-check", cmd_bezout_check, "explicit Bézout solvers").add_argument("exprs", nargs="+")
    p = add("member", cmd_member, "semigroup membership of a frequency")
    p.add_argument("freq")
    p.add_argument("--kind", choices=["nspan", "zspan", "nonneg", "all"], required=True)
    p.add_argument("--gens", nargs="*")
    add("aplus-check", cmd_aplus_check, "AP⁺ membership").add_argument("expr")
    p = add("extend", cmd_extend, "holomorphic extension to the upper half-plane")
    p.add_argument("expr")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--poisson", action="store_true", help="also run the Poisson quadrature")
    p = add("decay", cmd_decay, "decay of negative Fourier–Bohr coefficients")
    p.add_argument("expr")
    p.add_argument("--freq", required=True)
    p.add_argument("--T", type=float, nargs="+", default=[1e2, 1e3, 1e4])
    p = add("example", cmd_example, "example tuples")
    p.add_argument("which", choices=["fundamental", "general"])
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--freqs", nargs="*")
    p = add("witness", cmd_witness, "common-zero witness for f_j + h_j g")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--h", nargs="*", help="Laurent perturbations in z1..z4N")
    p = add("resist", cmd_resist, "approximation-resistance check with H_j = F_j + c")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--c", help="rational offset (default 1/(48N))")
    add("ranks", cmd_ranks, "stable-rank reference values").add_argument("--n", type=int, required=True)
    p = add("orbit", cmd_orbit, "Kronecker orbit cell occupancy")
    p.add_argument("freqs", nargs="+")
    p.add_argument("--count", type=int, default=10**6)
    p.add_argument("--dt", type=float, default=0.1)
    return parser


def run_command(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        ctx = Context(args)
        result = args.func(ctx)
    except DOMAIN_ERRORS as exc:
        err.write(f"error: {exc}\n")
        return 1
    _emit(result, args.json, out)
    return 0


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
