"""Command-line front end.

Each subcommand reads its inputs from flags or from a TOML/JSON config
(``--config``), writes CSV or JSON with a provenance header, and exits 0 only
when every asserted check passes.  Exit status 2 marks an invalid config and 3
a mathematical precondition failure, reported as a structured error record.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .arith import is_prime, load_function, primes_up_to
from .config import BOUND_KINDS, COMMANDS, ConfigError, ExperimentConfig
from .fpd import (
    MultiPrimeCertificate, ReductionError, fixed_prime_divisors, pqr_decompose, remove_all_fpd,
    verify_certificate,
)
from .polys import BinaryForm, RepeatedFactorError, UniPoly, delta_F, disc_form, disc_uni, shape_decompose
from .roots import DegenerateModulusError, check_dan_bound, rho_brute, rho_star_brute, rho_star_prime, root_count
from .sums import (
    CSV_COLUMNS, EulerProductSpec, FixedPrimeDivisorError, check_fixed_variable_bound, corollary2_harness,
    decimal_str, euler_E, fmt_exact, s_sum, t_sum, theorem1_harness, theorem3_harness,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_MATH = 0, 1, 2, 3
MATH_ERRORS = (ReductionError, RepeatedFactorError, DegenerateModulusError, FixedPrimeDivisorError,
               ArithmeticError)

HELP = {
    "disc": "discriminant of a binary form or polynomial, and Delta_F = psi(|disc F|)",
    "shape": "split F = x1^d1 x2^d2 G with G(1,0) G(0,1) != 0",
    "rho": "rho_f(m), the number of roots of f modulo m, by lifting and CRT",
    "rhostar": "normalized count rho*_F(m); with primes, compare the root-count formula with enumeration",
    "dan-check": "check rho_f(p^l) <= min(d p^(l-1), 2 d^3 p^((1-1/d) l)) over a grid",
    "fpd": "fixed prime divisors of f and the decomposition f = (x^p - x) q + p r",
    "reduce": "remove every fixed prime divisor by affine substitutions and write a certificate",
    "verify-cert": "re-check a stored reduction certificate",
    "sum": "T(X; h, f) for a polynomial or S(X, X; h, F) for a form over a grid",
    "nair-check": "T(X; h, f) against X prod(1 - rho_f(p)/p) sum rho_f(m) h(m)/m",
    "euler-product": "the Euler product E for a form and h over a grid",
    "bound-check": "boundedness of S/(X^2 E) or S/(X^2 ln X), or the fixed-variable bound for S",
}


class Outcome:
    def __init__(self, rows: list[dict], columns: list[str], summary: dict, passed: bool = True,
                 artifacts: dict[str, str] | None = None):
        self.rows = rows
        self.columns = columns
        self.summary = summary
        self.passed = passed
        self.artifacts = artifacts or {}


# ---------------------------------------------------------------------------
# input coercion


def _poly(v, name="inputs.poly") -> UniPoly:
    try:
        f = UniPoly(v) if isinstance(v, list) else UniPoly.parse(str(v))
    except (TypeError, ValueError) as exc:
        raise ConfigError(name, f"bad polynomial literal {v!r} ({exc})") from None
    if f.is_zero():
        raise ConfigError(name, "the zero polynomial is not allowed")
    return f


def _form(v, name="inputs.form") -> BinaryForm:
    try:
        F = BinaryForm(v) if isinstance(v, list) else BinaryForm.parse(str(v))
    except (TypeError, ValueError) as exc:
        raise ConfigError(name, f"bad form literal {v!r} ({exc})") from None
    if F.is_zero():
        raise ConfigError(name, "the zero form is not allowed")
    return F


def _h(v, name="inputs.h"):
    try:
        return load_function(v)
    except (TypeError, ValueError, KeyError, SyntaxError) as exc:
        raise ConfigError(name, str(exc)) from None


def _posint(v, name) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ConfigError(name, f"must be a positive integer, got {v!r}")
    return v


def _int_list(v, name) -> list[int]:
    vals = v if isinstance(v, list) else [v]
    return [_posint(x, name) for x in vals]


# ---------------------------------------------------------------------------
# commands


def cmd_disc(cfg: ExperimentConfig) -> Outcome:
    inp = cfg.inputs
    if "form" in inp:
        F = _form(inp["form"])
        D = disc_form(F)
        row = {"input": F.literal(), "disc": D, "Delta_F": fmt_exact(delta_F(F)) if D else ""}
    else:
        f = _poly(inp["poly"])
        row = {"input": " ".join(map(str, f.to_list())), "disc": disc_uni(f), "Delta_F": ""}
    return Outcome([row], list(row), {"disc": row["disc"]})


def cmd_shape(cfg: ExperimentConfig) -> Outcome:
    F = _form(cfg.inputs["form"])
    S = shape_decompose(F)
    row = {"form": F.literal(), "d1": S.d1, "d2": S.d2, "G": S.G.literal(), "d": S.d,
           "d_prime": S.d_prime, "d_doubleprime": S.d_doubleprime}
    return Outcome([row], list(row), dict(row))


def cmd_rho(cfg: ExperimentConfig) -> Outcome:
    f = _poly(cfg.inputs["poly"])
    method = cfg.inputs.get("method", "auto")
    if method not in ("auto", "lifted", "brute"):
        raise ConfigError("inputs.method", f"must be auto, lifted or brute, got {method!r}")
    check = bool(cfg.inputs.get("check_brute", False))
    rows, ok = [], True
    for m in _int_list(cfg.inputs["m"], "inputs.m"):
        res = root_count(f, m, method)
        row = {"poly": " ".join(map(str, f.to_list())), "m": m, "count": res.count, "method": res.method}
        if check:
            brute = rho_brute(f, m)
            row["brute"] = brute
            row["agree"] = brute == res.count
            ok &= row["agree"]
        rows.append(row)
    summary = {"records": rows}
    if check:
        summary["checks"] = {"brute_agreement": {"passed": ok}}
    return Outcome(rows, list(rows[0]), summary, ok)


def cmd_rhostar(cfg: ExperimentConfig) -> Outcome:
    F = _form(cfg.inputs["form"])
    if "m" in cfg.inputs:
        rows = []
        for m in _int_list(cfg.inputs["m"], "inputs.m"):
            r = rho_star_brute(F, m)
            rows.append({"form": F.literal(), "m": m, "pairs": r.pairs, "value": fmt_exact(r.value)})
        return Outcome(rows, list(rows[0]), {"records": rows})
    primes = cfg.inputs["primes"]
    plist = primes_up_to(_posint(primes, "inputs.primes")) if isinstance(primes, int) else _int_list(primes, "inputs.primes")
    for p in plist:
        if not is_prime(p):
            raise ConfigError("inputs.primes", f"{p} is not prime")
    rows, ok = [], True
    for p in plist:
        formula = rho_star_prime(F, p)
        brute = rho_star_brute(F, p).value
        agree = brute == formula
        below = formula < p if p > F.degree else True
        ok &= agree and below
        rows.append({"p": p, "formula": formula, "brute": fmt_exact(brute), "agree": agree, "below_p": below})
    return Outcome(rows, list(rows[0]) if rows else ["p"], {"checks": {"formula_vs_brute": {"passed": ok}}}, ok)


def cmd_dan_check(cfg: ExperimentConfig) -> Outcome:
    polys = cfg.inputs["polys"]
    if not isinstance(polys, list) or not polys:
        raise ConfigError("inputs.polys", "must be a non-empty list of polynomial literals")
    p_max = _posint(cfg.inputs["p_max"], "inputs.p_max")
    pl_max = _posint(cfg.inputs["pl_max"], "inputs.pl_max")
    rows, ok = [], True
    for i, lit in enumerate(polys):
        f = _poly(lit, f"inputs.polys[{i}]")
        if f.degree < 1:
            raise ConfigError(f"inputs.polys[{i}]", "degree must be >= 1")
        for p in primes_up_to(p_max):
            if not f.mod(p):
                continue
            ell = 1
            while p**ell <= pl_max:
                rec = check_dan_bound(f, p, ell).as_record()
                rec["poly"] = " ".join(map(str, rec["poly"]))
                ok &= rec["passed"]
                rows.append(rec)
                ell += 1
    cols = ["poly", "p", "ell", "rho", "trivial_bound", "power_bound", "passes_trivial", "passes_power", "passed"]
    viol = [r for r in rows if not r["passed"]]
    return Outcome(rows, cols, {"checks": {"bound": {"passed": ok, "cases": len(rows), "violations": viol}}}, ok)


def cmd_fpd(cfg: ExperimentConfig) -> Outcome:
    f = _poly(cfg.inputs["poly"])
    if f.content() != 1:
        raise ConfigError("inputs.poly", f"{f} is not primitive")
    primes = fixed_prime_divisors(f)
    rows = []
    for p in primes:
        d = pqr_decompose(f, p)
        rows.append({"p": p, "q": " ".join(map(str, d.q.to_list())), "r": " ".join(map(str, d.r.to_list())) or "0",
                     "e": d.e})
    return Outcome(rows, ["p", "q", "r", "e"], {"poly": f.to_list(), "fpd": primes})


def _leaf_rows(cert: MultiPrimeCertificate) -> list[dict]:
    return [{"alpha": lf.alpha, "beta": lf.beta, "gamma": lf.gamma, "g": " ".join(map(str, lf.g.to_list())),
             "stages": ";".join(f"{s.p}:{''.join(map(str, s.digits)) or '-'}:{','.join(map(str, s.mus))}"
                                for s in lf.stages)}
            for lf in cert.leaves]


def cmd_reduce(cfg: ExperimentConfig) -> Outcome:
    f = _poly(cfg.inputs["poly"])
    if f.content() != 1:
        raise ConfigError("inputs.poly", f"{f} is not primitive")
    cert = remove_all_fpd(f)
    rep = verify_certificate(cert)
    summary = {"poly": f.to_list(), "primes": list(cert.primes), "leaves": len(cert.leaves),
               "verification": rep.as_record()}
    return Outcome(_leaf_rows(cert), ["alpha", "beta", "gamma", "g", "stages"], summary, rep.passed,
                   {"certificate.json": cert.to_json()})


def cmd_verify_cert(cfg: ExperimentConfig) -> Outcome:
    path = Path(cfg.inputs["certificate"])
    try:
        cert = MultiPrimeCertificate.from_json(path.read_text())
    except OSError as exc:
        raise ConfigError("inputs.certificate", f"cannot read {path}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError("inputs.certificate", f"not a valid certificate: {exc}") from None
    rep = verify_certificate(cert)
    rec = rep.as_record()
    rows = [{"check": c, "passed": v["passed"], "failures": " | ".join(v["failures"])} for c, v in rec["checks"].items()]
    return Outcome(rows, ["check", "passed", "failures"], rec, rep.passed)


def _grid_pairs(cfg) -> list[tuple[int, int]]:
    grid = cfg.inputs["grid"]
    if "grid2" in cfg.inputs:
        g2 = _int_list(cfg.inputs["grid2"], "inputs.grid2")
        if len(g2) != len(grid):
            raise ConfigError("inputs.grid2", "must have the same length as inputs.grid")
        return list(zip(grid, g2))
    return [(x, x) for x in grid]


def _sum_outcome(rows, summary, passed=True) -> Outcome:
    return Outcome([r.as_dict() for r in rows], list(CSV_COLUMNS), summary, passed)


def cmd_sum(cfg: ExperimentConfig) -> Outcome:
    h = _h(cfg.inputs["h"])
    rows = []
    if "poly" in cfg.inputs:
        f = _poly(cfg.inputs["poly"])
        for X in cfg.inputs["grid"]:
            rows.append(t_sum(X, h, f, jobs=cfg.jobs))
        params = {"poly": f.to_list()}
    else:
        F = _form(cfg.inputs["form"])
        sym = bool(cfg.inputs.get("symmetric", False))
        for X1, X2 in _grid_pairs(cfg):
            rows.append(s_sum(X1, X2, h, F, symmetric=sym, jobs=cfg.jobs))
        params = {"form": F.literal(), "symmetric": sym}
    params.update({"h": h.name, "grid": cfg.inputs["grid"]})
    return _sum_outcome(rows, {"params": params})


def cmd_nair_check(cfg: ExperimentConfig) -> Outcome:
    f = _poly(cfg.inputs["poly"])
    rep = theorem3_harness(f, _h(cfg.inputs["h"]), cfg.inputs["grid"], cfg.thresholds["spread"], jobs=cfg.jobs)
    return _sum_outcome(rep.rows, {"params": rep.params, "checks": rep.checks}, rep.passed)


def cmd_euler_product(cfg: ExperimentConfig) -> Outcome:
    F = _form(cfg.inputs["form"])
    h = _h(cfg.inputs["h"])
    S = shape_decompose(F)
    rows = []
    for X1, X2 in _grid_pairs(cfg):
        E = euler_E(EulerProductSpec(S, h, X1, X2))
        rows.append({"X1": X1, "X2": X2, "E": fmt_exact(E), "E_decimal": decimal_str(E),
                     "precision": "10 significant digits"})
    return Outcome(rows, ["X1", "X2", "E", "E_decimal", "precision"], {"params": {"form": F.literal(), "h": h.name}})


def cmd_bound_check(cfg: ExperimentConfig) -> Outcome:
    F = _form(cfg.inputs["form"])
    kind = cfg.inputs["kind"]
    spread = cfg.thresholds["spread"]
    if kind == "theorem1":
        rep = theorem1_harness(F, _h(cfg.inputs.get("h", "tau")), cfg.inputs["grid"], spread, jobs=cfg.jobs)
    elif kind == "corollary2":
        h = _h(cfg.inputs.get("h", "tau"))
        rep = corollary2_harness(F, cfg.inputs["grid"], spread, jobs=cfg.jobs, h=h)
    else:
        h = _h(cfg.inputs.get("h", "tau"))
        recs = [check_fixed_variable_bound(F, h, X1, X2) for X1, X2 in _grid_pairs(cfg)]
        rows = [r.as_dict() for r in recs]
        ok = all(r.holds for r in recs)
        return Outcome(rows, ["form", "h", "X1", "X2", "lhs", "rhs", "holds"],
                       {"checks": {"fixed_variable_bound": {"passed": ok}}}, ok)
    return _sum_outcome(rep.rows, {"params": rep.params, "checks": rep.checks}, rep.passed)


HANDLERS: dict[str, Callable[[ExperimentConfig], Outcome]] = {
    "disc": cmd_disc, "shape": cmd_shape, "rho": cmd_rho, "rhostar": cmd_rhostar, "dan-check": cmd_dan_check,
    "fpd": cmd_fpd, "reduce": cmd_reduce, "verify-cert": cmd_verify_cert, "sum": cmd_sum,
    "nair-check": cmd_nair_check, "euler-product": cmd_euler_product, "bound-check": cmd_bound_check,
}


# ---------------------------------------------------------------------------
# output


def provenance(cfg: ExperimentConfig) -> dict:
    return {"tool": "formsums", "version": __version__, "command": cfg.command, "config_sha256": cfg.digest()}


def render_csv(cfg: ExperimentConfig, out: Outcome) -> str:
    buf = io.StringIO()
    for k, v in provenance(cfg).items():
        buf.write(f"# {k}: {v}\n")
    w = csv.DictWriter(buf, fieldnames=out.columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in out.rows:
        w.writerow({k: _cell(r.get(k)) for k in out.columns})
    return buf.getvalue()


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return fmt_exact(v)


def render_json(cfg: ExperimentConfig, out: Outcome, with_rows: bool = True) -> str:
    doc: dict[str, Any] = {"provenance": provenance(cfg), "config": cfg.to_dict(), "passed": out.passed,
                           "summary": out.summary}
    if with_rows:
        doc["rows"] = out.rows
    return json.dumps(doc, sort_keys=True, indent=2, default=_cell) + "\n"


def _error_record(cfg_or_cmd, exc: Exception) -> dict:
    return {"error": {"type": type(exc).__name__, "message": str(exc),
                      "command": getattr(cfg_or_cmd, "command", cfg_or_cmd)}}


def run(cfg: ExperimentConfig, stdout=None) -> int:
    """Execute a validated config and write its artifacts; returns the exit status."""
    stdout = stdout or sys.stdout
    try:
        out = HANDLERS[cfg.command](cfg)
    except ConfigError:
        raise
    except MATH_ERRORS + (ValueError,) as exc:
        rec = json.dumps(_error_record(cfg, exc), sort_keys=True, indent=2) + "\n"
        if cfg.out:
            d = Path(cfg.out)
            d.mkdir(parents=True, exist_ok=True)
            (d / f"{cfg.command}.error.json").write_text(rec)
        stdout.write(rec)
        return EXIT_MATH
    if cfg.out:
        d = Path(cfg.out)
        d.mkdir(parents=True, exist_ok=True)
        if cfg.format == "csv":
            (d / f"{cfg.command}.csv").write_text(render_csv(cfg, out))
            (d / f"{cfg.command}.summary.json").write_text(render_json(cfg, out, with_rows=False))
        else:
            (d / f"{cfg.command}.json").write_text(render_json(cfg, out))
        for name, text in out.artifacts.items():
            (d / name).write_text(text)
        stdout.write(json.dumps({"passed": out.passed, "out": str(d)}, sort_keys=True) + "\n")
    else:
        stdout.write(render_csv(cfg, out) if cfg.format == "csv" else render_json(cfg, out))
    return EXIT_OK if out.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument parsing


def _csv_ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML or JSON experiment description")
    common.add_argument("--out", help="directory for CSV/JSON artifacts (default: stdout)")
    common.add_argument("--jobs", type=int, help="worker threads for the sum kernels")
    common.add_argument("--format", choices=("csv", "json"), help="output format")

    parser = argparse.ArgumentParser(prog="formsums", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"formsums {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common], help=HELP[name], description=HELP[name])
        if name in ("disc", "shape", "rhostar", "sum", "euler-product", "bound-check"):
            sp.add_argument("--form", help="binary form literal 'd; a_0 ... a_d'")
        if name in ("disc", "rho", "fpd", "reduce", "sum", "nair-check"):
            sp.add_argument("--poly", help="polynomial coefficients c_0,...,c_e (ascending; use --poly=-1,0,1)")
        if name in ("rho", "rhostar"):
            sp.add_argument("--m", type=_csv_ints, help="modulus or comma-separated moduli")
        if name == "rho":
            sp.add_argument("--method", choices=("auto", "lifted", "brute"))
            sp.add_argument("--check-brute", action="store_true", default=None, help="also enumerate and compare")
        if name == "rhostar":
            sp.add_argument("--primes", type=int, help="compare formula and enumeration for all primes up to this")
        if name == "dan-check":
            sp.add_argument("--poly", action="append", dest="polys", help="repeatable polynomial literal")
            sp.add_argument("--p-max", type=int)
            sp.add_argument("--pl-max", type=int)
        if name == "verify-cert":
            sp.add_argument("certificate", nargs="?", help="certificate JSON file")
        if name in ("sum", "nair-check", "euler-product", "bound-check"):
            sp.add_argument("--h", help="built-in multiplicative function: tau, one, two_pow_omega")
            sp.add_argument("--grid", type=_csv_ints, help="comma-separated X values")
            sp.add_argument("--grid2", type=_csv_ints, help="X2 values when not square")
        if name == "sum":
            sp.add_argument("--symmetric", action="store_true", default=None, help="sum over |n_i| <= X_i")
        if name in ("nair-check", "bound-check"):
            sp.add_argument("--spread", type=float, help="max/min threshold (default 2.0)")
        if name == "bound-check":
            sp.add_argument("--kind", choices=BOUND_KINDS)
    return parser


_INPUT_FLAGS = ("form", "poly", "m", "method", "check_brute", "primes", "polys", "p_max", "pl_max", "certificate",
                "h", "grid", "grid2", "symmetric", "kind")


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.load(args.config)
        if cfg.command != args.command:
            raise ConfigError("command", f"config is for {cfg.command!r} but {args.command!r} was invoked")
    else:
        cfg = ExperimentConfig(command=args.command)
    for key in _INPUT_FLAGS:
        v = getattr(args, key, None)
        if v is not None:
            cfg.inputs[key] = v
    if getattr(args, "spread", None) is not None:
        cfg.thresholds["spread"] = args.spread
    if args.jobs is not None:
        cfg.jobs = args.jobs
    if args.format is not None:
        cfg.format = args.format
    if args.out is not None:
        cfg.out = args.out
    return cfg.validate()


def main(argv=None, stdout=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = config_from_args(args)
        return run(cfg, stdout)
    except ConfigError as exc:
        print(f"formsums {args.command}: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG


__all__ = ["main", "run", "build_parser", "config_from_args", "render_csv", "render_json", "Outcome"]
