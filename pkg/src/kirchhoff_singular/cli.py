"""Command-line interface.

Exit status: 0 success, 1 unreadable configuration, 2 parameter/domain error,
3 convergence failure.  Failures print a JSON object with a ``reason`` code
on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import constants as C
from .dirac import absorption_solve, negative_branch_solve, weak_singularity_solve, SolveReport
from .errors import ConvergenceError, KirchhoffError, ParameterDomainError
from .green import dirac_potential, green_apply, pointwise_residual, potential_pair
from .mass import gradient_mass
from .radial import DEFAULT_R_MIN, Params, RadialFn, default_nodes, make_grid
from .reports import dumps, fmt_float, profile_csv, scalar_fields, write_table
from .strong import end_to_end_strong, scalar_branch, strong_profile

COMMANDS = (
    "constants", "condition", "weak-solve", "absorption-solve", "neg-branch",
    "strong-profile", "super-branch", "bootstrap", "verify", "sweep",
)
MAX_SWEEP = 100_000


class _Parser(argparse.ArgumentParser):
    """Argument errors raise :class:`ConfigError` instead of exiting."""

    def error(self, message):
        m = re.search(r"argument (\S+)", message)
        raise ConfigError(m.group(1).rstrip(":").split("/")[0].lstrip("-") if m else "arguments", message)


class ConfigError(Exception):
    """Configuration could not be read; carries the offending field."""

    def __init__(self, field: str, message: str):
        super().__init__(message if message.startswith("argument") else f"{field}: {message}")
        self.field = field


@dataclass
class RunConfig:
    command: str = "constants"
    N: int = 3
    p: float = 2.0
    theta: float = 0.0
    k: float = 1.0
    lam: Optional[float] = None
    rmin: float = DEFAULT_R_MIN
    nodes: Optional[int] = None
    tol: Optional[float] = None
    max_iter: int = 500
    regime: str = "absorption"
    branch: str = "source"
    m: Optional[float] = None
    target_mass: float = 1.0
    a_p: Optional[float] = None
    suite: str = "closed-forms"
    sweep_cmd: str = "condition"
    var: str = "k"
    start: Optional[float] = None
    stop: Optional[float] = None
    count: Optional[int] = None
    jobs: int = 1
    out: Optional[str] = None
    format: str = "json"

    def params(self) -> Params:
        return Params(self.N, self.p, self.theta, self.k)

    def grid(self):
        return make_grid(self.rmin, self.nodes if self.nodes is not None else default_nodes())


_INT_FIELDS = {"N", "nodes", "max_iter", "count", "jobs"}
_FLOAT_FIELDS = {"p", "theta", "k", "lam", "rmin", "tol", "m", "target_mass", "a_p", "start", "stop"}
_STR_FIELDS = {"command", "regime", "branch", "suite", "sweep_cmd", "var", "out", "format"}
_ALIASES = {"lambda": "lam", "r_min": "rmin", "n_nodes": "nodes", "cmd": "sweep_cmd", "max-iter": "max_iter"}


def _coerce(name: str, value):
    if value is None:
        return None
    if name in _INT_FIELDS:
        if isinstance(value, bool) or not (isinstance(value, int) or (isinstance(value, float) and value.is_integer())):
            raise ConfigError(name, f"expected an integer, got {value!r}")
        return int(value)
    if name in _FLOAT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(name, f"expected a number, got {value!r}")
        return float(value)
    if name in _STR_FIELDS:
        if not isinstance(value, str):
            raise ConfigError(name, f"expected a string, got {value!r}")
        return value
    raise ConfigError(name, "unknown field")


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be an object")
    out = {}
    for key, value in data.items():
        name = _ALIASES.get(key, key).replace("-", "_")
        out[name] = _coerce(name, value)
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(
        prog="kirchhoff-singular",
        description="Singular radial solutions of -M_theta(u) Delta u = u^p in the punctured unit ball.",
    )
    ap.add_argument("command", choices=COMMANDS)
    S = argparse.SUPPRESS
    ap.add_argument("--config", default=None, help="JSON file with any of the options below")
    ap.add_argument("--N", type=int, default=S, help="dimension (default 3)")
    ap.add_argument("--p", type=float, default=S, help="exponent (default 2)")
    ap.add_argument("--theta", type=float, default=S, help="Kirchhoff offset (default 0)")
    ap.add_argument("--k", type=float, default=S, help="Dirac weight (default 1)")
    ap.add_argument("--lambda", dest="lam", type=float, default=S, help="absorption coefficient")
    ap.add_argument("--rmin", type=float, default=S, help="innermost grid radius (default 1e-6)")
    ap.add_argument("--nodes", type=int, default=S, help="grid size (default 4096 or KS_DEFAULT_NODES)")
    ap.add_argument("--tol", type=float, default=S)
    ap.add_argument("--max-iter", dest="max_iter", type=int, default=S)
    ap.add_argument("--regime", choices=("absorption", "source"), default=S)
    ap.add_argument("--branch", choices=("source", "negative"), default=S)
    ap.add_argument("--m", type=float, default=S, help="gradient mass for super-branch")
    ap.add_argument("--target-mass", dest="target_mass", type=float, default=S)
    ap.add_argument("--ap", dest="a_p", type=float, default=S, help="use this a_p instead of computing it")
    ap.add_argument("--suite", default=S)
    ap.add_argument("--cmd", dest="sweep_cmd", choices=("condition", "absorption", "weak-solve", "neg-branch-F"), default=S)
    ap.add_argument("--var", default=S, help="swept variable")
    ap.add_argument("--start", type=float, default=S)
    ap.add_argument("--stop", type=float, default=S)
    ap.add_argument("--count", type=int, default=S)
    ap.add_argument("--jobs", type=int, default=S)
    ap.add_argument("--out", default=S, help="output path (default stdout)")
    ap.add_argument("--format", choices=("json", "csv"), default=S)
    return ap


def resolve_config(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    merged = {}
    if ns.get("config"):
        merged.update(load_config(ns["config"]))
    merged.update({k: v for k, v in ns.items() if k != "config"})
    names = {f.name for f in fields(RunConfig)}
    for key in merged:
        if key not in names:
            raise ConfigError(key, "unknown field")
    return RunConfig(**merged)


# --- command bodies -------------------------------------------------------------

def _maybe(fn):
    try:
        return fn()
    except ParameterDomainError as exc:
        return {"unavailable": exc.reason}


def cmd_constants(cfg: RunConfig):
    P = cfg.params()
    g = cfg.grid()
    out = {
        "N": P.N, "p": P.p, "theta": P.theta, "k": P.k,
        "p_star": P.p_star, "p_sobolev": P.p_sobolev, "theta_minus": P.theta_minus,
        "sigma_N": P.sigma_N, "c_N": P.c_N,
        "a_p": _maybe(lambda: C.compute_ap(P, g)),
        "barrier": _maybe(lambda: dict(zip(("s_p", "t_p"), C.barrier_scale(P)))),
        "c_p_absorption": _maybe(lambda: C.singularity_coeff(P, "absorption_subcritical")),
        "c_p_source": _maybe(lambda: C.singularity_coeff(P, "source_supercritical")),
        "c_p_critical": _maybe(lambda: C.singularity_coeff(P, "source_critical")),
        "c_p_critical_asymptotic": _maybe(lambda: C.critical_coeff_asymptotic(P.N)),
        "grid": {"r_min": g.r_min, "n_nodes": g.n_nodes},
    }
    return out, None


def cmd_condition(cfg: RunConfig):
    P = cfg.params()
    a_p = cfg.a_p if cfg.a_p is not None else C.compute_ap(P, cfg.grid())
    return C.check_condition(P, a_p), None


def _solve_table(rep: SolveReport, c: float):
    res = pointwise_residual(rep.v_part, rep.profile, rep.params, c)
    u = rep.profile
    return profile_csv(u.r, u.values, u.derivative(), res)


def cmd_weak_solve(cfg: RunConfig):
    P = cfg.params()
    rep = weak_singularity_solve(P, cfg.grid(), cfg.tol or 1e-6, cfg.max_iter, a_p=cfg.a_p)
    return rep, _solve_table(rep, 1.0 / rep.m_theta)


def cmd_absorption_solve(cfg: RunConfig):
    if cfg.lam is None:
        raise ParameterDomainError("absorption-solve needs --lambda", field="lambda")
    rep = absorption_solve(cfg.params(), cfg.lam, cfg.grid(), cfg.tol or 1e-6, max(cfg.max_iter, 2000))
    return rep, _solve_table(rep, -cfg.lam)


def cmd_neg_branch(cfg: RunConfig):
    P = cfg.params()
    rep = negative_branch_solve(P, cfg.grid(), cfg.tol or 1e-8)
    table = None
    if rep.profile is not None:
        u = rep.profile
        res = pointwise_residual(rep.v_part, u, P, -rep.root)
        table = profile_csv(u.r, u.values, u.derivative(), res)
    return rep, table


def cmd_strong_profile(cfg: RunConfig):
    P = cfg.params()
    rep = strong_profile(P, cfg.regime, cfg.grid(), cfg.tol or 1e-6, target_mass=cfg.target_mass)
    u = rep.profile
    c = -1.0 if rep.regime == "absorption" else 1.0
    return rep, profile_csv(u.r, u.values, u.derivative(), pointwise_residual(u, u, P, c))


def cmd_super_branch(cfg: RunConfig):
    P = cfg.params()
    branch = "supercritical_source" if cfg.branch == "source" else "negative_theta_absorption"
    if cfg.m is not None:
        return scalar_branch(P, cfg.m, branch), None
    regime = "source" if cfg.branch == "source" else "absorption"
    prof, br, summary = end_to_end_strong(P, regime, cfg.grid(), cfg.tol or 1e-6, target_mass=cfg.target_mass)
    return {"profile": prof, "branch": br, "summary": summary}, None


def cmd_bootstrap(cfg: RunConfig):
    return C.bootstrap_ledger(cfg.params()), None


def closed_form_checks(g=None):
    """Pinned closed-form identities; each entry is ``(name, value, expected, tol)``."""
    g = g or make_grid(DEFAULT_R_MIN, default_nodes())
    out = []
    for N, exp in ((3, 1 / (12 * math.pi)), (2, 1 / (8 * math.pi))):
        out.append((f"a_2 N={N}", C.compute_ap(Params(N, 2.0), g), exp, 1e-4 * exp))
    for N in (2, 3):
        P = Params(N, 2.0)
        out.append((f"gradient mass w0 N={N}", gradient_mass(dirac_potential(P, g), P).grad_mass, 1.0, 1e-6))
    P3 = Params(3, 2.0)
    w1 = potential_pair(P3, g).w1
    i = int(np.argmin(np.abs(g.nodes - 0.5)))
    r = float(g.nodes[i])
    w1_exact = (-r * r + 6.0 * r - 6.0 * math.log(r) - 5.0) / (96 * math.pi**2)
    out.append(("w1 near r=0.5 N=3 p=2", float(w1.values[i]), w1_exact, 1e-6 * w1_exact))
    w0 = dirac_potential(P3, g)
    out.append(("w0 near r=0.5 N=3", float(w0.values[i]), (1 / r - 1) / (4 * math.pi), 1e-12))
    for p in (1.2, 1.5, 2.0, 3.0, 5.0):
        s_p = (p / (p - 1)) ** p
        out.append((f"tangency p={p}", float(C.barrier_map(s_p, p)), s_p, 1e-12 * s_p))
    led = C.bootstrap_ledger(P3)
    out.append(("t_1 N=3 p=2", led.t_seq[1], 3.75, 1e-12))
    return out


def cmd_verify(cfg: RunConfig):
    if cfg.suite != "closed-forms":
        raise ParameterDomainError(f"unknown suite {cfg.suite!r}", field="suite")
    checks = []
    for name, val, exp, tol in closed_form_checks(cfg.grid()):
        checks.append({"name": name, "value": val, "expected": exp, "tol": tol, "pass": bool(abs(val - exp) <= tol)})
    ok = all(c["pass"] for c in checks)
    return {"suite": cfg.suite, "all_pass": ok, "checks": checks}, None


# --- sweep -----------------------------------------------------------------------

_SWEEP_VARS = {"k", "theta", "p", "lam", "lambda", "N"}


def _sweep_row(args):
    cfg_dict, value = args
    cfg = RunConfig(**cfg_dict)
    var = "lam" if cfg.var == "lambda" else cfg.var
    setattr(cfg, var, int(round(value)) if var == "N" else value)
    try:
        if cfg.sweep_cmd == "condition":
            rep, _ = cmd_condition(cfg)
        elif cfg.sweep_cmd == "absorption":
            rep, _ = cmd_absorption_solve(cfg)
        elif cfg.sweep_cmd == "weak-solve":
            rep, _ = cmd_weak_solve(cfg)
        else:
            P = cfg.params()
            if cfg.lam is None:
                raise ParameterDomainError("neg-branch-F sweeps need lambda", field="lambda")
            a = absorption_solve(P, cfg.lam, cfg.grid(), cfg.tol or 1e-12)
            rep = {"lambda": cfg.lam, "m_theta": a.m_theta, "F": -1.0 / a.m_theta - cfg.lam}
        row = scalar_fields(rep)
        row = {k: v for k, v in row.items() if not k.startswith("params.") and k != cfg.var}
        return value, "ok", "", row
    except KirchhoffError as exc:
        return value, "error", exc.reason, {}
    except (ValueError, ArithmeticError) as exc:
        return value, "error", type(exc).__name__, {}


def sweep_values(cfg: RunConfig) -> np.ndarray:
    if cfg.var not in _SWEEP_VARS:
        raise ParameterDomainError(f"cannot sweep {cfg.var!r}", field="var")
    if cfg.start is None or cfg.stop is None or cfg.count is None:
        raise ParameterDomainError("sweep needs --start, --stop and --count", field="count")
    if not (math.isfinite(cfg.start) and math.isfinite(cfg.stop)):
        raise ParameterDomainError("sweep bounds must be finite", field="start")
    if not (1 <= cfg.count <= MAX_SWEEP):
        raise ParameterDomainError(f"count must lie in [1, {MAX_SWEEP}], got {cfg.count}", field="count")
    return np.linspace(cfg.start, cfg.stop, cfg.count)


def cmd_sweep(cfg: RunConfig):
    values = sweep_values(cfg)
    base = asdict(cfg)
    jobs = [(base, float(v)) for v in values]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            rows = list(ex.map(_sweep_row, jobs, chunksize=max(1, len(jobs) // (4 * cfg.jobs))))
    else:
        rows = [_sweep_row(j) for j in jobs]
    keys = []
    for _, _, _, row in rows:
        for k in row:
            if k not in keys:
                keys.append(k)
    header = [cfg.var, "status", "reason"] + keys
    import io

    buf = io.StringIO()
    write_table(buf, header, ([v, st, rc] + [row.get(k) for k in keys] for v, st, rc, row in rows))
    n_err = sum(1 for r in rows if r[1] != "ok")
    return {"var": cfg.var, "count": len(rows), "errors": n_err}, buf.getvalue()


DISPATCH = {
    "constants": cmd_constants,
    "condition": cmd_condition,
    "weak-solve": cmd_weak_solve,
    "absorption-solve": cmd_absorption_solve,
    "neg-branch": cmd_neg_branch,
    "strong-profile": cmd_strong_profile,
    "super-branch": cmd_super_branch,
    "bootstrap": cmd_bootstrap,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def _emit(text: str, path: Optional[str], stdout):
    if path is None:
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def dispatch(cfg: RunConfig, stdout=None) -> int:
    """Run one command; returns the exit status."""
    stdout = stdout or sys.stdout
    report, table = DISPATCH[cfg.command](cfg)
    if cfg.command == "sweep":
        # sweeps are tables by nature
        _emit(table, cfg.out, stdout)
        return 0
    if cfg.format == "csv" and cfg.out is not None:
        # profile table at --out, full record beside it
        if table is not None:
            _emit(table, cfg.out, stdout)
        _emit(dumps(report), str(Path(cfg.out).with_suffix(".json")), stdout)
    elif cfg.format == "csv" and table is not None:
        _emit(table, None, stdout)
    else:
        _emit(dumps(report), cfg.out, stdout)
    if cfg.command == "verify" and not report["all_pass"]:
        return 3
    return 0


def _fail(status: int, reason: str, message: str, stderr, **extra) -> int:
    payload = {"status": "error", "reason": reason, "message": message, **extra}
    stderr.write(json.dumps(payload, default=str) + "\n")
    return status


def main(argv=None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    try:
        cfg = resolve_config(argv)
    except ConfigError as exc:
        return _fail(1, "config_parse", str(exc), stderr, field=exc.field)
    except TypeError as exc:
        return _fail(1, "config_parse", str(exc), stderr, field="config")
    try:
        return dispatch(cfg, stdout)
    except ConvergenceError as exc:
        return _fail(3, exc.reason, str(exc), stderr)
    except KirchhoffError as exc:
        return _fail(exc.exit_code, exc.reason, str(exc), stderr)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
