"""Command-line front end: ``pointint {spectrum,wavefunction,converge,check}``.

Configuration comes from an optional flat JSON file, overridden by flags.
Output is CSV (default) or JSON on stdout; diagnostics go to stderr.

Exit codes: 0 ok, 1 check failure, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .convergence import (
    DEFAULT_A_SEQ,
    element_slopes,
    expansion_check,
    fit_loglog_slope,
    eigenvalue_drift,
    u_limit_table,
)
from .invariants import configured_checks, generic_checks
from .renormalization import (
    BranchTag,
    DegenerateSchedule,
    classify_branch,
    is_ill_conditioned,
    realize,
)
from .spectrum import (
    BoxDomain,
    GeometryError,
    NotAnEigenvalue,
    approx_spectrum,
    box_grid,
    count_nodes,
    eigenfunction,
    exact_spectrum,
    negative_energy_states,
    nth_eigenvalue,
)
from .transfer import PointParams

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

PARAM_KEYS = ("theta", "alpha", "beta", "gamma", "delta")
CONFIG_KEYS = PARAM_KEYS + ("x1", "x2", "a", "k_lo", "k_hi", "grid_steps", "out_format", "sample_points")


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class RunConfig:
    params: PointParams = field(default_factory=PointParams.free)
    domain: BoxDomain = field(default_factory=BoxDomain)
    a: float | None = 0.2
    k_lo: float = 1e-3
    k_hi: float = 1.2
    grid_steps: int = 5000
    out_format: str = "csv"
    sample_points: int = 12000

    @classmethod
    def from_mapping(cls, raw: dict) -> "RunConfig":
        unknown = sorted(set(raw) - set(CONFIG_KEYS))
        if unknown:
            raise ConfigError(unknown[0], "unknown configuration key")
        vals = {"theta": 0.0, "alpha": 1.0, "beta": 0.0, "gamma": 0.0, "delta": 1.0}
        vals.update({k: v for k, v in raw.items() if v is not None or k == "a"})
        for key in PARAM_KEYS + ("x1", "x2", "k_lo", "k_hi"):
            if key in vals:
                vals[key] = _as_float(key, vals[key])
        try:
            params = PointParams(*(vals[k] for k in PARAM_KEYS))
        except ValueError as exc:
            raise ConfigError("alpha/beta/gamma/delta", str(exc)) from None
        try:
            domain = BoxDomain(vals.get("x1", -15.0), vals.get("x2", 15.0))
        except ValueError as exc:
            raise ConfigError("x1/x2", str(exc)) from None
        a = vals.get("a", 0.2)
        if a is not None:
            a = _as_float("a", a)
            if not a > 0:
                raise ConfigError("a", f"must be positive, got {a!r}")
            if a >= min(-domain.x1, domain.x2):
                raise ConfigError("a", str(GeometryError(f"a={a!r} does not fit inside the box")))
        cfg = cls(params, domain, a)
        cfg.k_lo = vals.get("k_lo", cfg.k_lo)
        cfg.k_hi = vals.get("k_hi", cfg.k_hi)
        if not 0 < cfg.k_lo < cfg.k_hi:
            raise ConfigError("k_lo/k_hi", f"need 0 < k_lo < k_hi, got {cfg.k_lo!r}, {cfg.k_hi!r}")
        cfg.grid_steps = _as_int("grid_steps", vals.get("grid_steps", cfg.grid_steps), 2)
        cfg.sample_points = _as_int("sample_points", vals.get("sample_points", cfg.sample_points), 3)
        cfg.out_format = vals.get("out_format", cfg.out_format)
        if cfg.out_format not in ("csv", "json"):
            raise ConfigError("out_format", f"must be csv or json, got {cfg.out_format!r}")
        if a is not None:
            try:
                realize(params, a)
            except DegenerateSchedule as exc:
                raise ConfigError("alpha/delta", str(exc)) from None
        return cfg


def _as_float(name: str, value) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(name, f"not a number: {value!r}") from None
    if not math.isfinite(out):
        raise ConfigError(name, "must be finite")
    return out


def _as_int(name: str, value, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(name, f"not an integer: {value!r}")
    if value < minimum:
        raise ConfigError(name, f"must be at least {minimum}")
    return int(value)


def thread_count() -> int:
    raw = os.environ.get("POINTINT_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("POINTINT_THREADS", f"not an integer: {raw!r}") from None
    if n < 0:
        raise ConfigError("POINTINT_THREADS", "must be >= 0")
    return n


def ordered_map(fn, items):
    """map() that may fan out over threads but always returns input order."""
    n = thread_count()
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, str)):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return f"{x:.12g}"


def _json_value(x):
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if not math.isfinite(x):
        return None
    return float(f"{x:.12g}")


def emit(out, columns, rows, footer, out_format):
    if out_format == "json":
        doc = {
            "columns": list(columns),
            "rows": [[_json_value(v) for v in row] for row in rows],
            "footer": {k: _json_value(v) for k, v in footer.items()},
        }
        out.write(json.dumps(doc, indent=1) + "\n")
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    out.write(buf.getvalue())


def _note(msg: str) -> None:
    print(f"pointint: {msg}", file=sys.stderr)


def _realization(cfg: RunConfig):
    if is_ill_conditioned(cfg.params):
        _note(f"warning: |gamma|={abs(cfg.params.gamma):.3g} is tiny; finite-a strengths are ill-conditioned")
    return None if cfg.a is None else realize(cfg.params, cfg.a)


def cmd_spectrum(cfg: RunConfig, include_negative: bool = False, out=None) -> int:
    out = out or sys.stdout
    p, d = cfg.params, cfg.domain
    r = _realization(cfg)

    def exact():
        levels = exact_spectrum(p, d, cfg.k_lo, cfg.k_hi, cfg.grid_steps)
        return (negative_energy_states(p, d) if include_negative else []) + levels

    def approx():
        if r is None:
            return []
        levels = approx_spectrum(r, d, cfg.k_lo, cfg.k_hi, cfg.grid_steps)
        return (negative_energy_states(r, d) if include_negative else []) + levels

    ex_levels, ap_levels = ordered_map(lambda f: f(), [exact, approx])
    ex = {e.n: e for e in ex_levels}
    ap = {e.n: e for e in ap_levels}
    rows = []
    for n in sorted(set(ex) | set(ap)):
        e, f = ex.get(n), ap.get(n)
        ke = e.k if e is not None and not e.negative else None
        ka = f.k if f is not None and not f.negative else None
        diff = ka - ke if ke is not None and ka is not None else None
        rows.append([n, ke, ka, diff, e.energy if e else None, f.energy if f else None])
    columns = ["n", "k_exact", "k_approx", "difference", "energy_exact", "energy_approx"]
    footer = {"a": cfg.a, "x1": d.x1, "x2": d.x2, "k_lo": cfg.k_lo, "k_hi": cfg.k_hi}
    emit(out, columns, rows, footer, cfg.out_format)
    return EXIT_OK


def cmd_wavefunction(cfg: RunConfig, n: int, out=None) -> int:
    out = out or sys.stdout
    p, d = cfg.params, cfg.domain
    r = _realization(cfg)
    grid = box_grid(d, cfg.sample_points)
    try:
        lev_exact = nth_eigenvalue(p, d, n)
        lev_approx = nth_eigenvalue(r, d, n) if r is not None else None
        w_exact = eigenfunction(p, d, lev_exact, grid) if lev_exact else None
        w_approx = eigenfunction(r, d, lev_approx, grid) if lev_approx else None
    except (NotAnEigenvalue, ValueError, RuntimeError) as exc:
        _note(f"eigenvalue refinement failed: {exc}")
        return EXIT_NUMERIC
    if lev_exact is None:
        _note(f"state {n} has no zero-range counterpart; exact columns left empty")
    rows = []
    for i, x in enumerate(grid):
        row = [float(x)]
        row += [w_exact.phis[i].real, w_exact.phis[i].imag] if w_exact else [None, None]
        row += [w_approx.phis[i].real, w_approx.phis[i].imag] if w_approx else [None, None]
        row.append(w_exact.left_limit.real if (w_exact is not None and x == 0.0) else None)
        rows.append(row)
    footer = {
        "n": n,
        "k_exact": lev_exact.k if lev_exact else None,
        "k_approx": lev_approx.k if lev_approx else None,
        "negative_energy_exact": lev_exact.negative if lev_exact else None,
        "negative_energy_approx": lev_approx.negative if lev_approx else None,
        "nodes_exact": count_nodes(w_exact) if w_exact else None,
        "nodes_approx": count_nodes(w_approx) if w_approx else None,
    }
    columns = ["x", "re_exact", "im_exact", "re_approx", "im_approx", "left_limit_at_0"]
    emit(out, columns, rows, footer, cfg.out_format)
    return EXIT_OK


def cmd_converge(cfg: RunConfig, n: int | None, a_seq, k: float = 1.0, out=None) -> int:
    out = out or sys.stdout
    p, d = cfg.params, cfg.domain
    a_seq = tuple(a for a in a_seq if a < min(-d.x1, d.x2))
    try:
        rows = u_limit_table(p, k, a_seq)
        drift = eigenvalue_drift(p, d, n, a_seq) if n is not None else None
    except ValueError as exc:
        _note(f"configuration error: {exc}")
        return EXIT_CONFIG
    table = []
    for i, row in enumerate(rows):
        kn, kn_err = (drift[i][1], drift[i][2]) if drift else (None, None)
        table.append([row.a, *row.element_errors, row.det_error, kn, kn_err])
    small = [r for r in rows if r.a <= 1e-2]
    slopes = element_slopes(small) if len(small) >= 2 else (float("nan"),) * 4
    footer = {f"slope_{ij}": s for ij, s in zip(("11", "12", "21", "22"), slopes)}
    if classify_branch(p) is BranchTag.GammaNonZero:
        footer["expansion_slope"] = expansion_check(p, k)
    if drift:
        tail = [(a, e) for a, _, e in drift if a <= 1e-2]
        footer["drift_slope"] = fit_loglog_slope([a for a, _ in tail], [e for _, e in tail])
    columns = ["a", "err_11", "err_12", "err_21", "err_22", "det_error", "k_n", "k_n_error"]
    emit(out, columns, table, footer, cfg.out_format)
    if cfg.out_format == "csv":
        for key, val in footer.items():
            out.write(f"# {key}={fmt(val)}\n")
    return EXIT_OK


def cmd_check(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    checks = generic_checks(cfg.domain) + configured_checks(
        cfg.params, cfg.domain, cfg.a, cfg.k_lo, cfg.k_hi, cfg.grid_steps
    )
    results = ordered_map(lambda c: c(), checks)
    failed = [r.name for r in results if not r.passed]
    report = {
        "passed": not failed,
        "failed": failed,
        "checks": [{"name": r.name, "passed": bool(r.passed), "detail": r.detail} for r in results],
    }
    out.write(json.dumps(report, indent=1) + "\n")
    for name in failed:
        _note(f"FAILED {name}")
    return EXIT_CHECK if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON file with run configuration")
    for key in PARAM_KEYS:
        common.add_argument(f"--{key}", type=float)
    common.add_argument("--a", type=float, help="spacing of the three deltas")
    common.add_argument("--no-approx", action="store_true", help="skip the three-delta model")
    common.add_argument("--x1", type=float)
    common.add_argument("--x2", type=float)
    common.add_argument("--k-lo", dest="k_lo", type=float)
    common.add_argument("--k-hi", dest="k_hi", type=float)
    common.add_argument("--grid-steps", dest="grid_steps", type=int)
    common.add_argument("--sample-points", dest="sample_points", type=int)
    common.add_argument("--format", dest="out_format", choices=("csv", "json"))

    parser = argparse.ArgumentParser(prog="pointint", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("spectrum", parents=[common], help="exact vs three-delta eigenvalues")
    sp.add_argument("--include-negative", action="store_true", help="also list negative-energy states")
    wf = sub.add_parser("wavefunction", parents=[common], help="sampled eigenfunctions of state n")
    wf.add_argument("--n", type=int, required=True)
    cv = sub.add_parser("converge", parents=[common], help="a -> 0 convergence table")
    cv.add_argument("--n", type=int, help="also track the drift of state n")
    cv.add_argument("--k", type=float, default=1.0, help="wave number for the U_a table")
    cv.add_argument("--a-seq", dest="a_seq", help="comma-separated descending spacings")
    sub.add_parser("check", parents=[common], help="run the invariant suite")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    raw: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", str(exc)) from None
        if not isinstance(raw, dict):
            raise ConfigError("config", "top level must be a JSON object")
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val
    if args.no_approx:
        raw["a"] = None
    return RunConfig.from_mapping(raw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        thread_count()
        if args.command == "converge" and args.a_seq:
            try:
                a_seq = tuple(float(x) for x in args.a_seq.split(","))
            except ValueError:
                raise ConfigError("a_seq", f"not a list of numbers: {args.a_seq!r}") from None
            if any(a <= 0 for a in a_seq) or any(b >= a for a, b in zip(a_seq, a_seq[1:])):
                raise ConfigError("a_seq", "spacings must be positive and strictly descending")
        else:
            a_seq = DEFAULT_A_SEQ
        if args.command in ("wavefunction",) and args.n < 1:
            raise ConfigError("n", "must be >= 1")
    except ConfigError as exc:
        _note(f"configuration error: {exc}")
        return EXIT_CONFIG

    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = lambda msg, cat, *rest: _note(f"{cat.__name__}: {msg}")
        try:
            if args.command == "spectrum":
                return cmd_spectrum(cfg, args.include_negative)
            if args.command == "wavefunction":
                return cmd_wavefunction(cfg, args.n)
            if args.command == "converge":
                return cmd_converge(cfg, args.n, a_seq, args.k)
            return cmd_check(cfg)
        except (ArithmeticError, RuntimeError) as exc:
            _note(f"numerical failure: {exc}")
            return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
