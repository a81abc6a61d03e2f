"""Command-line front end: ``sphcs <command> [options]``.

Every command writes a table (CSV or JSON) to ``--out`` or stdout, and a
metadata record to ``<out>.meta.json`` or, without ``--out``, to stderr.
Outputs contain no timestamps, so identical inputs give identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .asymptotics import principal_ratio_limit_study, remainder_study, window_radius
from .coherent import FlatLabel, cube_grid, limit_error_study, loglog_slope, measure_width
from .errors import DomainError, SphcsError
from .geometry import PhysicalParams
from .heatkernel import eval_kernel_with_bound, spectral_kernel
from .heatkernel.evaluate import DEFAULT_RTOL, DEFAULT_THETA_MAX_IM, DEFAULT_THETA_SWITCH
from .heatkernel.series import DEFAULT_SERIES_ORDER
from .heatkernel.terms import DEFAULT_WINDOW
from .operator_lab import (
    RELIABLE_CUTOFF,
    TAIL_TOL,
    TruncatedBasis,
    build_annihilation,
    coefficient_tail,
    commutator_norm,
    eigen_residual,
)

SCHEMA_VERSION = "1"
THREADS_ENV = "SPHCS_THREADS"


class UsageError(DomainError):
    kind = "usage"


# ---------------------------------------------------------------- config

def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"not an integer: {text!r}") from None


def _parse_floats(text: str) -> tuple[float, ...]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    return tuple(_parse_float(p) for p in parts)


def _fmt_float(x: float) -> str:
    return repr(float(x))


_PARSERS: dict[str, Callable[[str], Any]] = {
    "int": _parse_int,
    "float": _parse_float,
    "floats": _parse_floats,
    "bool": _parse_bool,
    "str": str,
}


def _opt(kind: str, default=None, help: str = ""):
    return dataclasses.field(default=default, metadata={"kind": kind, "help": help})


@dataclass(frozen=True)
class StudyConfig:
    """All command inputs. ``None`` means the command's own default."""

    dim: int | None = _opt("int", help="odd sphere dimension")
    hbar: float = _opt("float", 1.0)
    mass: float = _opt("float", 1.0)
    omega: float = _opt("float", 1.0)
    tau: float | None = _opt("float", help="dimensionless time (kernel, operator-check)")
    theta_re: float = _opt("float", 0.4)
    theta_im: float = _opt("float", 0.0)
    oracle: bool = _opt("bool", False, "also evaluate the spectral oracle")
    r_sequence: tuple[float, ...] = _opt("floats", (20.0, 40.0, 80.0, 160.0, 320.0))
    x0: tuple[float, ...] | None = _opt("floats")
    p0: tuple[float, ...] | None = _opt("floats")
    grid_side: float | None = _opt("float")
    grid_points: int | None = _opt("int")
    theta: float = _opt("float", 0.3, "angle for remainder-study")
    taus: tuple[float, ...] | None = _opt("floats")
    theta_radius: float = _opt("float", 1.0, "ratio-study grid radius")
    theta_im_max: float = _opt("float", 0.3, "ratio-study grid half-height")
    theta_points: int = _opt("int", 21)
    radius: float | None = _opt("float", help="sphere radius (width-study, operator-check)")
    cutoff: int = _opt("int", 40, "Fourier cutoff N")
    alpha_re: float = _opt("float", 0.5)
    alpha_im: float = _opt("float", 0.3)
    strict: bool = _opt("bool", False, "treat cutoff problems as errors")
    window: int = _opt("int", DEFAULT_WINDOW)
    rtol: float = _opt("float", DEFAULT_RTOL)
    format: str = _opt("str", "csv")
    out: str | None = _opt("str")

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.format!r}")

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            val = getattr(self, f.name)
            if val is None:
                continue
            kind = f.metadata["kind"]
            if kind == "floats":
                text = ", ".join(_fmt_float(v) for v in val)
            elif kind == "float":
                text = _fmt_float(val)
            elif kind == "bool":
                text = "true" if val else "false"
            else:
                text = str(val)
            lines.append(f"{f.name} = {text}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "StudyConfig":
        return cls(**parse_config_text(text))

    def to_dict(self) -> dict:
        return {f.name: (list(v) if isinstance(v := getattr(self, f.name), tuple) else v) for f in fields(self)}


_FIELDS = {f.name: f for f in fields(StudyConfig)}


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment, vectors are comma lists."""
    out = {}
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {num}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELDS:
            raise UsageError(f"config line {num}: unknown key {key!r}")
        out[key] = _PARSERS[_FIELDS[key].metadata["kind"]](value)
    return out


# ---------------------------------------------------------------- output

def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _fmt_float(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_jsonable(rows), indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0]) if rows else []
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row[k]) for k in header])
    return buf.getvalue()


def _emit(rows, meta, cfg: StudyConfig, stdout, stderr):
    body = render(rows, cfg.format)
    if cfg.out:
        meta_text = json.dumps(_jsonable(meta), indent=2, sort_keys=True) + "\n"
        with open(cfg.out, "w", newline="") as fh:
            fh.write(body)
        with open(cfg.out + ".meta.json", "w", newline="") as fh:
            fh.write(meta_text)
    else:
        stdout.write(body)
        stderr.write("meta: " + json.dumps(_jsonable(meta), sort_keys=True) + "\n")


# ---------------------------------------------------------------- helpers

def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return min(4, os.cpu_count() or 1)
    n = _parse_int(raw)
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer")
    return n


def ordered_map(fn, items: Sequence):
    """Map in parallel; results come back in input order."""
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _base_params(cfg: StudyConfig, radius: float) -> PhysicalParams:
    return PhysicalParams(cfg.hbar, cfg.mass, cfg.omega, radius)


def _numeric_defaults(**extra) -> dict:
    out = {
        "theta_switch": DEFAULT_THETA_SWITCH,
        "theta_max_im": DEFAULT_THETA_MAX_IM,
        "series_order": DEFAULT_SERIES_ORDER,
    }
    out.update(extra)
    return out


def _vector(cfg_val, default, dim, name):
    vec = tuple(default if cfg_val is None else cfg_val)
    if len(vec) != dim:
        raise UsageError(f"{name} has length {len(vec)} but dim = {dim}")
    return vec


# ---------------------------------------------------------------- commands

def cmd_kernel(cfg: StudyConfig):
    dim = 3 if cfg.dim is None else cfg.dim
    tau = 0.2 if cfg.tau is None else cfg.tau
    theta = complex(cfg.theta_re, cfg.theta_im)
    kv = eval_kernel_with_bound(dim, tau, theta, window=cfg.window, rtol=cfg.rtol)
    row = {
        "dim": dim, "tau": tau, "theta_re": cfg.theta_re, "theta_im": cfg.theta_im,
        "value_re": kv.value.real, "value_im": kv.value.imag,
        "bound": kv.bound, "window": kv.window,
    }
    if cfg.oracle:
        ref = spectral_kernel(dim, tau, theta)
        row.update(oracle_re=ref.real, oracle_im=ref.imag, abs_diff=abs(kv.value - ref))
    resolved = dataclasses.replace(cfg, dim=dim, tau=tau)
    return [row], {"resolved": resolved, "numerics": _numeric_defaults(window=cfg.window, rtol=cfg.rtol)}


def cmd_limit_study(cfg: StudyConfig):
    dim = 3 if cfg.dim is None else cfg.dim
    x0 = _vector(cfg.x0, (0.3, 0.0, 0.0) if dim == 3 else (0.3,) + (0.0,) * (dim - 1), dim, "x0")
    p0 = _vector(cfg.p0, (0.0, 0.2, 0.0) if dim == 3 else (0.2,) + (0.0,) * (dim - 1), dim, "p0")
    rs = [float(r) for r in cfg.r_sequence]
    if any(b <= a for a, b in zip(rs, rs[1:])):
        raise UsageError("r_sequence must be strictly increasing")
    base = _base_params(cfg, rs[0])
    width = math.sqrt(cfg.hbar / base.m_omega)
    side = 4 * width if cfg.grid_side is None else cfg.grid_side
    points = 9 if cfg.grid_points is None else cfg.grid_points
    label = FlatLabel.for_params(x0, p0, base)
    grid = cube_grid(x0, side, points)
    single = ordered_map(lambda r: limit_error_study(label, grid, [r], base)[0], rs)
    rows = []
    for i, row in enumerate(single):
        errs = [s.max_abs_err for s in single[: i + 1]]
        rows.append({
            "r": row.r, "tau": row.tau, "max_abs_err": row.max_abs_err,
            "fitted_slope_so_far": loglog_slope(rs[: i + 1], errs),
        })
    resolved = dataclasses.replace(cfg, dim=dim, x0=x0, p0=p0, grid_side=side, grid_points=points)
    return rows, {"resolved": resolved, "numerics": _numeric_defaults(),
                  "grid": "max-norm over a fixed product grid, not a certificate of uniformity"}


def cmd_remainder_study(cfg: StudyConfig):
    dim = 1 if cfg.dim is None else cfg.dim
    taus = tuple(float(t) for t in np.linspace(0.05, 0.3, 8)) if cfg.taus is None else cfg.taus
    table = remainder_study(dim, cfg.theta, taus)
    rows = [{"tau": r.tau, "abs_R": r.abs_r, "fitted_C": r.fitted_c, "fitted_B": r.fitted_b} for r in table]
    resolved = dataclasses.replace(cfg, dim=dim, taus=taus)
    return rows, {"resolved": resolved, "numerics": _numeric_defaults(window_radius=window_radius(dim))}


def cmd_ratio_study(cfg: StudyConfig):
    dim = 3 if cfg.dim is None else cfg.dim
    taus = (1e-3, 1e-4) if cfg.taus is None else cfg.taus
    re = np.linspace(-cfg.theta_radius, cfg.theta_radius, cfg.theta_points)
    im = np.linspace(-cfg.theta_im_max, cfg.theta_im_max, max(3, cfg.theta_points // 3))
    grid = (re[:, None] + 1j * im[None, :]).ravel()
    grid = grid[np.abs(grid) <= cfg.theta_radius]
    table = ordered_map(lambda t: principal_ratio_limit_study(dim, grid, [t])[0], list(taus))
    rows = [{"tau": r.tau, "max_err": r.max_err} for r in table]
    resolved = dataclasses.replace(cfg, dim=dim, taus=tuple(taus))
    return rows, {"resolved": resolved, "numerics": _numeric_defaults(grid_size=int(grid.size))}


def cmd_width_study(cfg: StudyConfig):
    dim = 3 if cfg.dim is None else cfg.dim
    radius = 200.0 if cfg.radius is None else cfg.radius
    x0 = _vector(cfg.x0, (0.0,) * dim, dim, "x0")
    p0 = _vector(cfg.p0, (0.0,) * dim, dim, "p0")
    params = _base_params(cfg, radius)
    scale = math.sqrt(cfg.hbar / params.m_omega)
    side = 8 * scale if cfg.grid_side is None else cfg.grid_side
    points = 21 if cfg.grid_points is None else cfg.grid_points
    label = FlatLabel.for_params(x0, p0, params)
    res = measure_width(label, params, cube_grid(x0, side, points))
    target = math.sqrt(cfg.hbar / (2 * params.m_omega))
    row = {"r": radius, "tau": params.tau}
    for k, w in enumerate(res.widths):
        row[f"width_{k}"] = float(w)
    row.update(
        width_mean=res.width, target=target, rel_err=res.width / target - 1,
        width_over_r=res.width / radius, sqrt_half_tau=math.sqrt(params.tau / 2),
    )
    resolved = dataclasses.replace(cfg, dim=dim, radius=radius, x0=x0, p0=p0, grid_side=side, grid_points=points)
    return [row], {"resolved": resolved, "numerics": _numeric_defaults(), "warnings": list(res.warnings)}


def cmd_operator_check(cfg: StudyConfig):
    tau = 0.5 if cfg.tau is None else cfg.tau
    radius = 1.0 if cfg.radius is None else cfg.radius
    if not (math.isfinite(cfg.alpha_re) and math.isfinite(cfg.alpha_im)):
        raise UsageError("alpha must be finite")
    basis = TruncatedBasis(cfg.cutoff, tau, radius)
    alpha = complex(cfg.alpha_re, cfg.alpha_im)
    tail = coefficient_tail(alpha, basis)
    warnings = []
    if not basis.reliable:
        if cfg.strict:
            raise DomainError(f"cutoff N = {cfg.cutoff} is below the reliable minimum {RELIABLE_CUTOFF}")
        warnings.append(f"cutoff N = {cfg.cutoff} below {RELIABLE_CUTOFF}: degraded accuracy")
    if tail > TAIL_TOL and not cfg.strict:
        warnings.append(f"edge coefficient {tail:.3g} exceeds {TAIL_TOL:g}: truncation dominates")
    ops = build_annihilation(basis)
    rep = eigen_residual(alpha, basis, ops, strict=cfg.strict)
    eig_gap = max(abs(e - a) for e, a in zip(rep.eigenvalues, rep.label))
    cls_gap = max(abs(c - a) for c, a in zip(rep.classical, rep.label))
    row = {
        "tau": tau, "r": radius, "N": cfg.cutoff, "alpha_re": cfg.alpha_re, "alpha_im": cfg.alpha_im,
        "res1": rep.res1, "res2": rep.res2, "sphere_sum": rep.sphere_sum,
        "commutator_interior": commutator_norm(ops, basis),
        "eig1_re": rep.eigenvalues[0].real, "eig1_im": rep.eigenvalues[0].imag,
        "eig2_re": rep.eigenvalues[1].real, "eig2_im": rep.eigenvalues[1].imag,
        "label1_re": rep.label[0].real, "label1_im": rep.label[0].imag,
        "label2_re": rep.label[1].real, "label2_im": rep.label[1].imag,
        "eig_minus_label": eig_gap, "classical_minus_label": cls_gap,
        "edge_coefficient": tail, "dropped_mass": rep.dropped_mass,
        "degraded": bool(warnings),
    }
    resolved = dataclasses.replace(cfg, tau=tau, radius=radius)
    return [row], {"resolved": resolved, "numerics": {"tail_tol": TAIL_TOL, "reliable_cutoff": RELIABLE_CUTOFF},
                   "warnings": warnings}


COMMANDS = {
    "kernel": (cmd_kernel, "evaluate the heat kernel at a complex angle"),
    "limit-study": (cmd_limit_study, "large-radius convergence to the flat Gaussian"),
    "remainder-study": (cmd_remainder_study, "exponential decay of the off-centre lattice terms"),
    "ratio-study": (cmd_ratio_study, "principal part over flat Gaussian against the Jacobian ratio"),
    "width-study": (cmd_width_study, "spatial width of a coherent state"),
    "operator-check": (cmd_operator_check, "annihilation operators in a truncated Fourier basis"),
}


# ---------------------------------------------------------------- parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _flag_type(kind):
    parser = _PARSERS[kind]

    def conv(text):
        try:
            return parser(text)
        except UsageError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    return conv


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key = value file; flags override it")
    for f in fields(StudyConfig):
        flag = "--" + f.name.replace("_", "-")
        kind = f.metadata["kind"]
        if kind == "bool":
            common.add_argument(flag, dest=f.name, action="store_const", const=True, default=None,
                                help=f.metadata["help"] or None)
        else:
            extra = {"choices": ["csv", "json"]} if f.name == "format" else {}
            common.add_argument(flag, dest=f.name, type=_flag_type(kind), default=None,
                                help=f.metadata["help"] or None, **extra)
    common.add_argument("-N", dest="cutoff", type=_flag_type("int"), default=None, help=argparse.SUPPRESS)

    parser = _Parser(prog="sphcs", description="Sphere coherent-state numerics")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def config_from_args(ns: argparse.Namespace) -> StudyConfig:
    values = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                values.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc.strerror}") from None
    for f in fields(StudyConfig):
        v = getattr(ns, f.name)
        if v is not None:
            values[f.name] = v
    return StudyConfig(**values)


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        ns = build_parser().parse_args(argv)
        cfg = config_from_args(ns)
        fn = COMMANDS[ns.command][0]
        rows, info = fn(cfg)
        resolved = info.pop("resolved")
        meta = {"schema_version": SCHEMA_VERSION, "command": ns.command, "version": __version__,
                "config": resolved.to_dict(), **info}
        _emit(rows, meta, cfg, stdout, stderr)
    except SphcsError as exc:
        stderr.write(f"error: {exc.kind}: {exc}\n")
        return exc.exit_code
    except (ValueError, TypeError) as exc:
        stderr.write(f"error: usage: {exc}\n")
        return 2
    except ArithmeticError as exc:
        stderr.write(f"error: numeric: {exc}\n")
        return 3
    except OSError as exc:
        stderr.write(f"error: io: {exc}\n")
        return 2
    return 0


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
