"""Command line front end.

Verbs:
  solve     one equilibrium; writes solution.json, profile.csv, report.json
  converge  a basis-size ladder at one load; writes table.csv
  sweep     a load sweep with fold traversal; writes loadsag.csv
  scale     physical inputs to the dimensionless load pair (c, d)

Configuration is a flat key = value text file (or the same keys as a JSON
object); command line flags override file values.  Outputs are plain CSV
and JSON, written deterministically so identical runs produce identical
bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis import P_MIN, FAMILIES, eval_shape
from .kinematics import LoadParams, curvatures, hydro_load, stretches
from .material import MaterialParams, principal_stresses
from .quadrature import MAX_NODES, MIN_NODES
from .solver import (
    SolveFailure,
    StepPolicy,
    continue_in_load,
    delta_diagnostic,
    SolveContext,
    solve_membrane,
)
from .basis import BasisSpec
from .quadrature import auto_rule
from .solver import initial_guess, newton_solve

PROFILE_POINTS = 201


class ConfigError(ValueError):
    """Bad or missing configuration; maps to exit code 2."""


@dataclass
class RunConfig:
    mat: MaterialParams = field(default_factory=MaterialParams)
    c: float | None = None
    d: float = 0.0
    family: str = "polynomial"
    m: int = 6
    m_min: int | None = None
    m_max: int | None = None
    n_p: int = 1
    p: tuple | None = None
    quad: int | None = None
    probes: tuple = ()
    out: Path = Path("results")
    c_start: float | None = None
    c_end: float | None = None
    c_step: float | None = None
    scale: dict = field(default_factory=dict)


_FLOAT_KEYS = {"gamma1", "gamma2", "gamma3", "c", "d", "c_start", "c_end", "c_step",
               "r0", "h0", "c1", "rho_g", "p_star", "p_ref"}
_INT_KEYS = {"m", "m_min", "m_max", "n"}
_SCALE_KEYS = {"r0", "h0", "c1", "rho_g", "p_star", "p_ref"}


def _parse_kv(text: str) -> dict:
    raw: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        raw[key.lower()] = value
    return raw


def load_config(path: str | Path) -> dict:
    """Read a config file; JSON if it looks like JSON, key = value otherwise."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    stripped = text.lstrip()
    if path.suffix == ".json" or stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad JSON in {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return {str(k).lower(): v for k, v in data.items()}
    return _parse_kv(text)


def _as_floats(value) -> tuple:
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    parts = str(value).replace(",", " ").split()
    return tuple(float(v) for v in parts)


def build_config(raw: dict) -> RunConfig:
    """Coerce and validate raw key/value pairs."""
    cfg = RunConfig()
    known = (_FLOAT_KEYS | _INT_KEYS |
             {"family", "p", "probes", "out", "quad"})
    for key in raw:
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
    vals: dict = {}
    for key, value in raw.items():
        try:
            if key in _FLOAT_KEYS:
                vals[key] = float(value)
            elif key in _INT_KEYS:
                vals[key] = int(value)
            else:
                vals[key] = value
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config key {key!r}: {exc}") from exc

    cfg.mat = MaterialParams(
        gamma1=vals.get("gamma1", 0.0),
        gamma2=vals.get("gamma2", 0.0),
        gamma3=vals.get("gamma3", 0.0),
    )
    cfg.c = vals.get("c")
    cfg.d = vals.get("d", 0.0)
    if cfg.d < 0.0:
        raise ConfigError("d must be >= 0")
    cfg.family = str(vals.get("family", "polynomial")).lower()
    if cfg.family not in FAMILIES:
        raise ConfigError(f"family must be one of {FAMILIES}")
    cfg.m = vals.get("m", 6)
    if cfg.m < 1:
        raise ConfigError("m must be >= 1")
    cfg.m_min = vals.get("m_min")
    cfg.m_max = vals.get("m_max")
    cfg.n_p = vals.get("n", 1)
    if cfg.n_p < 1:
        raise ConfigError("n must be >= 1")
    if "p" in vals:
        cfg.p = _as_floats(vals["p"])
        if len(cfg.p) < 1:
            raise ConfigError("p must contain at least one value")
        if cfg.p[0] < P_MIN:
            raise ConfigError(f"p[0] must be >= {P_MIN}")
    if "quad" in vals and str(vals["quad"]).lower() != "auto":
        try:
            cfg.quad = int(vals["quad"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"quad: {exc}") from exc
        if not MIN_NODES <= cfg.quad <= MAX_NODES:
            raise ConfigError(f"quad must be in [{MIN_NODES}, {MAX_NODES}]")
    if "probes" in vals:
        cfg.probes = _as_floats(vals["probes"])
    for sp in cfg.probes:
        if not 0.0 <= sp <= 1.0:
            raise ConfigError(f"probe {sp} outside [0, 1]")
    if "out" in vals:
        cfg.out = Path(str(vals["out"]))
    cfg.c_start = vals.get("c_start")
    cfg.c_end = vals.get("c_end")
    cfg.c_step = vals.get("c_step")
    cfg.scale = {k: vals[k] for k in _SCALE_KEYS if k in vals}
    return cfg


def scale_inputs(r0: float, h0: float, c1: float, rho_g: float,
                 p_star: float, p_ref: float) -> dict:
    """Dimensionless load pair from physical membrane data.

    c = (p_star - p_ref) * r0 / (2 c1 h0),  d = rho_g * r0**2 / (2 c1 h0),
    with r0 the disk radius, h0 the thickness, c1 the leading material
    constant and rho_g the specific weight of the ponding liquid.
    """
    if r0 <= 0.0 or h0 <= 0.0 or c1 <= 0.0:
        raise ConfigError("r0, h0 and c1 must be positive")
    if rho_g < 0.0:
        raise ConfigError("rho_g must be >= 0")
    denom = 2.0 * c1 * h0
    return {"c": (p_star - p_ref) * r0 / denom, "d": rho_g * r0 * r0 / denom}


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def profile_rows(state, mat: MaterialParams):
    """Profile table on a 201-point grid including both ends.

    delta is normalized by |c| like the solver diagnostic; at zero load the
    raw defect is reported instead.
    """
    s = np.linspace(0.0, 1.0, PROFILE_POINTS)
    shape = eval_shape(state, s, second=True)
    l1, l2, _ = stretches(s, shape.r, shape.dz, shape.dr, pole_limit=True)
    t1, t2 = principal_stresses(l1, l2, mat)
    k1, k2 = curvatures(s, shape)
    q = hydro_load(shape.z, state.load.c, state.load.d)
    norm = abs(state.load.c) if state.load.c != 0.0 else 1.0
    delta = np.abs(k1 * t1 + k2 * t2 - q) / norm
    return np.column_stack([s, shape.z, shape.r, shape.dz, shape.dr,
                            l1, l2, t1, t2, delta])


def write_profile(path: Path, state, mat: MaterialParams) -> None:
    rows = profile_rows(state, mat)
    with open(path, "w", newline="") as fh:
        fh.write("s,z,r,dz,dr,lambda1,lambda2,T1,T2,delta\n")
        for row in rows:
            cells = [_fmt(v) for v in row[:-1]] + [f"{row[-1]:.17e}"]
            fh.write(",".join(cells) + "\n")


def _report_dict(report, state, mat, probes) -> dict:
    out = {
        "converged": report.converged,
        "iterations": report.iterations,
        "residual_history": list(report.residual_history),
        "delta_max": report.delta_max,
        "delta_probes": [],
        "final_p": list(report.final_p) if report.final_p else None,
        "message": report.message,
    }
    if report.converged and state.load.c != 0.0 and probes:
        at, dmax = delta_diagnostic(state, mat, probes)
        out["delta_probes"] = [
            {"s": float(sp), "delta": float(dv)} for sp, dv in zip(probes, at)
        ]
        out["delta_max"] = dmax
    return out


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_solve(cfg: RunConfig) -> int:
    if cfg.c is None:
        raise ConfigError("solve needs a load value c")
    if cfg.family == "adaptive" and cfg.p is None and cfg.d <= 0.0:
        raise ConfigError("steep family with d = 0 needs explicit p")
    cfg.out.mkdir(parents=True, exist_ok=True)
    load = LoadParams(cfg.c, cfg.d)
    try:
        state, report = solve_membrane(
            cfg.mat, load, cfg.family, cfg.m,
            n_p=cfg.n_p, p=cfg.p, quad=cfg.quad,
            probe=cfg.probes[0] if cfg.probes else None,
        )
    except SolveFailure as exc:
        _write_json(cfg.out / "report.json", {
            "converged": False, "iterations": 0, "residual_history": [],
            "delta_max": None, "delta_probes": [], "final_p": None,
            "message": str(exc),
        })
        print(f"solve failed: {exc}", file=sys.stderr)
        return 3

    _write_json(cfg.out / "solution.json", {
        "x": [float(v) for v in state.x],
        "spec": {"family": state.spec.family, "m": state.spec.m,
                 "p": list(state.spec.p)},
        "load": {"c": load.c, "d": load.d},
        "material": {"gamma1": cfg.mat.gamma1, "gamma2": cfg.mat.gamma2,
                     "gamma3": cfg.mat.gamma3},
    })
    write_profile(cfg.out / "profile.csv", state, cfg.mat)
    _write_json(cfg.out / "report.json",
                _report_dict(report, state, cfg.mat, cfg.probes))
    return 0


def run_convergence(cfg: RunConfig) -> int:
    if cfg.c is None:
        raise ConfigError("converge needs a load value c")
    m_lo = cfg.m_min or 1
    m_hi = cfg.m_max or cfg.m
    if m_lo > m_hi:
        raise ConfigError("m_min must not exceed m_max")
    probe = cfg.probes[0] if cfg.probes else 0.5
    cfg.out.mkdir(parents=True, exist_ok=True)
    load = LoadParams(cfg.c, cfg.d)
    header = "m,z,r,dz,dr,d2z,d2r,delta\n"
    any_ok = False
    with open(cfg.out / "table.csv", "w", newline="") as fh:
        fh.write(header)
        for m in range(m_lo, m_hi + 1):
            try:
                state, report = solve_membrane(
                    cfg.mat, load, cfg.family, m,
                    n_p=cfg.n_p, p=cfg.p, quad=cfg.quad, probe=probe,
                )
            except SolveFailure as exc:
                print(f"m = {m}: {exc}", file=sys.stderr)
                fh.write(f"{m}," + ",".join(["nan"] * 7) + "\n")
                continue
            any_ok = True
            shape = eval_shape(state, np.array(probe), second=True)
            cells = [_fmt(float(val)) for val in
                     (shape.z, shape.r, shape.dz, shape.dr, shape.d2z, shape.d2r)]
            fh.write(f"{m}," + ",".join(cells) + f",{report.delta_at:.17e}\n")
    return 0 if any_ok else 3


def run_sweep(cfg: RunConfig) -> int:
    if cfg.c_start is None or cfg.c_end is None:
        raise ConfigError("sweep needs c_start and c_end")
    cfg.out.mkdir(parents=True, exist_ok=True)
    if cfg.c_start == cfg.c_end:
        with open(cfg.out / "loadsag.csv", "w", newline="") as fh:
            fh.write("c,f,stability_hint\n")
        return 0
    step = cfg.c_step or abs(cfg.c_end - cfg.c_start) / 20.0
    if step <= 0.0:
        raise ConfigError("c_step must be positive")
    load = LoadParams(cfg.c_start, cfg.d)
    if cfg.family == "adaptive":
        if cfg.p is None:
            raise ConfigError("sweep on the steep family needs fixed p")
        spec = BasisSpec("adaptive", cfg.m, cfg.p)
    else:
        spec = BasisSpec("polynomial", cfg.m)
    rule = auto_rule(cfg.family, cfg.p[0] if cfg.p else None, cfg.quad)
    ctx = SolveContext(cfg.mat, load, spec, rule)
    try:
        points = continue_in_load(ctx, cfg.c_start, cfg.c_end,
                                  StepPolicy(initial=step))
    except SolveFailure as exc:
        print(f"sweep failed: {exc}", file=sys.stderr)
        return 3
    with open(cfg.out / "loadsag.csv", "w", newline="") as fh:
        fh.write("c,f,stability_hint\n")
        for pt in points:
            fh.write(f"{_fmt(pt.c_value)},{_fmt(pt.sag)},{pt.stability_hint}\n")
    return 0


def run_scale(cfg: RunConfig) -> int:
    missing = _SCALE_KEYS - set(cfg.scale)
    if missing:
        raise ConfigError(f"scale needs keys: {', '.join(sorted(missing))}")
    result = scale_inputs(**cfg.scale)
    text = json.dumps(result, indent=2, sort_keys=True)
    print(text)
    if cfg.out != Path("results") or (cfg.out.exists() and cfg.out.is_dir()):
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / "scale.json").write_text(text + "\n")
    return 0


def _add_common(sub: argparse.ArgumentParser, config_required: bool) -> None:
    sub.add_argument("--config", required=config_required,
                     help="path to a key = value or JSON config file")
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--quad", type=int, help="quadrature node count")
    sub.add_argument("--probe", action="append", type=float, default=None,
                     help="probe point in [0, 1]; repeatable")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ritzmem",
        description="Finite deformation of a clamped circular membrane "
                    "under hydrostatic load, by a Ritz expansion.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb, helptext in (
        ("solve", "solve one load case"),
        ("converge", "basis ladder at one load"),
        ("sweep", "load sweep with fold traversal"),
    ):
        _add_common(sub.add_parser(verb, help=helptext), config_required=True)
    scale_p = sub.add_parser("scale", help="physical to dimensionless load")
    _add_common(scale_p, config_required=False)
    for key in sorted(_SCALE_KEYS):
        scale_p.add_argument(f"--{key.replace('_', '-')}", type=float,
                             dest=key, default=None)

    args = parser.parse_args(argv)
    try:
        raw = load_config(args.config) if args.config else {}
        cfg = build_config(raw)
        if args.out:
            cfg.out = Path(args.out)
        if args.quad:
            if not MIN_NODES <= args.quad <= MAX_NODES:
                raise ConfigError(f"quad must be in [{MIN_NODES}, {MAX_NODES}]")
            cfg.quad = args.quad
        if args.probe:
            for sp in args.probe:
                if not 0.0 <= sp <= 1.0:
                    raise ConfigError(f"probe {sp} outside [0, 1]")
            cfg.probes = tuple(args.probe)
        if args.verb == "scale":
            for key in _SCALE_KEYS:
                value = getattr(args, key, None)
                if value is not None:
                    cfg.scale[key] = value
            return run_scale(cfg)
        if args.verb == "solve":
            return run_solve(cfg)
        if args.verb == "converge":
            return run_convergence(cfg)
        return run_sweep(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SolveFailure as exc:
        print(f"solve failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
