"""Command-line interface: vintage-eq <command> --config cfg.json [--out-dir D].

Commands
  equilibrium  assemble the stationary equilibrium -> equilibrium.json, profiles.csv
  check        uniqueness conditions               -> conditions.json
  simulate     transport run under a policy        -> trajectory.csv, summary.json
  sweep        comparative statics over one param  -> sweep.csv
  oracle       independent Picard cross-check      -> oracle.json

Exit codes: 0 success, 2 invalid input/config/model, 3 numerical failure
(bracketing or no convergence).

The JSON config schema (grid functions are given as tags resolved on the
model grid at load time):

  grid tag := {"const": c} | {"linear": [a, b]}  (a + b*s) | {"samples": [...]}

  {
    "model": {
      "mu": 1.0, "lambda": 1.0, "s_bar": 1.0,
      "alpha": <grid tag>, "beta0": 0.5, "beta1": <grid tag>,
      "q0": 0.0, "q1": <grid tag>,
      "revenue": {"family": "quadratic", "a": 0.5, "b": 1.0}
                 | {"family": "log"} | {"family": "power", "gamma": 0.5}
    },
    "n_cells": 1000,
    "simulate": {"horizon": 5.0,
                 "x0": <grid tag> | {"equilibrium": true},
                 "policy": {"mode": "equilibrium_feedback"}
                           | {"mode": "constant", "u0": 1.0, "u1": <grid tag>}
                           | {"mode": "table", "entries": [{"u0": ..., "u1": <tag>}, ...]},
                 "include_profiles": false},
    "sweep": {"parameter": "lambda", "start": 0.5, "stop": 2.0,
              "count": 64, "workers": 1},
    "oracle": {"resolutions": [250, 500, 1000], "tol": 1e-12, "max_iter": 500}
  }

All emitted files are deterministic: JSON objects are key-sorted with floats
at 17 significant digits, CSV is RFC-4180 with the same float format. Reruns
and concurrent sweeps produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import discrete_oracle, equilibrium, pde_sim
from . import operators as ops
from .conditions import AlphaNotInV, WrongFamily, check_contraction, check_remark45
from .equilibrium import BracketFailure, assemble
from .discrete_oracle import NoConvergence
from .model import (ControlPair, GridFunction, GridMismatch, ModelParams,
                    ModelValidationError, RevenueSpec, revenue_prime, validate)
from .pde_sim import (HorizonMismatch, OpenLoopConstant, OpenLoopTimeTable,
                      StationaryEquilibriumFeedback, profit, simulate,
                      write_trajectory_csv)

__all__ = ["ConfigError", "main", "run"]

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    """Malformed or incomplete configuration document."""


# -- deterministic serialization ---------------------------------------------


def _fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _json_value(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return "null"
        return _fmt_float(x)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"unserializable value of type {type(obj)}")


def _json_render(obj, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [f"{inner}{json.dumps(str(k))}: {_json_render(v, indent + 1)}"
                 for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [f"{inner}{_json_render(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(parts) + f"\n{pad}]"
    return _json_value(obj)


def dumps_json(obj) -> str:
    """Key-sorted JSON with fixed 17-significant-digit floats."""
    return _json_render(obj, 0) + "\n"


def _write_json(path: Path, obj) -> None:
    path.write_text(dumps_json(obj), encoding="utf-8")


def _csv_cell(v) -> str:
    if isinstance(v, str):
        return v
    x = float(v)
    if math.isnan(x):
        return "nan"
    return _fmt_float(x)


def _write_csv(path: Path, header: list[str], rows) -> None:
    import csv as _csv
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = _csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])


# -- config loading -----------------------------------------------------------


def _require(cfg: dict, key: str, where: str):
    if key not in cfg:
        raise ConfigError(f"missing '{key}' in {where}")
    return cfg[key]


def grid_from_tag(tag, s_bar: float, n_cells: int) -> GridFunction:
    """Resolve a grid-function tag on the model grid."""
    if not isinstance(tag, dict) or len(tag) != 1:
        raise ConfigError(f"grid tag must be a single-key object, got {tag!r}")
    (kind, value), = tag.items()
    if kind == "const":
        return GridFunction.constant(float(value), s_bar, n_cells)
    if kind == "linear":
        if not (isinstance(value, (list, tuple)) and len(value) == 2):
            raise ConfigError("'linear' tag takes [intercept, slope]")
        a, b = float(value[0]), float(value[1])
        return GridFunction.from_callable(lambda s: a + b * s, s_bar, n_cells)
    if kind == "samples":
        arr = [float(v) for v in value]
        if len(arr) != n_cells + 1:
            raise ConfigError(
                f"'samples' needs n_cells+1 = {n_cells + 1} values, got {len(arr)}")
        return GridFunction.from_samples(arr, s_bar)
    raise ConfigError(f"unknown grid tag '{kind}'")


def _revenue_from_config(cfg: dict) -> RevenueSpec:
    family = _require(cfg, "family", "model.revenue")
    if family == "quadratic":
        return RevenueSpec.quadratic(_require(cfg, "a", "revenue"),
                                     _require(cfg, "b", "revenue"))
    if family == "log":
        return RevenueSpec.log()
    if family == "power":
        return RevenueSpec.power(_require(cfg, "gamma", "revenue"))
    raise ConfigError(f"unknown revenue family '{family}' "
                      "(config supports quadratic, log, power)")


def build_model(model_cfg: dict, n_cells: int) -> ModelParams:
    """Build and validate ModelParams from the 'model' config section."""
    s_bar = float(_require(model_cfg, "s_bar", "model"))
    if not (math.isfinite(s_bar) and s_bar > 0):
        raise ConfigError(f"s_bar must be finite and positive, got {s_bar}")
    if n_cells < 2:
        raise ConfigError(f"n_cells must be >= 2, got {n_cells}")
    params = ModelParams(
        mu=float(_require(model_cfg, "mu", "model")),
        lam=float(_require(model_cfg, "lambda", "model")),
        s_bar=s_bar,
        alpha=grid_from_tag(_require(model_cfg, "alpha", "model"), s_bar, n_cells),
        beta0=float(_require(model_cfg, "beta0", "model")),
        beta1=grid_from_tag(_require(model_cfg, "beta1", "model"), s_bar, n_cells),
        q0=float(_require(model_cfg, "q0", "model")),
        q1=grid_from_tag(_require(model_cfg, "q1", "model"), s_bar, n_cells),
        revenue=_revenue_from_config(_require(model_cfg, "revenue", "model")),
    )
    return validate(params)


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict) or "model" not in cfg:
        raise ConfigError("config must be an object with a 'model' section")
    return cfg


def _n_cells(cfg: dict, override: int | None) -> int:
    if override is not None:
        return int(override)
    return int(cfg.get("n_cells", 1000))


# -- commands -----------------------------------------------------------------


def _condition_summary(params: ModelParams) -> dict:
    try:
        report = check_contraction(params)
    except AlphaNotInV:
        return {"alpha_in_V": False}
    out = report.to_dict()
    out["alpha_in_V"] = True
    return out


def cmd_equilibrium(cfg: dict, out_dir: Path, n_override: int | None) -> int:
    params = build_model(cfg["model"], _n_cells(cfg, n_override))
    result = assemble(params)
    doc = {
        "n_cells": params.n_cells,
        "eta": result.eta,
        "c1": result.c1,
        "c2": result.c2,
        "output": result.c2 + result.eta * result.c1,
        "u0_star": result.u_star.u0,
        "alpha_bar_0": float(result.alpha_bar.values[0]),
        "residuals": {
            "scalar_equation": result.residuals.scalar_equation,
            "stationarity": result.residuals.stationarity,
            "extremality": result.residuals.extremality,
        },
        "conditions": _condition_summary(params),
    }
    _write_json(out_dir / "equilibrium.json", doc)
    header = ["s", "x_bar", "w1", "w2", "alpha_bar", "u1_star", "p_bar"]
    nodes = params.nodes
    rows = zip(nodes, result.x_bar.values, result.w1.values, result.w2.values,
               result.alpha_bar.values, result.u_star.u1.values,
               result.p_bar.values)
    _write_csv(out_dir / "profiles.csv", header, rows)
    print(f"wrote {out_dir / 'equilibrium.json'} and {out_dir / 'profiles.csv'}")
    return EXIT_OK


def cmd_check(cfg: dict, out_dir: Path, n_override: int | None) -> int:
    params = build_model(cfg["model"], _n_cells(cfg, n_override))
    report = check_contraction(params)  # AlphaNotInV -> exit 2 in main()
    doc = {"contraction": report.to_dict()}
    try:
        doc["quadratic_shortcut"] = check_remark45(params).to_dict()
    except WrongFamily:
        doc["quadratic_shortcut"] = None
    _write_json(out_dir / "conditions.json", doc)
    print(f"wrote {out_dir / 'conditions.json'}")
    return EXIT_OK


def _policy_from_config(sim_cfg: dict, params: ModelParams,
                        result_cache: dict) -> pde_sim.ControlPolicy:
    pol = _require(sim_cfg, "policy", "simulate")
    mode = _require(pol, "mode", "simulate.policy")
    if mode == "equilibrium_feedback":
        if "result" not in result_cache:
            result_cache["result"] = assemble(params)
        return StationaryEquilibriumFeedback(result_cache["result"])
    if mode == "constant":
        u1 = grid_from_tag(_require(pol, "u1", "policy"), params.s_bar,
                           params.n_cells)
        return OpenLoopConstant(ControlPair(float(_require(pol, "u0", "policy")), u1))
    if mode == "table":
        entries = _require(pol, "entries", "policy")
        controls = [ControlPair(float(_require(e, "u0", "table entry")),
                                grid_from_tag(_require(e, "u1", "table entry"),
                                              params.s_bar, params.n_cells))
                    for e in entries]
        return OpenLoopTimeTable(controls)
    raise ConfigError(f"unknown policy mode '{mode}'")


def cmd_simulate(cfg: dict, out_dir: Path, n_override: int | None) -> int:
    params = build_model(cfg["model"], _n_cells(cfg, n_override))
    sim_cfg = _require(cfg, "simulate", "config")
    result_cache: dict = {}
    policy = _policy_from_config(sim_cfg, params, result_cache)

    x0_tag = _require(sim_cfg, "x0", "simulate")
    if isinstance(x0_tag, dict) and x0_tag.get("equilibrium") is True:
        if "result" not in result_cache:
            result_cache["result"] = assemble(params)
        x0 = result_cache["result"].x_bar
    else:
        x0 = grid_from_tag(x0_tag, params.s_bar, params.n_cells)

    horizon = float(_require(sim_cfg, "horizon", "simulate"))
    traj = simulate(x0, policy, horizon, params)
    value, tail = profit(traj, params)

    max_drift = None
    if isinstance(policy, StationaryEquilibriumFeedback):
        x_bar = policy.result.x_bar.values
        w = ops.trapezoid_weights(params.s_bar, params.n_cells)
        diffs = traj.states - x_bar[None, :]
        max_drift = float(np.max(np.sqrt((diffs * diffs) @ w)))

    write_trajectory_csv(traj, out_dir / "trajectory.csv",
                         include_profiles=bool(sim_cfg.get("include_profiles",
                                                           False)))
    _write_json(out_dir / "summary.json", {
        "steps": traj.steps,
        "final_Q": float(traj.q_series[-1]),
        "profit": value,
        "tail_bound": tail,
        "max_drift": max_drift,
    })
    print(f"wrote {out_dir / 'trajectory.csv'} and {out_dir / 'summary.json'}")
    return EXIT_OK


_SCALAR_SWEEPS = {"lambda", "mu", "s_bar", "beta0", "q0"}
_REVENUE_SWEEPS = {"a", "b", "gamma"}


def _sweep_point(model_cfg: dict, n_cells: int, parameter: str,
                 value: float) -> list:
    cfg = json.loads(json.dumps(model_cfg))  # deep copy
    if parameter in _SCALAR_SWEEPS:
        cfg[parameter] = value
    elif parameter in _REVENUE_SWEEPS:
        revenue_cfg = cfg.get("revenue", {})
        if parameter not in revenue_cfg:
            raise ConfigError(
                f"sweep parameter '{parameter}' not present in revenue config")
        revenue_cfg[parameter] = value
    else:
        raise ConfigError(f"unknown sweep parameter '{parameter}'")
    params = build_model(cfg, n_cells)
    result = assemble(params)
    try:
        report = check_contraction(params)
        m1 = report.entry("inverse_bound_1_over_mu").margin
        m2 = report.entry("inverse_bound_age_span").margin
    except AlphaNotInV:
        m1 = m2 = float("nan")
    return [parameter, value, result.eta, result.c1, result.c2,
            result.c2 + result.eta * result.c1, m1, m2]


def cmd_sweep(cfg: dict, out_dir: Path, n_override: int | None) -> int:
    sweep_cfg = _require(cfg, "sweep", "config")
    parameter = str(_require(sweep_cfg, "parameter", "sweep"))
    start = float(_require(sweep_cfg, "start", "sweep"))
    stop = float(_require(sweep_cfg, "stop", "sweep"))
    count = int(_require(sweep_cfg, "count", "sweep"))
    workers = int(sweep_cfg.get("workers", 1))
    if count < 2:
        raise ConfigError("sweep count must be >= 2")
    n_cells = _n_cells(cfg, n_override)
    values = np.linspace(start, stop, count)

    def point(v: float) -> list:
        return _sweep_point(cfg["model"], n_cells, parameter, float(v))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(point, values))
    else:
        rows = [point(v) for v in values]

    header = ["parameter", "value", "eta", "c1", "c2", "output",
              "margin_inverse_bound_1_over_mu", "margin_inverse_bound_age_span"]
    _write_csv(out_dir / "sweep.csv", header, rows)
    print(f"wrote {out_dir / 'sweep.csv'}")
    return EXIT_OK


def cmd_oracle(cfg: dict, out_dir: Path, n_override: int | None) -> int:
    oracle_cfg = cfg.get("oracle", {})
    resolutions = [int(n) for n in oracle_cfg.get("resolutions", [250, 500, 1000])]
    tol = float(oracle_cfg.get("tol", 1e-12))
    max_iter = int(oracle_cfg.get("max_iter", 500))
    if n_override is not None:
        resolutions = [int(n_override)]
    if not resolutions or sorted(resolutions) != resolutions:
        raise ConfigError("oracle resolutions must be a nondecreasing list")

    per_res = []
    fixed_points = []
    for n in resolutions:
        params = build_model(cfg["model"], n)
        disc = discrete_oracle.build(params)
        closed = assemble(params)
        x_fix, iters, rate = discrete_oracle.picard_fixed_point(
            disc, params, tol=tol, max_iter=max_iter)
        diff = x_fix.values - closed.x_bar.values
        dist = math.sqrt(float(disc.quad_weights @ (diff * diff)))
        q_fix = float(disc.quad_weights @ (params.alpha.values * x_fix.values))
        eta_fix = revenue_prime(params.revenue, q_fix)
        abar0 = float(closed.alpha_bar.values[0])
        u_fix = ControlPair(
            (eta_fix * abar0 - params.q0) / (2.0 * params.beta0),
            (closed.alpha_bar * eta_fix - params.q1) / (params.beta1 * 2.0))
        weak = discrete_oracle.residual_weak_form(x_fix, u_fix, params, disc)
        per_res.append({
            "n": n, "iterations": iters, "fitted_rate": rate,
            "distance_to_closed_form": dist, "weak_form_residual": weak,
            "eta_fixed_point": eta_fix, "eta_closed_form": closed.eta,
        })
        fixed_points.append((n, x_fix, disc.quad_weights))

    order = _convergence_order(fixed_points)

    params0 = build_model(cfg["model"], resolutions[-1])
    try:
        report = check_contraction(params0)
        holds = report.any_holds
        best_rhs = min(e.rhs for e in report.entries)
        contraction = {"holds": holds,
                       "ratio": best_rhs / (params0.lam + params0.mu)}
        # reaching this point means every resolution converged, so a failed
        # sufficient condition is direct evidence it is not necessary
        condition_not_necessary = not holds
    except AlphaNotInV:
        contraction = None
        condition_not_necessary = None

    _write_json(out_dir / "oracle.json", {
        "per_resolution": per_res,
        "convergence_order": order,
        "contraction": contraction,
        "condition_not_necessary": condition_not_necessary,
    })
    print(f"wrote {out_dir / 'oracle.json'}")
    return EXIT_OK


def _convergence_order(fixed_points) -> float | None:
    """Richardson order from consecutive resolution doublings."""
    diffs = []
    for (n_c, x_c, w_c), (n_f, x_f, _) in zip(fixed_points, fixed_points[1:]):
        if n_f != 2 * n_c:
            continue
        restricted = x_f.values[::2]
        d = restricted - x_c.values
        diffs.append(math.sqrt(float(w_c @ (d * d))))
    orders = [math.log2(a / b) for a, b in zip(diffs, diffs[1:]) if b > 0.0]
    if not orders:
        return None
    return float(np.mean(orders))


# -- entry point ---------------------------------------------------------------


_COMMANDS = {
    "equilibrium": cmd_equilibrium,
    "check": cmd_check,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vintage-eq",
        description="Equilibrium tools for the vintage-capital investment model")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out-dir", default=".", help="output directory")
        p.add_argument("--n-cells", type=int, default=None,
                       help="override the grid resolution")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, out_dir, args.n_cells)
    except (BracketFailure, NoConvergence) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        if isinstance(exc, NoConvergence):
            norms = ", ".join(_fmt_float(v) for v in exc.step_norms)
            print(f"trailing step norms: {norms}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ModelValidationError, GridMismatch, AlphaNotInV,
            WrongFamily, HorizonMismatch, OSError, KeyError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
