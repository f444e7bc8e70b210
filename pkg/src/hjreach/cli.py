"""
Command-line front end.

    hjreach --config problem.json [--output-dir out] [--emit field|csv|contours ...]
            [--traj "x0,x1,..." ...] [--quiet]

Exit status: 0 on success, 1 on a configuration or usage error, 2 when the
solver diverges.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .config import EMIT_CHOICES, ProblemConfig, config_to_dict, parse_config
from .contours import extract_contours
from .errors import ConfigError, DivergenceError, HJReachError
from .fieldio import write_field_file
from .solver import Direction, SolveResult, solve
from .synthesis import DisturbancePolicy, Trajectory, compute_trajectory

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage().strip()}\n{self.prog}: error: {message}")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hjreach", description="Hamilton-Jacobi reachability solver")
    p.add_argument("--config", required=True, metavar="PATH", help="JSON problem file")
    p.add_argument("--output-dir", default="./out", metavar="PATH")
    p.add_argument("--emit", action="append", choices=EMIT_CHOICES,
                   help="output kind; repeatable (default: field and contours)")
    p.add_argument("--traj", action="append", metavar="X0,X1,...",
                   help="initial state for a trajectory; repeatable, overrides the config")
    p.add_argument("--quiet", action="store_true")
    return p


def _fmt(v) -> str:
    return repr(float(v))


def write_contours_csv(result: SolveResult, cfg: ProblemConfig, out: Path) -> list[str]:
    names = []
    level = cfg.outputs["level"]
    for i, spec in enumerate(cfg.slices()):
        lines = ["tau,polyline_id,x,y"]
        for tau, fld in zip(result.tau, result.fields):
            for pid, poly in enumerate(extract_contours(fld, spec, level)):
                lines.extend(f"{_fmt(tau)},{pid},{_fmt(x)},{_fmt(y)}" for x, y in poly)
        name = f"contours_slice{i}.csv"
        (out / name).write_text("\n".join(lines) + "\n")
        names.append(name)
    return names


def write_field_csv(result: SolveResult, path: Path) -> None:
    grid = result.grid
    pts = grid.points()
    header = ",".join(["tau"] + [f"x{i}" for i in range(grid.dim_count)] + ["value"])
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for tau, fld in zip(result.tau, result.fields):
            for p, v in zip(pts, fld.flat):
                fh.write(",".join([_fmt(tau)] + [_fmt(c) for c in p] + [_fmt(v)]) + "\n")


def write_trajectory_csv(traj: Trajectory, path: Path) -> None:
    n = traj.states.shape[1]
    m = traj.controls.shape[1]
    header = ["t"] + [f"x{i}" for i in range(n)] + [f"u{i}" for i in range(m)] + ["value"]
    rows = [",".join(header)]
    for k, t in enumerate(traj.times):
        ctrl = traj.controls[k] if k < len(traj.controls) else [""] * m
        cells = [_fmt(t)] + [_fmt(x) for x in traj.states[k]]
        cells += [c if c == "" else _fmt(c) for c in ctrl]
        cells.append(_fmt(traj.values[k]))
        rows.append(",".join(cells))
    path.write_text("\n".join(rows) + "\n")


def _parse_state(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",")]
    except ValueError:
        raise ConfigError(f"cannot parse state {text!r}", "--traj") from None


def run(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    log = (lambda *a: None) if args.quiet else (lambda *a: print(*a, file=sys.stderr))

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"hjreach: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(text)
        if args.traj:
            states = [_parse_state(t) for t in args.traj]
            base = cfg.trajectory or {"disturbance": "worst", "substeps": 4}
            cfg.trajectory = {**base, "initial_states": states}
            # re-validate the overridden states
            cfg = parse_config(json.dumps(config_to_dict(cfg)))
        if cfg.trajectory and cfg.trajectory["initial_states"] and cfg.direction is Direction.FORWARD:
            raise ConfigError("trajectories are only defined for backward problems", "trajectory")
        solve_cfg = cfg.to_solve_config()
    except (HJReachError, ValueError) as exc:
        print(f"hjreach: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit = args.emit or cfg.outputs["emit"]

    t0 = time.perf_counter()
    try:
        result = solve(solve_cfg)
    except DivergenceError as exc:
        print(f"hjreach: numerical divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    log(f"solved {result.stats.steps} steps in {time.perf_counter() - t0:.3f} s")

    files = []
    if "field" in emit:
        write_field_file(result, out / "field.hjrf")
        files.append("field.hjrf")
    if "csv" in emit:
        write_field_csv(result, out / "field.csv")
        files.append("field.csv")
    if "contours" in emit:
        if solve_cfg.grid.dim_count >= 2:
            files.extend(write_contours_csv(result, cfg, out))
        else:
            log("contours need at least 2 dimensions; skipped")

    trajectories = []
    if cfg.trajectory:
        policy = DisturbancePolicy(cfg.trajectory["disturbance"])
        for i, x0 in enumerate(cfg.trajectory["initial_states"]):
            traj = compute_trajectory(result, solve_cfg.system, np.array(x0), cfg.u_mode,
                                      cfg.d_mode, policy, cfg.trajectory["substeps"])
            name = f"trajectory_{i}.csv"
            write_trajectory_csv(traj, out / name)
            files.append(name)
            trajectories.append({
                "file": name,
                "initial_state": x0,
                "outcome": traj.outcome.value,
                "final_state": [float(v) for v in traj.final_state],
                "duration": float(traj.times[-1]),
            })
            log(f"trajectory {i}: {traj.outcome.value} after {traj.times[-1]:.4g} s")

    dts = result.stats.dt_history
    manifest = {
        "config": config_to_dict(cfg),
        "stats": {
            "steps": result.stats.steps,
            "dt_min": min(dts) if dts else 0.0,
            "dt_max": max(dts) if dts else 0.0,
        },
        "trajectories": trajectories,
        "files": files,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
