"""Command-line front end: check, simulate, decompose, sweep.

Configurations are single JSON files with a versioned schema; unknown keys
are rejected so experiment records stay diff-able.  Exit codes: 0 on
success, 1 on a certified refusal/failure (failed hypothesis, coverage
shortfall), 2 on usage errors.  Set MEMWAVE_LOG=DEBUG|INFO|... for
logging verbosity.
"""

from __future__ import annotations

import argparse
import copy
import itertools
import json
import logging
import os
import sys

import numpy as np

from . import forcing as forcing_lib
from . import kernels as kernel_lib
from .certificates import all_passed
from .errors import (
    CertificationError,
    ConfigError,
    CoverageError,
    IterationError,
)
from .plate import PlateProblem, build_plate_model, plate_certificates, run_plate
from .reporting import trajectory_from_csv, trajectory_to_csv, write_json_atomic
from .solver import (
    SolverConfig,
    decompose_solution,
    hypothesis_certificates,
    picard_solve,
    required_horizon,
    verify_mild_identity,
)
from .spectral import SpectralModel, Trajectory

log = logging.getLogger("memwave")

SCHEMA_VERSION = 1

_TOP_KEYS = {"schema", "seed", "problem", "kernel", "forcing", "solver",
             "decompose", "sweep", "output"}
_PROBLEM_KEYS = {
    "plate": {"type", "domain_lengths", "max_wavenumber", "gamma", "eta", "m_half"},
    "model": {"type", "eigenvalues", "multiplicities", "alpha", "gamma", "beta"},
}
_KERNEL_KEYS = {"preset", "amplitude", "rate"}
_FORCING_KEYS = {"preset", "amplitude", "omega", "omega2", "phase", "mode",
                 "ergodic", "coupling", "coupling_mode"}
_ERGODIC_KEYS = {"preset", "amplitude"}
_SOLVER_KEYS = {"dt", "window", "horizon", "ball_radius", "max_iters",
                "fp_tol", "tail_tol", "d_beta", "inject_fault"}
_DECOMPOSE_KEYS = {"r_values", "shift_period", "shift_count", "probe_span",
                   "probe_step", "tol"}
_OUTPUT_KEYS = {"dir"}


def _reject_unknown(section: dict, allowed: set, where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"missing required key '{key}' in {where}")
    return section[key]


def load_config(path: str) -> dict:
    try:
        with open(path, "r") as fh:
            cfg = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"config {path} is not valid JSON: {err}") from err
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    _reject_unknown(cfg, _TOP_KEYS, "config root")
    if cfg.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"config schema must be {SCHEMA_VERSION}")
    return cfg


def _build_problem(cfg: dict):
    """Returns (model, plate_problem_or_None, m_half_or_None); forcing attached later."""
    section = _require(cfg, "problem", "config")
    ptype = _require(section, "type", "problem")
    if ptype not in _PROBLEM_KEYS:
        raise ConfigError(f"problem.type must be one of {sorted(_PROBLEM_KEYS)}")
    _reject_unknown(section, _PROBLEM_KEYS[ptype], "problem")
    try:
        if ptype == "plate":
            lengths = _require(section, "domain_lengths", "problem")
            cutoff = int(_require(section, "max_wavenumber", "problem"))
            gamma = float(_require(section, "gamma", "problem"))
            eta = float(_require(section, "eta", "problem"))
            plate = PlateProblem(
                domain_lengths=tuple(lengths), max_wavenumber=cutoff,
                gamma=gamma, eta=eta, kernel=kernel_lib.zero_kernel(),
            )
            model = build_plate_model(plate)
            m_half = section.get("m_half")
            return model, plate, (None if m_half is None else float(m_half))
        eig = _require(section, "eigenvalues", "problem")
        gamma = float(_require(section, "gamma", "problem"))
        model = SpectralModel(
            eigenvalues=np.asarray(eig, dtype=float),
            multiplicities=(None if section.get("multiplicities") is None
                            else np.asarray(section["multiplicities"])),
            alpha=float(section.get("alpha", 0.5)),
            gamma=gamma,
            beta=float(section.get("beta", 0.5)),
        )
        return model, None, None
    except (ValueError, TypeError) as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(f"invalid problem parameters: {err}") from err


def _build_kernel(cfg: dict) -> kernel_lib.MemoryKernel:
    section = cfg.get("kernel", {"preset": "zero"})
    _reject_unknown(section, _KERNEL_KEYS, "kernel")
    preset = section.get("preset", "zero")
    try:
        if preset == "zero":
            return kernel_lib.zero_kernel()
        if preset == "exponential":
            return kernel_lib.exponential_kernel(
                float(_require(section, "amplitude", "kernel")),
                float(section.get("rate", 1.0)),
            )
        if preset == "gaussian":
            return kernel_lib.gaussian_kernel(
                float(_require(section, "amplitude", "kernel")),
                float(section.get("rate", 1.0)),
            )
    except ValueError as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(f"invalid kernel parameters: {err}") from err
    raise ConfigError(f"unknown kernel preset '{preset}'")


_AA_PRESETS = {"sine", "two_tone", "exotic_aa"}
_ERGODIC_PRESETS = {"exp_abs", "lorentz", "gauss"}


def _build_forcing(cfg: dict, model: SpectralModel) -> forcing_lib.ForcingFunction:
    section = cfg.get("forcing", {"preset": "zero"})
    _reject_unknown(section, _FORCING_KEYS, "forcing")
    preset = section.get("preset", "zero")
    amplitude = float(section.get("amplitude", 1.0))
    if preset == "zero":
        aa_signal = None
    elif preset == "sine":
        aa_signal = forcing_lib.sine_signal(
            amplitude, float(section.get("omega", 1.0)), float(section.get("phase", 0.0))
        )
    elif preset == "two_tone":
        aa_signal = forcing_lib.two_tone_signal(
            amplitude, float(section.get("omega", 1.0)),
            float(section.get("omega2", forcing_lib.SQRT2)),
        )
    elif preset == "exotic_aa":
        aa_signal = forcing_lib.exotic_aa_signal(amplitude)
    else:
        raise ConfigError(f"unknown forcing preset '{preset}'")
    ergodic_signal = None
    if "ergodic" in section and section["ergodic"] is not None:
        esec = section["ergodic"]
        _reject_unknown(esec, _ERGODIC_KEYS, "forcing.ergodic")
        epreset = _require(esec, "preset", "forcing.ergodic")
        if epreset not in _ERGODIC_PRESETS:
            raise ConfigError(f"unknown ergodic preset '{epreset}'")
        builder = {
            "exp_abs": forcing_lib.exp_abs_signal,
            "lorentz": forcing_lib.lorentz_signal,
            "gauss": forcing_lib.gauss_signal,
        }[epreset]
        ergodic_signal = builder(float(esec.get("amplitude", 1.0)))
    try:
        return forcing_lib.vector_forcing(
            model,
            aa_signal=aa_signal,
            ergodic_signal=ergodic_signal,
            mode=int(section.get("mode", 1)),
            coupling=float(section.get("coupling", 0.0)),
            coupling_mode=section.get("coupling_mode"),
        )
    except ValueError as err:
        raise ConfigError(f"invalid forcing parameters: {err}") from err


def _build_solver_config(cfg: dict, model, kernel, forcing) -> SolverConfig:
    section = _require(cfg, "solver", "config")
    _reject_unknown(section, _SOLVER_KEYS, "solver")
    try:
        dt = float(_require(section, "dt", "solver"))
        window = _require(section, "window", "solver")
        if not (isinstance(window, (list, tuple)) and len(window) == 2):
            raise ConfigError("solver.window must be [t_start, t_end]")
        ball = float(_require(section, "ball_radius", "solver"))
        tail_tol = float(section.get("tail_tol", 1e-8))
        horizon = section.get("horizon")
        d_beta = section.get("d_beta")
        if horizon is None:
            horizon = 1.05 * required_horizon(model, kernel, forcing, ball, tail_tol)
            horizon = max(horizon, 2.0 * dt)
            log.info("auto horizon: %.6g", horizon)
        return SolverConfig(
            dt=dt,
            window=(float(window[0]), float(window[1])),
            horizon=float(horizon),
            ball_radius=ball,
            max_iters=int(section.get("max_iters", 64)),
            fp_tol=float(section.get("fp_tol", 1e-9)),
            tail_tol=tail_tol,
            d_beta=(None if d_beta is None else float(d_beta)),
            seed=int(cfg.get("seed", 0)),
        )
    except (ValueError, TypeError) as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(f"invalid solver parameters: {err}") from err


def _pyify(obj):
    if isinstance(obj, dict):
        return {str(k): _pyify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_pyify(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_pyify(v) for v in obj.tolist()]
    return obj


def _apply_overrides(cfg: dict, args) -> dict:
    cfg = copy.deepcopy(cfg)
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = int(args.seed)
    if getattr(args, "modes", None) is not None:
        n = int(args.modes)
        if n < 1:
            raise ConfigError("--modes must be at least 1")
        problem = _require(cfg, "problem", "config")
        if problem.get("type") == "plate":
            problem["max_wavenumber"] = n
        else:
            eig = list(_require(problem, "eigenvalues", "problem"))
            mult = list(problem.get("multiplicities") or [1] * len(eig))
            kept_e, kept_m, total = [], [], 0
            for e, m in zip(eig, mult):
                take = min(int(m), n - total)
                if take < 1:
                    break
                kept_e.append(e)
                kept_m.append(take)
                total += take
            problem["eigenvalues"] = kept_e
            problem["multiplicities"] = kept_m
    return cfg


def _out_dir(cfg: dict, args) -> str:
    if getattr(args, "out", None):
        return args.out
    output = cfg.get("output", {})
    _reject_unknown(output, _OUTPUT_KEYS, "output")
    return output.get("dir", "memwave-out")


def _collect_certificates(cfg, model, plate, m_half, kernel, forcing, solver_config):
    if plate is not None:
        plate = PlateProblem(
            domain_lengths=plate.domain_lengths,
            max_wavenumber=plate.max_wavenumber,
            gamma=plate.gamma, eta=plate.eta,
            kernel=kernel, forcing=forcing,
        )
        model, certs, constants = plate_certificates(plate, solver_config, m_half)
        return plate, certs, constants
    certs, constants = hypothesis_certificates(model, kernel, forcing, solver_config)
    return None, certs, constants


def _bundle_dict(certs, constants) -> dict:
    return _pyify({
        "schema": SCHEMA_VERSION,
        "passed": all_passed(certs),
        "certificates": [c.to_dict() for c in certs],
        "constants": constants,
    })


def _prepare(cfg):
    model, plate, m_half = _build_problem(cfg)
    kernel = _build_kernel(cfg)
    forcing = _build_forcing(cfg, model)
    solver_config = _build_solver_config(cfg, model, kernel, forcing)
    return model, plate, m_half, kernel, forcing, solver_config


def cmd_check(cfg: dict, out_dir: str) -> int:
    model, plate, m_half, kernel, forcing, solver_config = _prepare(cfg)
    _, certs, constants = _collect_certificates(
        cfg, model, plate, m_half, kernel, forcing, solver_config
    )
    bundle = _bundle_dict(certs, constants)
    path = os.path.join(out_dir, "certificates.json")
    write_json_atomic(path, bundle)
    log.info("certificate bundle written to %s", path)
    if not bundle["passed"]:
        failed = [c["name"] for c in bundle["certificates"] if not c["passed"]]
        print(f"certificate check FAILED: {', '.join(failed)}", file=sys.stderr)
        return 1
    print(f"all certificates passed ({len(certs)} checks)")
    return 0


def _inject_fault(traj: Trajectory, model, spec: dict):
    node = int(spec.get("node", traj.n_nodes // 2))
    amplitude = float(spec.get("amplitude", 1.0))
    pos = traj.position.copy()
    pos[node, 0] += amplitude
    faulted = Trajectory(traj.t0, traj.dt, pos, traj.velocity.copy())
    t_f = traj.t0 + node * traj.dt
    pairs = [(t_f, max(traj.t0, t_f - k * traj.dt)) for k in (1, 3, 10)]
    pairs += [(min(traj.t_end, t_f + k * traj.dt), t_f) for k in (1, 3, 10)]
    return faulted, [(t, s) for t, s in pairs if t > s]


def cmd_simulate(cfg: dict, out_dir: str) -> int:
    model, plate, m_half, kernel, forcing, solver_config = _prepare(cfg)
    plate_full, certs, constants = _collect_certificates(
        cfg, model, plate, m_half, kernel, forcing, solver_config
    )
    bundle = _bundle_dict(certs, constants)
    write_json_atomic(os.path.join(out_dir, "certificates.json"), bundle)
    if not bundle["passed"]:
        failed = [c["name"] for c in bundle["certificates"] if not c["passed"]]
        print(f"refusing to simulate, failed certificates: {', '.join(failed)}",
              file=sys.stderr)
        print(json.dumps(bundle, indent=2, sort_keys=True), file=sys.stderr)
        return 1
    try:
        if plate_full is not None:
            traj, report, _ = run_plate(plate_full, solver_config, m_half)
        else:
            traj, report = picard_solve(model, kernel, forcing, solver_config)
    except CertificationError as err:
        print(f"solver refusal: {err}", file=sys.stderr)
        return 1
    except IterationError as err:
        print(f"iteration budget exceeded: {err}", file=sys.stderr)
        return 1

    fault_spec = cfg.get("solver", {}).get("inject_fault")
    if fault_spec:
        # test-only path: corrupt the solution and re-measure the identity
        traj, pairs = _inject_fault(traj, model, fault_spec)
        residual = verify_mild_identity(model, kernel, forcing, traj, pairs)
        import dataclasses

        report = dataclasses.replace(report, mild_residual=residual)

    trajectory_to_csv(os.path.join(out_dir, "trajectory.csv"), traj, model)
    write_json_atomic(os.path.join(out_dir, "report.json"), _pyify(report.to_dict()))
    print(
        f"simulated {traj.n_nodes} nodes on [{traj.t0:g}, {traj.t_end:g}]; "
        f"{report.iterations} iterations, sup norm {report.sup_norm:.6g}, "
        f"mild residual {report.mild_residual:.3e}"
    )
    return 0


def cmd_decompose(cfg: dict, out_dir: str, trajectory_path: str) -> int:
    model, plate, m_half, kernel, forcing, solver_config = _prepare(cfg)
    section = cfg.get("decompose", {})
    _reject_unknown(section, _DECOMPOSE_KEYS, "decompose")
    r_values = _require(section, "r_values", "decompose")
    try:
        traj = trajectory_from_csv(trajectory_path)
    except OSError as err:
        raise ConfigError(f"cannot read trajectory {trajectory_path}: {err}") from err
    report = decompose_solution(
        model, kernel, forcing, traj, r_values, solver_config,
        shift_period=section.get("shift_period"),
        shift_count=int(section.get("shift_count", 6)),
        probe_span=float(section.get("probe_span", 6.0)),
        probe_step=float(section.get("probe_step", 0.25)),
        shift_tol=section.get("tol"),
    )
    path = os.path.join(out_dir, "decomposition.json")
    write_json_atomic(path, _pyify(report.to_dict()))
    print(f"decomposition verdict: {report.verdict} (means {report.means_pap0})")
    return 0


def _set_path(cfg: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node = cfg
    for k in keys[:-1]:
        if k not in node or not isinstance(node[k], dict):
            raise ConfigError(f"sweep path '{dotted}' does not exist in the config")
        node = node[k]
    if keys[-1] not in node:
        raise ConfigError(f"sweep path '{dotted}' does not exist in the config")
    node[keys[-1]] = value


def cmd_sweep(cfg: dict, out_dir: str, run_mode: str) -> int:
    sweep = cfg.get("sweep")
    if not sweep or not isinstance(sweep, dict):
        raise ConfigError("sweep requires a nonempty 'sweep' section")
    names = sorted(sweep.keys())
    value_lists = []
    for name in names:
        vals = sweep[name]
        if not isinstance(vals, list) or not vals:
            raise ConfigError(f"sweep values for '{name}' must be a nonempty list")
        value_lists.append(vals)
    worst = 0
    index = []
    for i, combo in enumerate(itertools.product(*value_lists)):
        point_cfg = copy.deepcopy(cfg)
        point_cfg.pop("sweep", None)
        for name, value in zip(names, combo):
            _set_path(point_cfg, name, value)
        point_dir = os.path.join(out_dir, f"point_{i:03d}")
        if run_mode == "simulate":
            status = cmd_simulate(point_cfg, point_dir)
        else:
            status = cmd_check(point_cfg, point_dir)
        worst = max(worst, status)
        index.append({
            "point": dict(zip(names, combo)),
            "dir": f"point_{i:03d}",
            "exit_status": status,
        })
    write_json_atomic(os.path.join(out_dir, "sweep_index.json"),
                      _pyify({"schema": SCHEMA_VERSION, "points": index}))
    return worst


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memwave",
        description="Certified bounded solutions of damped second-order "
                    "systems with memory kernels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("check", "run the hypothesis certifier and write the bundle"),
        ("simulate", "certify, solve, and export trajectory + report"),
        ("decompose", "ergodic/shift diagnostics of a saved trajectory"),
        ("sweep", "cartesian product over listed parameter values"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--modes", type=int, default=None,
                       help="override the retained mode count")
        if name == "decompose":
            p.add_argument("--trajectory", required=True,
                           help="trajectory CSV to diagnose")
        if name == "sweep":
            p.add_argument("--run", choices=["check", "simulate"], default="check",
                           help="pipeline to run at each sweep point")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("MEMWAVE_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    try:
        cfg = load_config(args.config)
        cfg = _apply_overrides(cfg, args)
        out_dir = _out_dir(cfg, args)
        if args.command == "check":
            return cmd_check(cfg, out_dir)
        if args.command == "simulate":
            return cmd_simulate(cfg, out_dir)
        if args.command == "decompose":
            return cmd_decompose(cfg, out_dir, args.trajectory)
        if args.command == "sweep":
            return cmd_sweep(cfg, out_dir, args.run)
        parser.error(f"unknown command {args.command}")
    except ConfigError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    except CoverageError as err:
        print(f"coverage error: {err}", file=sys.stderr)
        return 1
    except CertificationError as err:
        print(f"certified refusal: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
