"""Command-line front end.

One JSON config describes a model instance, an initial phase point and
the solver settings; the subcommands run the standard experiments:

    bcs info       --config run.json        model summary and validity
    bcs check      --config run.json        constraint and energy-identity residuals
    bcs simulate   --config run.json        symplectic ODE trajectory -> CSV
    bcs solve      --config run.json        diagonalization trajectory -> CSV
    bcs compare    --config run.json        both solvers, max |dq|, |dp|
    bcs involution --config run.json        pairwise Poisson bracket matrix

Exit codes: 0 success, 1 tolerance breach, 2 invalid input, 3 runtime
singularity or chamber exit, 4 spectral breakdown.  Trajectory CSVs use
the header t,q1..qn,p1..pn,H1..Hn with 17 significant digits; a JSON
sidecar next to the CSV carries the drift table and solver diagnostics.
The BCS_LOG environment variable (error|warn|info|debug) controls
logging verbosity.
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from .dynamics import (
    SolverConfig,
    integrate_ode,
    poisson_bracket_matrix,
    reconstruct_p,
    spectral_solve_q,
)
from .errors import ChamberExit, SingularConfiguration, SpectralBreakdown
from .model import (
    ModelParams,
    PhasePoint,
    _constraint_residuals,
    _gplus_residual,
    build_lax,
    hamiltonian,
    random_chamber_point,
    reduced_hamiltonian,
    reduced_hamiltonians,
    verify_constraints,
)
from .structure import first_chamber_violation, is_regular

log = logging.getLogger("bcsuth")

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_INVALID = 2
EXIT_SINGULAR = 3
EXIT_SPECTRAL = 4

_REQUIRED_KEYS = ("n", "m", "kappa", "x", "y", "q0", "p0", "dt", "t_end")
_ALL_KEYS = _REQUIRED_KEYS + ("k", "sample_every", "seed", "output_path")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Flat JSON config: model, initial data, solver settings."""

    n: int
    m: int
    kappa: float
    x: float
    y: float
    q0: list
    p0: list
    dt: float
    t_end: float
    k: int = 1
    sample_every: int = 1
    seed: int = 0
    output_path: str = "trajectory.csv"

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = sorted(set(raw) - set(_ALL_KEYS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        missing = [key for key in _REQUIRED_KEYS if key not in raw]
        if missing:
            raise ConfigError(f"missing config keys: {', '.join(missing)}")
        data = {}
        for key in ("n", "m", "k", "sample_every", "seed"):
            if key in raw:
                value = raw[key]
                if not isinstance(value, int) or isinstance(value, bool):
                    raise ConfigError(f"config key '{key}': expected an integer, got {value!r}")
                data[key] = value
        for key in ("kappa", "x", "y", "dt", "t_end"):
            value = raw[key]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"config key '{key}': expected a number, got {value!r}")
            data[key] = float(value)
        for key in ("q0", "p0"):
            value = raw[key]
            if not isinstance(value, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
            ):
                raise ConfigError(f"config key '{key}': expected a list of numbers")
            data[key] = [float(v) for v in value]
        if "output_path" in raw:
            if not isinstance(raw["output_path"], str):
                raise ConfigError("config key 'output_path': expected a string")
            data["output_path"] = raw["output_path"]
        cfg = cls(**data)
        for key in ("q0", "p0"):
            if len(getattr(cfg, key)) != cfg.n:
                raise ConfigError(
                    f"config key '{key}': expected {cfg.n} entries, got {len(getattr(cfg, key))}"
                )
        return cfg

    def to_dict(self):
        return asdict(self)

    def model(self):
        try:
            return ModelParams(n=self.n, m=self.m, kappa=self.kappa, x=self.x, y=self.y)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def phase_point(self):
        try:
            return PhasePoint(q=np.array(self.q0), p=np.array(self.p0))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def solver(self):
        try:
            return SolverConfig(
                dt=self.dt, t_end=self.t_end, k=self.k, sample_every=self.sample_every
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def load_config(path):
    try:
        with open(path) as handle:
            raw = json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")
    return RunConfig.from_dict(raw)


def _validate_initial(config):
    """Model, phase point and chamber checks shared by all commands."""
    params = config.model()
    phi0 = config.phase_point()
    if not is_regular(phi0.q, params.m):
        raise ConfigError("q0 is not regular (coincident or zero coordinates)")
    violation = first_chamber_violation(phi0.q, params.m)
    if violation is not None:
        raise ConfigError(f"q0 is not in the open Weyl chamber: {violation}")
    return params, phi0


def _fmt(value):
    return f"{value:.17g}"


def _write_csv(path, params, times, qs, ps):
    """Trajectory CSV with recomputed charges; returns the H matrix."""
    n = params.n
    hs = np.empty((times.shape[0], n))
    for i in range(times.shape[0]):
        hs[i] = reduced_hamiltonians(params, PhasePoint(q=qs[i], p=ps[i]))
    header = (
        ["t"]
        + [f"q{j + 1}" for j in range(n)]
        + [f"p{j + 1}" for j in range(n)]
        + [f"H{j + 1}" for j in range(n)]
    )
    with open(path, "w") as handle:
        handle.write(",".join(header) + "\n")
        for i in range(times.shape[0]):
            row = [times[i], *qs[i], *ps[i], *hs[i]]
            handle.write(",".join(_fmt(v) for v in row) + "\n")
    return hs


def _sidecar_path(csv_path):
    base, _ = os.path.splitext(csv_path)
    return base + ".json"


def _write_sidecar(csv_path, payload):
    with open(_sidecar_path(csv_path), "w") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def _drift_from_h(hs):
    drift = np.max(np.abs(hs - hs[0]), axis=0)
    return {f"H{j + 1}": float(drift[j]) for j in range(hs.shape[1])}


def cmd_info(args):
    config = load_config(args.config)
    params, phi0 = _validate_initial(config)
    margin = params.x**2 - params.y**2
    print(f"n = {params.n}, m = {params.m} ({params.m} + {params.n - params.m} species split)")
    print(f"kappa = {_fmt(params.kappa)}, x = {_fmt(params.x)}, y = {_fmt(params.y)}")
    print(f"x^2 - y^2 margin = {margin:.6e}")
    print(f"xy = {params.x * params.y:.6e} ({'attractive regime' if params.attractive else 'not flagged attractive'})")
    print(f"q0 regular: {is_regular(phi0.q, params.m)}")
    print("q0 in open Weyl chamber: True")
    print(f"H(q0, p0) = {_fmt(hamiltonian(params, phi0))}")
    return EXIT_OK


def cmd_check(args):
    config = load_config(args.config)
    params, phi0 = _validate_initial(config)
    if args.corrupt_lax:
        J = build_lax(params, phi0).J.copy()
        J[0, 1] += 1e-3  # deliberate fault injection for exit-path testing
        residual_plus, struct = _constraint_residuals(params, J)
        residual_gplus = _gplus_residual(params, phi0, J, struct)
    else:
        report = verify_constraints(params, phi0)
        residual_plus, residual_gplus = report.residual_plus, report.residual_gplus
    h = hamiltonian(params, phi0)
    h1 = reduced_hamiltonian(params, phi0, 1)
    identity = abs(h - h1)
    print(f"constraint residual (compact sector)     = {residual_plus:.6e}")
    print(f"constraint residual (non-compact sector) = {residual_gplus:.6e}")
    print(f"|H - H_1| energy identity residual       = {identity:.6e}")
    payload = {
        "residual_plus": residual_plus,
        "residual_gplus": residual_gplus,
        "energy_identity": identity,
    }
    passed = all(v <= 1e-9 for v in payload.values())
    payload["pass"] = passed
    print(json.dumps(payload, indent=2))
    if args.output:
        with open(args.output, "w") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")
    return EXIT_OK if passed else EXIT_TOLERANCE


def _output_csv(args, config):
    return args.output if args.output else config.output_path


def cmd_simulate(args):
    config = load_config(args.config)
    params, phi0 = _validate_initial(config)
    solver = config.solver()
    csv_path = _output_csv(args, config)
    try:
        traj = integrate_ode(params, phi0, solver)
    except (SingularConfiguration, ChamberExit) as exc:
        partial = exc.partial
        if partial is not None and len(partial) > 0:
            hs = _write_csv(csv_path, params, partial.times, partial.qs, partial.ps)
            _write_sidecar(
                csv_path,
                {
                    "solver": "verlet",
                    "drift": _drift_from_h(hs),
                    "error": str(exc),
                    "failure_time": exc.time,
                },
            )
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    hs = _write_csv(csv_path, params, traj.times, traj.qs, traj.ps)
    _write_sidecar(csv_path, {"solver": "verlet", "drift": _drift_from_h(hs)})
    print(f"wrote {len(traj)} samples to {csv_path}")
    return EXIT_OK


def cmd_solve(args):
    config = load_config(args.config)
    params, phi0 = _validate_initial(config)
    solver = config.solver()
    if not 1 <= solver.k <= params.n:
        raise ConfigError(f"config key 'k': need 1 <= k <= n, got {solver.k}")
    csv_path = _output_csv(args, config)
    times = solver.sample_times()
    try:
        traj = spectral_solve_q(params, phi0, solver.k, times)
        traj = reconstruct_p(params, phi0, traj, solver.k)
    except SpectralBreakdown as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPECTRAL
    hs = _write_csv(csv_path, params, traj.times, traj.qs, traj.ps)
    _write_sidecar(
        csv_path,
        {
            "solver": "spectral",
            "k": solver.k,
            "drift": _drift_from_h(hs),
            "min_eig_gap": traj.min_eig_gap,
            "eig_gap_flagged": traj.eig_gap_flagged,
            "stabilizer_residual": traj.aux_residual,
        },
    )
    print(f"wrote {len(traj)} samples to {csv_path}")
    return EXIT_OK


def cmd_compare(args):
    config = load_config(args.config)
    params, phi0 = _validate_initial(config)
    solver = config.solver()
    if solver.k != 1:
        raise ConfigError("compare requires k = 1 (the ODE route only integrates the energy flow)")
    try:
        ode = integrate_ode(params, phi0, solver)
    except (SingularConfiguration, ChamberExit) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    try:
        spec = spectral_solve_q(params, phi0, 1, ode.times)
        spec = reconstruct_p(params, phi0, spec, 1)
    except SpectralBreakdown as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPECTRAL
    dq = float(np.max(np.abs(spec.qs - ode.qs))) if len(ode) else 0.0
    dp = float(np.max(np.abs(spec.ps - ode.ps))) if len(ode) else 0.0
    tolerance = args.tolerance
    payload = {
        "samples": len(ode),
        "t_end": float(ode.times[-1]),
        "max_dq": dq,
        "max_dp": dp,
        "tolerance": tolerance,
        "min_eig_gap": spec.min_eig_gap,
        "pass": dq <= tolerance and dp <= tolerance,
    }
    print(f"max |q_spectral - q_ode| = {dq:.6e}")
    print(f"max |p_spectral - p_ode| = {dp:.6e}")
    print(json.dumps(payload, indent=2))
    if args.output:
        with open(args.output, "w") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")
    return EXIT_OK if payload["pass"] else EXIT_TOLERANCE


def cmd_involution(args):
    config = load_config(args.config)
    params, phi0 = _validate_initial(config)
    points = [phi0]
    if args.samples:
        rng = np.random.default_rng(config.seed)
        points += [
            random_chamber_point(rng, params, margin=0.2, spread=0.5, p_scale=0.5)
            for _ in range(args.samples)
        ]
    n = params.n
    worst = np.zeros((n, n))
    worst_scaled = 0.0
    for point in points:
        bracket = np.abs(poisson_bracket_matrix(params, point))
        charges = reduced_hamiltonians(params, point)
        scale = np.maximum(1.0, np.abs(np.outer(charges, charges)))
        worst = np.maximum(worst, bracket)
        worst_scaled = max(worst_scaled, float(np.max(bracket / scale)))
    tolerance = args.tolerance
    passed = worst_scaled <= tolerance
    print(f"max |{{H_j, H_k}}| over {len(points)} point(s), scaled by max(1, |H_j H_k|):")
    for row in worst:
        print("  " + "  ".join(f"{v:.3e}" for v in row))
    payload = {
        "points": len(points),
        "matrix_max_abs": worst.tolist(),
        "max_scaled_bracket": worst_scaled,
        "tolerance": tolerance,
        "pass": passed,
    }
    print(json.dumps({k: v for k, v in payload.items() if k != "matrix_max_abs"}, indent=2))
    if args.output:
        with open(args.output, "w") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")
    return EXIT_OK if passed else EXIT_TOLERANCE


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bcs",
        description="Two-species hyperbolic Sutherland model: experiments and diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "info": (cmd_info, "print model parameters and initial-data validity"),
        "check": (cmd_check, "verify constraint residuals and the energy identity"),
        "simulate": (cmd_simulate, "integrate the ODE route and write a trajectory CSV"),
        "solve": (cmd_solve, "run the diagonalization route and write a trajectory CSV"),
        "compare": (cmd_compare, "run both solvers and report the worst disagreement"),
        "involution": (cmd_involution, "finite-difference Poisson bracket matrix of the charges"),
    }
    for name, (func, help_text) in specs.items():
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to the JSON run config")
        cmd.add_argument("--output", help="output path (CSV for trajectories, JSON for reports)")
        cmd.add_argument(
            "--tolerance",
            type=float,
            default=1e-6,
            help="pass/fail threshold for compare and involution (default 1e-6)",
        )
        if name == "involution":
            cmd.add_argument(
                "--samples", type=int, default=0, help="extra random chamber points to test"
            )
        if name == "check":
            cmd.add_argument("--corrupt-lax", action="store_true", help=argparse.SUPPRESS)
        cmd.set_defaults(func=func)
    return parser


def _configure_logging():
    level = os.environ.get("BCS_LOG", "warn").lower()
    levels = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.WARNING))
    if level not in levels:
        log.warning("unknown BCS_LOG value %r; using warn", level)


def main(argv=None):
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SingularConfiguration, ChamberExit) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except SpectralBreakdown as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPECTRAL


if __name__ == "__main__":
    sys.exit(main())
