"""Command-line entry point: ``atomcav <subcommand> [flags]``.

Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import io
from .dde import integrate_collective
from .errors import NoConvergence, NumericalError, ValidationError
from .experiments import sweep_delta, sweep_deltac, sweep_eta_density
from .intensity import intensity_map
from .oracle import collective_project, integrate_fullarray
from .residue import reconstruct
from .spectral import default_window, poles_muller, response_f0

ORACLE_TOL = 1e-8
SUBCOMMANDS = ("simulate", "spectrum", "poles", "reconstruct", "intensity", "sweep", "oracle-check")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="atomcav",
                                     description="Emitter between two atomic mirrors in a waveguide.")
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("system")
    g.add_argument("--config", help="JSON file with run settings; flags override it")
    g.add_argument("--n", type=int, help="atoms per mirror")
    g.add_argument("--eta", type=float, help="delay gamma d / v")
    g.add_argument("--delta", type=float, help="emitter-mirror detuning")
    g.add_argument("--placement", choices=("node", "antinode"))
    g.add_argument("--phi0", type=float, help="propagation phase, used when no placement is given")
    g.add_argument("--delta-c", dest="delta_c", type=float, help="detuning from the node resonance")
    g.add_argument("--fringe-count", dest="fringe_count", type=int)
    r = common.add_argument_group("run")
    r.add_argument("--tmax", dest="t_max", type=float)
    r.add_argument("--steps-per-delay", dest="steps_per_delay", type=int)
    r.add_argument("--method", choices=("euler", "heun"))
    r.add_argument("--record-every", dest="record_every", type=int)
    r.add_argument("--omega-window", dest="omega_window", type=float)
    r.add_argument("--omega-points", dest="omega_points", type=int)
    r.add_argument("--x-min", dest="x_min", type=float)
    r.add_argument("--x-max", dest="x_max", type=float)
    r.add_argument("--x-points", dest="x_points", type=int)
    r.add_argument("--t-points", dest="t_points", type=int)
    r.add_argument("--per-side", "--P", dest="per_side", type=int)
    r.add_argument("--axis", dest="sweep_axis", choices=("eta", "delta", "delta_c"))
    r.add_argument("--start", dest="sweep_start", type=float)
    r.add_argument("--stop", dest="sweep_stop", type=float)
    r.add_argument("--points", dest="sweep_points", type=int)
    r.add_argument("--jobs", type=int, help="sweep workers (default: $ATOMCAV_JOBS or all cores)")
    r.add_argument("--out", help="output directory (default ./out)")
    r.add_argument("--format", choices=("csv", "bin"))
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve_config(args: argparse.Namespace) -> io.RunConfig:
    overrides = {k: getattr(args, k, None) for k in io.CONFIG_KEYS}
    cfg = io.load_config(args.config, overrides) if args.config else io.config_from_dict({}, overrides)
    if args.placement is None and args.phi0 is not None:
        # an explicit phi0 flag must not be shadowed by a placement
        cfg = io.validate_config(dataclasses.replace(cfg, placement=None))
    return cfg


def _omega_grid(cfg: io.RunConfig, params) -> np.ndarray:
    half = cfg.omega_window if cfg.omega_window is not None else default_window(params)
    return np.linspace(-half, half, cfg.omega_points)


def _simulate(cfg, params, out):
    traj = integrate_collective(params, cfg.t_max, cfg.steps_per_delay, cfg.method, cfg.record_every)
    return [io.write_trajectory_csv(out / "trajectory.csv", traj)], {}


def _spectrum(cfg, params, out):
    resp = response_f0(_omega_grid(cfg, params), params)
    return [io.write_spectrum_csv(out / "spectrum.csv", resp)], {}


def _poles(cfg, params, out):
    poles = poles_muller(params)
    for seed, reason in poles.failures:
        print(f"seed {seed:.6g}: {reason}", file=sys.stderr)
    if len(poles) == 0:
        raise NoConvergence(None)
    for w in poles.poles:
        print(f"{w.real:+.10f} {w.imag:+.10f}i")
    return [io.write_poles_csv(out / "poles.csv", poles)], {"n_poles": len(poles)}


def _reconstruct(cfg, params, out):
    poles = poles_muller(params)
    traj = integrate_collective(params, cfg.t_max, cfg.steps_per_delay, cfg.method, cfg.record_every)
    rec = reconstruct(poles, traj.times, cfg.per_side, reference=traj.c0)
    print(f"max |c0_approx - c0| = {rec.max_error:.6g}")
    return ([io.write_reconstruction_csv(out / "reconstruction.csv", rec)],
            {"max_error": rec.max_error, "l2_error": rec.l2_error})


def _intensity(cfg, params, out):
    traj = integrate_collective(params, cfg.t_max, cfg.steps_per_delay, cfg.method, cfg.record_every)
    reach = cfg.t_max + params.eta
    x_min = cfg.x_min if cfg.x_min is not None else -reach
    x_max = cfg.x_max if cfg.x_max is not None else reach
    x = np.linspace(x_min, x_max, cfg.x_points)
    t = np.linspace(0.0, traj.times[-1], cfg.t_points)
    imap = intensity_map(traj, x, t)
    if cfg.format == "bin":
        return [io.write_matrix_bin(out / "intensity.bin", imap.intensity)], {
            "x": [x_min, x_max, cfg.x_points], "t": [0.0, float(t[-1]), cfg.t_points]}
    return [io.write_intensity_csv(out / "intensity.csv", imap)], {}


def _sweep(cfg, params, out):
    values = np.linspace(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_points)
    omega = _omega_grid(cfg, params)
    run = {"eta": sweep_eta_density, "delta": sweep_delta, "delta_c": sweep_deltac}[cfg.sweep_axis]
    result = run(params, values, omega, jobs=cfg.jobs)
    return list(io.write_sweep(out / "sweep.csv", result)), {}


def _oracle_check(cfg, params, out):
    t_max = cfg.t_max
    spd = cfg.steps_per_delay
    full = integrate_fullarray(params, t_max, spd, cfg.method)
    coll = integrate_collective(params, t_max, spd, cfg.method)
    c_lm, c_rm = collective_project(full)
    err = max(float(np.max(np.abs(full.site(0) - coll.c0))),
              float(np.max(np.abs(c_lm - coll.c_lm))),
              float(np.max(np.abs(c_rm - coll.c_rm))))
    print(f"max |full-array projection - collective| = {err:.3e} (tolerance {ORACLE_TOL:g})")
    if not err <= ORACLE_TOL:
        raise NumericalError(f"oracle mismatch {err:.3e} exceeds {ORACLE_TOL:g}")
    return [], {"oracle_error": err}


HANDLERS = {
    "simulate": _simulate,
    "spectrum": _spectrum,
    "poles": _poles,
    "reconstruct": _reconstruct,
    "intensity": _intensity,
    "sweep": _sweep,
    "oracle-check": _oracle_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        cfg = resolve_config(args)
        if args.command == "oracle-check":
            # the oracle is slow per step; default to its own lighter settings
            cfg = dataclasses.replace(
                cfg,
                t_max=args.t_max if args.t_max is not None else max(4 * cfg.eta, 2.0),
                steps_per_delay=args.steps_per_delay if args.steps_per_delay is not None else 200)
        params = cfg.params()
        out = Path(cfg.out)
        outputs, extra = HANDLERS[args.command](cfg, params, out)
        manifest = io.write_manifest(out / f"{args.command}.manifest.json", cfg, outputs,
                                     {"command": args.command, **extra})
        for path in [*outputs, manifest]:
            print(path)
        return 0
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
