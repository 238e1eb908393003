"""Command line front end.

Subcommands generate the stock experiments and run verification checks
on their logs.  Exit codes: 0 on success, 1 when a verification check
or the activity floor fails, 2 for configuration or file errors, 3 when
time integration aborts.  Everything is driven by the config file and
flags; no environment variables, no network.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import config as cfgmod
from .config import ConfigError
from .fem import build_mesh, assemble
from .spectral import build_basis, mode_shape
from .integrate import IntegrationAbort, integrate_closed_loop
from .model import energy_budget
from .systems import FemSystem, SpectralSystem
from .scenario import (ReentryNotEstablished, ReentryProtocol,
                       make_disc_stimulus, generate_reference,
                       generate_reentry, run_tracking_experiment)
from .formats import (FormatError, write_trajectory, read_trajectory,
                      write_snapshot, read_snapshot, report_lines)
from .verify import (VerificationReport, check_funnel_invariant,
                     check_energy_bound, linear_decay_check,
                     holder_estimate, cross_discretization_check,
                     boundedness_check)

__all__ = ["cli_dispatch", "main"]


def _add_common(parser):
    parser.add_argument("--config", metavar="FILE",
                        help="key = value config file")
    parser.add_argument("--k0", metavar="GAIN",
                        help="override controller.k0")
    parser.add_argument("--mesh", metavar="N[xM]",
                        help="override mesh.nx and mesh.ny")
    parser.add_argument("--modes", metavar="N[xM]",
                        help="override modes.x and modes.y")
    parser.add_argument("--t-end", dest="t_end", metavar="T",
                        help="override run.t_end")
    parser.add_argument("--out", metavar="DIR", default=".",
                        help="output directory (default: current)")


def _split_pair(raw, what):
    parts = raw.lower().split("x")
    if len(parts) == 1:
        return parts[0], parts[0]
    if len(parts) == 2:
        return parts[0], parts[1]
    raise ConfigError([f"{what} expects N or NxM, got {raw!r}"])


def _load_values(args):
    if args.config is not None:
        values = cfgmod.load_config(args.config)
    else:
        values = cfgmod.default_config()
    overrides = {}
    if getattr(args, "k0", None) is not None:
        overrides["controller.k0"] = args.k0
    if getattr(args, "mesh", None) is not None:
        nx, ny = _split_pair(args.mesh, "--mesh")
        overrides["mesh.nx"] = nx
        overrides["mesh.ny"] = ny
    if getattr(args, "modes", None) is not None:
        mx, my = _split_pair(args.modes, "--modes")
        overrides["modes.x"] = mx
        overrides["modes.y"] = my
    if getattr(args, "t_end", None) is not None:
        overrides["run.t_end"] = args.t_end
    if overrides:
        values = cfgmod.apply_overrides(values, overrides)
    return values


def _fem_setup(values):
    params = cfgmod.model_params(values)
    mesh = build_mesh(values["mesh.nx"], values["mesh.ny"],
                      lx=values["domain.lx"], ly=values["domain.ly"])
    ops = assemble(mesh, params)
    return params, mesh, ops


def _stimulus(values, mesh, ops):
    return make_disc_stimulus(
        mesh, ops,
        amplitude=values["stimulus.amplitude"],
        center=(values["stimulus.center_x"], values["stimulus.center_y"]),
        r_sq=values["stimulus.r_sq"],
        windows=cfgmod.parse_windows(values["stimulus.windows"]),
        halfwidth=values["stimulus.halfwidth"])


def _ensure_out(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _print_reports(reports):
    for line in report_lines(reports):
        print(line)
    return 0 if all(r.passed for r in reports) else 1


def _cmd_reference(args):
    values = _load_values(args)
    out = _ensure_out(args)
    params, mesh, ops = _fem_setup(values)
    program = _stimulus(values, mesh, ops)
    snapshot_times = cfgmod.parse_times(values["run.snapshot_times"])
    log = generate_reference(
        mesh, ops, params, program,
        t_end=values["run.t_end"],
        icfg=cfgmod.integrator_config(values),
        sample_dt=values["run.sample_dt"],
        snapshot_times=snapshot_times)
    csv_path = os.path.join(out, "reference.csv")
    write_trajectory(csv_path, log)
    print(f"wrote {csv_path} ({log.n_samples} samples, "
          f"max |v| = {np.max(log.v_l2):.6g})")
    for t in snapshot_times:
        v, u = log.snapshots[t]
        snap_path = os.path.join(out, f"snapshot-{t:g}.txt")
        write_snapshot(snap_path, mesh.nx, mesh.ny, t, v, u)
        print(f"wrote {snap_path}")
    return 0


def _protocol(values):
    return ReentryProtocol(
        s1_amplitude=values["reentry.s1_amplitude"],
        s1_xmax=values["reentry.s1_xmax"],
        s1_start=values["reentry.s1_start"],
        s1_duration=values["reentry.s1_duration"],
        s2_amplitude=values["reentry.s2_amplitude"],
        s2_xmax=values["reentry.s2_xmax"],
        s2_ymax=values["reentry.s2_ymax"],
        s2_start=values["reentry.s2_start"],
        s2_duration=values["reentry.s2_duration"],
        halfwidth=values["reentry.halfwidth"],
        snapshot_time=values["reentry.snapshot_time"],
        hold=values["reentry.hold"],
        activity_floor=values["reentry.activity_floor"])


def _cmd_reentry(args):
    values = _load_values(args)
    out = _ensure_out(args)
    params, mesh, ops = _fem_setup(values)
    protocol = _protocol(values)
    floor = None
    if args.reference is not None:
        ref = read_trajectory(args.reference)
        floor = values["reentry.floor_fraction"] * float(np.max(ref.v_l2))
    v, u, log = generate_reentry(
        mesh, ops, params, protocol,
        icfg=cfgmod.integrator_config(values),
        sample_dt=values["run.sample_dt"],
        activity_floor=floor)
    csv_path = os.path.join(out, "reentry.csv")
    state_path = os.path.join(out, "reentry-state.txt")
    write_trajectory(csv_path, log)
    write_snapshot(state_path, mesh.nx, mesh.ny, protocol.snapshot_time,
                   v, u)
    held = log.restrict(t_min=protocol.snapshot_time)
    print(f"activity held at |v| >= {np.min(held.v_l2):.6g} over "
          f"[{protocol.snapshot_time:g}, "
          f"{protocol.snapshot_time + protocol.hold:g}]")
    print(f"wrote {csv_path}")
    print(f"wrote {state_path}")
    return 0


def _cmd_track(args):
    values = _load_values(args)
    out = _ensure_out(args)
    params, mesh, ops = _fem_setup(values)
    reference_log = read_trajectory(args.reference)
    nx, ny, _, v0, u0 = read_snapshot(args.snapshot)
    if (nx, ny) != (mesh.nx, mesh.ny):
        raise ConfigError([f"snapshot grid {nx}x{ny} does not match the "
                           f"configured mesh {mesh.nx}x{mesh.ny}"])
    stimulus = None
    if values["run.track_stimulus"]:
        stimulus = _stimulus(values, mesh, ops)
    log = run_tracking_experiment(
        mesh, ops, params, v0, u0, reference_log,
        funnel=cfgmod.funnel_spec(values),
        control=cfgmod.controller_config(values),
        icfg=cfgmod.integrator_config(values),
        sample_dt=values["run.sample_dt"],
        stimulus=stimulus,
        t_end=values["run.t_end"])
    csv_path = os.path.join(out, "track.csv")
    write_trajectory(csv_path, log)
    print(f"wrote {csv_path}")
    reports = [
        check_funnel_invariant(log, delta=values["funnel.gamma"]),
        boundedness_check(log),
    ]
    return _print_reports(reports)


def _cmd_diffusion_test(args):
    values = _load_values(args)
    params = cfgmod.model_params(values)
    icfg = cfgmod.integrator_config(values)
    try:
        j, k = (int(p) for p in args.mode.split(","))
    except ValueError:
        raise ConfigError([f"--mode expects j,k with integers, got "
                           f"{args.mode!r}"]) from None
    t_end = values["run.t_end"] if args.t_end is not None else 10.0
    reports = []
    if args.discretization == "spectral":
        quad = values["modes.quad_points"] or None
        basis = build_basis(values["modes.x"] - 1, values["modes.y"] - 1,
                            params, lx=values["domain.lx"],
                            ly=values["domain.ly"], quad_points=quad)
        reports.append(linear_decay_check(basis, params, (j, k), t_end,
                                          icfg))
    else:
        params, mesh, ops = _fem_setup(values)
        reports.append(linear_decay_check((mesh, ops), params, (j, k),
                                          t_end, icfg))
        reports.append(_mass_report(mesh, ops, params, (j, k), t_end,
                                    icfg))
    return _print_reports(reports)


def _run_open(system, t_end, x0, icfg, sample_dt, snapshot_times=()):
    return integrate_closed_loop(system, (0.0, t_end), x0, icfg,
                                 sample_dt, snapshot_times=snapshot_times)


def _mass_report(mesh, ops, params, mode, t_end, icfg):
    j, k = mode
    v0 = mode_shape(mesh.nodes, j, k, lx=mesh.lx, ly=mesh.ly)
    x0 = np.concatenate([v0, np.zeros(mesh.n_nodes)])
    system = FemSystem(mesh, ops, params, include_reaction=False,
                       include_recovery=False)
    checkpoints = tuple(np.linspace(0.0, t_end, 9)[1:])
    log, _ = _run_open(system, t_end, x0, icfg, t_end / 100.0,
                       snapshot_times=checkpoints)
    ones = np.ones(mesh.n_nodes)
    mass0 = float(ones @ (ops.mass @ v0))
    drift = 0.0
    for t in checkpoints:
        v, _ = log.snapshots[t]
        drift = max(drift, abs(float(ones @ (ops.mass @ v)) - mass0))
    tol = 1e-6 * max(1.0, abs(mass0))
    return VerificationReport(
        name="mass-conservation",
        passed=bool(drift <= tol),
        measured={"drift": drift, "mass0": mass0},
        tolerance=tol,
        note="total mass drift under pure diffusion")


def _cmd_converge(args):
    values = _load_values(args)
    params, mesh, ops = _fem_setup(values)
    quad = values["modes.quad_points"] or None
    basis = build_basis(values["modes.x"] - 1, values["modes.y"] - 1,
                        params, lx=values["domain.lx"],
                        ly=values["domain.ly"], quad_points=quad)
    t_end = values["run.t_end"] if args.t_end is not None else 10.0
    sample_dt = values["run.sample_dt"]
    icfg = cfgmod.integrator_config(values)

    # smooth three-mode initial potential, same function on both sides
    coeffs = ((0, 0, 1.0), (1, 0, 1.0), (0, 1, 1.0))
    v0 = np.zeros(mesh.n_nodes)
    for j, k, c in coeffs:
        v0 += c * mode_shape(mesh.nodes, j, k, lx=mesh.lx, ly=mesh.ly)
    x0_fem = np.concatenate([v0, np.zeros(mesh.n_nodes)])
    fem = FemSystem(mesh, ops, params)
    log_fem, _ = _run_open(fem, t_end, x0_fem, icfg, sample_dt)

    mu0 = np.zeros(basis.n_modes)
    for j, k, c in coeffs:
        idx = np.flatnonzero((basis.modes[:, 0] == j)
                             & (basis.modes[:, 1] == k))
        mu0[idx[0]] = c
    x0_sp = np.concatenate([mu0, np.zeros(basis.n_modes)])
    spectral = SpectralSystem(basis, params)
    log_sp, _ = _run_open(spectral, t_end, x0_sp, icfg, sample_dt)

    report = cross_discretization_check(log_fem, log_sp, tol=args.tol)
    return _print_reports([report])


def _cmd_verify(args):
    values = _load_values(args)
    log = read_trajectory(args.log)
    checks = args.check or ["funnel", "bounded"]
    reports = []
    for check in checks:
        if check == "funnel":
            reports.append(check_funnel_invariant(
                log, delta=values["funnel.gamma"]))
        elif check == "energy":
            params, mesh, ops = _fem_setup(values)
            program = _stimulus(values, mesh, ops)
            budget = energy_budget(
                yref_sup=0.0, isi_sup_l2=program.sup_l2(), k0=0.0,
                params=params,
                area=values["domain.lx"] * values["domain.ly"])
            reports.append(check_energy_bound(log, budget, params))
        elif check == "holder":
            reports.append(holder_estimate(
                log, field=args.field, lam=args.lam, delta=args.delta))
        elif check == "bounded":
            reports.append(boundedness_check(log))
    return _print_reports(reports)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="monofunnel",
        description="monodomain reaction-diffusion runs under funnel "
                    "output feedback")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reference",
                       help="open-loop stimulated run, writes the "
                            "reference trajectory and snapshots")
    _add_common(p)
    p.set_defaults(func=_cmd_reference)

    p = sub.add_parser("reentry",
                       help="two-pulse protocol with an activity floor "
                            "check, writes trajectory and state")
    _add_common(p)
    p.add_argument("--reference", metavar="CSV",
                   help="derive the floor from this trajectory instead "
                        "of reentry.activity_floor")
    p.set_defaults(func=_cmd_reentry)

    p = sub.add_parser("track",
                       help="closed-loop run tracking a recorded "
                            "reference from a snapshot state")
    _add_common(p)
    p.add_argument("--reference", metavar="CSV", required=True,
                   help="reference trajectory to track")
    p.add_argument("--snapshot", metavar="FILE", required=True,
                   help="initial state file")
    p.set_defaults(func=_cmd_track)

    p = sub.add_parser("diffusion-test",
                       help="single-mode decay rate against the analytic "
                            "eigenvalue")
    _add_common(p)
    p.add_argument("--mode", default="1,0", metavar="J,K",
                   help="cosine mode indices (default 1,0)")
    p.add_argument("--discretization", choices=("fem", "spectral"),
                   default="fem")
    p.set_defaults(func=_cmd_diffusion_test)

    p = sub.add_parser("converge",
                       help="open-loop output gap between the two "
                            "discretizations")
    _add_common(p)
    p.add_argument("--tol", type=float, default=1e-2,
                   help="sup-norm gap tolerance (default 1e-2)")
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("verify",
                       help="run checks against a trajectory file")
    _add_common(p)
    p.add_argument("--log", metavar="CSV", required=True)
    p.add_argument("--check", action="append",
                   choices=("funnel", "energy", "holder", "bounded"),
                   help="repeatable; default: funnel and bounded")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5,
                   help="exponent for the holder check (default 0.5)")
    p.add_argument("--delta", type=float, default=0.0,
                   help="skip samples before this time in the holder "
                        "check")
    p.add_argument("--field", default="y",
                   choices=("y", "v_l2", "u_l2", "e_norm"),
                   help="series for the holder check (default y)")
    p.set_defaults(func=_cmd_verify)
    return parser


def cli_dispatch(argv):
    """Parse argv and run a subcommand, returning the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error:\n{exc}", file=sys.stderr)
        return 2
    except FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ReentryNotEstablished as exc:
        print(f"activity floor not met: {exc}", file=sys.stderr)
        return 1
    except IntegrationAbort as exc:
        print(f"integration aborted: {exc}", file=sys.stderr)
        return 3


def main():
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
