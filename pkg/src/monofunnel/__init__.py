"""Monodomain reaction-diffusion simulation under funnel output feedback.

Two spatial discretizations of the same two-field model on a rectangle
with zero-flux boundaries: lumped-mass P1 finite elements and a cosine
spectral basis.  Both plug into one adaptive embedded Runge-Kutta loop
that samples on a fixed grid, evaluates the boundary-port feedback law,
and aborts rather than step across a funnel violation.  Verification
checks, file formats, and the command line front end live in their own
modules and are re-exported here.
"""

from .model import (ModelParams, EnergyBudget, p3, ionic_current,
                    recovery_rhs, lyapunov, energy_budget)
from .funnel import (FunnelSpec, ControllerConfig, FunnelViolation,
                     phi_eval, funnel_radius, funnel_margin, feedback)
from .fem import (Mesh, AssembledOperators, OutputOperator, build_mesh,
                  triangle_areas, assemble, boundary_output,
                  distributed_output, control_injection)
from .spectral import (SpectralBasis, mode_shape, build_basis,
                       output_gamma, project_nodal, p3_project,
                       spectral_rhs)
from .integrate import (IntegratorConfig, IntegrationAbort, TrajectoryLog,
                        rk23_step, integrate_closed_loop)
from .systems import FemSystem, SpectralSystem
from .scenario import (ReentryNotEstablished, ReentryProtocol, Pulse,
                       StimulusProgram, smoothed_window, disc_mask,
                       rect_mask, make_disc_stimulus, generate_reference,
                       generate_reentry, build_reference_interpolant,
                       run_tracking_experiment)
from .verify import (VerificationReport, check_funnel_invariant,
                     check_energy_bound, linear_decay_check,
                     holder_estimate, cross_discretization_check,
                     boundedness_check)
from .formats import (TRAJECTORY_HEADER, FormatError, write_trajectory,
                      read_trajectory, write_snapshot, read_snapshot,
                      report_lines, reports_json)
from .config import (ConfigError, default_config, parse_config,
                     load_config, apply_overrides, render_config)
from .cli import cli_dispatch, main

__version__ = "0.1.0"

__all__ = [
    "ModelParams", "EnergyBudget", "p3", "ionic_current", "recovery_rhs",
    "lyapunov", "energy_budget",
    "FunnelSpec", "ControllerConfig", "FunnelViolation", "phi_eval",
    "funnel_radius", "funnel_margin", "feedback",
    "Mesh", "AssembledOperators", "OutputOperator", "build_mesh",
    "triangle_areas", "assemble", "boundary_output", "distributed_output",
    "control_injection",
    "SpectralBasis", "mode_shape", "build_basis", "output_gamma",
    "project_nodal", "p3_project", "spectral_rhs",
    "IntegratorConfig", "IntegrationAbort", "TrajectoryLog", "rk23_step",
    "integrate_closed_loop",
    "FemSystem", "SpectralSystem",
    "ReentryNotEstablished", "ReentryProtocol", "Pulse",
    "StimulusProgram", "smoothed_window", "disc_mask", "rect_mask",
    "make_disc_stimulus", "generate_reference", "generate_reentry",
    "build_reference_interpolant", "run_tracking_experiment",
    "VerificationReport", "check_funnel_invariant", "check_energy_bound",
    "linear_decay_check", "holder_estimate", "cross_discretization_check",
    "boundedness_check",
    "TRAJECTORY_HEADER", "FormatError", "write_trajectory",
    "read_trajectory", "write_snapshot", "read_snapshot", "report_lines",
    "reports_json",
    "ConfigError", "default_config", "parse_config", "load_config",
    "apply_overrides", "render_config",
    "cli_dispatch", "main",
]
