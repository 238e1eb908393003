"""Canonical experiment scenarios: paced reference, reentry, tracking.

The reference rhythm is produced by pacing the resting tissue with a
smoothed disc stimulus; its boundary outputs become the tracking target.
The reentry protocol applies an S1 strip stimulus followed by a delayed
S2 quadrant stimulus (cross-field pacing) and takes the field snapshot
that initializes the closed-loop tracking experiment.

Stimulus windows are smoothed in time by convolving the indicator of
[a, b] with a unit-area triangular kernel, which keeps the forcing
Lipschitz; the window edges +- the kernel halfwidth are the only times
the forcing is not smooth, and the integrator is forced to land on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .integrate import integrate_closed_loop
from .systems import FemSystem

__all__ = [
    "ReentryNotEstablished",
    "Pulse",
    "StimulusProgram",
    "ReentryProtocol",
    "smoothed_window",
    "disc_mask",
    "rect_mask",
    "make_disc_stimulus",
    "build_reference_interpolant",
    "generate_reference",
    "generate_reentry",
    "run_tracking_experiment",
]


class ReentryNotEstablished(RuntimeError):
    """Raised when the S1-S2 protocol fails the sustained activity check."""

    def __init__(self, measured, floor):
        self.measured = measured
        self.floor = floor
        super().__init__(
            f"reentry not established: min ||v|| {measured:.6g} under the "
            f"activity floor {floor:.6g}; retune the protocol")


def smoothed_window(a, b, halfwidth):
    """Time profile of the indicator of [a, b] mollified by a triangle.

    Returns a vectorized callable with values in [0, 1]: exactly 1 on
    [a + halfwidth, b - halfwidth], exactly 0 outside
    [a - halfwidth, b + halfwidth], value 1/2 at a and b, and piecewise
    quadratic ramps between.  The time integral equals b - a.
    """
    if not b > a:
        raise ValueError("window must satisfy a < b")
    if not 0.0 < halfwidth < 0.5 * (b - a):
        raise ValueError("halfwidth must lie in (0, (b - a)/2)")

    def cdf(y):
        # integral of the triangular kernel from -inf to y
        y = np.clip(y / halfwidth, -1.0, 1.0)
        return np.where(y <= 0.0, 0.5 * (y + 1.0) ** 2,
                        1.0 - 0.5 * (1.0 - y) ** 2)

    def profile(t):
        t = np.asarray(t, dtype=float)
        out = cdf(t - a) - cdf(t - b)
        return float(out) if out.ndim == 0 else out

    return profile


def disc_mask(mesh, center=(0.5, 0.5), r_sq=0.0225):
    """Nodal indicator of the closed disc (x-cx)^2 + (y-cy)^2 <= r_sq."""
    d = mesh.nodes - np.asarray(center, dtype=float)
    return (d[:, 0] ** 2 + d[:, 1] ** 2 <= r_sq).astype(float)


def rect_mask(mesh, x_max=math.inf, y_max=math.inf, x_min=-math.inf,
              y_min=-math.inf):
    """Nodal indicator of an axis-aligned box (bounds inclusive)."""
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    inside = (x >= x_min) & (x <= x_max) & (y >= y_min) & (y <= y_max)
    return inside.astype(float)


@dataclass(frozen=True)
class Pulse:
    """One stimulus pulse: where, how strong, and when."""

    mask: np.ndarray
    amplitude: float
    start: float
    end: float
    halfwidth: float


class StimulusProgram:
    """Sum of smoothed pulses realized as mass-weighted load vectors."""

    def __init__(self, pulses, ops):
        self.pulses = list(pulses)
        self._loads = [p.amplitude * (ops.mass @ p.mask) for p in self.pulses]
        self._profiles = [smoothed_window(p.start, p.end, p.halfwidth)
                          for p in self.pulses]
        self._mask_l2 = [float(np.sqrt(p.mask @ (ops.mass @ p.mask)))
                         for p in self.pulses]

    def load(self, t):
        """Right hand side load vector at time t."""
        out = self._profiles[0](t) * self._loads[0]
        for profile, vec in zip(self._profiles[1:], self._loads[1:]):
            out = out + profile(t) * vec
        return out

    @property
    def breakpoints(self):
        """Times where the forcing is only piecewise smooth."""
        pts = []
        for p in self.pulses:
            pts.extend((p.start - p.halfwidth, p.start + p.halfwidth,
                        p.end - p.halfwidth, p.end + p.halfwidth))
        return sorted(pts)

    def sup_l2(self):
        """Supremum over time of the stimulus L2(Omega) norm.

        Uses the discrete mask norm of the stimulus actually applied;
        pulses are assumed not to overlap in time, which holds for every
        canonical scenario.
        """
        if not self.pulses:
            return 0.0
        return max(p.amplitude * mn
                   for p, mn in zip(self.pulses, self._mask_l2))


def make_disc_stimulus(mesh, ops, amplitude=101.0, center=(0.5, 0.5),
                       r_sq=0.0225, windows=((49.0, 51.0), (299.0, 301.0)),
                       halfwidth=0.5):
    """The paced-rhythm stimulus: one disc mask pulsed over each window."""
    mask = disc_mask(mesh, center=center, r_sq=r_sq)
    pulses = [Pulse(mask=mask, amplitude=amplitude, start=a, end=b,
                    halfwidth=halfwidth) for a, b in windows]
    return StimulusProgram(pulses, ops)


@dataclass(frozen=True)
class ReentryProtocol:
    """Cross-field S1-S2 stimulation protocol and its acceptance check.

    S1 excites the strip x <= s1_xmax at s1_start; S2 excites the
    quadrant x <= s2_xmax, y <= s2_ymax once the S1 response is in its
    recovery tail.  The field snapshot at snapshot_time seeds the
    tracking experiment; the protocol is accepted only if ||v|| stays
    above activity_floor on [snapshot_time, snapshot_time + hold].
    """

    s1_amplitude: float = 101.0
    s1_xmax: float = 0.1
    s1_start: float = 0.0
    s1_duration: float = 1.0
    s2_amplitude: float = 101.0
    s2_xmax: float = 0.5
    s2_ymax: float = 0.5
    s2_start: float = 70.0
    s2_duration: float = 1.0
    halfwidth: float = 0.25
    snapshot_time: float = 100.0
    hold: float = 50.0
    activity_floor: float = 0.05

    def program(self, mesh, ops):
        s1 = Pulse(mask=rect_mask(mesh, x_max=self.s1_xmax),
                   amplitude=self.s1_amplitude,
                   start=self.s1_start, end=self.s1_start + self.s1_duration,
                   halfwidth=self.halfwidth)
        s2 = Pulse(mask=rect_mask(mesh, x_max=self.s2_xmax,
                                  y_max=self.s2_ymax),
                   amplitude=self.s2_amplitude,
                   start=self.s2_start, end=self.s2_start + self.s2_duration,
                   halfwidth=self.halfwidth)
        return StimulusProgram([s1, s2], ops)


def generate_reference(mesh, ops, params, program, t_end, icfg, sample_dt,
                       snapshot_times=()):
    """Open-loop paced run from rest; the log doubles as the reference.

    The system starts at the zero equilibrium, so the outputs vanish
    identically until the first stimulus window opens.
    """
    system = FemSystem(mesh, ops, params, stimulus=program.load)
    x0 = np.zeros(system.n_state)
    log, _ = integrate_closed_loop(system, (0.0, t_end), x0, icfg, sample_dt,
                                   breakpoints=program.breakpoints,
                                   snapshot_times=snapshot_times)
    return log


def generate_reentry(mesh, ops, params, protocol, icfg, sample_dt=0.1,
                     activity_floor=None):
    """Run the S1-S2 protocol; returns (v, u, log) at the snapshot time.

    Raises ReentryNotEstablished when ||v|| drops below the activity
    floor anywhere on [snapshot_time, snapshot_time + hold]; a protocol
    that fails the check must be retuned, never silently accepted.
    """
    floor = protocol.activity_floor if activity_floor is None \
        else float(activity_floor)
    if not floor > 0.0:
        raise ValueError("activity floor must be strictly positive")
    program = protocol.program(mesh, ops)
    t_end = protocol.snapshot_time + protocol.hold
    system = FemSystem(mesh, ops, params, stimulus=program.load)
    x0 = np.zeros(system.n_state)
    log, _ = integrate_closed_loop(system, (0.0, t_end), x0, icfg, sample_dt,
                                   breakpoints=program.breakpoints,
                                   snapshot_times=(protocol.snapshot_time,))
    window = log.restrict(t_min=protocol.snapshot_time)
    measured = float(np.min(window.v_l2))
    if measured < floor:
        raise ReentryNotEstablished(measured, floor)
    v, u = log.snapshots[protocol.snapshot_time]
    return v, u, log


def build_reference_interpolant(times, values):
    """C1 cubic interpolant through reference samples.

    Slopes are central differences (one-sided at the ends); evaluation
    outside the sample span clamps to the nearest endpoint, keeping the
    reference bounded with bounded derivative.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or times.shape[0] < 2:
        raise ValueError("need at least two reference samples")
    if np.any(np.diff(times) <= 0.0):
        raise ValueError("reference times must be strictly increasing")
    slopes = np.empty_like(values)
    slopes[0] = (values[1] - values[0]) / (times[1] - times[0])
    slopes[-1] = (values[-1] - values[-2]) / (times[-1] - times[-2])
    if times.shape[0] > 2:
        dt = (times[2:] - times[:-2])[:, None]
        slopes[1:-1] = (values[2:] - values[:-2]) / dt
    spline = CubicHermiteSpline(times, values, slopes, axis=0)
    t0, t1 = times[0], times[-1]

    def interpolant(t):
        return spline(min(max(float(t), t0), t1))

    return interpolant


def run_tracking_experiment(mesh, ops, params, v0, u0, reference_log, funnel,
                            control, icfg, sample_dt, stimulus=None,
                            t_end=None):
    """Closed-loop funnel tracking of a reference log's outputs.

    v0, u0 seed the plant (typically a reentry snapshot).  stimulus, if
    given, keeps the pacing current of the reference active in the
    plant.  t_end defaults to the reference span and may not exceed it.
    """
    t_ref = reference_log.t
    if t_end is None:
        t_end = float(t_ref[-1])
    if t_end > t_ref[-1] + 1e-12:
        raise ValueError("tracking horizon exceeds the reference span")
    reference = build_reference_interpolant(t_ref, reference_log.y_ref)
    system = FemSystem(mesh, ops, params,
                       stimulus=stimulus.load if stimulus is not None else None,
                       funnel=funnel, control=control, reference=reference)
    x0 = np.concatenate([np.asarray(v0, dtype=float),
                         np.asarray(u0, dtype=float)])
    breakpoints = stimulus.breakpoints if stimulus is not None else ()
    log, _ = integrate_closed_loop(system, (0.0, t_end), x0, icfg, sample_dt,
                                   breakpoints=breakpoints)
    return log
