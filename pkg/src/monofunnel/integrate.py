"""Adaptive embedded Runge-Kutta 3(2) integration with funnel guarding.

The stepper is the Bogacki-Shampine pair: four stages, third order
accurate, first-same-as-last, with an embedded second order error
estimate.  Dense output between accepted steps is the cubic Hermite
interpolant through both endpoint states and derivatives.

The integrator is generic over the semidiscrete system: it only needs a
right hand side, an output map and norm accessors.  A FunnelViolation
raised inside the right hand side rejects the attempted step and halves
the step size, so committed states never leave the funnel; repeated
rejection aborts the run with IntegrationAbort rather than clamping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .funnel import FunnelViolation, feedback, funnel_margin, phi_eval

__all__ = [
    "IntegratorConfig",
    "IntegrationAbort",
    "TrajectoryLog",
    "rk23_step",
    "integrate_closed_loop",
]

# Bogacki-Shampine 3(2): stage abscissae, third order weights and the
# difference between the third and second order solutions.
_C2, _C3 = 0.5, 0.75
_A21 = 0.5
_A32 = 0.75
_B1, _B2, _B3 = 2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0
_E1, _E2, _E3, _E4 = -5.0 / 72.0, 1.0 / 12.0, 1.0 / 9.0, -1.0 / 8.0

_MAX_GROWTH = 5.0


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and step size policy of the adaptive stepper."""

    rtol: float = 1e-3
    atol: float = 1e-6
    dt_init: float = 1e-3
    dt_min: float = 1e-12
    dt_max: float = 1.0
    safety: float = 0.9
    max_rejects: int = 50

    def __post_init__(self):
        if not (self.rtol > 0.0 and self.atol > 0.0):
            raise ValueError("tolerances must be strictly positive")
        if not 0.0 < self.dt_min <= self.dt_init <= self.dt_max:
            raise ValueError("need 0 < dt_min <= dt_init <= dt_max")
        if not 0.0 < self.safety < 1.0:
            raise ValueError("safety factor must lie in (0, 1)")
        if self.max_rejects < 1:
            raise ValueError("max_rejects must be at least 1")


class IntegrationAbort(RuntimeError):
    """Raised when the step size control cannot make progress."""

    def __init__(self, t, dt, reason):
        self.t = t
        self.dt = dt
        self.reason = reason
        super().__init__(f"integration aborted at t={t} (dt={dt:.3e}): {reason}")


@dataclass
class TrajectoryLog:
    """Uniformly sampled run record.

    All arrays share the sample axis; y, y_ref and i_se have one column
    per output.  funnel_radius is inf wherever the funnel constraint is
    inactive, and margin is the funnel margin 1 - phi^2 ||e||^2 (1 when
    no funnel applies).  Runs without a reference store y_ref = y and a
    zero error.  snapshots maps requested times to (v, u) nodal field
    pairs for discretizations that expose them.
    """

    t: np.ndarray
    y: np.ndarray
    y_ref: np.ndarray
    e_norm: np.ndarray
    funnel_radius: np.ndarray
    i_se: np.ndarray
    v_l2: np.ndarray
    u_l2: np.ndarray
    margin: np.ndarray
    snapshots: dict = field(default_factory=dict)

    @property
    def n_samples(self):
        return self.t.shape[0]

    @property
    def m(self):
        return self.y.shape[1]

    def restrict(self, t_min=-math.inf, t_max=math.inf):
        """Sub-log with samples in [t_min, t_max] (snapshots dropped)."""
        keep = (self.t >= t_min) & (self.t <= t_max)
        return TrajectoryLog(
            t=self.t[keep], y=self.y[keep], y_ref=self.y_ref[keep],
            e_norm=self.e_norm[keep], funnel_radius=self.funnel_radius[keep],
            i_se=self.i_se[keep], v_l2=self.v_l2[keep], u_l2=self.u_l2[keep],
            margin=self.margin[keep])


def _stages(rhs, t, x, dt, f0):
    """One Bogacki-Shampine attempt; returns (x_next, err_vec, k1, k4)."""
    # non-finite intermediates are caught by the caller, not warned about
    with np.errstate(over="ignore", invalid="ignore"):
        k1 = f0 if f0 is not None else rhs(t, x)
        k2 = rhs(t + _C2 * dt, x + (dt * _A21) * k1)
        k3 = rhs(t + _C3 * dt, x + (dt * _A32) * k2)
        x_next = x + dt * (_B1 * k1 + _B2 * k2 + _B3 * k3)
        k4 = rhs(t + dt, x_next)
        err_vec = dt * (_E1 * k1 + _E2 * k2 + _E3 * k3 + _E4 * k4)
    return x_next, err_vec, k1, k4


def _error_norm(err_vec, x, cfg):
    scale = cfg.atol + cfg.rtol * np.abs(x)
    with np.errstate(over="ignore", invalid="ignore"):
        return float(np.sqrt(np.mean((err_vec / scale) ** 2)))


def _suggest(dt, err, cfg):
    if err == 0.0:
        factor = _MAX_GROWTH
    else:
        factor = min(_MAX_GROWTH, max(0.1, cfg.safety * err ** (-1.0 / 3.0)))
    return min(cfg.dt_max, max(cfg.dt_min, factor * dt))


def rk23_step(rhs, t, x, dt, cfg, f0=None):
    """Single embedded step; returns (x_next, error_estimate, dt_suggest).

    error_estimate is the weighted RMS of the difference between the
    third and second order solutions against atol + rtol*|x|; values
    <= 1 mean the step is acceptable at the configured tolerances.
    Passing f0 = rhs(t, x) avoids recomputing the first stage.
    """
    x_next, err_vec, _, _ = _stages(rhs, t, x, dt, f0)
    err = _error_norm(err_vec, x, cfg)
    return x_next, err, _suggest(dt, err, cfg)


def _hermite(x0, f0, x1, f1, dt, theta):
    t2 = theta * theta
    t3 = t2 * theta
    return ((2.0 * t3 - 3.0 * t2 + 1.0) * x0
            + (t3 - 2.0 * t2 + theta) * dt * f0
            + (-2.0 * t3 + 3.0 * t2) * x1
            + (t3 - t2) * dt * f1)


def _sample_grid(t0, t1, sample_dt):
    span = t1 - t0
    n = int(round(span / sample_dt))
    if n < 1 or abs(n * sample_dt - span) > 1e-9 * max(1.0, abs(span)):
        raise ValueError("sample_dt must evenly divide the time span")
    grid = t0 + sample_dt * np.arange(n + 1)
    grid[-1] = t1
    return grid


class _Recorder:
    """Accumulates sample rows and enforces the funnel invariant."""

    def __init__(self, system):
        self.system = system
        self.rows = []

    def emit(self, t, x):
        sys = self.system
        y = sys.observe(x)
        ref = sys.reference(t)
        if ref is None:
            y_ref = y.copy()
            e = np.zeros_like(y)
        else:
            y_ref = np.asarray(ref, dtype=float)
            e = y - y_ref
        e_norm = float(np.linalg.norm(e))
        phi = phi_eval(sys.funnel, t) if sys.funnel is not None else 0.0
        margin = funnel_margin(e, phi)
        radius = math.inf if phi == 0.0 else 1.0 / phi
        if margin <= 0.0:
            raise IntegrationAbort(t, math.nan,
                                   "committed sample violates the funnel")
        if sys.control is not None:
            try:
                i_se = feedback(e, phi, sys.control, t=t)
            except FunnelViolation as exc:
                raise IntegrationAbort(t, math.nan,
                                       f"committed sample at guard: {exc}")
        else:
            i_se = np.zeros_like(y)
        v_l2, u_l2 = sys.state_norms(x)
        self.rows.append((t, y, y_ref, e_norm, radius, i_se, v_l2, u_l2,
                          margin))

    def build(self, snapshots):
        rows = self.rows
        return TrajectoryLog(
            t=np.array([r[0] for r in rows]),
            y=np.array([r[1] for r in rows]),
            y_ref=np.array([r[2] for r in rows]),
            e_norm=np.array([r[3] for r in rows]),
            funnel_radius=np.array([r[4] for r in rows]),
            i_se=np.array([r[5] for r in rows]),
            v_l2=np.array([r[6] for r in rows]),
            u_l2=np.array([r[7] for r in rows]),
            margin=np.array([r[8] for r in rows]),
            snapshots=snapshots)


def integrate_closed_loop(system, t_span, x0, cfg, sample_dt,
                          breakpoints=(), snapshot_times=()):
    """Integrate a semidiscrete system and log uniform samples.

    Returns (TrajectoryLog, final_state).  breakpoints lists times the
    stepper must hit exactly (stimulus window edges); snapshot_times
    requests (v, u) field captures at those times.  The run is bitwise
    deterministic for fixed inputs.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError("time span must be increasing")
    tiny = 1e-12 * max(1.0, abs(t0), abs(t1))
    x = np.array(x0, dtype=float)
    grid = _sample_grid(t0, t1, sample_dt)
    stops = sorted(set(float(b) for b in breakpoints if t0 < b < t1))
    snaps_pending = sorted(set(float(s) for s in snapshot_times
                               if t0 <= s <= t1))
    snapshots = {}

    def capture(ts, xs):
        fields = system.fields(xs)
        if fields is not None:
            snapshots[ts] = fields

    recorder = _Recorder(system)
    recorder.emit(t0, x)
    while snaps_pending and snaps_pending[0] <= t0 + tiny:
        capture(snaps_pending.pop(0), x)

    try:
        f0 = system.rhs(t0, x)
    except FunnelViolation as exc:
        raise IntegrationAbort(t0, 0.0, f"initial state rejected: {exc}")

    t = t0
    dt_next = min(cfg.dt_init, cfg.dt_max, t1 - t0)
    next_sample = 1
    stop_i = 0
    rejects = 0
    while t1 - t > tiny:
        dt = min(dt_next, cfg.dt_max, t1 - t)
        target = t1 if dt >= t1 - t - tiny else None
        while stop_i < len(stops) and stops[stop_i] <= t + tiny:
            stop_i += 1
        if stop_i < len(stops) and t + dt > stops[stop_i] - tiny:
            target = stops[stop_i]
            dt = target - t

        try:
            x_next, err_vec, k1, f_next = _stages(system.rhs, t, x, dt, f0)
            err = _error_norm(err_vec, x, cfg)
            bad = not (np.all(np.isfinite(x_next)) and math.isfinite(err))
        except FunnelViolation:
            err = math.inf
            bad = True
        if bad or err > 1.0:
            rejects += 1
            if rejects > cfg.max_rejects:
                raise IntegrationAbort(t, dt,
                                       f"more than {cfg.max_rejects} "
                                       "consecutive step rejections")
            dt_next = 0.5 * dt if bad else _suggest(dt, err, cfg)
            if dt_next < cfg.dt_min:
                raise IntegrationAbort(t, dt_next, "step size underflow")
            continue

        rejects = 0
        t_next = target if target is not None else t + dt
        while next_sample < grid.shape[0] and grid[next_sample] <= t_next + tiny:
            ts = grid[next_sample]
            theta = (ts - t) / dt
            xs = x_next if theta >= 1.0 else _hermite(x, k1, x_next, f_next,
                                                      dt, theta)
            recorder.emit(ts, xs)
            next_sample += 1
        while snaps_pending and snaps_pending[0] <= t_next + tiny:
            ts = snaps_pending.pop(0)
            theta = (ts - t) / dt
            xs = x_next if theta >= 1.0 else _hermite(x, k1, x_next, f_next,
                                                      dt, theta)
            capture(ts, xs)
        t = t_next
        x = x_next
        f0 = f_next
        dt_next = _suggest(dt, err, cfg)

    return recorder.build(snapshots), x
