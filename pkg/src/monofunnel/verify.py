"""Verification checks run against trajectory logs.

Each check returns a VerificationReport: a named pass/fail with the
measured quantities, the tolerance it was held to, and the offending
sample times on failure.  Checks never repair or clamp anything; they
only measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import lyapunov
from .spectral import SpectralBasis, mode_shape
from .integrate import integrate_closed_loop
from .systems import FemSystem, SpectralSystem

__all__ = [
    "VerificationReport",
    "check_funnel_invariant",
    "check_energy_bound",
    "linear_decay_check",
    "holder_estimate",
    "cross_discretization_check",
    "boundedness_check",
]

_MAX_LISTED_FAILURES = 20


@dataclass
class VerificationReport:
    """Outcome of one verification check."""

    name: str
    passed: bool
    measured: dict
    tolerance: float | None
    note: str
    failures: list = field(default_factory=list)

    def __str__(self):
        word = "PASS" if self.passed else "FAIL"
        vals = ", ".join(f"{k}={v:.6g}" for k, v in self.measured.items())
        tol = "" if self.tolerance is None else f" tol={self.tolerance:.6g}"
        return f"{word} {self.name}: {vals}{tol} ({self.note})"


def _failure_times(times, bad):
    return [float(t) for t in np.asarray(times)[bad][:_MAX_LISTED_FAILURES]]


def check_funnel_invariant(log, delta=0.0):
    """Worst funnel margin over samples with t >= delta must be positive."""
    sub = log.restrict(t_min=delta)
    if sub.n_samples == 0:
        raise ValueError("no samples at or beyond delta")
    eps0 = float(np.min(sub.margin))
    at = float(sub.t[np.argmin(sub.margin)])
    bad = sub.margin <= 0.0
    return VerificationReport(
        name="funnel-invariant",
        passed=bool(eps0 > 0.0),
        measured={"eps0": eps0, "worst_t": at, "delta": float(delta)},
        tolerance=None,
        note="uniform funnel margin over the sampled tail",
        failures=_failure_times(sub.t, bad))


def check_energy_bound(log, budget, params):
    """Weighted energy growth against the worst-case linear budget.

    Applies to runs with the funnel inactive on their whole span (margin
    identically one): checks c5*||v||^2 + ||u||^2 <= 2*c_infty*t plus the
    initial energy, at every sample.
    """
    if not np.all(log.margin == 1.0):
        raise ValueError("energy bound applies to runs with the funnel "
                         "inactive on their span")
    energy = 2.0 * lyapunov(0.0, 0.0, params) \
        + params.c5 * log.v_l2 ** 2 + log.u_l2 ** 2
    bound = 2.0 * budget.c_infty * (log.t - log.t[0]) + energy[0]
    slack = bound - energy
    eps = 1e-12 * np.maximum(1.0, np.abs(bound))
    bad = slack < -eps
    return VerificationReport(
        name="energy-bound",
        passed=bool(not np.any(bad)),
        measured={"slack_min": float(np.min(slack)),
                  "energy_max": float(np.max(energy)),
                  "c_infty": float(budget.c_infty)},
        tolerance=None,
        note="linear-in-time energy budget from the input magnitudes",
        failures=_failure_times(log.t, bad))


def linear_decay_check(disc, params, mode, t_end, icfg, sample_dt=None,
                       rel_tol=None):
    """Pure-diffusion decay rate of one cosine mode against its eigenvalue.

    disc is either a (mesh, ops) pair or a SpectralBasis.  The check runs
    its own simulation from the chosen mode, fits the slope of
    log ||v(t)|| by least squares, and compares the fitted rate with the
    analytic eigenvalue.  Default relative tolerances: 2e-2 for the
    finite element discretization (mesh-dependent eigenvalue bias),
    1e-10 for the spectral one (exact up to integration error).
    """
    j, k = int(mode[0]), int(mode[1])
    spectral = isinstance(disc, SpectralBasis)
    if spectral:
        basis = disc
        lx, ly = basis.lx, basis.ly
        idx = np.flatnonzero((basis.modes[:, 0] == j)
                             & (basis.modes[:, 1] == k))
        if idx.size == 0:
            raise ValueError("mode is not contained in the basis")
        x0 = np.zeros(2 * basis.n_modes)
        x0[idx[0]] = 1.0
        system = SpectralSystem(basis, params, include_reaction=False,
                                include_recovery=False)
    else:
        mesh, ops = disc
        lx, ly = mesh.lx, mesh.ly
        v0 = mode_shape(mesh.nodes, j, k, lx=lx, ly=ly)
        x0 = np.concatenate([v0, np.zeros(mesh.n_nodes)])
        system = FemSystem(mesh, ops, params, include_reaction=False,
                           include_recovery=False)
    alpha = params.isotropic_diffusion * np.pi ** 2 * ((j / lx) ** 2
                                                       + (k / ly) ** 2)
    if alpha <= 0.0:
        raise ValueError("mode (0, 0) does not decay; pick j + k >= 1")
    if sample_dt is None:
        sample_dt = t_end / 100.0
    if rel_tol is None:
        rel_tol = 1e-10 if spectral else 2e-2

    log, _ = integrate_closed_loop(system, (0.0, t_end), x0, icfg, sample_dt)
    if np.any(log.v_l2 <= 0.0):
        raise ValueError("decay fit needs strictly positive norms; "
                         "shorten t_end")
    slope = np.polyfit(log.t, np.log(log.v_l2), 1)[0]
    rate = -float(slope)
    rel_err = abs(rate - alpha) / alpha
    return VerificationReport(
        name="linear-decay",
        passed=bool(rel_err <= rel_tol),
        measured={"rate": rate, "expected": float(alpha),
                  "rel_err": rel_err},
        tolerance=rel_tol,
        note=f"mode ({j}, {k}) decay on the "
             f"{'spectral' if spectral else 'finite element'} discretization")


def _holder_series(log, fld):
    if fld == "y":
        return log.y
    if fld in ("v_l2", "u_l2", "e_norm"):
        return getattr(log, fld)[:, None]
    raise ValueError(f"unsupported field {fld!r}")


def holder_estimate(log, field="y", lam=0.5, delta=0.0, fit_floor=None):
    """Empirical Hoelder-lambda diagnostics of a logged series.

    Restricted to samples with t >= delta, builds all index pairs at
    dyadic gaps, and measures the worst quotient ||df|| / dt^lam plus the
    least squares slope of log ||df|| against log dt (zero increments are
    dropped).  Passes when the quotient is finite and the slope reaches
    fit_floor, by default lam - 0.1.  A smooth signal fits a slope near
    one, so this is a necessary check, not a sharp exponent estimate.
    """
    if fit_floor is None:
        fit_floor = lam - 0.1
    sub = log.restrict(t_min=delta)
    series = _holder_series(sub, field)
    n = sub.n_samples
    if n < 3:
        raise ValueError("need at least three samples beyond delta")
    dts = []
    dfs = []
    gap = 1
    while gap <= n - 1:
        i = np.arange(0, n - gap)
        dt = sub.t[i + gap] - sub.t[i]
        df = np.linalg.norm(series[i + gap] - series[i], axis=1)
        dts.append(dt)
        dfs.append(df)
        gap *= 2
    dt = np.concatenate(dts)
    df = np.concatenate(dfs)
    quotient = float(np.max(df / dt ** lam))
    keep = df > 0.0
    dropped = int(np.size(df) - np.count_nonzero(keep))
    if np.count_nonzero(keep) < 2:
        raise ValueError("series is constant; no increments to fit")
    slope = float(np.polyfit(np.log(dt[keep]), np.log(df[keep]), 1)[0])
    return VerificationReport(
        name="holder-estimate",
        passed=bool(math.isfinite(quotient) and slope >= fit_floor),
        measured={"quotient": quotient, "exponent_fit": slope,
                  "pairs": float(dt.size), "dropped_zero": float(dropped),
                  "lambda": float(lam)},
        tolerance=fit_floor,
        note=f"dyadic-gap increments of {field} for t >= {delta:g}")


def cross_discretization_check(log_a, log_b, tol=1e-2):
    """Sup-in-time gap between the output traces of two logs."""
    if log_a.t.shape != log_b.t.shape or not np.array_equal(log_a.t, log_b.t):
        raise ValueError("logs must share an identical sample grid")
    gap_t = np.max(np.abs(log_a.y - log_b.y), axis=1)
    gap = float(np.max(gap_t))
    at = float(log_a.t[np.argmax(gap_t)])
    bad = gap_t > tol
    return VerificationReport(
        name="cross-discretization",
        passed=bool(gap <= tol),
        measured={"gap": gap, "worst_t": at},
        tolerance=tol,
        note="sup-norm output difference between discretizations",
        failures=_failure_times(log_a.t, bad))


def boundedness_check(log, ceilings=None):
    """All norm traces finite, optionally under configured ceilings."""
    ceilings = dict(ceilings or {})
    series = {"v_l2": log.v_l2, "u_l2": log.u_l2, "e_norm": log.e_norm}
    measured = {}
    bad_times = np.zeros(log.n_samples, dtype=bool)
    passed = True
    for name, vals in series.items():
        finite = np.isfinite(vals)
        sup = float(np.max(vals[finite])) if np.any(finite) else math.inf
        measured[f"sup_{name}"] = sup
        bad = ~finite
        if name in ceilings:
            bad |= vals > ceilings[name]
        if np.any(bad):
            passed = False
            bad_times |= bad
    return VerificationReport(
        name="boundedness",
        passed=passed,
        measured=measured,
        tolerance=None,
        note="finite norm traces" + (" under ceilings" if ceilings else ""),
        failures=_failure_times(log.t, bad_times))
