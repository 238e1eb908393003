"""Funnel shape, performance margin and the output feedback law.

The funnel function phi vanishes on an initial settling interval
[0, gamma] and then follows tanh(t/tau).  While phi is zero the feedback
is purely proportional, i_se = -k0*e; afterwards the gain is scaled by
1/(1 - phi^2 ||e||^2), which blows up as the error approaches the funnel
boundary ||e|| = 1/phi and thereby keeps the error strictly inside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FunnelSpec",
    "ControllerConfig",
    "FunnelViolation",
    "phi_eval",
    "funnel_radius",
    "funnel_margin",
    "feedback",
]


@dataclass(frozen=True)
class FunnelSpec:
    """Funnel function phi(t) = 0 for t <= gamma, tanh(t/tau) after."""

    gamma: float = 0.05
    tau: float = 100.0

    def __post_init__(self):
        if not self.gamma > 0.0:
            raise ValueError("gamma must be strictly positive")
        if not self.tau > 0.0:
            raise ValueError("tau must be strictly positive")

    @property
    def phi_sup(self):
        """Supremum of phi over [0, inf)."""
        return 1.0

    @property
    def phi_lip(self):
        """Lipschitz constant of phi on (gamma, inf)."""
        return 1.0 / self.tau


@dataclass(frozen=True)
class ControllerConfig:
    """Base gain and the numerical guard on the funnel constraint.

    A right hand side evaluation with phi^2 ||e||^2 > guard_margin raises
    FunnelViolation so the integrator rejects the step; the feedback never
    silently clamps the gain.
    """

    k0: float = 0.75
    guard_margin: float = 1.0 - 1e-9

    def __post_init__(self):
        if not self.k0 > 0.0:
            raise ValueError("k0 must be strictly positive")
        if not 0.0 < self.guard_margin < 1.0:
            raise ValueError("guard_margin must lie in (0, 1)")


class FunnelViolation(RuntimeError):
    """Raised when a state evaluation leaves the performance funnel."""

    def __init__(self, t, e_norm, margin):
        self.t = t
        self.e_norm = e_norm
        self.margin = margin
        super().__init__(
            f"funnel constraint violated at t={t}: ||e||={e_norm:.6g}, "
            f"margin={margin:.6g}")


def phi_eval(spec, t):
    """Evaluate phi at scalar or array times."""
    t = np.asarray(t, dtype=float)
    out = np.where(t <= spec.gamma, 0.0, np.tanh(t / spec.tau))
    return float(out) if out.ndim == 0 else out


def funnel_radius(spec, t):
    """Radius 1/phi(t) of the funnel; inf while phi vanishes."""
    phi = phi_eval(spec, t)
    if np.ndim(phi) == 0:
        return math.inf if phi == 0.0 else 1.0 / phi
    return np.where(phi == 0.0, math.inf, np.divide(1.0, phi, where=phi != 0.0,
                                                    out=np.ones_like(phi)))


def funnel_margin(e, phi_t):
    """Distance 1 - phi^2 ||e||^2 to the funnel boundary (1 when phi = 0)."""
    e = np.asarray(e, dtype=float)
    return 1.0 - phi_t * phi_t * float(e @ e)


def feedback(e, phi_t, cfg, t=math.nan):
    """Funnel feedback i_se = -k0 / (1 - phi^2 ||e||^2) * e.

    With phi_t = 0 this reduces bit-exactly to the proportional law
    -k0 * e.  Raises FunnelViolation when phi^2 ||e||^2 exceeds the
    configured guard margin; `t` only annotates that error.
    """
    e = np.asarray(e, dtype=float)
    constraint = phi_t * phi_t * float(e @ e)
    if constraint > cfg.guard_margin:
        raise FunnelViolation(t, float(np.linalg.norm(e)), 1.0 - constraint)
    return (-cfg.k0 / (1.0 - constraint)) * e
