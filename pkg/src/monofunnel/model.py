"""Reaction terms, recovery dynamics and energy bookkeeping.

The transmembrane voltage v and the gating variable u follow

    dv/dt = div(D grad v) + p3(v) - u + i_si + (boundary input)
    du/dt = c5*v - c4*u

with the cubic reaction p3(v) = -c1*v + c2*v^2 - c3*v^3.  Everything in
this module is discretization-free: plain arithmetic on scalars or numpy
arrays, shared by the finite element and the spectral code paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "EnergyBudget",
    "p3",
    "ionic_current",
    "recovery_rhs",
    "lyapunov",
    "energy_budget",
]


@dataclass(frozen=True)
class ModelParams:
    """Reaction constants and diffusion tensor.

    Defaults are the desk-scale cardiac values used by every canonical
    scenario in this package.  The diffusion tensor is symmetric positive
    definite, stored by its upper triangle (d11, d12, d22).
    """

    c1: float = 1.614
    c2: float = 0.1403
    c3: float = 0.012
    c4: float = 0.00015
    c5: float = 0.015
    d11: float = 0.015
    d12: float = 0.0
    d22: float = 0.015

    def __post_init__(self):
        for name in ("c1", "c2", "c3", "c4", "c5"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if not (self.d11 > 0.0 and self.d11 * self.d22 - self.d12 ** 2 > 0.0):
            raise ValueError("diffusion tensor must be symmetric positive definite")

    @property
    def diffusion(self):
        """The 2x2 diffusion tensor as an array."""
        return np.array([[self.d11, self.d12], [self.d12, self.d22]])

    @property
    def isotropic_diffusion(self):
        """Scalar d with D = d*I.  Raises for anisotropic tensors."""
        if self.d12 != 0.0 or self.d11 != self.d22:
            raise ValueError("diffusion tensor is not isotropic")
        return self.d11


@dataclass(frozen=True)
class EnergyBudget:
    """Inputs and result of the worst-case energy growth estimate.

    c_infty bounds the growth rate of the weighted energy
    0.5*(c5*||v||^2 + ||u||^2) along closed-loop trajectories:
    the energy at time t never exceeds its initial value plus c_infty*t.
    """

    yref_sup: float
    isi_sup_l2: float
    k0: float
    area: float
    c_infty: float


def p3(v, params):
    """Cubic reaction polynomial -c1*v + c2*v^2 - c3*v^3, elementwise."""
    v = np.asarray(v, dtype=float)
    return -params.c1 * v + params.c2 * v * v - params.c3 * v * v * v


def ionic_current(v, u, params):
    """Total ionic current p3(v) - u, elementwise."""
    return p3(v, params) - np.asarray(u, dtype=float)


def recovery_rhs(v, u, params):
    """Gating variable dynamics c5*v - c4*u, elementwise."""
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    return params.c5 * v - params.c4 * u


def lyapunov(v_norm_sq, u_norm_sq, params):
    """Weighted energy 0.5*(c5*||v||^2 + ||u||^2) from squared L2 norms."""
    if v_norm_sq < 0.0 or u_norm_sq < 0.0:
        raise ValueError("squared norms must be nonnegative")
    return 0.5 * (params.c5 * v_norm_sq + u_norm_sq)


def energy_budget(yref_sup, isi_sup_l2, k0, params, area=1.0):
    """Worst-case energy growth rate for given input magnitudes.

    Parameters
    ----------
    yref_sup : float
        Supremum over time of the Euclidean norm of the reference output.
    isi_sup_l2 : float
        Supremum over time of the L2(Omega) norm of the interior stimulus.
    k0 : float
        Base feedback gain of the run (0 for open-loop runs).
    params : ModelParams
    area : float
        Measure of the spatial domain.

    Returns
    -------
    EnergyBudget
        With c_infty = k0*c5/2 * yref_sup^2 + isi_sup_l2^2/(2*c1)
        + 27*c2^4/(32*c3^3) * area.  The last term is a strictly positive
        floor contributed by the cubic reaction alone.
    """
    for name, val in (("yref_sup", yref_sup), ("isi_sup_l2", isi_sup_l2),
                      ("k0", k0), ("area", area)):
        if val < 0.0:
            raise ValueError(f"{name} must be nonnegative")
    c_infty = (0.5 * k0 * params.c5 * yref_sup ** 2
               + isi_sup_l2 ** 2 / (2.0 * params.c1)
               + 27.0 * params.c2 ** 4 / (32.0 * params.c3 ** 3) * area)
    return EnergyBudget(yref_sup=yref_sup, isi_sup_l2=isi_sup_l2, k0=k0,
                        area=area, c_infty=c_infty)
