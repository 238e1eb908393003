"""Semidiscrete closed-loop systems for the two discretizations.

Both classes expose the same surface to the integrator: rhs(t, x),
observe(x), reference(t), state_norms(x), fields(x) plus the funnel and
controller handles.  States are stacked as (v, u) nodal values for the
finite element system and (mu, nu) coefficients for the spectral one.

The finite element right hand side folds the lumped mass inverse into
the voltage equation and evaluates the cubic reaction nodally, so the
reaction term reduces to p3 applied entrywise.
"""

from __future__ import annotations

import numpy as np

from .fem import boundary_output, control_injection
from .funnel import feedback, phi_eval
from .model import p3
from .spectral import spectral_rhs

__all__ = ["FemSystem", "SpectralSystem"]


class _ControlMixin:
    def _setup_control(self, funnel, control, reference):
        if control is not None and reference is None:
            raise ValueError("a controller requires a reference signal")
        self.funnel = funnel
        self.control = control
        self._reference = reference

    def reference(self, t):
        if self._reference is None:
            return None
        return np.asarray(self._reference(t), dtype=float)

    def _control_input(self, t, y):
        e = y - self.reference(t)
        phi = phi_eval(self.funnel, t) if self.funnel is not None else 0.0
        return feedback(e, phi, self.control, t=t)


class FemSystem(_ControlMixin):
    """P1 semidiscretization of the controlled monodomain model.

    Parameters
    ----------
    mesh, ops : Mesh, AssembledOperators
    params : ModelParams
    output : OutputOperator, optional
        Defaults to the four boundary side integrals.
    stimulus : callable t -> (n_nodes,) load vector, optional
        Already mass-weighted interior stimulus.
    funnel, control, reference : FunnelSpec, ControllerConfig, callable
        Closed-loop ingredients; control requires reference.  Without a
        funnel the feedback stays purely proportional.
    include_reaction, include_recovery : bool
        Disable the cubic reaction or the gating variable coupling for
        pure-diffusion runs.
    """

    def __init__(self, mesh, ops, params, output=None, stimulus=None,
                 funnel=None, control=None, reference=None,
                 include_reaction=True, include_recovery=True):
        self.mesh = mesh
        self.ops = ops
        self.params = params
        self.output = output if output is not None else boundary_output(mesh)
        self.stimulus = stimulus
        self.include_reaction = include_reaction
        self.include_recovery = include_recovery
        self._setup_control(funnel, control, reference)
        self._ct = np.ascontiguousarray(self.output.columns.T)
        self._injection = control_injection(self.output)
        self._inv_lumped = 1.0 / ops.lumped_mass
        self._n = mesh.n_nodes

    @property
    def m(self):
        return self.output.m

    @property
    def n_state(self):
        return 2 * self._n

    def split(self, x):
        return x[:self._n], x[self._n:]

    def rhs(self, t, x):
        v, u = self.split(x)
        acc = -(self.ops.stiffness @ v)
        if self.include_recovery:
            acc -= self.ops.mass @ u
        if self.include_reaction:
            acc += self.ops.lumped_mass * p3(v, self.params)
        if self.stimulus is not None:
            acc += self.stimulus(t)
        if self.control is not None:
            acc += self._injection @ self._control_input(t, self._ct @ v)
        out = np.empty_like(x)
        out[:self._n] = acc * self._inv_lumped
        if self.include_recovery:
            out[self._n:] = self.params.c5 * v - self.params.c4 * u
        else:
            out[self._n:] = 0.0
        return out

    def observe(self, x):
        return self._ct @ x[:self._n]

    def state_norms(self, x):
        v, u = self.split(x)
        v_l2 = float(np.sqrt(v @ (self.ops.mass @ v)))
        u_l2 = float(np.sqrt(u @ (self.ops.mass @ u)))
        return v_l2, u_l2

    def fields(self, x):
        v, u = self.split(x)
        return v.copy(), u.copy()


class SpectralSystem(_ControlMixin):
    """Spectral Galerkin semidiscretization on the cosine basis.

    stimulus, if given, maps t to the coefficient vector of the interior
    stimulus.  States are stacked mode coefficients (mu, nu); L2 norms
    are coefficient norms by orthonormality.  Nodal fields are not
    available, so snapshot capture is skipped for spectral runs.
    """

    def __init__(self, basis, params, stimulus=None, funnel=None,
                 control=None, reference=None, include_reaction=True,
                 include_recovery=True):
        self.basis = basis
        self.params = params
        self.stimulus = stimulus
        self.include_reaction = include_reaction
        self.include_recovery = include_recovery
        self._setup_control(funnel, control, reference)
        self._gt = np.ascontiguousarray(basis.gammas.T)
        self._n = basis.n_modes

    @property
    def m(self):
        return 4

    @property
    def n_state(self):
        return 2 * self._n

    def split(self, x):
        return x[:self._n], x[self._n:]

    def rhs(self, t, x):
        mu, nu = self.split(x)
        i_se = None
        if self.control is not None:
            i_se = self._control_input(t, self._gt @ mu)
        isi = self.stimulus(t) if self.stimulus is not None else None
        dmu, dnu = spectral_rhs(self.basis, self.params, mu, nu, i_se=i_se,
                                isi=isi,
                                include_reaction=self.include_reaction,
                                include_recovery=self.include_recovery)
        return np.concatenate([dmu, dnu])

    def observe(self, x):
        return self._gt @ x[:self._n]

    def state_norms(self, x):
        mu, nu = self.split(x)
        return float(np.linalg.norm(mu)), float(np.linalg.norm(nu))

    def fields(self, x):
        return None
