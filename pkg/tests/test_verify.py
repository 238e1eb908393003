import math

import numpy as np
import pytest

from monofunnel.model import energy_budget
from monofunnel.fem import build_mesh, assemble
from monofunnel.spectral import build_basis
from monofunnel.integrate import TrajectoryLog, IntegratorConfig
from monofunnel.verify import (check_funnel_invariant, check_energy_bound,
                               linear_decay_check, holder_estimate,
                               cross_discretization_check,
                               boundedness_check)


def _synthetic_log(t, y=None, margin=None, v_l2=None, u_l2=None,
                   e_norm=None, radius=None):
    n = t.shape[0]
    y = np.zeros((n, 4)) if y is None else y
    return TrajectoryLog(
        t=t, y=y, y_ref=np.zeros((n, 4)),
        e_norm=np.zeros(n) if e_norm is None else e_norm,
        funnel_radius=np.full(n, np.inf) if radius is None else radius,
        i_se=np.zeros((n, 4)),
        v_l2=np.zeros(n) if v_l2 is None else v_l2,
        u_l2=np.zeros(n) if u_l2 is None else u_l2,
        margin=np.ones(n) if margin is None else margin)


def test_funnel_invariant_pass_and_fail():
    t = np.linspace(0.0, 10.0, 101)
    good = _synthetic_log(t, margin=np.full(101, 0.4))
    report = check_funnel_invariant(good, delta=1.0)
    assert report.passed
    assert report.measured["eps0"] == 0.4

    margins = np.full(101, 0.4)
    margins[60] = -0.01
    bad = _synthetic_log(t, margin=margins)
    report = check_funnel_invariant(bad, delta=1.0)
    assert not report.passed
    assert report.failures == [6.0]
    # violations before delta are out of scope
    early = np.full(101, 0.4)
    early[2] = -1.0
    assert check_funnel_invariant(_synthetic_log(t, margin=early),
                                  delta=1.0).passed


def test_energy_bound_checks_the_linear_budget(params):
    budget = energy_budget(0.0, 0.0, 0.75, params)
    t = np.linspace(0.0, 5.0, 51)
    v = np.sqrt(t)  # energy grows linearly, well under 2*c_infty
    log = _synthetic_log(t, v_l2=v, u_l2=np.zeros_like(t))
    report = check_energy_bound(log, budget, params)
    assert report.passed
    assert report.measured["slack_min"] >= 0.0

    hot = _synthetic_log(t, u_l2=np.sqrt(3.0 * budget.c_infty * t))
    report = check_energy_bound(hot, budget, params)
    assert not report.passed
    assert len(report.failures) > 0


def test_energy_bound_requires_inactive_funnel(params):
    budget = energy_budget(0.0, 0.0, 0.75, params)
    t = np.linspace(0.0, 1.0, 11)
    log = _synthetic_log(t, margin=np.full(11, 0.5))
    with pytest.raises(ValueError):
        check_energy_bound(log, budget, params)


def test_energy_bound_respects_initial_energy(params):
    budget = energy_budget(0.0, 0.0, 0.75, params)
    t = np.linspace(0.0, 1.0, 11)
    # constant energy from a nonzero start stays within the budget
    log = _synthetic_log(t, v_l2=np.full(11, 3.0), u_l2=np.full(11, 2.0))
    assert check_energy_bound(log, budget, params).passed


def test_linear_decay_fem(params):
    mesh = build_mesh(16, 16)
    ops = assemble(mesh, params)
    icfg = IntegratorConfig(rtol=1e-6, atol=1e-9)
    report = linear_decay_check((mesh, ops), params, (1, 0), t_end=10.0,
                                icfg=icfg)
    assert report.passed
    assert report.measured["expected"] == pytest.approx(
        0.14804406601634038, rel=1e-15)
    assert report.measured["rel_err"] < 2e-2


def test_linear_decay_spectral(params):
    basis = build_basis(4, 4, params)
    icfg = IntegratorConfig(rtol=1e-13, atol=1e-16)
    report = linear_decay_check(basis, params, (2, 1), t_end=1.0,
                                icfg=icfg)
    assert report.passed
    assert report.measured["rel_err"] < 1e-10


def test_linear_decay_rejects_the_constant_mode(params):
    basis = build_basis(2, 2, params)
    with pytest.raises(ValueError):
        linear_decay_check(basis, params, (0, 0), t_end=1.0,
                           icfg=IntegratorConfig())
    with pytest.raises(ValueError):
        linear_decay_check(basis, params, (7, 0), t_end=1.0,
                           icfg=IntegratorConfig())


def test_holder_smooth_signal_passes():
    t = np.linspace(0.0, 10.0, 401)
    y = np.column_stack([np.sin(t), np.cos(t),
                         0.5 * np.sin(2 * t), t / 10.0])
    log = _synthetic_log(t, y=y)
    report = holder_estimate(log, field="y", lam=0.5, delta=1.0)
    assert report.passed
    assert math.isfinite(report.measured["quotient"])
    assert report.measured["exponent_fit"] > 0.4


def test_holder_rough_signal_fails(rng):
    t = np.linspace(0.0, 10.0, 401)
    y = rng.standard_normal((401, 4))
    log = _synthetic_log(t, y=y)
    report = holder_estimate(log, field="y", lam=0.5)
    # white noise has gap-independent increments: exponent near zero
    assert not report.passed
    assert report.measured["exponent_fit"] < 0.2


def test_holder_scalar_field():
    t = np.linspace(0.0, 4.0, 101)
    log = _synthetic_log(t, v_l2=np.sin(t) + 1.5)
    report = holder_estimate(log, field="v_l2", lam=0.5)
    assert report.passed


def test_holder_needs_variation():
    t = np.linspace(0.0, 1.0, 21)
    log = _synthetic_log(t)
    with pytest.raises(ValueError):
        holder_estimate(log, field="y")


def test_cross_discretization_gap():
    t = np.linspace(0.0, 1.0, 11)
    y = np.column_stack([np.sin(t), np.cos(t), t, -t])
    a = _synthetic_log(t, y=y)
    b = _synthetic_log(t, y=y + 5e-3)
    report = cross_discretization_check(a, b, tol=1e-2)
    assert report.passed
    assert report.measured["gap"] == pytest.approx(5e-3, rel=1e-12)
    report = cross_discretization_check(a, b, tol=1e-3)
    assert not report.passed


def test_cross_discretization_requires_shared_grid():
    a = _synthetic_log(np.linspace(0.0, 1.0, 11))
    b = _synthetic_log(np.linspace(0.0, 1.0, 21))
    with pytest.raises(ValueError):
        cross_discretization_check(a, b)


def test_boundedness_flags_nonfinite():
    t = np.linspace(0.0, 1.0, 11)
    good = _synthetic_log(t, v_l2=np.ones(11))
    assert boundedness_check(good).passed
    v = np.ones(11)
    v[4] = np.inf
    bad = _synthetic_log(t, v_l2=v)
    report = boundedness_check(bad)
    assert not report.passed
    assert 0.4 in report.failures


def test_boundedness_ceilings():
    t = np.linspace(0.0, 1.0, 11)
    log = _synthetic_log(t, v_l2=np.full(11, 2.0))
    assert boundedness_check(log, ceilings={"v_l2": 3.0}).passed
    assert not boundedness_check(log, ceilings={"v_l2": 1.0}).passed


def test_report_rendering():
    t = np.linspace(0.0, 1.0, 11)
    report = boundedness_check(_synthetic_log(t))
    text = str(report)
    assert text.startswith("PASS boundedness:")
    assert "sup_v_l2" in text
