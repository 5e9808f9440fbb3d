import math

import numpy as np
import pytest
from scipy.special import ellipk

from trusstube.analysis import (ConvergenceConfig, compare, convergence_sweep, discrete_seed,
                                error_metric, figure_data, fit_loglog_slope,
                                oscillation_wavelength, worker_count)
from trusstube.discrete import cylindrical_seed
from trusstube.errors import DegenerateFitError, DomainError, RangeError

PERIOD = 4.0 * float(ellipk(0.5))


def test_error_metric_analytic():
    s = np.linspace(0.0, 2 * math.pi, 2001)
    e = error_metric((s, np.sin(s)), (s, np.zeros_like(s)), 2 * math.pi, resample=20001)
    # sqrt(int_0^{2pi} sin^2) / 2pi = sqrt(pi) / 2pi
    assert e == pytest.approx(math.sqrt(math.pi) / (2 * math.pi), rel=1e-6)
    assert error_metric((s, np.sin(s)), (s, np.sin(s)), 1.0) == 0.0


def test_error_metric_range_checks():
    s = np.linspace(0.0, 1.0, 11)
    with pytest.raises(RangeError):
        error_metric((s, s), (s, s), 2.0)
    with pytest.raises(RangeError):
        error_metric((s + 0.1, s), (s, s), 1.0)
    with pytest.raises(DomainError):
        error_metric((s, s), (s, s), 0.0)


def test_fit_loglog_slope_exact_power_law():
    r = np.array([0.02, 0.01, 0.005, 0.0025])
    slope, intercept, resid = fit_loglog_slope(r, 3.0 * r ** 0.5)
    assert slope == pytest.approx(0.5)
    assert intercept == pytest.approx(math.log(3.0))
    assert resid < 1e-12
    with pytest.raises(DegenerateFitError):
        fit_loglog_slope(r, np.array([1.0, 0.0, 1.0, 1.0]))
    with pytest.raises(DegenerateFitError):
        fit_loglog_slope([0.1], [0.2])


def test_config_validation():
    with pytest.raises(DomainError):
        ConvergenceConfig(r_values=[0.01, 0.02])
    with pytest.raises(DomainError):
        ConvergenceConfig(r_values=[0.01, -0.02])
    with pytest.raises(DomainError):
        ConvergenceConfig(r_values=[0.01], T=-1.0)
    cfg = ConvergenceConfig(r_values=[0.02, 0.01])
    assert cfg.span() == pytest.approx(PERIOD)
    with pytest.raises(DomainError):
        ConvergenceConfig(r_values=[0.02], init=(math.pi, 1.0)).span()
    assert ConvergenceConfig(r_values=[0.02], init=(math.pi, 1.0), T=3.0).span() == 3.0


def test_admissible_snaps_to_integer_counts():
    cfg = ConvergenceConfig(r_values=[1 / 50, 1 / 100, 1 / 200, 1 / 400])
    pairs = cfg.admissible(1.0)
    assert [N for N, _ in pairs] == [35, 71, 141, 283]
    for N, r in pairs:
        assert N * r * math.sqrt(2.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        ConvergenceConfig(r_values=[0.01, 0.00999]).admissible(1.0)


def test_discrete_seed_maps_initial_data():
    spec = discrete_seed(100, 1.0, (0.4, 0.7))
    geom = spec.geometry()
    assert spec.omega0 == 0.4
    assert math.pi / 2 - spec.theta0 == pytest.approx(0.7 * geom.gamma_scale())
    assert spec.W == pytest.approx(1.0)


def test_compare_error_shrinks_with_refinement():
    e = [compare(N, 1.0, (math.pi / 2, 0.0), PERIOD).e for N in (35, 141)]
    assert e[1] < e[0]
    c = compare(71, 1.0, (math.pi / 2, 0.0), PERIOD)
    assert c.tube.audit() < 1e-9
    assert c.ode.shape == c.discrete.shape == c.s.shape


def test_sweep_guards():
    with pytest.raises(DomainError):
        convergence_sweep(ConvergenceConfig(r_values=[0.02, 0.01, 0.005]))
    with pytest.raises(DomainError):
        convergence_sweep(ConvergenceConfig(r_values=[0.02, 0.018, 0.016, 0.014]))
    with pytest.raises(DegenerateFitError):
        convergence_sweep(ConvergenceConfig(r_values=[0.02, 0.01, 0.005, 0.0025], init=(0.0, 0.0)))


def test_sweep_flags_locking_point_and_is_deterministic():
    W = 1.0
    rs = [W / (8 * math.sqrt(2)), 1 / 50, 1 / 100, 1 / 200, 1 / 400]
    cfg = ConvergenceConfig(r_values=rs)
    with pytest.warns(UserWarning, match="excluded"):
        serial = convergence_sweep(cfg, W, workers=1)
    assert serial.points[0].status.startswith("lock")
    assert math.isnan(serial.points[0].e)
    assert len(serial.used) == 4
    assert serial.slope == pytest.approx(0.49, abs=0.05)
    with pytest.warns(UserWarning):
        parallel = convergence_sweep(cfg, W, workers=2)
    assert [p.e for p in parallel.used] == [p.e for p in serial.used]


def test_worker_env(monkeypatch):
    monkeypatch.setenv("TRUSSTUBE_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("TRUSSTUBE_WORKERS", "many")
    with pytest.raises(DomainError):
        worker_count()


def test_wavelength_needs_an_oscillation():
    _, tube = cylindrical_seed(71, 1.0, "outward", n_rings=10)
    with pytest.raises(DomainError):
        oscillation_wavelength(tube)


def test_figure_tables():
    fig = figure_data("curvature-vs-phi")
    assert len(fig["theta_deg"]) == 19 * 541
    flat45 = (fig["theta_deg"] == 90.0) & (fig["phi_deg"] == 45.0)
    assert np.isnan(fig["r_over_rho"][flat45]).all()
    phase = figure_data("phase-diagram", levels=[0.0, 1.5], resolution=32)
    assert set(np.unique(phase["level"])) == {0.0, 1.5}
    prof = figure_data("tube-profiles", levels=[-1.0, 0.5], span=5.0)
    assert set(prof) == {"level", "xi2", "rho", "z", "gamma"}
    with pytest.raises(DomainError):
        figure_data("nope")
