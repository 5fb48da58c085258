import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from kqnm.geometry import BlackHoleParams, build_h, ergosphere_radius, mu
from kqnm.flow import (FlowError, PhasePoint, carter, classify_regime, dtstar_ds,
                       expansion_rates, hamilton_field, horizon_hyperbolicity, integrate_flow,
                       metric_symbol, on_shell_point, potential_V, r_min, radial_set_rates,
                       scaled_symbol, scaled_symbol_sign_check, symbol_p, trapped_point,
                       trapped_set)
from kqnm.scaling import ScalingContour

GAP_SCHW = 0.5 / np.sqrt(27.0)


def W(p, z, nu, r):
    return (r * r + p.a ** 2) * z - p.a * nu


@pytest.fixture(scope="module")
def sch():
    p = BlackHoleParams(1.0, 0.0)
    return p, build_h(p, 4.1, 3.6)


# ---------------------------------------------------------------- closed forms

def test_symbol_photon_sphere(sch):
    p, h = sch
    pt = PhasePoint(3.0, np.pi / 2, 0.0, 3.0 + float(h(3.0)), 0.0, np.sqrt(27.0))
    assert carter(pt) == pytest.approx(27.0)
    assert symbol_p(p, h, pt) == pytest.approx(0.0, abs=1e-12)


def test_symbol_kappa_minimum():
    p = BlackHoleParams(1.0, 0.6)
    h = build_h(p, 4.1)
    th = 1.1
    pt = PhasePoint(5.0, th, 0.0, float(h(5.0)), 0.0, 0.6 * np.sin(th) ** 2)
    assert carter(pt, p.a) == 0.0
    assert symbol_p(p, h, pt) == 0.0


def test_carter_examples():
    assert carter(PhasePoint(5.0, np.pi / 2, 0.0, 0.0, 2.0, 1.0)) == pytest.approx(5.0)
    assert carter(PhasePoint(5.0, 0.0, 0.0, 0.0, 2.0, 0.0), 0.7) == 4.0


def test_potential_values():
    p = BlackHoleParams(1.0, 0.0)
    assert potential_V(p, 1, 0.0, 3.0) == pytest.approx(27.0)
    assert potential_V(p, 1, 0.0, 4.0) == pytest.approx(32.0)
    assert potential_V(p, 1, 0.0, 2.0 + 1e-8) > 1e8
    with pytest.raises(ValueError):
        potential_V(p, 1, 0.0, 2.0)


@pytest.mark.parametrize("kap, regime", [(26.0, "Scatter"), (27.0, "Trapped"), (28.0, "Reflect")])
def test_classify_examples(kap, regime):
    assert classify_regime(BlackHoleParams(1.0, 0.0), 1, 0.0, kap) == regime


def test_classify_rejects_negative():
    with pytest.raises(ValueError):
        classify_regime(BlackHoleParams(1.0, 0.0), 1, 0.0, -1.0)


@pytest.mark.parametrize("m", [0.5, 1.0, 3.0])
def test_r_min_schwarzschild(m):
    assert r_min(BlackHoleParams(m, 0.0), 1, 0.7) == pytest.approx(3 * m, rel=1e-14)


def test_r_min_ergoregion_branch():
    p = BlackHoleParams(1.0, 0.8)
    nu = 10.0
    assert W(p, 1, nu, p.r_plus) < 0
    rm = r_min(p, 1, nu)
    assert W(p, 1, nu, rm) == pytest.approx(0.0, abs=1e-12)
    assert potential_V(p, 1, nu, rm) == pytest.approx(0.0, abs=1e-20)


def test_radial_set_rates():
    assert radial_set_rates(BlackHoleParams(1.0, 0.0), -0.1)["alpha_r"] == 2.0
    assert radial_set_rates(BlackHoleParams(1.0, 0.8), -0.1)["alpha_r"] == pytest.approx(1.2)
    assert radial_set_rates(BlackHoleParams(1.0, 0.0), -0.1)["threshold_s"] == pytest.approx(0.9)


# ---------------------------------------------------------------- potential properties

def _random_trapping(rng, n, orbit=False):
    """Random ``(a, nu)`` with ``W(r_plus) > 0``; ``orbit`` also requires a
    nonempty trapped set, i.e. ``V(r_min)`` above the angular minimum."""
    out = []
    th = np.linspace(1e-3, np.pi / 2, 2001)
    while len(out) < n:
        p = BlackHoleParams(1.0, rng.uniform(-0.99, 0.99))
        nu = rng.uniform(-10.0, 10.0)
        if W(p, 1, nu, p.r_plus) <= 0:
            continue
        if orbit:
            ang = ((nu - p.a * np.sin(th) ** 2) ** 2 / np.sin(th) ** 2).min()
            if potential_V(p, 1, nu, r_min(p, 1, nu)) < ang:
                continue
        out.append((p, nu))
    return out


def _dV(p, nu, r):
    w, m_ = W(p, 1, nu, r), float(mu(p, r))
    return (4 * r * w * m_ - 2 * (r - p.m_bh) * w * w) / m_ ** 2, 4 * r * abs(w) / m_


def test_single_critical_point_random(rng):
    for p, nu in _random_trapping(rng, 1000):
        rm = r_min(p, 1, nu)
        v1, scale = _dV(p, nu, rm)
        d = 1e-4 * (rm - p.r_plus)
        assert abs(v1) < 1e-12 * scale
        assert _dV(p, nu, rm + d)[0] > 0 > _dV(p, nu, rm - d)[0]
        V = lambda r: potential_V(p, 1, nu, r)
        r = p.r_plus + np.geomspace(1e-4, 200.0, 400)
        s = np.sign(np.diff(V(r)))
        assert np.count_nonzero(np.diff(s)) == 1


def test_r_min_decreases_with_a_nu():
    p = BlackHoleParams(1.0, 0.7)
    nus = np.linspace(-8.0, 2.5, 40)
    rms = [r_min(p, 1, nu) for nu in nus]
    assert np.all(np.diff(rms) < 0)


# ---------------------------------------------------------------- symbol against the metric

@pytest.mark.parametrize("a", [0.0, 0.5, -0.9])
def test_symbol_matches_metric(a, rng):
    p = BlackHoleParams(1.0, a)
    h = build_h(p, 4.5)
    for _ in range(100):
        r = rng.uniform(0.5 * (p.m_bh + p.r_plus), 30.0)
        pt = PhasePoint(r, rng.uniform(0.05, np.pi - 0.05), 0.0, *rng.normal(0, 3, 3),
                        z=rng.choice([-1.0, 1.0]))
        ps = symbol_p(p, h, pt)
        scale = 1.0 + abs(pt.xi) ** 2 * r * r + carter(pt, a) + r ** 4
        assert abs(ps - metric_symbol(p, h, pt)) < 1e-12 * scale
        if r > p.r_plus + 1e-3:
            assert abs(ps - metric_symbol(p, h, pt, chart="bl")) < 1e-12 * scale * r * r


# ---------------------------------------------------------------- trapping

def test_trapped_set_schwarzschild():
    ts = trapped_set(BlackHoleParams(1.0, 0.0), 1, 0.0)
    assert (ts["r"], ts["xi_shifted"], ts["carter"]) == pytest.approx((3.0, 3.0, 27.0), rel=1e-14)


def test_trapped_set_requires_trapping():
    with pytest.raises(FlowError):
        trapped_set(BlackHoleParams(1.0, 0.8), 1, 10.0)


@pytest.mark.parametrize("a, nu", [(0.0, 0.0), (0.0, 2.0), (0.5, 2.0), (0.9, -3.0)])
def test_trapped_point_fixed(a, nu):
    p = BlackHoleParams(1.0, a)
    h = build_h(p, 4.5)
    pt = trapped_point(p, h, 1, nu)
    v = hamilton_field(p, h, pt)
    # d(xi - z h)/ds = dxi/ds - z h'(r) dr/ds
    assert abs(v[0]) < 1e-10 * max(1.0, pt.r ** 2)
    assert abs(v[3] - pt.z * h.dh(pt.r) * v[0]) < 1e-10 * max(1.0, pt.r ** 2)
    assert abs(symbol_p(p, h, pt)) < 1e-10 * carter(pt, a)


def test_photon_sphere_orbit(sch):
    p, h = sch
    pt = trapped_point(p, h, 1, 0.0)
    tr = integrate_flow(p, h, pt, 100.0)
    assert np.abs(tr.states[:, 0] - 3.0).max() < 1e-8
    assert max(tr.max_drift.values()) < 1e-9


@pytest.mark.parametrize("a, nu", [(0.0, 2.0), (0.7, 1.0)])
def test_conservation(a, nu):
    p = BlackHoleParams(1.0, a)
    h = build_h(p, 4.5)
    pt = trapped_point(p, h, 1, nu)
    pt = PhasePoint(pt.r + 0.01, pt.theta, 0.0, pt.xi, pt.eta, nu, 1.0)
    pt = on_shell_point(p, h, pt.r, pt.theta, pt.eta, nu)
    tr = integrate_flow(p, h, pt, 100.0, tol=1e-12)
    assert max(tr.max_drift.values()) < 1e-9


def test_pole_crossing():
    p = BlackHoleParams(1.0, 0.0)
    h = build_h(p, 4.5)
    pt = PhasePoint(3.0, 0.3, 0.0, 3.0 + float(h(3.0)), -np.sqrt(27.0), 0.0)
    tr = integrate_flow(p, h, pt, 5.0)
    assert "pole" in tr.charts and "sph" in tr.charts
    assert max(tr.max_drift.values()) < 1e-9
    assert np.abs(tr.states[:, 0] - 3.0).max() < 1e-8


def test_on_shell_point(sch):
    p, h = sch
    for branch in (1.0, -1.0):
        pt = on_shell_point(p, h, 5.0, 1.0, 2.0, 1.0, branch=branch)
        assert abs(symbol_p(p, h, pt)) < 1e-12 * carter(pt)
    with pytest.raises(FlowError):
        on_shell_point(p, h, 3.0, np.pi / 2, 0.0, 6.0)   # kappa = 36 > V(3) = 27


def test_off_shell_start_rejected(sch):
    p, h = sch
    with pytest.raises(FlowError):
        integrate_flow(p, h, PhasePoint(5.0, 1.0, 0.0, 1.0, 1.0, 1.0), 1.0)


def test_expansion_rates_schwarzschild(sch):
    p, h = sch
    out = expansion_rates(p, h, 1, 0.0)
    assert out["w_u"] == pytest.approx(out["w_s"], rel=1e-6)
    assert out["gap"] == pytest.approx(GAP_SCHW, abs=1e-4)
    assert out["dtstar_ds"] == pytest.approx(abs(dtstar_ds(p, h, trapped_point(p, h, 1, 0.0))))


def test_expansion_rates_positive_random(rng):
    for p, nu in _random_trapping(rng, 200, orbit=True):
        h = build_h(p, 4.5)
        out = expansion_rates(p, h, 1, nu, n_periods=1)
        assert out["raw_w_u"] > 0 and out["raw_w_s"] > 0


# ---------------------------------------------------------------- regimes along the flow

def test_scatter_trajectories_exit(rng):
    n = 0
    while n < 100:
        p = BlackHoleParams(1.0, rng.uniform(-0.95, 0.95))
        nu = rng.uniform(-6.0, 6.0)
        if W(p, 1, nu, p.r_plus) <= 0:
            continue
        h = build_h(p, 4.5)
        vmin = potential_V(p, 1, nu, r_min(p, 1, nu))
        th = rng.uniform(0.3, np.pi - 0.3)
        ang = carter(PhasePoint(1, th, 0, 0, 0.0, nu), p.a)
        kap = rng.uniform(0.1, 0.95) * vmin
        if ang >= kap:
            continue
        eta = np.sqrt(kap - ang) * rng.choice([-1, 1])
        pt = on_shell_point(p, h, rng.uniform(p.r_plus + 0.1, 20.0), th, eta, nu,
                      branch=rng.choice([-1.0, 1.0]))
        assert classify_regime(p, 1, nu, carter(pt, p.a)) == "Scatter"
        tr = integrate_flow(p, h, pt, 1e4, tol=1e-10)
        assert tr.exit in ("rmax", "r0")
        n += 1


def test_reflect_confined_to_ergoregion(rng):
    n = 0
    while n < 100:
        p = BlackHoleParams(1.0, rng.uniform(0.3, 0.99))
        nu = (p.r_plus ** 2 + p.a ** 2) / p.a * rng.uniform(1.2, 3.0)
        h = build_h(p, 4.5)
        th = rng.uniform(0.3, np.pi - 0.3)
        eta = rng.normal(0.0, 1.0)
        kap = carter(PhasePoint(1, th, 0, 0, eta, nu), p.a)
        assert classify_regime(p, 1, nu, kap) == "Reflect"
        rW = r_min(p, 1, nu)
        r1 = brentq(lambda r: potential_V(p, 1, nu, r) - kap, p.r_plus * (1 + 1e-12), rW)
        r = rng.uniform(p.r_plus + 1e-6, r1)
        pt = on_shell_point(p, h, r, th, eta, nu, branch=rng.choice([-1.0, 1.0]))
        tr = integrate_flow(p, h, pt, 50.0, tol=1e-10)
        rr, tt = tr.states[:, 0], tr.states[:, 1]
        assert tr.exit in ("fiber", "r0", "time")
        assert np.all(rr <= ergosphere_radius(p, tt) + 1e-9)
        n += 1


def test_horizon_hyperbolicity():
    for a in (0.0, 0.7, -0.95):
        p = BlackHoleParams(1.0, a)
        for z in (1, -1):
            assert horizon_hyperbolicity(p, build_h(p, 4.5), z, n_samples=500) > 0


# ---------------------------------------------------------------- scaled symbol

@pytest.mark.parametrize("a", [0.0, 0.5])
@pytest.mark.parametrize("beta, z", [(0.3, 1), (-0.3, -1)])
def test_sign_check(a, beta, z):
    p = BlackHoleParams(1.0, a)
    rep = scaled_symbol_sign_check(p, ScalingContour(beta, 25.0, 0.2), build_h(p, 20.0), z)
    assert rep["n_on_shell"] > 9000
    assert rep["violations"] == 0
    assert rep["max_im_unscaled"] < 1e-12
    assert rep["xi2_out_of_bounds"] == 0


def test_sign_check_rejects_unpaired():
    p = BlackHoleParams(1.0, 0.0)
    with pytest.raises(ValueError):
        scaled_symbol_sign_check(p, ScalingContour(0.3, 25.0, 0.2), build_h(p, 20.0), -1)


@given(st.floats(0.5, 22.9), st.floats(0.1, 3.0), st.floats(-3, 3), st.floats(-3, 3),
       st.floats(-3, 3))
def test_scaled_symbol_real_before_scaling(r, th, xi, eta, nu):
    p = BlackHoleParams(1.0, 0.0)
    val = scaled_symbol(p, ScalingContour(0.3, 25.0, 0.2), 1, 2.0 + r, th, xi, eta, nu)
    assert np.imag(val) == 0.0
