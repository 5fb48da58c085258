"""
Hamiltonian flow of the semiclassical symbol

    p = mu zeta^2 - 2 W zeta + kappa,     zeta = xi - z h(r),
    W = (r^2 + a^2) z - a nu,
    kappa = eta^2 + (nu - z a sin^2 theta)^2 / sin^2 theta  (Carter constant),

on the reduced phase space ``(r, theta, phi_*; xi, eta, nu)``. ``nu`` and
``kappa`` are conserved, and ``p`` is conserved by construction. Near the
poles the angular variables switch to the chart ``u = sin(theta) cos(phi)``,
``w = sin(theta) sin(phi)``, in which ``nu = u xi_w - w xi_u``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp, trapezoid
from scipy.optimize import brentq

from .geometry import BlackHoleParams, HProfile, alpha_const, mu
from .scaling import ScalingContour, f_beta

POLE_ENTER = 0.05
POLE_LEAVE = 0.1
RMAX_FLOW = 100.0
TRAP_TOL = 1e-9
FIBER_MAX = 1e8     # |xi| relative to the initial momentum scale


class FlowError(RuntimeError):
    """Integrator failure or inconsistent flow data."""


@dataclass(frozen=True)
class PhasePoint:
    r: float
    theta: float
    phi_star: float
    xi: float
    eta: float
    nu: float
    z: float = 1.0


@dataclass(frozen=True)
class ConservedTriple:
    p_value: float
    nu: float
    carter: float


def _hval(h, r):
    if isinstance(h, HProfile):
        return h.evaluate(r)
    return np.asarray(h(r)), np.zeros_like(np.asarray(r, dtype=float))


def carter(pt: PhasePoint, a: float = 0.0) -> float:
    """``eta^2 + (nu - z a sin^2 theta)^2 / sin^2 theta``; equals ``eta^2`` at a pole (``nu = 0``)."""
    s2 = np.sin(pt.theta) ** 2
    if s2 == 0.0:
        return float(pt.eta ** 2)
    return float(pt.eta ** 2 + (pt.nu - pt.z * a * s2) ** 2 / s2)


def symbol_p(p: BlackHoleParams, h, pt: PhasePoint) -> float:
    """Semiclassical principal symbol ``mu zeta^2 - 2 W zeta + kappa``."""
    hv, _ = _hval(h, pt.r)
    zeta = pt.xi - pt.z * float(hv)
    W = (pt.r ** 2 + p.a ** 2) * pt.z - p.a * pt.nu
    return float(mu(p, pt.r) * zeta ** 2 - 2.0 * W * zeta + carter(pt, p.a))


def conserved(p: BlackHoleParams, h, pt: PhasePoint) -> ConservedTriple:
    return ConservedTriple(symbol_p(p, h, pt), float(pt.nu), carter(pt, p.a))


def on_shell_point(p: BlackHoleParams, h, r: float, theta: float, eta: float, nu: float,
                   z: float = 1.0, branch: float = 1.0, phi_star: float = 0.0) -> PhasePoint:
    """Phase point on ``p = 0`` with ``xi`` from the ``branch`` (+1 or -1) root.

    ``zeta = (W + branch sqrt(W^2 - mu kappa)) / mu``; needs ``mu != 0`` and
    ``V_nu(r) >= kappa`` outside the horizon.
    """
    kap = carter(PhasePoint(r, theta, phi_star, 0.0, eta, nu, z), p.a)
    W = _W(p, z, nu, r)
    mu_r = float(mu(p, r))
    disc = W * W - mu_r * kap
    if mu_r == 0.0 or disc < 0:
        raise FlowError(f"no real characteristic point at r={r:.6g}")
    zeta = (W + branch * np.sqrt(disc)) / mu_r
    return PhasePoint(r, theta, phi_star, zeta + z * float(_hval(h, r)[0]), eta, nu, z)


def metric_symbol(p: BlackHoleParams, h, pt: PhasePoint, chart: str = "extended") -> float:
    """``-rr2 g^{-1}(omega, omega)`` for ``omega = -z dt_* + xi dr + eta dtheta + nu dphi_*``.

    ``chart="extended"`` contracts with the dual metric in ``(t_*, phi_*)``
    coordinates. ``chart="bl"`` pulls the covector back to Boyer-Lindquist
    coordinates and uses the Boyer-Lindquist dual metric, an independent
    route valid for ``r > r_plus``.
    """
    r, th = pt.r, pt.theta
    a, m = p.a, p.m_bh
    hv = float(_hval(h, r)[0])
    s2 = np.sin(th) ** 2
    mu_r = float(mu(p, r))
    tau = -pt.z
    if chart == "extended":
        G = np.zeros((4, 4))
        # order (t, r, theta, phi), times -rr2
        G[1, 1] = mu_r
        G[2, 2] = 1.0
        G[3, 3] = 1.0 / s2
        G[1, 3] = G[3, 1] = a
        G[0, 1] = G[1, 0] = r * r + a * a + mu_r * hv
        G[0, 3] = G[3, 0] = a * (1.0 + hv)
        G[0, 0] = mu_r * hv * hv + 2.0 * (r * r + a * a) * hv + a * a * s2
        om = np.array([tau, pt.xi, pt.eta, pt.nu])
        return float(om @ G @ om)
    if chart == "bl":
        if mu_r <= 0:
            raise ValueError("Boyer-Lindquist chart needs r > r_plus")
        rr2 = r * r + a * a * np.cos(th) ** 2
        # dt_* = dt + ((r^2+a^2)/mu + h) dr, dphi_* = dphi + a/mu dr
        xi_bl = pt.xi + tau * ((r * r + a * a) / mu_r + hv) + pt.nu * a / mu_r
        om = np.array([tau, xi_bl, pt.eta, pt.nu])
        G = np.zeros((4, 4))
        G[0, 0] = (r * r + a * a) ** 2 / mu_r - a * a * s2
        G[0, 3] = G[3, 0] = 2.0 * m * a * r / mu_r
        G[1, 1] = -mu_r
        G[2, 2] = -1.0
        G[3, 3] = -(1.0 / s2 - a * a / mu_r)
        ginv = G / rr2
        return float(-rr2 * (om @ ginv @ om))
    raise ValueError(f"unknown chart {chart!r}")


def potential_V(p: BlackHoleParams, z: float, nu: float, r):
    """``V_nu(r) = ((r^2 + a^2) z - a nu)^2 / mu``, defined for ``r > r_plus``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= p.r_plus):
        raise ValueError(f"potential needs r > r_plus={p.r_plus:.6g}")
    W = (r * r + p.a ** 2) * z - p.a * nu
    out = W * W / mu(p, r)
    return float(out) if out.ndim == 0 else out


def _W(p, z, nu, r):
    return (r * r + p.a ** 2) * z - p.a * nu


def r_min(p: BlackHoleParams, z: float, nu: float) -> float:
    """Unique minimizer of ``V_nu`` on ``(r_plus, inf)``.

    When ``z W(r_plus) <= 0`` the minimum value 0 is attained at the root of
    ``W``. Otherwise the critical point solves
    ``F(r) = 4 r z mu - 2 (r - m) W = 0``, bracketed and solved by Brent.
    """
    rp, m, a = p.r_plus, p.m_bh, p.a
    if z * _W(p, z, nu, rp) <= 0:
        return float(np.sqrt(z * a * nu - a * a))

    def F(r):
        return z * (4.0 * r * z * float(mu(p, r)) - 2.0 * (r - m) * _W(p, z, nu, r))

    lo, hi = rp, 2.0 * max(rp, 1.0)
    if F(lo) >= 0:
        raise FlowError("no sign change of V' at the horizon")
    k = 0
    while F(hi) <= 0:
        hi *= 2.0
        k += 1
        if k > 200:
            raise FlowError("could not bracket the potential minimum")
    return float(brentq(F, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200))


def classify_regime(p: BlackHoleParams, z: float, nu: float, carter_value: float,
                    rtol: float = TRAP_TOL) -> str:
    """``"Scatter"``, ``"Reflect"`` or ``"Trapped"`` by comparing with ``V_nu(r_min)``."""
    if carter_value < 0:
        raise ValueError("Carter constant must be non-negative")
    rm = r_min(p, z, nu)
    vmin = potential_V(p, z, nu, rm)
    if abs(carter_value - vmin) < rtol * vmin:
        return "Trapped"
    return "Scatter" if carter_value < vmin else "Reflect"


# ----------------------------------------------------------------------------
# vector field

def _radial_parts(p, h, z, r, xi, nu):
    hv, dh = _hval(h, r)
    hv, dh = float(hv), float(dh)
    zeta = xi - z * hv
    W = (r * r + p.a ** 2) * z - p.a * nu
    mu_r = r * r - 2.0 * p.m_bh * r + p.a ** 2
    Q = mu_r * zeta - W
    dp_dxi = 2.0 * Q
    dp_dr = 2.0 * (r - p.m_bh) * zeta ** 2 - 4.0 * r * z * zeta - 2.0 * z * dh * Q
    return zeta, dp_dxi, dp_dr


def hamilton_field(p: BlackHoleParams, h, pt: PhasePoint) -> np.ndarray:
    """``H_p`` in spherical coordinates: d/ds of ``(r, theta, phi, xi, eta, nu)``."""
    return _rhs_sph(p, h, pt.z)(0.0, np.array([pt.r, pt.theta, pt.phi_star, pt.xi, pt.eta, pt.nu]))


def _rhs_sph(p, h, z):
    a = p.a

    def f(_, y):
        r, th, _phi, xi, eta, nu = y
        zeta, dp_dxi, dp_dr = _radial_parts(p, h, z, r, xi, nu)
        s, c = np.sin(th), np.cos(th)
        s2 = s * s
        dk_dnu = 2.0 * (nu - z * a * s2) / s2
        dk_dth = -2.0 * nu * nu * c / (s2 * s) + 2.0 * z * z * a * a * s * c
        return np.array([dp_dxi, 2.0 * eta, 2.0 * a * zeta + dk_dnu,
                         -dp_dr, -dk_dth, 0.0])
    return f


def _rhs_pole(p, h, z):
    a = p.a

    def f(_, y):
        r, u, w, xi, xu, xw = y
        nu = u * xw - w * xu
        zeta, dp_dxi, dp_dr = _radial_parts(p, h, z, r, xi, nu)
        P = u * xu + w * xw
        G = 2.0 * a * zeta - 2.0 * z * a
        return np.array([
            dp_dxi,
            2.0 * xu - 2.0 * P * u - G * w,
            2.0 * xw - 2.0 * P * w + G * u,
            -dp_dr,
            -(-2.0 * P * xu + 2.0 * z * z * a * a * u + G * xw),
            -(-2.0 * P * xw + 2.0 * z * z * a * a * w - G * xu),
        ])
    return f


def _sph_to_pole(y):
    r, th, phi, xi, eta, nu = y
    s, c = np.sin(th), np.cos(th)
    cp, sp = np.cos(phi), np.sin(phi)
    return np.array([r, s * cp, s * sp, xi,
                     cp * eta / c - sp * nu / s if s > 0 else cp * eta / c,
                     sp * eta / c + cp * nu / s if s > 0 else sp * eta / c])


def _pole_to_sph(y, north, phi_ref):
    r, u, w, xi, xu, xw = y
    rho = np.hypot(u, w)
    th = np.arcsin(min(rho, 1.0))
    if not north:
        th = np.pi - th
    phi = np.arctan2(w, u)
    phi += 2.0 * np.pi * np.round((phi_ref - phi) / (2.0 * np.pi))
    c = np.cos(th)
    eta = c * (xu * np.cos(phi) + xw * np.sin(phi))
    nu = u * xw - w * xu
    return np.array([r, th, phi, xi, eta, nu])


@dataclass
class Trajectory:
    """Sampled integral curve with conserved-quantity drifts."""

    t: np.ndarray
    states: np.ndarray          # columns r, theta, phi_star, xi, eta, nu
    p_drift: np.ndarray
    nu_drift: np.ndarray
    carter_drift: np.ndarray
    exit: str
    z: float = 1.0
    charts: list = field(default_factory=list)

    @property
    def max_drift(self) -> dict:
        return {"p": float(self.p_drift.max()), "nu": float(self.nu_drift.max()),
                "carter": float(self.carter_drift.max())}

    def write_csv(self, path) -> None:
        cols = ["t", "r", "theta", "phi_star", "xi", "eta", "nu", "p_drift", "carter_drift"]
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(cols)
            for k in range(len(self.t)):
                row = [self.t[k], *self.states[k], self.p_drift[k], self.carter_drift[k]]
                wr.writerow([f"{v:.15g}" for v in row])


def integrate_flow(p: BlackHoleParams, h, pt0: PhasePoint, T: float, tol: float = 1e-12,
                   r0: float | None = None, rmax_flow: float | None = None,
                   max_step: float = np.inf) -> Trajectory:
    """Integrate ``H_p`` from ``pt0`` for flow time ``T`` (DOP853).

    Stops early when ``r`` reaches ``r0`` or ``rmax_flow`` (default
    ``100 m_bh``), and with exit ``"fiber"`` when ``|xi|`` grows past
    ``FIBER_MAX`` times its initial scale: near the horizon the radial sets
    at fiber infinity are reached in finite flow parameter. Switches to the
    pole chart when ``sin(theta) < 0.05`` and back once it exceeds 0.1. ``tol`` bounds the drift of the conserved
    quantities; the local step error is held one decade below it because
    the drift accumulates over thousands of steps.
    """
    z = pt0.z
    r0 = (0.5 * (p.m_bh + p.r_plus)) if r0 is None else r0
    rmax_flow = RMAX_FLOW * p.m_bh if rmax_flow is None else rmax_flow
    c0 = conserved(p, h, pt0)
    scale = max(1.0, abs(c0.carter), abs(c0.nu))
    if abs(c0.p_value) > 1e-6 * scale:
        raise FlowError(f"initial point is off shell: p = {c0.p_value:.3g}")

    y = np.array([pt0.r, pt0.theta, pt0.phi_star, pt0.xi, pt0.eta, pt0.nu], dtype=float)
    pole = np.sin(y[1]) < POLE_ENTER
    north = np.cos(y[1]) >= 0
    if pole:
        y = _sph_to_pole(y)
    t0 = 0.0
    ts, ys, charts = [], [], []
    exit_reason = "time"

    def ev_in(t, yy):
        return yy[0] - r0
    ev_in.terminal, ev_in.direction = True, -1

    def ev_out(t, yy):
        return yy[0] - rmax_flow
    ev_out.terminal, ev_out.direction = True, 1

    xi_cap = FIBER_MAX * max(1.0, abs(pt0.xi), abs(pt0.eta), abs(pt0.nu))

    def ev_fiber(t, yy):
        return abs(yy[3]) - xi_cap
    ev_fiber.terminal, ev_fiber.direction = True, 1

    phi_ref = pt0.phi_star
    while t0 < T:
        if pole:
            rhs = _rhs_pole(p, h, z)

            def ev_chart(t, yy):
                return np.hypot(yy[1], yy[2]) - POLE_LEAVE
            ev_chart.direction = 1
        else:
            rhs = _rhs_sph(p, h, z)

            def ev_chart(t, yy):
                return np.sin(yy[1]) - POLE_ENTER
            ev_chart.direction = -1
        ev_chart.terminal = True
        sol = solve_ivp(rhs, (t0, T), y, method="DOP853", rtol=0.1 * tol, atol=0.1 * tol,
                        events=(ev_in, ev_out, ev_fiber, ev_chart), max_step=max_step)
        if sol.status == -1:
            raise FlowError(f"integration failed: {sol.message}")
        seg = sol.y.T
        if pole:
            conv = []
            for row in seg:
                s_row = _pole_to_sph(row, north, phi_ref)
                phi_ref = s_row[2]
                conv.append(s_row)
            seg = np.array(conv)
        start = 0 if not ts else 1
        ts.extend(sol.t[start:])
        ys.extend(seg[start:])
        charts.extend(["pole" if pole else "sph"] * (len(sol.t) - start))
        t0 = sol.t[-1]
        y = sol.y[:, -1]
        if sol.status == 1:
            if sol.t_events[0].size:
                exit_reason = "r0"
                break
            if sol.t_events[1].size:
                exit_reason = "rmax"
                break
            if sol.t_events[2].size:
                exit_reason = "fiber"
                break
            # chart switch
            if pole:
                y = _pole_to_sph(y, north, phi_ref)
                pole = False
            else:
                north = np.cos(y[1]) >= 0
                y = _sph_to_pole(y)
                pole = True
        else:
            break

    states = np.array(ys)
    cs = [conserved(p, h, PhasePoint(*row, z=z)) for row in states]
    pv = np.array([abs(c.p_value - c0.p_value) for c in cs])
    nv = np.array([abs(c.nu - c0.nu) for c in cs])
    kv = np.array([abs(c.carter - c0.carter) for c in cs])
    return Trajectory(np.array(ts), states, pv, nv, kv, exit_reason, z, charts)


# ----------------------------------------------------------------------------
# trapping

def trapped_set(p: BlackHoleParams, z: float, nu: float) -> dict:
    """``r = r_min``, ``xi - z h = W / mu`` and ``kappa = V_nu(r_min)``."""
    if z * _W(p, z, nu, p.r_plus) <= 0:
        raise FlowError("no trapping: z ((r_+^2 + a^2) z - a nu) must be positive")
    rm = r_min(p, z, nu)
    W = _W(p, z, nu, rm)
    mu_r = float(mu(p, rm))
    return {"r": rm, "xi_shifted": W / mu_r, "carter": W * W / mu_r}


def _angular_start(p, z, nu, kappa):
    """A point on the trapped orbit: theta at the minimum of the angular potential."""
    a = p.a

    def U(th):
        s2 = np.sin(th) ** 2
        return (nu - z * a * s2) ** 2 / s2

    ths = np.linspace(1e-3, np.pi / 2, 2001)
    th = float(ths[np.argmin(U(ths))])
    eta2 = kappa - U(th)
    if eta2 < 0:
        raise FlowError("Carter constant below the angular potential minimum")
    return th, float(np.sqrt(eta2))


def trapped_point(p: BlackHoleParams, h, z: float, nu: float) -> PhasePoint:
    ts = trapped_set(p, z, nu)
    hv = float(_hval(h, ts["r"])[0])
    th, eta = _angular_start(p, z, nu, ts["carter"])
    return PhasePoint(ts["r"], th, 0.0, ts["xi_shifted"] + z * hv, eta, nu, z)


def dtstar_ds(p: BlackHoleParams, h, pt: PhasePoint) -> float:
    """Rate of ``t_*`` along the flow, ``dt_*/ds = -dp/d(tau)`` with ``tau = -z``, i.e. ``dp/dz``."""
    a = p.a
    hv = float(_hval(h, pt.r)[0])
    zeta = pt.xi - pt.z * hv
    W = _W(p, pt.z, pt.nu, pt.r)
    mu_r = float(mu(p, pt.r))
    s2 = np.sin(pt.theta) ** 2
    dk_dz = -2.0 * a * (pt.nu - pt.z * a * s2)
    return float(-2.0 * mu_r * hv * zeta - 2.0 * (pt.r ** 2 + a * a) * zeta + 2.0 * hv * W + dk_dz)


def _phi_branches(p, h, z, nu, rm, vmin):
    """The two defining functions ``phi_u``, ``phi_s`` of the stable/unstable manifolds."""
    def make(sign):
        def phi(r, xi):
            hv = float(_hval(h, r)[0])
            zeta = xi - z * hv
            mu_r = float(mu(p, r))
            W = _W(p, z, nu, r)
            root = np.sqrt(max(W * W / mu_r - vmin, 0.0)) / np.sqrt(mu_r)
            return zeta - W / mu_r - sign * np.sign(r - rm) * root
        return phi
    return make(1.0), make(-1.0)


def expansion_rates(p: BlackHoleParams, h, z: float, nu: float, offset: float = 1e-5,
                    fd_step: float = 1e-7, n_periods: int = 40) -> dict:
    """Normal expansion rates of the trapped set.

    ``w`` is ``H_p phi / phi`` for each of the two branch functions,
    evaluated at a point on the other branch at distance ``offset`` from
    the trapped set; derivatives of ``phi`` by central differences. Raw
    rates are per unit flow parameter; the ``t_*``-converted rates divide by
    the mean of ``|dt_*/ds|`` along the trapped orbit.
    """
    ts = trapped_set(p, z, nu)
    rm, vmin = ts["r"], ts["carter"]
    f_a, f_b = _phi_branches(p, h, z, nu, rm, vmin)
    th, eta = _angular_start(p, z, nu, vmin)

    def rate(phi, other_sign):
        r = rm + offset
        hv = float(_hval(h, r)[0])
        mu_r = float(mu(p, r))
        W = _W(p, z, nu, r)
        root = np.sqrt(max(W * W / mu_r - vmin, 0.0)) / np.sqrt(mu_r)
        xi = W / mu_r + other_sign * root + z * hv      # on the other manifold
        pt = PhasePoint(r, th, 0.0, xi, eta, nu, z)
        v = hamilton_field(p, h, pt)
        dr = (phi(r + fd_step, xi) - phi(r - fd_step, xi)) / (2 * fd_step)
        dxi = (phi(r, xi + fd_step) - phi(r, xi - fd_step)) / (2 * fd_step)
        return (dr * v[0] + dxi * v[3]) / phi(r, xi)

    lam_a = rate(f_a, -1.0)
    lam_b = rate(f_b, +1.0)
    if lam_a > 0 and lam_b < 0:
        wu, ws = lam_a, -lam_b
    elif lam_b > 0 and lam_a < 0:
        wu, ws = lam_b, -lam_a
    else:
        raise FlowError(f"non-hyperbolic rates {lam_a:.3g}, {lam_b:.3g}")

    # mean |dt_*/ds| along the trapped orbit (theta oscillates for a != 0)
    pt0 = trapped_point(p, h, z, nu)
    if p.a == 0.0:
        rate_t = abs(dtstar_ds(p, h, pt0))
    else:
        period = np.pi / np.sqrt(max(vmin, 1e-12))
        S = n_periods * period
        tr = integrate_flow(p, h, pt0, S, tol=1e-10, rmax_flow=np.inf, max_step=period / 20)
        vals = np.array([abs(dtstar_ds(p, h, PhasePoint(*row, z=z))) for row in tr.states])
        rate_t = float(trapezoid(vals, tr.t) / (tr.t[-1] - tr.t[0]))
    return {
        "w_u": wu / rate_t, "w_s": ws / rate_t, "gap": 0.5 * min(wu, ws) / rate_t,
        "raw_w_u": wu, "raw_w_s": ws, "raw_gap": 0.5 * min(wu, ws),
        "dtstar_ds": rate_t, "r_min": rm, "carter": vmin,
    }


def radial_set_rates(p: BlackHoleParams, im_sigma: float) -> dict:
    """Radial-set constants at the horizon.

    ``alpha_s = -alpha Im(sigma)`` with ``alpha`` the inverse surface gravity;
    the threshold regularity is ``1/2 + alpha_s``.
    """
    alpha_r = 2.0 * np.sqrt(p.m_bh ** 2 - p.a ** 2)
    alpha_s = -alpha_const(p) * im_sigma
    return {"alpha_r": float(alpha_r), "alpha_s": float(alpha_s), "threshold_s": float(0.5 + alpha_s)}


def horizon_hyperbolicity(p: BlackHoleParams, h, z: float, n_samples: int = 1000,
                          r0: float | None = None, seed: int = 0) -> float:
    """Minimum of ``|H_p r|`` over random on-shell points with ``r0 < r < r_plus``."""
    rng = np.random.default_rng(seed)
    r0 = (0.5 * (p.m_bh + p.r_plus)) if r0 is None else r0
    out = np.inf
    for _ in range(n_samples):
        r = rng.uniform(r0, p.r_plus)
        th = rng.uniform(0.05, np.pi - 0.05)
        nu = rng.normal(0.0, 3.0)
        eta = rng.normal(0.0, 3.0)
        pt = PhasePoint(r, th, 0.0, 0.0, eta, nu, z)
        kap = carter(pt, p.a)
        W = _W(p, z, nu, r)
        mu_r = float(mu(p, r))
        for sgn in (1.0, -1.0):
            zeta = (W + sgn * np.sqrt(W * W - mu_r * kap)) / mu_r
            out = min(out, abs(2.0 * (mu_r * zeta - W)))
    return float(out)


# ----------------------------------------------------------------------------
# complex-scaled symbol

def scaled_symbol(p: BlackHoleParams, c: ScalingContour, z: float, r, theta, xi, eta, nu):
    """Semiclassical symbol of the scaled operator in ``r > R0``."""
    a, m = p.a, p.m_bh
    f, df = f_beta(c, r)
    rr2 = f * f + a * a * np.cos(theta) ** 2
    mub = f * f - 2.0 * m * f + a * a
    s2 = np.sin(theta) ** 2
    kin = (mub / (df * r) ** 2 * xi ** 2 + eta ** 2 / r ** 2 + nu ** 2 / (r ** 2 * s2)
           + 2.0 * a / (df * r ** 2) * xi * nu)
    return (r * r / rr2 * kin + z * 4.0 * m * a * f / (rr2 * mub) * nu
            - 2.0 * m * f * (f * f + a * a) / (rr2 * mub) - 1.0)


def scaled_symbol_sign_check(p: BlackHoleParams, c: ScalingContour, h: HProfile, z: float,
                             n_samples: int = 10_000, seed: int = 0, tol: float = 1e-12,
                             r_max_factor: float = 2.0) -> dict:
    """Sign of ``Im`` of the scaled symbol on ``{Re = 0}``.

    Radii are drawn log-uniformly in ``(R0, r_max_factor R2)``, angles and
    unit momentum directions uniformly. Along each direction the symbol is a
    quadratic in ``|xi_vec|``; its positive real-part root defines the
    sample on ``Sigma``.
    """
    if (c.beta > 0 and z != 1) or (c.beta < 0 and z != -1):
        raise ValueError("pair beta > 0 with z = 1 and beta < 0 with z = -1")
    rng = np.random.default_rng(seed)
    R0 = h.R0
    r = np.exp(rng.uniform(np.log(R0), np.log(r_max_factor * c.R2), n_samples))
    r = np.maximum(r, np.nextafter(R0, np.inf))
    th = np.arccos(rng.uniform(-1.0, 1.0, n_samples))
    d = rng.normal(size=(n_samples, 3))
    d /= np.linalg.norm(d, axis=1)[:, None]
    st = np.sin(th)
    # |xi_vec|^2 = xi^2 + eta^2/r^2 + nu^2/(r^2 sin^2) = t^2
    X, E, N = d[:, 0], d[:, 1] * r, d[:, 2] * r * st
    C0 = scaled_symbol(p, c, z, r, th, 0.0, 0.0, 0.0)
    L = scaled_symbol(p, c, z, r, th, 0.0, 0.0, N) - C0           # linear-in-t part at t = 1
    full = scaled_symbol(p, c, z, r, th, X, E, N)
    Q = full - C0 - L
    qa, qb, qc = Q.real, L.real, C0.real
    disc = qb * qb - 4.0 * qa * qc
    ok = (disc >= 0) & (qa != 0)
    t = np.full(n_samples, np.nan)
    t[ok] = (-qb[ok] + np.sqrt(disc[ok])) / (2.0 * qa[ok])
    ok &= t > 0
    im = (Q * t ** 2 + L * t + C0).imag
    im = np.where(ok, im, np.nan)
    bad = (im > tol) if z > 0 else (im < -tol)
    t2 = t ** 2
    scaled = f_beta(c, r)[0].imag != 0
    return {
        "n_samples": int(n_samples),
        "n_on_shell": int(ok.sum()),
        "violations": int(np.sum(bad & ok)),
        "max_im": float(np.nanmax(im)) if ok.any() else float("nan"),
        "min_im": float(np.nanmin(im)) if ok.any() else float("nan"),
        "max_im_unscaled": float(np.nanmax(np.abs(im[ok & ~scaled]))) if np.any(ok & ~scaled) else 0.0,
        "xi2_min": float(np.nanmin(t2[ok])) if ok.any() else float("nan"),
        "xi2_max": float(np.nanmax(t2[ok])) if ok.any() else float("nan"),
        "xi2_out_of_bounds": int(np.sum(ok & ((t2 < 0.5) | (t2 > 2.0)))),
    }
