"""
Leaver continued-fraction oracle for scalar Kerr quasinormal modes.

Works in Leaver's units ``2 m_bh = 1``: ``omega_L = 2 m_bh sigma`` and
``a_L = a / (2 m_bh)``; the spheroidicity ``c = a sigma = a_L omega_L`` is
unit free. The mode is the simultaneous root of the radial and angular
three-term recurrences' continued fractions, found by Newton in
``(omega, A)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CF_DEPTH = 300
NEWTON_TOL = 1e-12


class OracleError(RuntimeError):
    """Continued fraction or Newton iteration failed."""


@dataclass(frozen=True)
class OracleMode:
    l: int
    m_az: int
    n: int
    sigma: complex
    angular_eigenvalue: complex
    cf_depth: int
    residual: float


def _inverted_cf(alpha, beta, gamma, k, tail_ratio):
    """``beta_k + alpha_k r_k + gamma_k t_k`` for the k-th inversion.

    ``r_k = a_{k+1}/a_k`` from the bottom of the recurrence (seeded with
    ``tail_ratio``), ``t_k = a_{k-1}/a_k`` from the top.
    """
    N = len(alpha) - 2
    r = tail_ratio
    for j in range(N, k, -1):
        r = -gamma[j] / (beta[j] + alpha[j] * r)
    t = 0.0
    for j in range(k):
        t = -alpha[j] / (beta[j] + gamma[j] * t)
    return beta[k] + alpha[k] * r + gamma[k] * t


def angular_cf(c, A, m_az, k, depth=CF_DEPTH):
    """Spheroidal continued fraction (spin 0) at inversion ``k = l - |m|``.

    Eigen-equation ``((1-u^2) S')' + (c^2 u^2 + A - m^2/(1-u^2)) S = 0``.
    """
    km = 0.5 * abs(m_az)
    n = np.arange(depth + 2, dtype=float)
    alpha = -2.0 * (n + 1.0) * (n + 2.0 * km + 1.0)
    beta = (n * (n - 1.0) + 2.0 * n * (2.0 * km + 1.0 - 2.0 * c)
            - (2.0 * c * (2.0 * km + 1.0) - 2.0 * km * (2.0 * km + 1.0)) - (c * c + A))
    gamma = 2.0 * c * (n + 2.0 * km)
    # minimal solution ratio decays like -c/n
    return _inverted_cf(alpha, beta, gamma, k, -c / (depth + 1.0)) / (k + 1.0) ** 2


def radial_cf(w, a, m_az, A, k, depth=CF_DEPTH):
    """Leaver radial continued fraction (spin 0, units ``2M = 1``)."""
    b = np.sqrt(1.0 - 4.0 * a * a)
    X = w / 2.0 - a * m_az
    c0 = 1.0 - 1j * w - 2j / b * X
    c1 = -4.0 + 2j * w * (2.0 + b) + 4j / b * X
    c2 = 3.0 - 3j * w - 2j / b * X
    c3 = (w * w * (4.0 + 2.0 * b - a * a) - 2.0 * a * m_az * w - 1.0 + (2.0 + b) * 1j * w
          - A + (4.0 * w + 2j) / b * X)
    c4 = 1.0 - 2.0 * w * w - 3j * w - (4.0 * w + 2j) / b * X
    n = np.arange(depth + 2, dtype=float)
    alpha = n * n + (c0 + 1.0) * n + c0
    beta = -2.0 * n * n + (c1 + 2.0) * n + c3
    gamma = n * n + (c2 - 3.0) * n + c4 - c2 + 2.0
    u = np.sqrt(-2j * b * w)
    if u.real > 0:
        u = -u
    tail = 1.0 + u / np.sqrt(depth)
    return _inverted_cf(alpha, beta, gamma, k, tail) / (k + 1.0) ** 2


def _newton1(fun, x0, tol=NEWTON_TOL, maxiter=60):
    x = complex(x0)
    for _ in range(maxiter):
        f = fun(x)
        dx = 1e-7 * max(1.0, abs(x))
        df = (fun(x + dx) - fun(x - dx)) / (2.0 * dx)
        if df == 0 or not np.isfinite(df):
            break
        step = f / df
        x -= step
        if abs(step) < tol * max(1.0, abs(x)):
            return x
    raise OracleError(f"Newton did not converge from {x0}")


def angular_eigenvalue(c, l: int, m_az: int, depth: int = CF_DEPTH, max_step: float = 0.05):
    """Spheroidal eigenvalue ``A_lm(c)`` connected to ``l (l + 1)`` at ``c = 0``.

    The root is tracked along the straight path from 0 to ``c`` in steps of
    at most ``max_step``, each seeded by quadratic extrapolation.
    """
    if abs(m_az) > l:
        raise ValueError("need |m_az| <= l")
    c = complex(c)
    k = l - abs(m_az)
    A0 = float(l * (l + 1))
    if c == 0:
        return complex(A0)
    nstep = max(1, int(np.ceil(abs(c) / max_step)))
    path = [complex(A0)]
    for j in range(1, nstep + 1):
        cj = c * j / nstep
        if len(path) >= 3:
            seed = 3 * path[-1] - 3 * path[-2] + path[-3]
        elif len(path) == 2:
            seed = 2 * path[-1] - path[-2]
        else:
            seed = A0 - cj * cj / 2.0
        path.append(_newton1(lambda A: angular_cf(cj, A, m_az, k, depth), seed))
    return path[-1]


def _solve_mode(aL, l, m_az, n, w0, A0, depth, tol):
    """2D Newton on (radial, angular) continued fractions in Leaver units."""
    k_ang = l - abs(m_az)

    def F(x):
        w, A = x
        return np.array([radial_cf(w, aL, m_az, A, n, depth),
                         angular_cf(aL * w, A, m_az, k_ang, depth)])

    x = np.array([w0, A0], dtype=complex)
    for _ in range(80):
        f = F(x)
        J = np.empty((2, 2), dtype=complex)
        for j in range(2):
            dx = 1e-7 * max(1.0, abs(x[j]))
            e = np.zeros(2, dtype=complex)
            e[j] = dx
            J[:, j] = (F(x + e) - F(x - e)) / (2.0 * dx)
        try:
            step = np.linalg.solve(J, f)
        except np.linalg.LinAlgError as exc:
            raise OracleError(f"singular Jacobian: {exc}") from exc
        # damp large steps to stay in the basin
        lim = 0.5 * max(abs(x[0]), 0.1)
        if abs(step[0]) > lim:
            step *= lim / abs(step[0])
        x = x - step
        if np.abs(step).max() < tol * max(1.0, np.abs(x).max()):
            return x[0], x[1], float(np.abs(F(x)).max())
    raise OracleError(f"Newton failed for l={l}, m={m_az}, n={n}")


def _eikonal_seed(l, n):
    # Schwarzschild photon sphere in Leaver units: omega_L = 2 sigma, m = 1/2
    s = 1.0 / (3.0 * np.sqrt(3.0) * 0.5)
    return complex((l + 0.5) * s, -(n + 0.5) * s)


def _schwarzschild_seed(l, n, depth, tol):
    """Locate the a = 0 mode from the eikonal estimate."""
    w0 = _eikonal_seed(l, n)
    A = float(l * (l + 1))
    w = _newton1(lambda w: radial_cf(w, 0.0, 0, A, n, depth), w0, tol)
    return w


def leaver_qnm(p, l: int, m_az: int, n: int = 0, cf_depth: int = CF_DEPTH,
               tol: float = NEWTON_TOL, a_step: float = 0.05) -> OracleMode:
    """Scalar Kerr QNM ``(l, m_az, n)`` from the continued fractions.

    Starts at the Schwarzschild mode (seeded from the eikonal estimate) and
    continues in ``a`` to the target spin. Overtones are checked to be
    strictly more damped than the next lower one.

    Parameters
    ----------
    p : BlackHoleParams
    l, m_az, n : int
    cf_depth : int
        Truncation depth; the result is re-checked at twice this depth.
    """
    if n < 0 or abs(m_az) > l:
        raise ValueError("need n >= 0 and |m_az| <= l")
    if abs(p.a) >= p.m_bh:
        raise ValueError("oracle needs a subextremal black hole")
    aT = p.a / (2.0 * p.m_bh)
    w = _schwarzschild_seed(l, n, cf_depth, tol)
    A = complex(l * (l + 1))
    steps = int(np.ceil(abs(aT) / a_step))
    ws = [w]
    for j in range(1, steps + 1):
        aj = aT * j / steps
        seed = 2 * ws[-1] - ws[-2] if len(ws) > 1 else ws[-1]
        A = angular_eigenvalue(aj * seed, l, m_az, cf_depth)
        w, A, _ = _solve_mode(aj, l, m_az, n, seed, A, cf_depth, tol)
        ws.append(w)
    if steps == 0:
        w, A, _ = _solve_mode(0.0, l, m_az, n, w, A, cf_depth, tol)
    w2, A2, res2 = _solve_mode(aT, l, m_az, n, w, A, 2 * cf_depth, tol)
    if abs(w2 - w) > 1e-10 * max(1.0, abs(w)):
        raise OracleError(f"continued fraction not converged at depth {cf_depth}")
    if n > 0:
        lower = leaver_qnm(p, l, m_az, n - 1, cf_depth, tol, a_step)
        if not w.imag / (2.0 * p.m_bh) < lower.sigma.imag:
            raise OracleError(f"overtone {n} captured a less damped root")
    w_res = abs(radial_cf(w, aT, m_az, A, n, cf_depth)) + abs(angular_cf(aT * w, A, m_az, l - abs(m_az), cf_depth))
    return OracleMode(l, m_az, n, complex(w / (2.0 * p.m_bh)), complex(A), cf_depth, float(w_res))
