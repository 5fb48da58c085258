"""
Complex-scaling contour ``f_beta(r) = exp(i beta psi(log r)) r``.

``psi`` climbs from 0 to 1 between ``log R1`` and ``log R2`` along a quintic
smoothstep. Its maximal slope is 15/8 over the log-window width, so fixing
the slope bound ``eps`` fixes ``R2 = R1 exp(15 / (8 eps))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import BlackHoleParams, quintic_step

SMOOTHSTEP_MAX_SLOPE = 15.0 / 8.0


@dataclass(frozen=True)
class ScalingContour:
    """Phase function and scaled radius.

    Parameters
    ----------
    beta : float
        Scaling angle in (-pi, pi).
    R1 : float
        Radius where the rotation starts.
    eps : float
        Bound on ``psi'``; the end radius ``R2`` is derived from it.
    """

    beta: float
    R1: float
    eps: float = 0.2
    R2: float = field(init=False)

    def __post_init__(self):
        if not (-np.pi < self.beta < np.pi):
            raise ValueError(f"beta must lie in (-pi, pi), got {self.beta}")
        if not self.R1 > 0:
            raise ValueError(f"R1 must be positive, got {self.R1}")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        width = SMOOTHSTEP_MAX_SLOPE / self.eps
        if width + np.log(self.R1) > np.log(np.finfo(float).max):
            raise ValueError(f"eps={self.eps} gives an unrepresentable R2")
        object.__setattr__(self, "R2", float(self.R1 * np.exp(width)))

    @property
    def log_width(self) -> float:
        return float(np.log(self.R2) - np.log(self.R1))

    def with_beta(self, beta: float) -> "ScalingContour":
        return ScalingContour(beta, self.R1, self.eps)


def psi_profile(c: ScalingContour, t):
    """Return ``(psi(t), psi'(t))`` for ``t = log r``."""
    w = c.log_width
    s, ds = quintic_step((np.asarray(t, dtype=float) - np.log(c.R1)) / w)
    return s, ds / w


def f_beta(c: ScalingContour, r):
    """Scaled radius ``f`` and its derivative ``df = f'(r)``.

    ``df = exp(i phi) (1 + i beta psi'(log r))``; its modulus is at least 1.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("f_beta needs r > 0")
    s, ds = psi_profile(c, np.log(r))
    rot = np.exp(1j * c.beta * s)
    return rot * r, rot * (1.0 + 1j * c.beta * ds)


def scaled_coeffs(p: BlackHoleParams, c: ScalingContour, r, theta, R0: float) -> dict:
    """Analytically continued coefficients on the contour.

    Parameters
    ----------
    p, c : BlackHoleParams, ScalingContour
    r, theta : array_like
        Real coordinates; ``r`` must exceed ``R0``.
    R0 : float
        Outer transition radius of the h-profile, below which the
        continuation is not defined.

    Returns
    -------
    dict
        ``f``, ``df``, ``mu_beta = f^2 - 2 m f + a^2`` and
        ``rr2_beta = f^2 + a^2 cos^2(theta)``.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= R0):
        raise ValueError(f"scaled coefficients only defined for r > R0={R0}")
    if R0 >= c.R1:
        raise ValueError(f"R0={R0} must lie below R1={c.R1}")
    f, df = f_beta(c, r)
    ct = np.cos(theta)
    return {
        "f": f,
        "df": df,
        "mu_beta": f * f - 2.0 * p.m_bh * f + p.a * p.a,
        "rr2_beta": f * f + p.a * p.a * ct * ct,
    }
