"""
Kerr background quantities in hyperboloidal (t_*, r, theta, phi_*) coordinates.

Everything here is a closed-form function of the mass ``m_bh`` and the
specific angular momentum ``a``: horizon radii, the metric functions
``mu`` and ``rr2``, the Fredholm constant ``alpha`` and the shift profile
``h(r)`` that makes ``dt_*`` timelike everywhere on the slice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BlackHoleParams:
    """Mass and specific angular momentum of a subextremal Kerr black hole.

    Parameters
    ----------
    m_bh : float
        Mass in geometric units, positive.
    a : float
        Specific angular momentum, ``|a| < m_bh``.
    """

    m_bh: float = 1.0
    a: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.m_bh) or self.m_bh <= 0:
            raise ValueError(f"m_bh must be positive, got {self.m_bh}")
        if not np.isfinite(self.a) or abs(self.a) >= self.m_bh:
            raise ValueError(
                f"|a| must be below m_bh (subextremal), got a={self.a}, m_bh={self.m_bh}"
            )

    @property
    def r_plus(self) -> float:
        return horizon_radii(self)[0]

    @property
    def r_minus(self) -> float:
        return horizon_radii(self)[1]


def quintic_step(u):
    """Quintic smoothstep ``S(u) = 6u^5 - 15u^4 + 10u^3`` clamped to [0, 1].

    Returns ``(S, S')`` with the derivative taken in ``u``. Both vanish to
    second order at the joints, so blends built from it are C^2.
    """
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    ds = 30.0 * u * u * (1.0 - u) ** 2
    return s, ds


def horizon_radii(p: BlackHoleParams) -> tuple[float, float]:
    """Return ``(r_plus, r_minus)``, the two real roots of ``mu``."""
    m, a = p.m_bh, p.a
    if abs(a) >= m:
        raise ValueError("horizon radii need |a| < m_bh")
    d = np.sqrt((m - a) * (m + a))
    # r_- via Vieta keeps the small root accurate near a -> 0
    r_plus = m + d
    r_minus = a * a / r_plus
    return float(r_plus), float(r_minus)


def mu(p: BlackHoleParams, r):
    """``mu(r) = r^2 - 2 m r + a^2``."""
    r = np.asarray(r)
    return r * r - 2.0 * p.m_bh * r + p.a * p.a


def rr2(p: BlackHoleParams, r, theta):
    """``r^2 + a^2 cos^2(theta)``."""
    r = np.asarray(r)
    c = np.cos(theta)
    return r * r + p.a * p.a * c * c


def alpha_const(p: BlackHoleParams) -> float:
    """Inverse surface gravity ``2 (m + m^2 / sqrt(m^2 - a^2))``.

    Sets the regularity threshold ``s > 1/2 - alpha Im(sigma)`` at the horizon.
    """
    m, a = p.m_bh, p.a
    if abs(a) >= m:
        raise ValueError("alpha is undefined at or beyond extremality")
    return float(2.0 * (m + m * m / np.sqrt(m * m - a * a)))


def ergosphere_radius(p: BlackHoleParams, theta):
    """Outer root of ``mu(r) = a^2 sin^2(theta)``."""
    m, a = p.m_bh, p.a
    c = np.cos(theta)
    return m + np.sqrt(m * m - a * a * c * c)


@dataclass(frozen=True)
class HProfile:
    """Shift profile ``h(r)`` of the hyperboloidal time function.

    ``h = -1`` below ``r_tilde`` (regular across the future horizon),
    ``h = -(r^2 + a^2)/mu`` above ``R0`` (Boyer-Lindquist time, which is what
    complex scaling needs) and a quintic-smoothstep blend in between. Any
    value inside the bracket between the two branches keeps ``dt_*`` timelike
    for ``r > r_plus``, so the blend does too.

    Parameters
    ----------
    params : BlackHoleParams
    r_tilde : float
        Inner transition radius, ``r_plus < r_tilde < R0``.
    R0 : float
        Outer transition radius.
    """

    params: BlackHoleParams
    r_tilde: float
    R0: float

    def __post_init__(self):
        rp = self.params.r_plus
        if not (rp < self.r_tilde < self.R0):
            raise ValueError(
                f"need r_plus < r_tilde < R0, got r_plus={rp:.6g}, "
                f"r_tilde={self.r_tilde}, R0={self.R0}"
            )

    def _outer(self, r):
        p = self.params
        mu_r = mu(p, r)
        safe = np.where(mu_r > 0, mu_r, 1.0)
        w = r * r + p.a * p.a
        h = np.where(mu_r > 0, -w / safe, -1.0)
        dh = np.where(mu_r > 0, -(2.0 * r * safe - w * (2.0 * r - 2.0 * p.m_bh)) / safe**2, 0.0)
        return h, dh

    def evaluate(self, r):
        """Return ``(h(r), h'(r))`` elementwise."""
        r = np.asarray(r, dtype=float)
        width = self.R0 - self.r_tilde
        s, ds = quintic_step((r - self.r_tilde) / width)
        ho, dho = self._outer(r)
        h = -1.0 + s * (ho + 1.0)
        dh = ds / width * (ho + 1.0) + s * dho
        return h, dh

    def h(self, r):
        return self.evaluate(r)[0]

    def dh(self, r):
        return self.evaluate(r)[1]

    __call__ = h


def build_h(p: BlackHoleParams, R0: float, r_tilde: float | None = None) -> HProfile:
    """Construct the shift profile with outer transition at ``R0``.

    ``r_tilde`` defaults to the midpoint ``(r_plus + R0)/2``.
    """
    rp = p.r_plus
    if R0 <= rp:
        raise ValueError(f"R0 must exceed r_plus={rp:.6g}, got {R0}")
    if r_tilde is None:
        r_tilde = 0.5 * (rp + R0)
    return HProfile(p, float(r_tilde), float(R0))


def default_r0(p: BlackHoleParams) -> float:
    """Default inner slice boundary ``(m + r_plus)/2``."""
    return 0.5 * (p.m_bh + p.r_plus)


def timelike_margin(p: BlackHoleParams, h, r, theta):
    """``-(mu h^2 + 2 (r^2 + a^2) h + a^2 sin^2 theta)``.

    Positive iff ``dt_*`` is timelike at ``(r, theta)``. ``h`` is an
    :class:`HProfile` or the value(s) of h at ``r``.
    """
    r = np.asarray(r, dtype=float)
    hv = h.h(r) if isinstance(h, HProfile) else np.asarray(h, dtype=float)
    s = np.sin(theta)
    return -(mu(p, r) * hv * hv + 2.0 * (r * r + p.a * p.a) * hv + p.a * p.a * s * s)
