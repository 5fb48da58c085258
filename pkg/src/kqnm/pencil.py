"""
Quadratic pencil ``A0 + sigma A1 + sigma^2 A2`` for ``rr2_beta P_beta(sigma)``.

The radial direction is discretized by Chebyshev collocation on the real
coordinate ``r``; the complex contour enters only through the coefficients
``f_beta``, ``f_beta'``, ``mu_beta``. One formula is used on the whole slice:
``r -> f_beta(r)``, ``d/dr -> (1/f_beta') d/dr`` and, beyond ``R0``, ``h``
continued as ``-(f^2 + a^2)/mu_beta``. Where ``phi_beta = 0`` this is the
unscaled operator term by term.

The angular direction uses ``u = sin^|m| theta v(x)`` with ``v`` collocated
at Gauss-Legendre nodes; the spherical Laplacian then acts on ``v`` as

    L_m v = -(1 - x^2) v'' + 2 (|m| + 1) x v' + |m| (|m| + 1) v,

whose eigenvalues are exactly ``l (l + 1)``, ``l >= |m|``.

Two radial layouts are available. ``"single"`` is one Chebyshev block on
``[r0, Rmax]``. ``"multidomain"`` (default) splits the interval at the
joints of the h-blend and of the phase function, where the coefficients are
only C^2; a single block converges merely algebraically across such joints.
Neighbouring blocks are glued by continuity of ``u`` and ``u'``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .geometry import BlackHoleParams, HProfile, mu
from .scaling import ScalingContour, f_beta

# relative node shares per element: [r0, r~], [r~, R0], [R0, R1], [R1, R2];
# tuned on the Schwarzschild l=2 mode at Nr=80 (scripts/tune_layout.py)
ELEMENT_WEIGHTS = {"inner": 13.0, "blend": 9.0, "flat": 5.0, "ramp": 31.0}
TAIL_WEIGHT = 22.0
MIN_ELEMENT_NODES = 4
DEFAULT_TAIL_SPLITS = (0.267,)

PENCIL_MAGIC = b"KQNMPNCL"
_HEADER = struct.Struct("<8sIIi4xd")


def cheb(n: int):
    """Chebyshev-Lobatto nodes ``x_j = cos(pi j/(n-1))`` and differentiation matrix."""
    if n < 2:
        raise ValueError("need at least two Chebyshev nodes")
    N = n - 1
    x = np.cos(np.pi * np.arange(n) / N)
    c = np.ones(n)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n)
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(n))
    D -= np.diag(D.sum(axis=1))
    return x, D


def barycentric_diff(x):
    """Differentiation matrix of the polynomial interpolant on arbitrary nodes."""
    x = np.asarray(x, dtype=float)
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    w = 1.0 / np.prod(dx, axis=1)
    D = (w[None, :] / w[:, None]) / dx
    np.fill_diagonal(D, 0.0)
    D -= np.diag(D.sum(axis=1))
    return D


def angular_operator(Ntheta: int, m_az: int):
    """Gauss-Legendre nodes and the matrix of ``L_m`` acting on ``v``."""
    x, _ = np.polynomial.legendre.leggauss(Ntheta)
    am = abs(m_az)
    if Ntheta == 1:
        return x, np.array([[am * (am + 1.0)]])
    D = barycentric_diff(x)
    L = -(1.0 - x * x)[:, None] * (D @ D) + (2.0 * (am + 1) * x)[:, None] * D
    L += am * (am + 1.0) * np.eye(Ntheta)
    return x, L


def allocate_nodes(Nr: int, weights) -> list[int]:
    """Split ``Nr`` nodes over elements in proportion to ``weights``.

    Largest-remainder rounding, every element gets at least
    ``MIN_ELEMENT_NODES``.
    """
    w = np.asarray(weights, dtype=float)
    k = len(w)
    if Nr < MIN_ELEMENT_NODES * k:
        raise ValueError(
            f"Nr={Nr} too small for {k} radial elements (need {MIN_ELEMENT_NODES * k})"
        )
    spare = Nr - MIN_ELEMENT_NODES * k
    share = w / w.sum() * Nr - MIN_ELEMENT_NODES
    share = np.clip(share, 0.0, None)
    share = share / share.sum() * spare if share.sum() > 0 else np.full(k, spare / k)
    n = np.floor(share).astype(int)
    order = np.argsort(-(share - n), kind="stable")
    n[order[: spare - n.sum()]] += 1
    return [int(v) + MIN_ELEMENT_NODES for v in n]


@dataclass(frozen=True, eq=False)
class Grid:
    """Collocation grid on ``(r0, Rmax) x S^2`` for one azimuthal number.

    ``r_nodes`` are ascending; interface radii appear twice (once per
    element). ``Dr`` is block diagonal in the multidomain layout.
    """

    m_az: int
    Nr: int
    Ntheta: int
    r_nodes: np.ndarray
    x_nodes: np.ndarray
    r0: float
    Rmax: float
    Dr: np.ndarray
    Lm: np.ndarray
    breaks: tuple = ()
    sizes: tuple = ()
    layout: str = "multidomain"

    @property
    def size(self) -> int:
        return self.Nr * self.Ntheta

    @property
    def theta_nodes(self):
        return np.arccos(self.x_nodes)

    def interface_pairs(self):
        """Index pairs ``(last of element k, first of element k+1)``."""
        ends = np.cumsum(self.sizes)
        return [(int(e) - 1, int(e)) for e in ends[:-1]]


def element_breaks(p: BlackHoleParams, c: ScalingContour, r0, Rmax, h=None,
                   tail=DEFAULT_TAIL_SPLITS):
    """Element boundaries and their roles for the multidomain layout."""
    pts = [(r0, None)]
    if h is not None:
        pts += [(h.r_tilde, "inner"), (h.R0, "blend"), (c.R1, "flat")]
    else:
        pts += [(c.R1, "inner")]
    pts += [(c.R2, "ramp")]
    tail = tuple(q for q in tail if 0.0 < q < 1.0)
    for q in sorted(tail):
        pts.append((c.R2 + q * (Rmax - c.R2), "tail"))
    pts.append((Rmax, "tail"))
    breaks = [b for b, _ in pts]
    if np.any(np.diff(breaks) <= 0):
        raise ValueError(f"radial element breaks not increasing: {breaks}")
    roles = [r for _, r in pts[1:]]
    return breaks, roles


def default_weights(roles):
    """Default node shares; the tail share decreases linearly outward."""
    ntail = roles.count("tail")
    tw = np.linspace(1.0 + 0.1 * (ntail > 1), 1.0 - 0.1 * (ntail > 1), ntail)
    tw = TAIL_WEIGHT * tw / tw.sum()
    out, k = [], 0
    for r in roles:
        if r == "tail":
            out.append(float(tw[k]))
            k += 1
        else:
            out.append(ELEMENT_WEIGHTS[r])
    return out


def build_grid(p: BlackHoleParams, c: ScalingContour, Nr: int, Ntheta: int, m_az: int,
               r0: float, Rmax: float, h: HProfile | None = None,
               layout: str = "multidomain", weights=None, sizes=None,
               tail=DEFAULT_TAIL_SPLITS) -> Grid:
    """Build the collocation grid.

    Parameters
    ----------
    p, c : BlackHoleParams, ScalingContour
    Nr, Ntheta : int
        Radial and angular node counts.
    m_az : int
        Azimuthal number.
    r0, Rmax : float
        Slice endpoints, ``m_bh < r0 < r_plus`` and ``Rmax > R2``.
    h : HProfile, optional
        Adds element breaks at ``r_tilde`` and ``R0``.
    layout : {"multidomain", "single"}
    weights : sequence of float, optional
        Per-element node shares (multidomain), overriding the defaults.
    sizes : sequence of int, optional
        Explicit per-element node counts; must sum to ``Nr``.
    tail : sequence of float
        Extra split points in ``(R2, Rmax)`` as fractions of that interval.
    """
    Nr, Ntheta = int(Nr), int(Ntheta)
    if Nr < 8:
        raise ValueError(f"Nr must be at least 8, got {Nr}")
    if Ntheta < 1:
        raise ValueError(f"Ntheta must be at least 1, got {Ntheta}")
    rp = p.r_plus
    if not (p.m_bh < r0 < rp):
        raise ValueError(f"r0 must lie in (m_bh, r_plus) = ({p.m_bh:.6g}, {rp:.6g}), got {r0}")
    if not Rmax > c.R2:
        raise ValueError(f"Rmax must exceed R2={c.R2:.6g}, got {Rmax}")
    if h is not None and not (r0 < h.r_tilde):
        raise ValueError("r0 must lie below r_tilde")

    if layout == "single":
        breaks, sizes = [r0, Rmax], [Nr]
    elif layout == "multidomain":
        breaks, roles = element_breaks(p, c, r0, Rmax, h, tail)
        if sizes is None:
            if weights is None:
                weights = default_weights(roles)
            if len(weights) != len(roles):
                raise ValueError(f"expected {len(roles)} element weights, got {len(weights)}")
            sizes = allocate_nodes(Nr, weights)
        sizes = [int(s) for s in sizes]
        if len(sizes) != len(roles) or sum(sizes) != Nr or min(sizes) < 2:
            raise ValueError(f"element sizes {sizes} inconsistent with Nr={Nr}")
    else:
        raise ValueError(f"unknown radial layout {layout!r}")

    rs, Ds = [], []
    for (lo, hi), n in zip(zip(breaks[:-1], breaks[1:]), sizes):
        x, D = cheb(n)
        rs.append(lo + (hi - lo) * (1.0 - x) / 2.0)   # ascending in r
        Ds.append(-D * 2.0 / (hi - lo))
    Dr = np.zeros((Nr, Nr))
    o = 0
    for D in Ds:
        n = len(D)
        Dr[o:o + n, o:o + n] = D
        o += n
    x_nodes, Lm = angular_operator(Ntheta, m_az)
    return Grid(int(m_az), Nr, Ntheta, np.concatenate(rs), x_nodes, float(r0), float(Rmax),
                Dr, Lm, tuple(float(b) for b in breaks), tuple(sizes), layout)


@dataclass(frozen=True, eq=False)
class OperatorPencil:
    """Dense pencil ``A0 + sigma A1 + sigma^2 A2`` of size ``Nr * Ntheta``.

    Unknowns are ordered radial-major: index ``i * Ntheta + j`` for radial
    node ``i`` and angular node ``j``. ``constraint_rows`` lists the rows
    that carry interface or boundary conditions instead of the operator.
    """

    A0: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    grid: Grid | None = None
    contour: ScalingContour | None = None
    params: BlackHoleParams | None = None
    constraint_rows: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    @property
    def size(self) -> int:
        return self.A0.shape[0]

    @property
    def beta(self):
        return None if self.contour is None else self.contour.beta


def radial_coefficients(p: BlackHoleParams, c: ScalingContour, h: HProfile, r, form="unified"):
    """Coefficient functions of the radial part at nodes ``r``.

    ``form="unified"`` is what the assembly uses. ``"unscaled"`` evaluates the
    real operator with the actual ``h``; ``"scaled"`` the continued operator
    with ``h = -(f^2+a^2)/mu_beta``. The last two coincide on ``(R0, R1)``.

    Returns
    -------
    dict with ``f, df, mu_beta, hb, g, c2`` where ``g = f^2 + a^2 + mu_beta hb``
    and ``c2 = mu_beta hb^2 + 2 (f^2 + a^2) hb``.
    """
    r = np.asarray(r, dtype=float)
    a2 = p.a * p.a
    if form == "unscaled":
        f, df = r.astype(complex), np.ones_like(r, dtype=complex)
        mb = mu(p, r).astype(complex)
        hb = h.h(r).astype(complex)
    else:
        f, df = f_beta(c, r)
        mb = f * f - 2.0 * p.m_bh * f + a2
        if form == "scaled":
            hb = -(f * f + a2) / mb
        elif form == "unified":
            outer = r >= h.R0
            hb = np.where(outer, -(f * f + a2) / np.where(outer, mb, 1.0), h.h(r))
        else:
            raise ValueError(f"unknown form {form!r}")
    g = f * f + a2 + mb * hb
    c2 = mb * hb * hb + 2.0 * (f * f + a2) * hb
    return {"f": f, "df": df, "mu_beta": mb, "hb": hb, "g": g, "c2": c2}


def assemble_pencil(p: BlackHoleParams, c: ScalingContour, h: HProfile, g: Grid) -> OperatorPencil:
    """Assemble ``rr2_beta P_beta(sigma)`` with ``D_phi -> m_az``.

    With ``D = -i d``, the rescaled operator reads

        D_r mu D_r + L_m + 2 a D_r D_phi
        - sigma (D_r G + G D_r + 2 a (1 + h) D_phi)
        + sigma^2 (mu h^2 + 2 (r^2 + a^2) h + a^2 sin^2 theta),

    ``G = r^2 + a^2 + mu h``, continued along the contour.
    """
    if h.R0 >= c.R1:
        raise ValueError(f"h-profile R0={h.R0} must lie below contour R1={c.R1}")
    if h.params != p:
        raise ValueError("h-profile built for different black-hole parameters")
    r = g.r_nodes
    k = radial_coefficients(p, c, h, r)
    D = g.Dr
    Fi = (1.0 / k["df"])[:, None]
    FiD = Fi * D
    ma = g.m_az * p.a

    R0 = -FiD @ ((k["mu_beta"] / k["df"])[:, None] * D) - 2j * ma * FiD
    R1 = 1j * (FiD * k["g"][None, :] + k["g"][:, None] * FiD)
    R1 -= np.diag(2.0 * ma * (1.0 + k["hb"]))
    R2 = np.diag(k["c2"])

    # constraint rows: u and u' continuous across interfaces, u(Rmax) = 0
    crow = []
    for iL, iR in g.interface_pairs():
        for M in (R0, R1, R2):
            M[iL] = 0.0
            M[iR] = 0.0
        R0[iL, iL], R0[iL, iR] = 1.0, -1.0
        R0[iR] = D[iL] - D[iR]
        crow += [iL, iR]
    last = g.Nr - 1
    for M in (R0, R1, R2):
        M[last] = 0.0
    R0[last, last] = 1.0
    crow.append(last)
    crow = np.array(sorted(crow), dtype=int)

    nt = g.Ntheta
    It = np.eye(nt)
    live = np.ones(g.Nr)
    live[crow] = 0.0
    sin2 = 1.0 - g.x_nodes ** 2
    A0 = np.kron(R0, It) + np.kron(np.diag(live), g.Lm)
    A1 = np.kron(R1, It)
    A2 = np.kron(R2, It) + np.kron(np.diag(live), np.diag(p.a * p.a * sin2))
    rows = (crow[:, None] * nt + np.arange(nt)[None, :]).ravel()
    return OperatorPencil(A0.astype(complex), A1.astype(complex), A2.astype(complex),
                          g, c, p, rows)


def evaluate(pen: OperatorPencil, sigma: complex) -> np.ndarray:
    """``T(sigma) = A0 + sigma A1 + sigma^2 A2``."""
    return pen.A0 + sigma * pen.A1 + (sigma * sigma) * pen.A2


def hyperbolicity_check(p: BlackHoleParams, m_az: int, r: float, kappa: float, nu: float):
    """Real roots of ``mu xi^2 + 2 nu xi + kappa`` inside the horizon.

    For ``r < r_plus`` we have ``mu < 0``; with ``kappa > 0`` the
    discriminant ``nu^2 - mu kappa`` is positive and the roots are real and
    distinct. ``m_az`` does not enter the principal part and is accepted
    for interface symmetry only.
    """
    if r >= p.r_plus:
        raise ValueError(f"hyperbolicity check needs r < r_plus={p.r_plus:.6g}, got {r}")
    if kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    m_ = float(mu(p, r))
    disc = np.sqrt(nu * nu - m_ * kappa)
    return float((-nu + disc) / m_), float((-nu - disc) / m_)


def indicial_roots(l_sph: int) -> tuple[int, int]:
    """Roots of ``-s^2 - s + l (l + 1) = 0``: ``(l, -l - 1)``."""
    l_sph = int(l_sph)
    if l_sph < 0:
        raise ValueError("l_sph must be non-negative")
    return l_sph, -l_sph - 1


def save_pencil(pen: OperatorPencil, path) -> None:
    """Binary dump: 32-byte little-endian header then A0, A1, A2.

    Header: magic ``KQNMPNCL``, ``uint32 Nr``, ``uint32 Ntheta``,
    ``int32 m_az``, 4 pad bytes, ``float64 beta``. Matrices follow
    row-major as little-endian (real, imag) float64 pairs.
    """
    g = pen.grid
    nr, nt, m_az = (g.Nr, g.Ntheta, g.m_az) if g is not None else (pen.size, 1, 0)
    beta = pen.beta if pen.beta is not None else float("nan")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(PENCIL_MAGIC, nr, nt, m_az, beta))
        for A in (pen.A0, pen.A1, pen.A2):
            fh.write(np.ascontiguousarray(A, dtype="<c16").tobytes())


def load_pencil(path):
    """Read a dump written by :func:`save_pencil`.

    Returns
    -------
    A0, A1, A2 : ndarray
    meta : dict with ``Nr, Ntheta, m_az, beta``
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, nr, nt, m_az, beta = _HEADER.unpack_from(raw, 0)
    if magic != PENCIL_MAGIC:
        raise ValueError("not a pencil dump (bad magic)")
    n = nr * nt
    body = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
    if body.size != 3 * n * n:
        raise ValueError("truncated pencil dump")
    A0, A1, A2 = (body[k * n * n:(k + 1) * n * n].reshape(n, n).copy() for k in range(3))
    return A0, A1, A2, {"Nr": nr, "Ntheta": nt, "m_az": m_az, "beta": beta}
