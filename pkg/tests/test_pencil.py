import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kqnm.geometry import BlackHoleParams, build_h, mu
from kqnm.pencil import (allocate_nodes, angular_operator, assemble_pencil, build_grid, cheb,
                         evaluate, hyperbolicity_check, indicial_roots, load_pencil,
                         radial_coefficients, save_pencil)
from kqnm.scaling import ScalingContour
from kqnm.solver import GridSpec, make_pencil


def _setup(a=0.0, beta=0.6):
    p = BlackHoleParams(1.0, a)
    h = build_h(p, 4.1, 3.6)
    c = ScalingContour(beta, 4.535, 1.1075)
    return p, h, c


def test_cheb_differentiates_polynomials():
    x, D = cheb(12)
    assert np.allclose(D @ x ** 5, 5 * x ** 4, atol=1e-11)


def test_single_domain_size_and_nodes():
    p, h, c = _setup()
    g = build_grid(p, c, 8, 1, 0, 1.5, 131.85, layout="single")
    pen = assemble_pencil(p, c, h, g)
    assert pen.A0.shape == (8, 8)
    assert g.r_nodes.min() >= 1.5 and g.r_nodes.max() <= 131.85


def test_radial_derivative_of_cubic():
    p, h, c = _setup()
    for layout in ("single", "multidomain"):
        g = build_grid(p, c, 32, 1, 0, 1.5, 131.85, h=h, layout=layout)
        r = g.r_nodes
        err = np.abs(g.Dr @ r ** 3 - 3 * r ** 2) / (3 * r ** 2)
        assert err.max() < 1e-10


def test_multidomain_breaks():
    p, h, c = _setup()
    g = build_grid(p, c, 80, 1, 0, 1.5, 131.85, h=h)
    assert g.breaks[:5] == pytest.approx((1.5, 3.6, 4.1, 4.535, c.R2))
    assert g.breaks[-1] == 131.85
    assert sum(g.sizes) == 80
    assert np.all(np.diff(g.r_nodes) >= 0)


@pytest.mark.parametrize("kw", [dict(Nr=7), dict(Ntheta=0), dict(r0=2.1), dict(r0=0.9),
                                dict(Rmax=20.0), dict(layout="banana")])
def test_build_grid_rejects(kw):
    p, h, c = _setup()
    args = dict(Nr=80, Ntheta=1, m_az=0, r0=1.5, Rmax=131.85, h=h)
    args.update(kw)
    with pytest.raises(ValueError):
        build_grid(p, c, **args)


@given(st.integers(24, 400), st.lists(st.floats(0.5, 40.0), min_size=2, max_size=6))
def test_allocate_nodes_sums(Nr, w):
    n = allocate_nodes(Nr, w)
    assert sum(n) == Nr and min(n) >= 4


@pytest.mark.parametrize("m_az", [0, 1, 2, 3])
def test_angular_operator_spectrum(m_az):
    x, L = angular_operator(10, m_az)
    assert np.all(np.abs(x) < 1)
    ev = np.sort(np.linalg.eigvals(L).real)
    ls = np.arange(abs(m_az), abs(m_az) + 10)
    assert np.allclose(ev, ls * (ls + 1), rtol=1e-9, atol=1e-9)


def test_assemble_rejects_bad_profile():
    p, h, c = _setup()
    g = build_grid(p, c, 40, 1, 0, 1.5, 131.85, h=h)
    with pytest.raises(ValueError):
        assemble_pencil(p, c, build_h(p, 5.0, 3.0), g)
    with pytest.raises(ValueError):
        assemble_pencil(p, c, build_h(BlackHoleParams(1.0, 0.3), 4.1, 3.6), g)


def test_a2_is_multiplication_and_a1_first_order():
    p, h, c = _setup(a=0.5)
    pen = make_pencil(p, h, GridSpec(nr=40, ntheta=4, m_az=1), 0.6)
    n = pen.grid.Ntheta
    A2 = pen.A2.reshape(pen.grid.Nr, n, pen.grid.Nr, n)
    off = A2.copy()
    for i in range(pen.grid.Nr):
        off[i, :, i, :] = 0
    assert np.abs(off).max() == 0.0
    # A1 annihilates constants in the interior
    one = np.ones(pen.size)
    live = np.setdiff1d(np.arange(pen.size), pen.constraint_rows)
    k = radial_coefficients(p, pen.contour, h, pen.grid.r_nodes)
    expected = 1j * np.repeat(pen.grid.Dr @ k["g"] / k["df"], n) \
        - np.repeat(2 * p.a * pen.grid.m_az * (1 + k["hb"]), n)
    assert np.allclose((pen.A1 @ one)[live], expected[live], atol=1e-9)


def test_constants_in_kernel_at_zero_frequency():
    p, h, c = _setup()
    pen = make_pencil(p, h, GridSpec(nr=60, ntheta=1), 0.6)
    v = evaluate(pen, 0.0) @ np.ones(pen.size)
    live = np.setdiff1d(np.arange(pen.size), pen.constraint_rows)
    assert np.abs(v[live]).max() < 1e-9
    # only the Dirichlet row sees the constant
    nz = np.flatnonzero(np.abs(v) > 1e-9)
    assert list(nz) == [pen.size - 1]


def test_overlap_forms_agree():
    p, h, c = _setup(a=0.7)
    r = np.linspace(4.11, 4.53, 50)
    ku = radial_coefficients(p, c, h, r, form="unscaled")
    ks = radial_coefficients(p, c, h, r, form="scaled")
    kn = radial_coefficients(p, c, h, r, form="unified")
    for key in ("mu_beta", "hb", "g", "c2", "f", "df"):
        assert np.allclose(ku[key], ks[key], rtol=1e-12, atol=1e-12)
        assert np.allclose(kn[key], ks[key], rtol=1e-12, atol=1e-12)


def test_unified_form_matches_real_operator_inside():
    p, h, c = _setup(a=0.7)
    r = np.linspace(1.5, 4.0, 30)
    ku = radial_coefficients(p, c, h, r, form="unscaled")
    kn = radial_coefficients(p, c, h, r, form="unified")
    for key in ("mu_beta", "hb", "g", "c2"):
        assert np.array_equal(ku[key], kn[key])


def test_schwarzschild_legendre_decoupling():
    p, h, c = _setup()
    pen = make_pencil(p, h, GridSpec(nr=30, ntheta=6), 0.6)
    g = pen.grid
    w, V = np.linalg.eig(g.Lm)
    Vi = np.linalg.inv(V)
    # transform every radial block into the Lm eigenbasis
    B = (np.kron(np.eye(g.Nr), Vi) @ evaluate(pen, 0.3 - 0.1j) @ np.kron(np.eye(g.Nr), V))
    B = B.reshape(g.Nr, g.Ntheta, g.Nr, g.Ntheta).transpose(1, 3, 0, 2)
    mask = ~np.eye(g.Ntheta, dtype=bool)
    assert np.abs(B[mask]).max() < 1e-12 * np.abs(B).max()


def test_evaluate_is_the_polynomial():
    p, h, c = _setup(a=0.3)
    pen = make_pencil(p, h, GridSpec(nr=24, ntheta=2, m_az=1), 0.5)
    s = 0.37 - 0.21j
    assert np.array_equal(evaluate(pen, 0.0), pen.A0)
    diff = evaluate(pen, s) - evaluate(pen, 0.0) - s * pen.A1 - s * s * pen.A2
    assert np.abs(diff).max() <= 1e-14 * np.abs(pen.A0).max()


def test_conjugate_on_unscaled_rows():
    p, h, c = _setup()
    pen = make_pencil(p, h, GridSpec(nr=40, ntheta=1), 0.5)
    s = 0.4 - 0.07j
    inner = np.flatnonzero(pen.grid.r_nodes < 4.535)
    T = evaluate(pen, s)[inner]
    Tc = evaluate(pen, -np.conj(s))[inner]
    # D = -i d: real coefficients give T(-conj s) = conj(T(s)) on unscaled rows
    assert np.allclose(Tc, np.conj(T), rtol=0, atol=1e-12 * np.abs(T).max())


def test_hyperbolicity_example():
    p = BlackHoleParams(1.0, 0.0)
    xp, xm = hyperbolicity_check(p, 0, 1.5, 1.0, 0.0)
    assert sorted([xp, xm]) == pytest.approx([-np.sqrt(4 / 3), np.sqrt(4 / 3)], rel=1e-14)


@given(st.floats(0.0, 0.99), st.floats(0.0, 1.0), st.floats(0.01, 50.0), st.floats(-20.0, 20.0))
def test_hyperbolicity_roots(a, t, kappa, nu):
    p = BlackHoleParams(1.0, a)
    r = (p.m_bh + 1e-3) + t * (p.r_plus - p.m_bh - 2e-3)
    xp, xm = hyperbolicity_check(p, 0, r, kappa, nu)
    m_ = mu(p, r)
    assert xp != xm
    assert xp * xm == pytest.approx(kappa / m_, rel=1e-9)
    assert xp * xm < 0
    for x in (xp, xm):
        assert abs(m_ * x * x + 2 * nu * x + kappa) <= 1e-8 * (abs(m_ * x * x) + abs(nu * x) + kappa)


def test_hyperbolicity_rejects():
    p = BlackHoleParams(1.0, 0.0)
    with pytest.raises(ValueError):
        hyperbolicity_check(p, 0, 2.5, 1.0, 0.0)
    with pytest.raises(ValueError):
        hyperbolicity_check(p, 0, 1.5, 0.0, 0.0)


@pytest.mark.parametrize("l, roots", [(0, (0, -1)), (1, (1, -2)), (2, (2, -3))])
def test_indicial_examples(l, roots):
    assert indicial_roots(l) == roots


def test_dump_roundtrip(tmp_path):
    p, h, c = _setup(a=0.4)
    pen = make_pencil(p, h, GridSpec(nr=24, ntheta=2, m_az=-1), 0.6)
    path = tmp_path / "pen.bin"
    save_pencil(pen, path)
    raw = path.read_bytes()
    assert raw[:8] == b"KQNMPNCL" and len(raw) == 32 + 3 * 16 * pen.size ** 2
    A0, A1, A2, meta = load_pencil(path)
    assert np.array_equal(A0, pen.A0) and np.array_equal(A1, pen.A1) and np.array_equal(A2, pen.A2)
    assert meta == {"Nr": 24, "Ntheta": 2, "m_az": -1, "beta": 0.6}
    path.write_bytes(b"XXXXXXXX" + raw[8:])
    with pytest.raises(ValueError):
        load_pencil(path)
