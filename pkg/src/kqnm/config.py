"""
Run configuration: TOML sections mapped onto dataclasses.

Unknown sections and keys are errors. Cross-module constraints are checked
once, at load time, so every command fails before doing any work.
"""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .geometry import BlackHoleParams, build_h, default_r0
from .solver import GridSpec, Window, window_in_sector


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


@dataclass
class BlackHoleSection:
    mass: float = 1.0
    spin: float = 0.0


@dataclass
class ContourSection:
    beta: float | None = None
    beta_list: list | None = None
    R1: float = 4.535
    eps: float = 1.1075

    @property
    def betas(self) -> list:
        if self.beta_list is not None:
            return [float(b) for b in self.beta_list]
        return [float(self.beta)]


@dataclass
class HProfileSection:
    R0: float = 4.1
    r_tilde: float | None = None


@dataclass
class GridSection:
    nr: int = 80
    ntheta: int = 12
    m_az: int | list = 0
    r0: float | None = None
    rmax: float = 131.85
    layout: str = "multidomain"
    tail: list = field(default_factory=lambda: [0.267])
    sizes: list | None = None

    @property
    def m_list(self) -> list:
        return [int(m) for m in self.m_az] if isinstance(self.m_az, list) else [int(self.m_az)]


@dataclass
class SolverSection:
    window: list = field(default_factory=lambda: [0.28, 1.0, -0.1, 0.05])
    residual_tol: float = 1e-8
    drift_tol: float = 1e-6
    refine: bool = True


@dataclass
class OutputsSection:
    dir: str = "out"
    formats: list = field(default_factory=lambda: ["json", "csv"])


@dataclass
class FlowSection:
    z: float = 1.0
    nu: float = 2.0
    T: float = 100.0
    tol: float = 1e-12
    rmax_flow: float = 100.0
    seed: str = "trapped"
    point: list | None = None            # r, theta, phi_star, xi, eta when seed = "point"
    potential_rmax: float = 20.0
    potential_points: int = 400
    offset: float = 1e-5
    fd_step: float = 1e-7
    im_sigma: float | None = None


@dataclass
class ScanSection:
    beta: float | None = None
    radii: list = field(default_factory=lambda: [0.02, 0.01])
    n_samples: int = 64
    sigma: list = field(default_factory=lambda: [0.4, -0.05])
    beta_pair: list = field(default_factory=lambda: [0.5, 0.8])
    doubled: bool = True
    signcheck_beta: float = 0.3
    signcheck_R0: float = 20.0
    signcheck_R1: float = 25.0
    signcheck_eps: float = 0.2
    signcheck_samples: int = 10_000
    seed: int = 0


@dataclass
class OracleSection:
    modes: list | None = None            # [[l, m_az, n], ...]
    cf_depth: int = 300


_SECTIONS = {
    "blackhole": BlackHoleSection,
    "contour": ContourSection,
    "hprofile": HProfileSection,
    "grid": GridSection,
    "solver": SolverSection,
    "outputs": OutputsSection,
    "flow": FlowSection,
    "scan": ScanSection,
    "oracle": OracleSection,
}


@dataclass
class RunConfig:
    blackhole: BlackHoleSection = field(default_factory=BlackHoleSection)
    contour: ContourSection = field(default_factory=ContourSection)
    hprofile: HProfileSection = field(default_factory=HProfileSection)
    grid: GridSection = field(default_factory=GridSection)
    solver: SolverSection = field(default_factory=SolverSection)
    outputs: OutputsSection = field(default_factory=OutputsSection)
    flow: FlowSection = field(default_factory=FlowSection)
    scan: ScanSection = field(default_factory=ScanSection)
    oracle: OracleSection = field(default_factory=OracleSection)

    # ---- derived objects
    def params(self) -> BlackHoleParams:
        return BlackHoleParams(self.blackhole.mass, self.blackhole.spin)

    def hprofile_obj(self):
        return build_h(self.params(), self.hprofile.R0, self.hprofile.r_tilde)

    def grid_spec(self, m_az: int | None = None) -> GridSpec:
        g = self.grid
        return GridSpec(
            nr=g.nr, ntheta=g.ntheta, m_az=g.m_list[0] if m_az is None else m_az,
            r0=g.r0, rmax=g.rmax, R1=self.contour.R1, eps=self.contour.eps,
            layout=g.layout, sizes=None if g.sizes is None else tuple(g.sizes),
            tail=tuple(g.tail),
        )

    def window(self) -> Window:
        return Window.from_list(self.solver.window)

    def resolved(self) -> dict:
        """Plain dict of every section after defaults, with derived r0 and r_tilde."""
        d = asdict(self)
        p = self.params()
        if d["grid"]["r0"] is None:
            d["grid"]["r0"] = default_r0(p)
        d["hprofile"]["r_tilde"] = self.hprofile_obj().r_tilde
        return d


def _build_section(name, cls, raw):
    if not isinstance(raw, dict):
        raise ConfigError(f"[{name}] must be a table")
    known = {f.name for f in fields(cls)}
    extra = sorted(set(raw) - known)
    if extra:
        raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(extra)}")
    try:
        return cls(**raw)
    except TypeError as exc:
        raise ConfigError(f"[{name}]: {exc}") from exc


def from_dict(raw: dict) -> RunConfig:
    extra = sorted(set(raw) - set(_SECTIONS))
    if extra:
        raise ConfigError(f"unknown section(s): {', '.join(extra)}")
    cfg = RunConfig(**{k: _build_section(k, _SECTIONS[k], v) for k, v in raw.items()})
    validate(cfg)
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from exc
    return from_dict(raw)


def validate(cfg: RunConfig) -> None:
    """Re-check every cross-module constraint; raises ConfigError naming the first violation."""
    try:
        p = cfg.params()
    except ValueError as exc:
        raise ConfigError(f"blackhole: {exc}") from exc

    c = cfg.contour
    if (c.beta is None) == (c.beta_list is None):
        raise ConfigError("contour: give exactly one of beta or beta_list")
    betas = c.betas
    for b in betas:
        if not (-np.pi < b < np.pi) or b == 0:
            raise ConfigError(f"contour: beta={b} must lie in (-pi, pi) and be nonzero")
    if not (all(b > 0 for b in betas) or all(b < 0 for b in betas)):
        raise ConfigError("contour: betas must share one sign")
    if c.eps <= 0:
        raise ConfigError("contour: eps must be positive")

    hp = cfg.hprofile
    if not hp.R0 < c.R1:
        raise ConfigError(f"constraint R0 < R1 violated: R0={hp.R0}, R1={c.R1}")
    try:
        h = cfg.hprofile_obj()
    except ValueError as exc:
        raise ConfigError(f"hprofile: {exc}") from exc

    g = cfg.grid
    r0 = default_r0(p) if g.r0 is None else g.r0
    if not (p.m_bh < r0 < p.r_plus):
        raise ConfigError(f"constraint r0 in (m, r_plus) violated: r0={r0}, "
                          f"m={p.m_bh}, r_plus={p.r_plus:.12g}")
    if not r0 < h.r_tilde:
        raise ConfigError(f"constraint r0 < r_tilde violated: r0={r0}, r_tilde={h.r_tilde}")
    if g.nr < 8 or g.ntheta < 1:
        raise ConfigError("grid: need nr >= 8 and ntheta >= 1")
    if g.layout not in ("multidomain", "single"):
        raise ConfigError(f"grid: unknown layout {g.layout!r}")
    R2 = cfg.grid_spec().contour(betas[0]).R2
    if not g.rmax > R2:
        raise ConfigError(f"constraint rmax > R2 violated: rmax={g.rmax}, R2={R2:.6g}")

    s = cfg.solver
    try:
        w = cfg.window()
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from exc
    for b in betas:
        if not window_in_sector(w, b):
            raise ConfigError(f"constraint window inside Lambda_beta violated for beta={b}: "
                              f"window {s.window} needs arg(sigma) > {-b:.6g} at every corner")
    if not (s.residual_tol > 0 and s.drift_tol > 0):
        raise ConfigError("solver: tolerances must be positive")

    o = cfg.outputs
    bad = sorted(set(o.formats) - {"json", "csv"})
    if bad:
        raise ConfigError(f"outputs: unknown format(s) {bad}")

    f = cfg.flow
    if f.z not in (1, -1, 1.0, -1.0):
        raise ConfigError("flow: z must be +1 or -1")
    if f.seed not in ("trapped", "point"):
        raise ConfigError("flow: seed must be 'trapped' or 'point'")
    if f.seed == "point" and (f.point is None or len(f.point) != 5):
        raise ConfigError("flow: seed='point' needs point = [r, theta, phi_star, xi, eta]")

    sc = cfg.scan
    if len(sc.sigma) != 2 or len(sc.beta_pair) != 2:
        raise ConfigError("scan: sigma and beta_pair need two entries")
    if not sc.signcheck_R0 < sc.signcheck_R1:
        raise ConfigError("scan: signcheck_R0 must lie below signcheck_R1")

    if cfg.oracle.modes is not None:
        for mode in cfg.oracle.modes:
            if len(mode) != 3 or abs(mode[1]) > mode[0] or mode[2] < 0:
                raise ConfigError(f"oracle: bad mode {mode}; expected [l, m_az, n] with |m_az| <= l")
