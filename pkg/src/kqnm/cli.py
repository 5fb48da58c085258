"""
Command line entry point.

    kqnm compute <cfg>
    kqnm flow {trace,potential,trapped,rates} <cfg>
    kqnm scan {lowenergy,signcheck,agreement} <cfg>
    kqnm oracle <cfg>

Exit status 0 on success, 2 for invalid configuration or input, 3 when a
numerical stage fails.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import flow as fl
from .config import ConfigError, RunConfig, load_config
from .geometry import HProfile, build_h
from .oracle import OracleError, leaver_qnm
from .report import fmt, resonance_payload, resonance_rows, write_json, write_table
from .scaling import ScalingContour
from .solver import (EmptyWindowError, SolverError, beta_sweep, cutoff_agreement,
                     lowenergy_scan)

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3

log = logging.getLogger("kqnm")


def _setup_logging():
    level = os.environ.get("KQNM_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if level not in levels:
        raise ConfigError(f"KQNM_LOG must be one of {sorted(levels)}, got {level!r}")
    logging.basicConfig(level=levels[level], stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _cfmt(z) -> str:
    im = fmt(z.imag)
    return f"{fmt(z.real)}{'' if im.startswith('-') else '+'}{im}i"


def _outdir(cfg: RunConfig) -> Path:
    d = Path(cfg.outputs.dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _default_oracle_modes(cfg: RunConfig):
    if cfg.oracle.modes is not None:
        return [tuple(int(v) for v in m) for m in cfg.oracle.modes]
    return [(l, m, 0) for m in cfg.grid.m_list for l in range(max(abs(m), 0), 3)]


def _oracle_table(cfg: RunConfig):
    p = cfg.params()
    out = []
    for l, m, n in _default_oracle_modes(cfg):
        mode = leaver_qnm(p, l, m, n, cf_depth=cfg.oracle.cf_depth)
        out.append({"l": l, "m_az": m, "n": n, "sigma": mode.sigma,
                    "angular_eigenvalue": mode.angular_eigenvalue, "residual": mode.residual})
    return out


# ----------------------------------------------------------------------------

def cmd_compute(cfg: RunConfig, threads: int) -> int:
    p, h = cfg.params(), cfg.hprofile_obj()
    s = cfg.solver
    reports = {}
    for m in cfg.grid.m_list:
        log.info("beta sweep m_az=%d over %s", m, cfg.contour.betas)
        reports[m] = beta_sweep(p, h, cfg.grid_spec(m), cfg.contour.betas, cfg.window(),
                                s.residual_tol, s.drift_tol, workers=threads,
                                refine_candidates=s.refine)
    d = _outdir(cfg)
    if "json" in cfg.outputs.formats:
        write_json(d / "resonances.json", resonance_payload(reports, cfg.resolved()))
    if "csv" in cfg.outputs.formats:
        write_table(d / "resonances.csv", *resonance_rows(reports))
    for rep in reports.values():
        for r in rep.accepted:
            l = "?" if r.l is None else r.l
            print(f"m_az={r.m_az} l={l} n={r.n} sigma={_cfmt(r.sigma)} "
                  f"residual={r.residual:.3e} drift={r.drift:.3e}")
    n_acc = sum(len(r.accepted) for r in reports.values())
    print(f"accepted: {n_acc}")
    return EXIT_OK


def _flow_seed(cfg: RunConfig, h: HProfile) -> fl.PhasePoint:
    p, f = cfg.params(), cfg.flow
    if f.seed == "trapped":
        return fl.trapped_point(p, h, f.z, f.nu)
    r, th, ph, xi, eta = map(float, f.point)
    return fl.PhasePoint(r, th, ph, xi, eta, f.nu, f.z)


def cmd_flow(cfg: RunConfig, kind: str) -> int:
    p, h, f = cfg.params(), cfg.hprofile_obj(), cfg.flow
    d = _outdir(cfg)
    if kind == "trapped":
        ts = fl.trapped_set(p, f.z, f.nu)
        print(f"r_min={ts['r']:.6f} carter={ts['carter']:.6f}")
        write_json(d / "trapped.json", {"config": cfg.resolved(), "trapped_set": ts})
    elif kind == "potential":
        r = np.linspace(p.r_plus, f.potential_rmax, f.potential_points + 1)[1:]
        V = fl.potential_V(p, f.z, f.nu, r)
        write_table(d / "potential.csv", ["r", "V"], [[float(a), float(b)] for a, b in zip(r, V)])
        rm = fl.r_min(p, f.z, f.nu)
        print(f"r_min={rm:.6f} V_min={fl.potential_V(p, f.z, f.nu, rm):.6f}")
    elif kind == "trace":
        pt = _flow_seed(cfg, h)
        tr = fl.integrate_flow(p, h, pt, f.T, f.tol, r0=cfg.grid.r0, rmax_flow=f.rmax_flow * p.m_bh)
        tr.write_csv(d / "trajectory.csv")
        md = tr.max_drift
        print(f"exit={tr.exit} samples={len(tr.t)} p_drift={md['p']:.3e} "
              f"nu_drift={md['nu']:.3e} carter_drift={md['carter']:.3e}")
    elif kind == "rates":
        out = fl.expansion_rates(p, h, f.z, f.nu, offset=f.offset, fd_step=f.fd_step)
        if f.im_sigma is not None:
            out["radial_set"] = fl.radial_set_rates(p, f.im_sigma)
        write_json(d / "rates.json", {"config": cfg.resolved(), "rates": out})
        print(f"w_u={out['w_u']:.10f} w_s={out['w_s']:.10f} gap={out['gap']:.10f}")
    else:
        raise ConfigError(f"unknown flow command {kind!r}")
    return EXIT_OK


def cmd_scan(cfg: RunConfig, kind: str) -> int:
    p, h, sc = cfg.params(), cfg.hprofile_obj(), cfg.scan
    d = _outdir(cfg)
    spec = cfg.grid_spec()
    if kind == "lowenergy":
        beta = cfg.contour.betas[0] if sc.beta is None else sc.beta
        scans = [lowenergy_scan(p, h, spec, beta, rad, n_samples=sc.n_samples) for rad in sc.radii]
        write_json(d / "lowenergy.json", {"config": cfg.resolved(), "scans": scans})
        for s in scans:
            print(f"radius={s['radius']:g} min_residual={s['min_residual']:.3e} "
                  f"at sigma={s['argmin_sigma'][0]:.6g}{s['argmin_sigma'][1]:+.6g}i "
                  f"median={s['median_residual']:.3e} residual_at_zero={s['residual_at_zero']:.3e}")
    elif kind == "signcheck":
        b = sc.signcheck_beta
        z = 1.0 if b > 0 else -1.0
        c = ScalingContour(b, sc.signcheck_R1, sc.signcheck_eps)
        hh = build_h(p, sc.signcheck_R0)
        rep = fl.scaled_symbol_sign_check(p, c, hh, z, sc.signcheck_samples, seed=sc.seed)
        write_json(d / "signcheck.json", {"config": cfg.resolved(), "beta": b, "z": z, "report": rep})
        print(f"violations: {rep['violations']}")
    elif kind == "agreement":
        sigma = complex(*sc.sigma)
        b1, b2 = sc.beta_pair
        out = {"sigma": sigma, "betas": [b1, b2],
               "discrepancy": cutoff_agreement(p, h, spec, sigma, b1, b2)}
        if sc.doubled:
            out["discrepancy_doubled"] = cutoff_agreement(p, h, spec.doubled(), sigma, b1, b2)
        write_json(d / "agreement.json", {"config": cfg.resolved(), **out})
        line = f"discrepancy: {out['discrepancy']:.3e}"
        if sc.doubled:
            line += f" doubled: {out['discrepancy_doubled']:.3e}"
        print(line)
    else:
        raise ConfigError(f"unknown scan command {kind!r}")
    return EXIT_OK


def cmd_oracle(cfg: RunConfig) -> int:
    rows = _oracle_table(cfg)
    for r in rows:
        s = r["sigma"]
        print(f"l={r['l']} m_az={r['m_az']} n={r['n']} sigma={_cfmt(s)}")
    d = _outdir(cfg)
    write_json(d / "oracle.json", {"config": cfg.resolved(), "modes": rows})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kqnm", description="Kerr quasinormal modes by complex scaling")
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                    help="worker cap for independent solves (default: logical cores)")
    sub = ap.add_subparsers(dest="command", required=True)
    c = sub.add_parser("compute", help="beta sweep and resonance report")
    c.add_argument("config")
    f = sub.add_parser("flow", help="Hamiltonian flow tools")
    f.add_argument("kind", choices=["trace", "potential", "trapped", "rates"])
    f.add_argument("config")
    s = sub.add_parser("scan", help="residual and symbol scans")
    s.add_argument("kind", choices=["lowenergy", "signcheck", "agreement"])
    s.add_argument("config")
    o = sub.add_parser("oracle", help="continued-fraction reference modes")
    o.add_argument("config")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _setup_logging()
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        cfg = load_config(args.config)
        if args.command == "compute":
            return cmd_compute(cfg, args.threads)
        if args.command == "flow":
            return cmd_flow(cfg, args.kind)
        if args.command == "scan":
            return cmd_scan(cfg, args.kind)
        return cmd_oracle(cfg)
    except (ConfigError, EmptyWindowError) as exc:
        print(f"kqnm: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SolverError, OracleError, fl.FlowError) as exc:
        print(f"kqnm: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"kqnm: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
