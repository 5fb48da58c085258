"""Coordinate search over the per-element node shares.

Objective: worst error of the Schwarzschild l = 2 fundamental mode against
the continued-fraction value over beta in {0.4, 0.6, 0.8} at fixed Nr.
The shipped ELEMENT_WEIGHTS and TAIL_WEIGHT came out of this search.

    python scripts/tune_layout.py --nr 80 --rounds 2
"""
import argparse

import numpy as np

from kqnm.geometry import BlackHoleParams, build_h
from kqnm.oracle import leaver_qnm
from kqnm.pencil import ELEMENT_WEIGHTS, TAIL_WEIGHT, element_breaks
from kqnm.solver import GridSpec, SolverError, Window, make_pencil, qep_eigenvalues, refine

BETAS = (0.4, 0.6, 0.8)


def expand(p, h, w):
    """Per-element weights from (inner, blend, flat, ramp, tail), tail share tapered outward."""
    spec = GridSpec()
    _, roles = element_breaks(p, spec.contour(0.6), 0.5 * (p.m_bh + p.r_plus), spec.rmax, h,
                              spec.tail)
    named = dict(zip(list(ELEMENT_WEIGHTS) + ["tail"], w))
    ntail = roles.count("tail")
    tw = np.linspace(1.0 + 0.1 * (ntail > 1), 1.0 - 0.1 * (ntail > 1), ntail)
    tw = iter(named["tail"] * tw / tw.sum())
    return tuple(float(next(tw)) if r == "tail" else float(named[r]) for r in roles)


def objective(p, h, ref, nr, weights):
    spec = GridSpec(nr=nr, ntheta=1, ell=2, weights=expand(p, h, weights))
    worst = 0.0
    for b in BETAS:
        try:
            pen = make_pencil(p, h, spec, b)
        except ValueError:
            return np.inf
        cs = qep_eigenvalues(pen, Window(0.3, 0.7, -0.2, 0.05), with_vectors=False)
        if not cs:
            return np.inf
        c = min(cs, key=lambda c: abs(c.sigma - ref))
        try:
            s = refine(pen, c.sigma)
        except SolverError:
            s = c.sigma
        worst = max(worst, abs(s - ref))
    return worst


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nr", type=int, default=80)
    ap.add_argument("--rounds", type=int, default=2)
    ap.add_argument("--factors", type=float, nargs="+", default=[0.7, 0.85, 1.2, 1.4])
    args = ap.parse_args()

    p = BlackHoleParams(1.0, 0.0)
    h = build_h(p, 4.1, 3.6)
    ref = leaver_qnm(p, 2, 0).sigma
    names = list(ELEMENT_WEIGHTS) + ["tail"]
    w = np.array(list(ELEMENT_WEIGHTS.values()) + [TAIL_WEIGHT])
    best = objective(p, h, ref, args.nr, w)
    print("start", {n: float(v) for n, v in zip(names, w)}, f"error={best:.3e}")
    for rnd in range(args.rounds):
        for k, name in enumerate(names):
            for f in args.factors:
                trial = w.copy()
                trial[k] *= f
                e = objective(p, h, ref, args.nr, trial)
                if e < best:
                    best, w = e, trial
                    print(f"round {rnd} {name} x{f}: error={e:.3e}")
    print("best weights:", {n: round(float(v), 3) for n, v in zip(names, w)}, f"error={best:.3e}")


if __name__ == "__main__":
    main()
