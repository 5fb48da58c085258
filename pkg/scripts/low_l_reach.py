"""How far inside each scaling sector the low-l Schwarzschild modes sit.

A mode is representable at scaling angle beta only when arg(sigma) > -beta;
its eigenfunction decays along the scaled ray roughly like
exp(-|sigma| r sin(arg(sigma) + beta)), so a small margin needs a long
radial domain. For each (l, beta) this prints the margin, that decay
length, and the error of the nearest refined eigenvalue at two grid sizes.

    python scripts/low_l_reach.py --betas 0.4 0.6 0.8 1.0 1.2
"""
import argparse

import numpy as np

from kqnm.geometry import BlackHoleParams, build_h
from kqnm.oracle import leaver_qnm
from kqnm.solver import GridSpec, SolverError, Window, make_pencil, qep_eigenvalues, refine


def nearest(p, h, l, beta, nr, ref):
    pen = make_pencil(p, h, GridSpec(nr=nr, ntheta=1, ell=l), beta)
    cs = qep_eigenvalues(pen, Window(0.0, 1.0, -0.4, 0.05), with_vectors=False)
    if not cs:
        return np.nan
    s = min(cs, key=lambda c: abs(c.sigma - ref)).sigma
    try:
        s = refine(pen, s)
    except SolverError:
        pass
    return abs(s - ref)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--betas", type=float, nargs="+", default=[0.4, 0.6, 0.8, 1.0, 1.2])
    ap.add_argument("--ls", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--nr", type=int, default=80)
    args = ap.parse_args()

    p = BlackHoleParams(1.0, 0.0)
    h = build_h(p, 4.1, 3.6)
    print(f"{'l':>2} {'beta':>5} {'margin':>8} {'decay_len':>9} "
          f"{'err@' + str(args.nr):>10} {'err@' + str(2 * args.nr):>10}")
    for l in args.ls:
        ref = leaver_qnm(p, l, 0).sigma
        for b in args.betas:
            margin = np.angle(ref) + b
            if margin <= 0:
                print(f"{l:2d} {b:5.2f} {margin:8.3f} {'-':>9} {'outside sector':>21}")
                continue
            length = 1.0 / (abs(ref) * np.sin(margin))
            e1 = nearest(p, h, l, b, args.nr, ref)
            e2 = nearest(p, h, l, b, 2 * args.nr, ref)
            print(f"{l:2d} {b:5.2f} {margin:8.3f} {length:9.1f} {e1:10.2e} {e2:10.2e}")


if __name__ == "__main__":
    main()
