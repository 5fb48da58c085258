"""Discretization checks for the Schwarzschild l = 2 fundamental mode.

Grid doubling, independence of the blend radius r_tilde, and of the outer
truncation radius, all in the single-l reduction at one scaling angle.

    python scripts/convergence.py --beta 0.6
"""
import argparse
from dataclasses import replace

from kqnm.geometry import BlackHoleParams, build_h
from kqnm.oracle import leaver_qnm
from kqnm.solver import GridSpec, Window, make_pencil, qep_eigenvalues, refine


def mode(p, h, spec, beta, ref):
    pen = make_pencil(p, h, spec, beta)
    cs = qep_eigenvalues(pen, Window(0.3, 0.7, -0.2, 0.05), with_vectors=False)
    return refine(pen, min(cs, key=lambda c: abs(c.sigma - ref)).sigma)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--beta", type=float, default=0.6)
    ap.add_argument("--l", type=int, default=2)
    args = ap.parse_args()

    p = BlackHoleParams(1.0, 0.0)
    h = build_h(p, 4.1, 3.6)
    ref = leaver_qnm(p, args.l, 0).sigma
    print(f"oracle l={args.l}: {ref:.15f}")

    print("\ngrid doubling")
    prev = None
    for nr in (40, 80, 160, 320):
        s = mode(p, h, GridSpec(nr=nr, ntheta=1, ell=args.l), args.beta, ref)
        step = "" if prev is None else f"  |change|={abs(s - prev):.2e}"
        print(f"  Nr={nr:4d} error={abs(s - ref):.2e}{step}")
        prev = s

    for nr in (80, 160):
        spec = GridSpec(nr=nr, ntheta=1, ell=args.l)
        base = mode(p, h, spec, args.beta, ref)
        print(f"\nNr={nr}")
        for rt in (3.0, 3.3, 3.9):
            s = mode(p, build_h(p, 4.1, rt), spec, args.beta, ref)
            print(f"  r_tilde={rt}: |shift|={abs(s - base):.2e}")
        s = mode(p, h, replace(spec, rmax=2 * spec.rmax), args.beta, ref)
        print(f"  Rmax x2:     |shift|={abs(s - base):.2e}")


if __name__ == "__main__":
    main()
