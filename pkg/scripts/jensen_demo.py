"""Half-disc zero bound for the shifted characteristic function over several R.

    python scripts/jensen_demo.py --R-list 20,50,100 --a 1
"""

import argparse

from barrier_spectra.experiments import jensen_demo
from barrier_spectra.potentials import parse_potential


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--potential", default="box:A=1,Q=1")
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--R-list", default="20,50,100")
    ap.add_argument("--a", type=float, default=1.0)
    args = ap.parse_args()

    q = parse_potential(args.potential)
    print(f"{'R':>7} {'winding':>8} {'eigs':>6} {'zero bound':>12} {'count bound':>12} ok")
    for R in (float(r) for r in args.R_list.split(",")):
        out = jensen_demo(q, args.gamma, R, args.a)
        print(f"{R:7.1f} {out['winding_count']:8d} {out['eigenvalue_count']:6d} "
              f"{out['bound']:12.4g} {out['count_bound_naimark']:12.4g} {out['ok']}")


if __name__ == "__main__":
    main()
