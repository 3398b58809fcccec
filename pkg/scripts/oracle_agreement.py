"""Compare shooting eigenvalues with Richardson-extrapolated finite differences.

    python scripts/oracle_agreement.py --R 20 --n 6000
"""

import argparse

from barrier_spectra.experiments import MATCHED_RECT, oracle_agreement
from barrier_spectra.potentials import parse_potential


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--R", type=float, default=20.0)
    ap.add_argument("--n", type=int, default=6000)
    ap.add_argument("--potentials", nargs="+", default=["zero", "box:A=1,Q=1"])
    args = ap.parse_args()

    print(f"lambda-rectangle (scaled by gamma on Im): {MATCHED_RECT}")
    for name in args.potentials:
        ag = oracle_agreement(parse_potential(name), args.gamma, args.R, args.n)
        print(f"\n== {name}: L={ag.L:.2f} fd_count={ag.fd_count} shooting_count={ag.shooting_count} ok={ag.ok}")
        print(f"{'shooting lambda':>36} {'|dev|':>10} {'err est':>10} {'ratio':>6}")
        for lam, dev, err, ratio in zip(ag.shooting, ag.deviation, ag.error, ag.convergence_ratio):
            print(f"{lam.real:17.12f}{lam.imag:+17.12f}i {dev:10.2e} {err:10.2e} {ratio:6.2f}")


if __name__ == "__main__":
    main()
