"""Degree-4 fit in log q of the parity-averaged main term, with and without the Euler factor at q."""

import argparse
import math

import numpy as np

from lmoment.arith import primes_between
from lmoment.main_terms import fit_log_polynomial, fourth_moment_main


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=int, default=101)
    ap.add_argument("--hi", type=int, default=2003)
    ap.add_argument("--n", type=int, default=12)
    args = ap.parse_args()
    ps = primes_between(args.lo, args.hi)
    qs = [ps[i] for i in np.round(np.linspace(0, len(ps) - 1, args.n)).astype(int)]
    target = 1 / (2 * math.pi**2)
    for zq in (False, True):
        coef = fit_log_polynomial(qs, [fourth_moment_main(q, use_zeta_q=zq) for q in qs], 4)
        print(f"zeta_q={zq!s:5}  c4={coef[4]:.10f}  rel dev {abs(coef[4] - target) / target:.2e}  "
              f"coefficients {np.array2string(coef, precision=6)}")


if __name__ == "__main__":
    main()
