"""Decay of the AFE weight f_lambda(x) against its rigorous envelope."""

import argparse

import numpy as np

from lmoment.divisor_afe import f_envelope, f_lambda


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=complex, default=0.2 + 0.1j)
    args = ap.parse_args()
    xs = np.geomspace(1, 1e4, 13)
    vals = np.abs(f_lambda(xs, args.lam))
    print(f"{'x':>10} {'|f|':>12} {'envelope':>12} {'exp(-(log x)^2/4)':>18}")
    for x, v in zip(xs, vals):
        print(f"{x:>10.1f} {v:>12.3e} {f_envelope(x, args.lam):>12.3e} {np.exp(-np.log(x) ** 2 / 4):>18.3e}")


if __name__ == "__main__":
    main()
