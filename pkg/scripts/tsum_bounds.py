"""Largest |T(x, y, z; q)| per case, against q^{3/2} and against the explicit bounds."""

import argparse

import numpy as np

from lmoment.expsums import t_bound, t_bound_case, t_sum_brute_table, t_sum_closed


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, nargs="+", default=[5, 7, 11, 13, 17, 19, 23])
    args = ap.parse_args()
    for q in args.q:
        B = t_sum_brute_table(q)
        worst: dict[str, tuple[float, float]] = {}
        diff = 0.0
        for x, y, z in np.ndindex(q, q, q):
            v = abs(B[x, y, z])
            diff = max(diff, abs(B[x, y, z] - t_sum_closed(x, y, z, q)))
            c = t_bound_case(x, y, z, q)
            a, b = worst.get(c, (0.0, 0.0))
            worst[c] = (max(a, v / q**1.5), max(b, v / t_bound(x, y, z, q)))
        cases = "  ".join(f"{c}: {a:.3f}/{b:.3f}" for c, (a, b) in sorted(worst.items()))
        print(f"q={q:>3} closed-vs-brute {diff:.1e}  max |T|/q^1.5 / |T|/bound  {cases}")


if __name__ == "__main__":
    main()
