"""S(K, L; q) on a grid of K = q^a, L = q^b, as ratios to L q^{1/2} and L^{1/2} q^{3/4} + K^{1/2} L."""

import argparse

from lmoment.expsums import s_kl_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=1009)
    ap.add_argument("--steps", type=int, default=5)
    args = ap.parse_args()
    q = args.q
    exps = [0.2 + 0.8 * k / (args.steps - 1) for k in range(args.steps)]
    print(f"{'a':>5} {'b':>5} {'S/trivial':>10} {'S/(L sqrt q)':>13} {'S/mixed':>9}")
    for a in exps:
        for b in exps:
            r = s_kl_scan(q**a, q**b, q)
            print(f"{a:>5.2f} {b:>5.2f} {r.value / r.trivial:>10.4f} {r.ratio_sqrt:>13.4f} {r.ratio_mixed:>9.4f}")


if __name__ == "__main__":
    main()
