"""Relative deviation of the zero-shift moment from the six-term main term as q grows."""

import argparse
import math

from lmoment.characters import character_table
from lmoment.main_terms import conjecture_at_zero
from lmoment.moments import moment
from lmoment.shifts import ShiftTuple


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, nargs="+", default=[101, 211, 401, 601, 1009, 2003, 4001])
    ap.add_argument("--parity", type=int, choices=(0, 1), default=0)
    args = ap.parse_args()
    print(f"{'q':>6} {'moment':>14} {'main':>14} {'rel_dev':>9} {'dev*sqrt(q)':>12}")
    for q in args.q:
        M = moment(character_table(q), ShiftTuple.zero(), args.parity).real
        C = conjecture_at_zero(q, args.parity)
        print(f"{q:>6} {M:>14.8f} {C:>14.8f} {abs(M - C) / abs(C):>9.4f} {(M - C) * math.sqrt(q):>12.2f}")


if __name__ == "__main__":
    main()
