#!/usr/bin/env python3
"""Locate where two holes swap escape-rate order as p varies.

Certifies the sign of gamma(w1) - gamma(w2) at both window endpoints and
bisects on exact rationals until the crossing is enclosed to the requested
width.  Example (the period-4 vs period-5 pair of length 6):

    python scripts/locate_order_switch.py aabbaa baaaab --window 0.70:0.72
"""

import argparse
import sys
from fractions import Fraction

from holerates.extremal import find_order_switch, rate_difference_sign
from holerates.words import AB, Word


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("first")
    parser.add_argument("second")
    parser.add_argument("--window", default="0.70:0.72", help="lo:hi search window for p")
    parser.add_argument("--width", default="1e-6", help="target enclosure width")
    args = parser.parse_args()

    w1 = Word.parse(args.first, AB)
    w2 = Word.parse(args.second, AB)
    lo_text, hi_text = args.window.split(":")
    lo, hi = Fraction(lo_text), Fraction(hi_text)
    s_lo = rate_difference_sign(w1, w2, lo)
    s_hi = rate_difference_sign(w1, w2, hi)
    print(f"sign(gamma({w1}) - gamma({w2})) at p={lo}: {s_lo:+d}, at p={hi}: {s_hi:+d}")
    if s_lo == s_hi or 0 in (s_lo, s_hi):
        print("no certified sign change on this window", file=sys.stderr)
        return 1
    left, right = find_order_switch(w1, w2, lo, hi, width=Fraction(args.width))
    print(f"crossing enclosed in ({left}, {right})")
    print(f"              approx ({float(left):.9f}, {float(right):.9f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
