#!/usr/bin/env python3
"""Print the derivative formulas and family growth up to a given order.

Usage: python scripts/formula_table.py [MAX_N]
"""

import sys

from implicit_derivatives import (
    delta_formula,
    elementary_formula,
    enumerate_A,
    enumerate_B,
    render,
)


def main() -> None:
    max_n = int(sys.argv[1]) if len(sys.argv) > 1 else 6
    print(f"{'n':>3} {'|A_n|':>6} {'|B_n|':>6} {'block terms':>12} {'expanded terms':>15}")
    for n in range(2, max_n + 1):
        a, b = len(enumerate_A(n)), len(enumerate_B(n))
        print(f"{n:>3} {a:>6} {b:>6} {len(delta_formula(n).terms):>12} "
              f"{len(elementary_formula(n).terms):>15}")
    print()
    for n in range(2, min(max_n, 5) + 1):
        print(f"y^({n}) [block form]")
        print("   ", render(delta_formula(n), "plain"))
        print(f"y^({n}) [expanded, {len(elementary_formula(n).terms)} terms]")
        print("   ", render(elementary_formula(n), "plain"))
        print()


if __name__ == "__main__":
    main()
