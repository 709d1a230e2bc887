#!/usr/bin/env python3
"""Time the independent routes to the order-n derivative and check they agree.

Usage: python scripts/route_timing.py [MAX_N]
"""

import sys
import time

from implicit_derivatives import (
    delta_formula,
    delta_formula_via_recursion,
    derive_next,
    elementary_formula,
    expand_delta,
    formulas_equal,
    oracle_formula,
)


def timed(fn, *args):
    start = time.perf_counter()
    value = fn(*args)
    return value, time.perf_counter() - start


def main() -> None:
    max_n = int(sys.argv[1]) if len(sys.argv) > 1 else 9
    print(f"{'n':>3} {'direct':>9} {'stepped':>9} {'recursion':>10} "
          f"{'expanded':>9} {'oracle':>9}  agree")
    stepped = None
    for n in range(2, max_n + 1):
        direct, t_direct = timed(delta_formula, n)
        if stepped is None:
            stepped, t_step = direct, 0.0
        else:
            stepped, t_step = timed(derive_next, stepped)
        rebuilt, t_rec = timed(delta_formula_via_recursion, n)
        expanded, t_exp = timed(expand_delta, direct)
        brute, t_oracle = timed(oracle_formula, n)
        agree = (
            stepped == direct
            and rebuilt == direct
            and formulas_equal(expanded, elementary_formula(n)).equal
            and formulas_equal(expanded, brute).equal
        )
        print(f"{n:>3} {t_direct:>9.4f} {t_step:>9.4f} {t_rec:>10.4f} "
              f"{t_exp:>9.4f} {t_oracle:>9.4f}  {'yes' if agree else 'NO'}")


if __name__ == "__main__":
    main()
