"""Invariant suites exercising every identity the formulas rest on.

Four suites are exposed, mirroring the four independent routes through
the mathematics:

* ``recursion``: the coefficient recursion reproduces the directly
  computed coefficients, and both the differentiation step and the
  recursion-built formula reproduce the direct construction.
* ``oracle``: block expansion, the direct expanded form, and the
  brute-force differentiation oracle agree exactly, order by order.
* ``johnson``: the refinement sums collapse to single binomials for
  every family-B element and every admissible split.
* ``shift``: evaluating the f_x = 0 specialization on the sheared jet
  equals evaluating the compact formula on the original jet, exactly,
  on batches of random rational jets.

Each check returns a :class:`~implicit_derivatives.coeffs.CheckReport`;
a suite passes when every report carries no failures.
"""

from __future__ import annotations

from .coeffs import CheckReport, binom, verify_C_recursion, zgamma_sum
from .errors import DomainError
from .formula import (
    delta_formula,
    delta_formula_via_recursion,
    derive_next,
    elementary_formula,
    expand_delta,
    specialize_fx_zero,
)
from .numeric import eval_formula, random_rational_jet, shift_jet
from .oracle import formulas_equal, oracle_formula
from .partitions import Multiplicities, enumerate_B

JETS_PER_ORDER = 50
SHIFT_SEED_BASE = 20_000


def recursion_suite(max_n: int) -> list[CheckReport]:
    """Coefficient recursion and differentiation step versus direct construction."""
    reports = []
    for n in range(2, max_n + 1):
        reports.append(verify_C_recursion(n))
        report = CheckReport(f"order step {n}->{n + 1}")
        direct = delta_formula(n + 1)
        stepped = derive_next(delta_formula(n))
        rebuilt = delta_formula_via_recursion(n + 1)
        report.record(
            stepped == direct,
            f"differentiation step disagrees with direct construction at {n + 1}",
        )
        report.record(
            rebuilt == direct,
            f"coefficient recursion disagrees with direct construction at {n + 1}",
        )
        reports.append(report)
    return reports


def oracle_suite(max_n: int) -> list[CheckReport]:
    """Triple agreement of expansion, direct expanded form, and the oracle."""
    reports = []
    for n in range(1, max_n + 1):
        report = CheckReport(f"forms agree at order {n}")
        elementary = elementary_formula(n)
        diff = formulas_equal(elementary, oracle_formula(n))
        report.record(
            diff.equal,
            f"expanded form vs oracle at {n}: " + "; ".join(diff.differences[:3]),
        )
        if n >= 2:
            diff = formulas_equal(expand_delta(delta_formula(n)), elementary)
            report.record(
                diff.equal,
                f"block expansion vs expanded form at {n}: "
                + "; ".join(diff.differences[:3]),
            )
        reports.append(report)
    return reports


def johnson_suite(max_n: int) -> list[CheckReport]:
    """Refinement sums equal binomials for every element and admissible split."""
    reports = []
    for n in range(1, max_n + 1):
        report = CheckReport(f"refinement binomial at order {n}")
        for gamma in enumerate_B(n):
            core = Multiplicities(
                tuple((k, c) for k, c in gamma.items() if k != (1, 0))
            )
            top = core.sum_r
            for s10 in range(top + 1):
                value = zgamma_sum(core, s10)
                expected = binom(top, s10)
                report.record(
                    value == expected,
                    f"gamma {gamma}, split {s10}: got {value}, want {expected}",
                )
        reports.append(report)
    return reports


def shift_suite(
    max_n: int, jets_per_order: int = JETS_PER_ORDER, seed: int = SHIFT_SEED_BASE
) -> list[CheckReport]:
    """Sheared-jet evaluation of the specialized formula vs the compact formula."""
    reports = []
    for n in range(2, max_n + 1):
        report = CheckReport(f"shear identity at order {n}")
        compact = delta_formula(n)
        specialized = specialize_fx_zero(elementary_formula(n))
        for i in range(jets_per_order):
            jet = random_rational_jet(n, seed=seed + 100 * n + i)
            expected = eval_formula(compact, jet).value
            sheared = eval_formula(specialized, shift_jet(jet, n)).value
            report.record(
                sheared == expected,
                f"jet seed {seed + 100 * n + i}: {sheared} vs {expected}",
            )
        reports.append(report)
    return reports


SUITES = {
    "recursion": recursion_suite,
    "oracle": oracle_suite,
    "johnson": johnson_suite,
    "shift": shift_suite,
}


def run_suites(names, max_n: int) -> list[CheckReport]:
    """Run the named suites (or all of them) up to the given order."""
    chosen = []
    for name in names:
        if name == "all":
            chosen = list(SUITES)
            break
        if name not in SUITES:
            raise DomainError(f"unknown suite {name!r}")
        chosen.append(name)
    reports = []
    for name in chosen:
        reports.extend(SUITES[name](max_n))
    return reports
