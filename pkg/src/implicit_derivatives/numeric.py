"""Numeric evaluation of the derivative formulas on derivative jets.

A jet records the values of all partials f_{x^p y^t} of f at a base
point up to a total order, in one of two scalar kinds: exact rationals
or binary64 floats.  Formulas evaluate to a scalar of the jet's kind,
so rational jets give exact results.

The module also ships a few built-in implicit-function problems with
known solutions, a Newton solver plus central finite differences for
cross-checking, the base-point shear that zeroes f_x (turning the
compact blocks into plain partials), and a deterministic random-jet
generator used by the property suites.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .errors import DomainError, JetError, NewtonError, SingularJetError
from .expressions import DeltaFormula, ElemFormula
from .formula import delta_formula

RATIONAL = "rational"
FLOAT = "float"

DEFAULT_FD_STEPS = (1e-2, 5e-3, 2.5e-3)
NEWTON_TOL = 1e-14
NEWTON_MAX_ITER = 50


def _coerce_scalar(value, kind, what):
    if kind == RATIONAL:
        if isinstance(value, float):
            raise JetError(f"float value {value!r} in a rational jet ({what})")
        return Fraction(value)
    if isinstance(value, Fraction):
        raise JetError(f"rational value {value!r} in a float jet ({what})")
    return float(value)


@dataclass
class Jet:
    """Partial-derivative values of f at a base point, up to ``order``.

    All keys (p, t) with p + t <= order are present after construction
    (absent ones fill with zero).  The value at (0, 0) must be 0 (the
    base point solves f = 0) and the value at (0, 1) must be non-zero.
    One scalar kind per jet; mixing rationals and floats is rejected.
    """

    x0: object
    y0: object
    order: int
    partials: dict
    kind: str = RATIONAL

    def __post_init__(self) -> None:
        if self.kind not in (RATIONAL, FLOAT):
            raise JetError(f"unknown jet kind {self.kind!r}")
        if self.order < 1:
            raise JetError("jet order must be at least 1")
        self.x0 = _coerce_scalar(self.x0, self.kind, "x0")
        self.y0 = _coerce_scalar(self.y0, self.kind, "y0")
        zero = Fraction(0) if self.kind == RATIONAL else 0.0
        table = {}
        for key, value in self.partials.items():
            p, t = int(key[0]), int(key[1])
            if p < 0 or t < 0 or p + t > self.order:
                raise JetError(f"partial key {(p, t)} outside jet of order {self.order}")
            table[(p, t)] = _coerce_scalar(value, self.kind, f"partial ({p},{t})")
        for p in range(self.order + 1):
            for t in range(self.order + 1 - p):
                table.setdefault((p, t), zero)
        if table[(0, 0)] != 0:
            raise JetError("f(x0, y0) must be 0 at the base point")
        if table[(0, 1)] == 0:
            raise SingularJetError("jet has f_y = 0 at the base point")
        self.partials = table

    @property
    def fx(self):
        return self.partials[(1, 0)]

    @property
    def fy(self):
        return self.partials[(0, 1)]


def jet_to_json(jet: Jet) -> str:
    """Serialize a jet; rational scalars become "num/den" strings."""

    def scalar(v):
        if jet.kind == RATIONAL:
            return f"{v.numerator}/{v.denominator}"
        return v

    doc = {
        "x0": scalar(jet.x0),
        "y0": scalar(jet.y0),
        "order": jet.order,
        "kind": jet.kind,
        "partials": {
            f"{p},{t}": scalar(v) for (p, t), v in sorted(jet.partials.items())
        },
    }
    return json.dumps(doc)


def jet_from_json(text: str) -> Jet:
    """Parse a jet document; raises JetError for malformed content."""
    try:
        doc = json.loads(text)
        kind = doc["kind"]

        def scalar(v):
            if kind == RATIONAL:
                if isinstance(v, str):
                    return Fraction(v)
                if isinstance(v, int):
                    return Fraction(v)
                raise JetError(f"rational jets need integer or 'num/den' scalars, got {v!r}")
            if isinstance(v, (int, float)):
                return float(v)
            raise JetError(f"float jets need numeric scalars, got {v!r}")

        partials = {}
        for key, value in doc["partials"].items():
            p_text, t_text = key.split(",")
            partials[(int(p_text), int(t_text))] = scalar(value)
        return Jet(
            x0=scalar(doc["x0"]),
            y0=scalar(doc["y0"]),
            order=int(doc["order"]),
            partials=partials,
            kind=kind,
        )
    except JetError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise JetError(f"malformed jet document: {exc}") from exc


def eval_delta_block(jet: Jet, l: int, r: int):
    """Value of the block D[l,r] = sum_j (-1)^j C(l,j) f_{x^(l-j) y^(r+j)} f_x^j f_y^(l-j)."""
    if l < 0 or r < 0:
        raise DomainError("block indices must be non-negative")
    if l + r > jet.order:
        raise JetError(f"block ({l},{r}) needs jet order {l + r}, have {jet.order}")
    fx, fy = jet.fx, jet.fy
    total = Fraction(0) if jet.kind == RATIONAL else 0.0
    for j in range(l + 1):
        term = math.comb(l, j) * jet.partials[(l - j, r + j)] * fx**j * fy ** (l - j)
        total += -term if j % 2 else term
    return total


@dataclass(frozen=True)
class EvalReport:
    """Evaluation outcome: the value, per-term contributions, optional targets."""

    n: int
    value: object
    term_values: tuple
    analytic: object = None
    fd: float | None = None
    rel_error_analytic: float | None = None
    rel_error_fd: float | None = None


def relative_error(value, target) -> float:
    """|value - target| / max(1, |target|), as a float."""
    v, t = float(value), float(target)
    return abs(v - t) / max(1.0, abs(t))


def eval_formula(formula: DeltaFormula | ElemFormula, jet: Jet) -> EvalReport:
    """Evaluate either formula shape on a jet; exact on rational jets."""
    if isinstance(formula, ElemFormula) and formula.form == "inverse":
        raise DomainError("inverse-function formulas are not evaluated on jets")
    if jet.order < formula.n:
        raise JetError(f"formula of order {formula.n} needs jet order >= {formula.n}")
    if jet.fy == 0:
        raise SingularJetError("jet has f_y = 0 at the base point")
    contributions = []
    for coeff, mono in formula.terms:
        product = Fraction(1) if jet.kind == RATIONAL else 1.0
        if isinstance(formula, DeltaFormula):
            for key, power in mono.factors:
                product *= eval_delta_block(jet, key.l, key.r) ** power
        else:
            for key, power in mono.exponents:
                product *= jet.partials[(key.l, key.r)] ** power
        value = coeff * product / jet.fy**mono.fy_power
        if jet.kind == FLOAT:
            value = float(value)
        contributions.append(value)
    total = sum(contributions, Fraction(0) if jet.kind == RATIONAL else 0.0)
    return EvalReport(n=formula.n, value=total, term_values=tuple(contributions))


def shift_jet(jet: Jet, n: int) -> Jet:
    """Jet of the sheared function g(x, z) = f(x, z + lambda*x), lambda = -f_x/f_y.

    The shear zeroes the first x-derivative at the base point while
    leaving pure y-partials untouched; its mixed partials are
    g_{x^l z^r} = sum_k C(l,k) lambda^k f_{x^(l-k) y^(r+k)}, which equals
    the block value D[l,r] divided by f_y^l.
    """
    if n < 1:
        raise DomainError("shift order must be at least 1")
    if jet.order < n:
        raise JetError(f"shift to order {n} needs jet order >= {n}")
    if jet.fy == 0:
        raise SingularJetError("jet has f_y = 0 at the base point")
    lam = -jet.fx / jet.fy
    zero = Fraction(0) if jet.kind == RATIONAL else 0.0
    partials = {}
    for l in range(n + 1):
        for r in range(n + 1 - l):
            value = zero
            for k in range(l + 1):
                value += math.comb(l, k) * lam**k * jet.partials[(l - k, r + k)]
            partials[(l, r)] = value
    partials[(1, 0)] = zero  # exact by the choice of lambda
    return Jet(
        x0=jet.x0,
        y0=jet.y0 - lam * jet.x0,
        order=n,
        partials=partials,
        kind=jet.kind,
    )


def random_rational_jet(order: int, seed: int) -> Jet:
    """Deterministic random jet with small rational entries and f_y != 0."""
    rng = random.Random(seed)

    def small(nonzero=False):
        num = rng.randint(-9, 9)
        while nonzero and num == 0:
            num = rng.randint(-9, 9)
        return Fraction(num, rng.randint(1, 4))

    partials = {}
    for p in range(order + 1):
        for t in range(order + 1 - p):
            partials[(p, t)] = small()
    partials[(0, 0)] = Fraction(0)
    partials[(0, 1)] = small(nonzero=True)
    return Jet(x0=small(), y0=small(), order=order, partials=partials, kind=RATIONAL)


# --- built-in problems -------------------------------------------------------


@dataclass(frozen=True)
class ProblemSpec:
    """An implicit-function test problem with evaluable closed forms.

    ``partial`` returns the exact (or float) value of f_{x^p y^t} at the
    base point; ``analytic`` returns the known value of the n-th
    derivative of the solution, or None when no independent closed form
    is available.
    """

    name: str
    description: str
    x0: object
    y0: object
    f: Callable[[float, float], float]
    fy: Callable[[float, float], float]
    partial: Callable[[int, int], object]
    exact: bool
    analytic: Callable[[int], object]

    def jet(self, order: int, kind: str | None = None) -> Jet:
        if kind is None:
            kind = RATIONAL if self.exact else FLOAT
        if kind == RATIONAL and not self.exact:
            raise JetError(f"problem {self.name!r} has no exact jet; use kind='float'")
        values = {}
        for p in range(order + 1):
            for t in range(order + 1 - p):
                v = self.partial(p, t)
                values[(p, t)] = Fraction(v) if kind == RATIONAL else float(v)
        x0 = Fraction(self.x0) if kind == RATIONAL else float(self.x0)
        y0 = Fraction(self.y0) if kind == RATIONAL else float(self.y0)
        return Jet(x0=x0, y0=y0, order=order, partials=values, kind=kind)


def _table_partial(table: dict) -> Callable[[int, int], Fraction]:
    def partial(p: int, t: int) -> Fraction:
        return Fraction(table.get((p, t), 0))

    return partial


def _binomial_series_coeff(k: int, exponent: Fraction) -> Fraction:
    """Generalized binomial coefficient C(exponent, k) as an exact rational."""
    value = Fraction(1)
    for i in range(k):
        value *= (exponent - i) / (i + 1)
    return value


def _circle_analytic(n: int) -> Fraction:
    # y = sqrt(1 - x^2) expanded by the binomial series at x = 0
    if n % 2:
        return Fraction(0)
    k = n // 2
    coeff = _binomial_series_coeff(k, Fraction(1, 2)) * (-1) ** k
    return coeff * math.factorial(n)


def _series_mul(a: list, b: list, order: int) -> list:
    out = [Fraction(0)] * (order + 1)
    for i, ca in enumerate(a):
        if ca == 0 or i > order:
            continue
        for j, cb in enumerate(b):
            if i + j > order:
                break
            out[i + j] += ca * cb
    return out


@lru_cache(maxsize=None)
def _cubic_series(order: int) -> tuple:
    # Taylor coefficients of (2 - x^3)^(1/3) around x = 1: compose the
    # binomial series of (1 + v)^(1/3) with v = -3s - 3s^2 - s^3, s = x - 1.
    v = [Fraction(0), Fraction(-3), Fraction(-3), Fraction(-1)]
    coeffs = [Fraction(0)] * (order + 1)
    v_power = [Fraction(1)]
    for k in range(order + 1):
        c = _binomial_series_coeff(k, Fraction(1, 3))
        for i, value in enumerate(v_power[: order + 1]):
            coeffs[i] += c * value
        if k < order:
            v_power = _series_mul(v_power, v, order)
    return tuple(coeffs)


def _cubic_analytic(n: int) -> Fraction:
    return _cubic_series(n)[n] * math.factorial(n)


def _lambert_analytic(n: int):
    # closed forms from w' = w / (x (1 + w)) at x = e, w = 1
    if n == 1:
        return 1.0 / (2.0 * math.e)
    if n == 2:
        return -3.0 / (8.0 * math.e**2)
    return None


def _make_circle() -> ProblemSpec:
    return ProblemSpec(
        name="circle",
        description="x^2 + y^2 - 1 = 0 at (0, 1); y = sqrt(1 - x^2)",
        x0=Fraction(0),
        y0=Fraction(1),
        f=lambda x, y: x * x + y * y - 1.0,
        fy=lambda x, y: 2.0 * y,
        partial=_table_partial({(0, 1): 2, (1, 0): 0, (2, 0): 2, (0, 2): 2}),
        exact=True,
        analytic=_circle_analytic,
    )


def _make_exp() -> ProblemSpec:
    def partial(p: int, t: int) -> Fraction:
        if p == 0 and t == 1:
            return Fraction(1)
        if t == 0 and p >= 1:
            return Fraction(-1)
        return Fraction(0)

    return ProblemSpec(
        name="exp",
        description="y - e^x = 0 at (0, 1); y = e^x",
        x0=Fraction(0),
        y0=Fraction(1),
        f=lambda x, y: y - math.exp(x),
        fy=lambda x, y: 1.0,
        partial=partial,
        exact=True,
        analytic=lambda n: Fraction(1),
    )


def _make_lambert() -> ProblemSpec:
    def partial(p: int, t: int) -> float:
        if (p, t) == (1, 0):
            return -1.0
        if p == 0 and t >= 1:
            return (1.0 + t) * math.e
        return 0.0

    return ProblemSpec(
        name="lambert",
        description="y*e^y - x = 0 at (e, 1); y = W(x)",
        x0=math.e,
        y0=1.0,
        f=lambda x, y: y * math.exp(y) - x,
        fy=lambda x, y: (1.0 + y) * math.exp(y),
        partial=partial,
        exact=False,
        analytic=_lambert_analytic,
    )


def _make_cubic() -> ProblemSpec:
    return ProblemSpec(
        name="cubic",
        description="x^3 + y^3 - 2 = 0 at (1, 1); y = (2 - x^3)^(1/3)",
        x0=Fraction(1),
        y0=Fraction(1),
        f=lambda x, y: x**3 + y**3 - 2.0,
        fy=lambda x, y: 3.0 * y * y,
        partial=_table_partial(
            {(1, 0): 3, (0, 1): 3, (2, 0): 6, (0, 2): 6, (3, 0): 6, (0, 3): 6}
        ),
        exact=True,
        analytic=_cubic_analytic,
    )


_PROBLEM_FACTORIES = {
    "circle": _make_circle,
    "exp": _make_exp,
    "lambert": _make_lambert,
    "cubic": _make_cubic,
}

PROBLEM_NAMES = tuple(sorted(_PROBLEM_FACTORIES))


def builtin_problem(name: str) -> ProblemSpec:
    """Return a registered test problem by name."""
    try:
        return _PROBLEM_FACTORIES[name]()
    except KeyError:
        raise DomainError(
            f"unknown problem {name!r}; choose from {', '.join(PROBLEM_NAMES)}"
        ) from None


# --- Newton solving and finite differences -----------------------------------


def newton_solve(
    problem: ProblemSpec,
    x: float,
    y_start: float,
    tol: float = NEWTON_TOL,
    max_iter: int = NEWTON_MAX_ITER,
) -> float:
    """Solve f(x, y) = 0 for y near ``y_start`` by Newton iteration."""
    y = y_start
    for _ in range(max_iter):
        residual = problem.f(x, y)
        if abs(residual) <= tol:
            return y
        y -= residual / problem.fy(x, y)
    if abs(problem.f(x, y)) <= tol:
        return y
    raise NewtonError(f"Newton failed for {problem.name} at x = {x}")


def _exact_solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    # Gaussian elimination over Fractions with row pivoting
    size = len(rows)
    a = [row[:] + [rhs[i]] for i, row in enumerate(rows)]
    for col in range(size):
        pivot = next(r for r in range(col, size) if a[r][col] != 0)
        a[col], a[pivot] = a[pivot], a[col]
        inv = a[col][col]
        a[col] = [v / inv for v in a[col]]
        for r in range(size):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [v - factor * w for v, w in zip(a[r], a[col])]
    return [a[r][size] for r in range(size)]


@lru_cache(maxsize=None)
def _central_stencil(k: int) -> tuple[tuple[int, ...], tuple[Fraction, ...]]:
    """Symmetric stencil with sum_j c_j y(x + j*h) ~ y^(k)(x) * h^k, O(h^2)."""
    m = (k + 1) // 2
    offsets = tuple(range(-m, m + 1))
    rows = [[Fraction(j) ** i for j in offsets] for i in range(2 * m + 1)]
    rhs = [
        Fraction(math.factorial(k)) if i == k else Fraction(0)
        for i in range(2 * m + 1)
    ]
    return offsets, tuple(_exact_solve(rows, rhs))


def _solution_grid(problem: ProblemSpec, h: float, half_width: int) -> dict[int, float]:
    """Newton-solved y values on x0 + j*h, warm-started outward from the center."""
    x0, y0 = float(problem.x0), float(problem.y0)
    ys = {0: newton_solve(problem, x0, y0)}
    for j in range(1, half_width + 1):
        for sign in (1, -1):
            ys[sign * j] = newton_solve(
                problem, x0 + sign * j * h, ys[sign * (j - 1)]
            )
    return ys


def finite_difference_derivatives(
    problem: ProblemSpec, n: int, steps: tuple[float, ...] = DEFAULT_FD_STEPS
) -> list[float]:
    """Central-difference estimates of the first n derivatives of the solution.

    Each step must halve the previous one; one Richardson level is
    applied across the step ladder and the finest extrapolation is
    returned, one value per derivative order 1..n.
    """
    if n < 1:
        raise DomainError("need at least one derivative order")
    if len(steps) < 2:
        raise DomainError("need at least two steps for Richardson extrapolation")
    for bigger, smaller in zip(steps, steps[1:]):
        if abs(bigger / smaller - 2.0) > 1e-9:
            raise DomainError("steps must form a halving ladder")
    half_width = (n + 1) // 2
    grids = [_solution_grid(problem, h, half_width) for h in steps]
    results = []
    for k in range(1, n + 1):
        offsets, coeffs = _central_stencil(k)
        raw = [
            sum(float(c) * grid[j] for j, c in zip(offsets, coeffs)) / h**k
            for h, grid in zip(steps, grids)
        ]
        refined = [
            (4.0 * finer - coarser) / 3.0 for coarser, finer in zip(raw, raw[1:])
        ]
        results.append(refined[-1])
    return results


def evaluate_problem(
    problem: ProblemSpec,
    n: int,
    kind: str | None = None,
    check_fd: bool = False,
    fd_steps: tuple[float, ...] = DEFAULT_FD_STEPS,
) -> EvalReport:
    """Evaluate the compact formula on a problem jet, attaching targets."""
    jet = problem.jet(order=n, kind=kind)
    report = eval_formula(delta_formula(n), jet)
    target = problem.analytic(n)
    if target is not None:
        report = replace(
            report,
            analytic=target,
            rel_error_analytic=relative_error(report.value, target),
        )
    if check_fd:
        fd_value = finite_difference_derivatives(problem, n, fd_steps)[n - 1]
        report = replace(
            report, fd=fd_value, rel_error_fd=relative_error(report.value, fd_value)
        )
    return report
