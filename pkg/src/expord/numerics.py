"""Exact rational arithmetic and an exact dense LP solver.

Every quantity in this module is a ``fractions.Fraction``.  The solver is a
two-phase primal simplex with Bland's anti-cycling rule, so it terminates on
every input and never approximates.  Outcomes carry machine-checkable
evidence: an optimal point, a Farkas certificate of infeasibility, or an
unbounded ray.  The certificates are verified by substitution before they are
returned, which keeps every caller honest.

The solver is meant for the small dense programs that arise when comparing
finite statistical experiments (tens of variables, tens of rows).  It makes
no attempt at sparsity or revised-simplex efficiency.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]

LE = "<="
EQ = "="
GE = ">="
RELATIONS = (LE, EQ, GE)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+|\.\d+)?$")


class InvalidInput(ValueError):
    """A malformed object or argument was rejected before any computation."""


def parse_rational(text: str) -> Fraction:
    """Parse ``'a/b'`` or a finite decimal string into an exact Fraction.

    Accepts optional sign, an integer, a ratio of integers, or a decimal
    with a fractional part.  Anything else (floats in scientific notation,
    infinities, empty strings) is rejected.
    """
    if not isinstance(text, str):
        raise InvalidInput(f"expected a string, got {type(text).__name__}")
    stripped = text.strip()
    if not _RATIONAL_RE.match(stripped):
        raise InvalidInput(f"not a rational literal: {text!r}")
    if "/" in stripped:
        num_text, den_text = stripped.split("/")
        den = int(den_text)
        if den == 0:
            raise InvalidInput(f"zero denominator: {text!r}")
        return Fraction(int(num_text), den)
    return Fraction(stripped)


def as_rational(value: RationalLike) -> Fraction:
    """Coerce an int, Fraction, or rational string to a Fraction.

    Floats are rejected on purpose: silently converting binary floats
    would smuggle rounding error into exact computations.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidInput("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise InvalidInput(f"cannot interpret {value!r} as an exact rational")


def format_rational(value: Fraction) -> str:
    """Render a Fraction as ``'a/b'`` (or ``'a'`` when integral)."""
    return str(value)


@dataclass(frozen=True)
class LinearProgram:
    """A linear program in exact rationals.

    ``rows`` is a tuple of ``(coefficients, relation, rhs)`` triples where
    ``relation`` is one of ``"<="``, ``"="``, ``">="``.  ``nonneg[j]`` marks
    variable ``j`` as sign-constrained; the rest are free.
    """

    objective: tuple[Fraction, ...]
    sense: str
    rows: tuple[tuple[tuple[Fraction, ...], str, Fraction], ...]
    nonneg: tuple[bool, ...]

    def __post_init__(self) -> None:
        n = len(self.objective)
        if n == 0:
            raise InvalidInput("a linear program needs at least one variable")
        if self.sense not in ("min", "max"):
            raise InvalidInput(f"sense must be 'min' or 'max', got {self.sense!r}")
        if len(self.nonneg) != n:
            raise InvalidInput("nonneg flags must match the variable count")
        for coeffs, relation, _rhs in self.rows:
            if len(coeffs) != n:
                raise InvalidInput(
                    f"row has {len(coeffs)} coefficients, expected {n}"
                )
            if relation not in RELATIONS:
                raise InvalidInput(f"unknown relation {relation!r}")
        if not self.rows and all(c == 0 for c in self.objective):
            raise InvalidInput("program has neither constraints nor an objective")

    @property
    def n_variables(self) -> int:
        return len(self.objective)


def linear_program(
    objective: Sequence[RationalLike],
    rows: Iterable[tuple[Sequence[RationalLike], str, RationalLike]],
    sense: str = "min",
    nonneg: Sequence[bool] | None = None,
) -> LinearProgram:
    """Build a validated :class:`LinearProgram` from loosely typed input."""
    obj = tuple(as_rational(c) for c in objective)
    prepared = tuple(
        (tuple(as_rational(c) for c in coeffs), relation, as_rational(rhs))
        for coeffs, relation, rhs in rows
    )
    flags = tuple(True for _ in obj) if nonneg is None else tuple(bool(f) for f in nonneg)
    return LinearProgram(objective=obj, sense=sense, rows=prepared, nonneg=flags)


@dataclass(frozen=True)
class LpOutcome:
    """Result of :func:`solve`, always in exact rationals.

    Exactly one of the three statuses is set.  ``x`` and ``objective`` are
    present when optimal, ``farkas`` when infeasible, and ``ray`` (plus the
    feasible point ``x`` it emanates from) when unbounded.
    """

    status: str
    x: tuple[Fraction, ...] | None = None
    objective: Fraction | None = None
    farkas: tuple[Fraction, ...] | None = None
    ray: tuple[Fraction, ...] | None = None


def evaluate_row(coeffs: Sequence[Fraction], x: Sequence[Fraction]) -> Fraction:
    return sum((c * v for c, v in zip(coeffs, x)), Fraction(0))


def solution_feasible(lp: LinearProgram, x: Sequence[Fraction]) -> bool:
    """Exact feasibility check of a candidate point."""
    if len(x) != lp.n_variables:
        return False
    for flag, value in zip(lp.nonneg, x):
        if flag and value < 0:
            return False
    for coeffs, relation, rhs in lp.rows:
        lhs = evaluate_row(coeffs, x)
        if relation == LE and lhs > rhs:
            return False
        if relation == GE and lhs < rhs:
            return False
        if relation == EQ and lhs != rhs:
            return False
    return True


def farkas_verifies(lp: LinearProgram, y: Sequence[Fraction]) -> bool:
    """Check a Farkas certificate of infeasibility by substitution.

    The certificate is one multiplier per row with y_i <= 0 on "<=" rows,
    y_i >= 0 on ">=" rows, and free on "=" rows.  Infeasibility follows
    from sum_i y_i a_ij <= 0 for every sign-constrained variable j (== 0
    for free variables) together with y . b > 0: any feasible x would give
    y . b <= sum_j (y^T A)_j x_j <= 0.
    """
    if len(y) != len(lp.rows):
        return False
    for multiplier, (_coeffs, relation, _rhs) in zip(y, lp.rows):
        if relation == LE and multiplier > 0:
            return False
        if relation == GE and multiplier < 0:
            return False
    for j in range(lp.n_variables):
        aggregate = sum(
            (multiplier * row[0][j] for multiplier, row in zip(y, lp.rows)),
            Fraction(0),
        )
        if lp.nonneg[j]:
            if aggregate > 0:
                return False
        elif aggregate != 0:
            return False
    combination = sum(
        (multiplier * row[2] for multiplier, row in zip(y, lp.rows)), Fraction(0)
    )
    return combination > 0


def dual_program(lp: LinearProgram) -> LinearProgram:
    """The exact LP dual, with one free variable per primal row.

    Sign restrictions on the multipliers are expressed as explicit unit
    rows, so an optimal dual point is literally the vector of multipliers
    for the primal rows in order.  Strong duality makes the two optimal
    objectives equal whenever both programs are feasible.
    """
    if not lp.rows:
        raise InvalidInput("the dual needs at least one primal row")
    minimizing = lp.sense == "min"
    n_rows = len(lp.rows)
    rows: list[tuple[tuple[Fraction, ...], str, Fraction]] = []
    for j in range(lp.n_variables):
        column = tuple(lp.rows[i][0][j] for i in range(n_rows))
        if lp.nonneg[j]:
            rows.append((column, LE if minimizing else GE, lp.objective[j]))
        else:
            rows.append((column, EQ, lp.objective[j]))
    for i, (_coeffs, relation, _rhs) in enumerate(lp.rows):
        unit = tuple(
            Fraction(1) if k == i else Fraction(0) for k in range(n_rows)
        )
        if relation == LE:
            rows.append((unit, LE if minimizing else GE, Fraction(0)))
        elif relation == GE:
            rows.append((unit, GE if minimizing else LE, Fraction(0)))
    return LinearProgram(
        objective=tuple(row[2] for row in lp.rows),
        sense="max" if minimizing else "min",
        rows=tuple(rows),
        nonneg=tuple(False for _ in range(n_rows)),
    )


def ray_verifies(lp: LinearProgram, ray: Sequence[Fraction]) -> bool:
    """Check an unbounded ray: feasible direction with improving objective."""
    if len(ray) != lp.n_variables or all(r == 0 for r in ray):
        return False
    for flag, value in zip(lp.nonneg, ray):
        if flag and value < 0:
            return False
    for coeffs, relation, _rhs in lp.rows:
        drift = evaluate_row(coeffs, ray)
        if relation == LE and drift > 0:
            return False
        if relation == GE and drift < 0:
            return False
        if relation == EQ and drift != 0:
            return False
    gain = evaluate_row(lp.objective, ray)
    return gain < 0 if lp.sense == "min" else gain > 0


class _Tableau:
    """Dense simplex tableau over Fractions with Bland pivoting."""

    def __init__(self, rows: list[list[Fraction]], basis: list[int]) -> None:
        self.rows = rows              # each row: coefficients + [rhs]
        self.basis = basis            # basis[i] = column basic in row i
        self.n_cols = len(rows[0]) - 1 if rows else 0

    def reduced_costs(self, cost: list[Fraction]) -> list[Fraction]:
        reduced = list(cost)
        for i, row in enumerate(self.rows):
            basic_cost = cost[self.basis[i]]
            if basic_cost == 0:
                continue
            for j in range(self.n_cols):
                if row[j] != 0:
                    reduced[j] -= basic_cost * row[j]
        return reduced

    def pivot(self, pivot_row: int, pivot_col: int) -> None:
        row = self.rows[pivot_row]
        factor = row[pivot_col]
        if factor != 1:
            self.rows[pivot_row] = row = [entry / factor for entry in row]
        for i, other in enumerate(self.rows):
            if i == pivot_row or other[pivot_col] == 0:
                continue
            scale = other[pivot_col]
            self.rows[i] = [a - scale * b for a, b in zip(other, row)]
        self.basis[pivot_row] = pivot_col

    def minimize(self, cost: list[Fraction], banned: frozenset[int]) -> tuple[str, int | None]:
        """Run Bland's rule to optimality or detect an unbounded column.

        Returns ("optimal", None) or ("unbounded", entering_column).
        Entering choice: lowest-index column with negative reduced cost.
        Leaving choice: lowest basic-variable index among minimum ratios.
        """
        basic = set(self.basis)
        while True:
            reduced = self.reduced_costs(cost)
            entering = None
            for j in range(self.n_cols):
                if j in banned or j in basic:
                    continue
                if reduced[j] < 0:
                    entering = j
                    break
            if entering is None:
                return OPTIMAL, None
            pivot_row = None
            best_ratio: Fraction | None = None
            for i, row in enumerate(self.rows):
                if row[entering] <= 0:
                    continue
                ratio = row[-1] / row[entering]
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and self.basis[i] < self.basis[pivot_row])
                ):
                    best_ratio = ratio
                    pivot_row = i
            if pivot_row is None:
                return UNBOUNDED, entering
            basic.discard(self.basis[pivot_row])
            basic.add(entering)
            self.pivot(pivot_row, entering)

    def basic_solution(self) -> dict[int, Fraction]:
        return {self.basis[i]: self.rows[i][-1] for i in range(len(self.rows))}


def solve(lp: LinearProgram) -> LpOutcome:
    """Solve an exact LP, returning a verified outcome.

    The program is brought to standard form (free variables split, rows
    sign-normalized, slacks and artificials appended), then phase one
    minimizes the artificial mass.  A positive phase-one optimum yields a
    Farkas certificate read off the initial identity columns; otherwise
    phase two optimizes the true objective with artificials barred from
    re-entering the basis.
    """
    n = lp.n_variables
    minimize = lp.sense == "min"
    cost_orig = list(lp.objective) if minimize else [-c for c in lp.objective]

    # Structural columns: one per nonnegative variable, a +/- pair per free one.
    col_var: list[tuple[int, int]] = []
    for j in range(n):
        col_var.append((j, 1))
        if not lp.nonneg[j]:
            col_var.append((j, -1))
    n_struct = len(col_var)

    m = len(lp.rows)
    flipped = [row[2] < 0 for row in lp.rows]
    prepared: list[tuple[list[Fraction], str, Fraction]] = []
    for flip, (coeffs, relation, rhs) in zip(flipped, lp.rows):
        if flip:
            coeffs = [-c for c in coeffs]
            rhs = -rhs
            relation = {LE: GE, GE: LE, EQ: EQ}[relation]
        else:
            coeffs = list(coeffs)
        prepared.append((coeffs, relation, rhs))

    n_slack = sum(1 for _c, relation, _r in prepared if relation != EQ)
    n_art = sum(1 for _c, relation, _r in prepared if relation != LE)
    n_cols = n_struct + n_slack + n_art

    rows: list[list[Fraction]] = []
    basis: list[int] = []
    init_col: list[int] = []      # identity column for each row, for duals
    init_cost: list[Fraction] = []  # phase-one cost of that column
    slack_at = n_struct
    art_at = n_struct + n_slack
    zero = Fraction(0)
    one = Fraction(1)
    for coeffs, relation, rhs in prepared:
        row = [zero] * n_cols + [rhs]
        for col, (var, sign) in enumerate(col_var):
            if coeffs[var] != 0:
                row[col] = sign * coeffs[var]
        if relation != EQ:
            row[slack_at] = one if relation == LE else -one
            slack_at += 1
        if relation == LE:
            basis.append(slack_at - 1)
            init_col.append(slack_at - 1)
            init_cost.append(zero)
        else:
            row[art_at] = one
            basis.append(art_at)
            init_col.append(art_at)
            init_cost.append(one)
            art_at += 1
        rows.append(row)

    artificial_cols = frozenset(range(n_struct + n_slack, n_cols))
    tableau = _Tableau(rows, basis)

    def extract_point() -> tuple[Fraction, ...]:
        values = tableau.basic_solution()
        point = [zero] * n
        for col, value in values.items():
            if col < n_struct:
                var, sign = col_var[col]
                point[var] += sign * value
        return tuple(point)

    if m > 0:
        phase1_cost = [one if j in artificial_cols else zero for j in range(n_cols)]
        status, _ = tableau.minimize(phase1_cost, banned=frozenset())
        assert status == OPTIMAL, "phase one is bounded below by zero"
        residue = sum(
            (tableau.rows[i][-1] for i in range(m) if tableau.basis[i] in artificial_cols),
            zero,
        )
        if residue > 0:
            reduced = tableau.reduced_costs(phase1_cost)
            y = []
            for i in range(m):
                multiplier = init_cost[i] - reduced[init_col[i]]
                y.append(-multiplier if flipped[i] else multiplier)
            y = tuple(y)
            assert farkas_verifies(lp, y), "simplex produced a bad Farkas certificate"
            return LpOutcome(status=INFEASIBLE, farkas=y)

        # Drive any degenerate artificials out of the basis; a row whose
        # structural and slack entries are all zero is redundant and dropped.
        for i in range(m - 1, -1, -1):
            if tableau.basis[i] not in artificial_cols:
                continue
            pivot_col = None
            for j in range(n_struct + n_slack):
                if tableau.rows[i][j] != 0:
                    pivot_col = j
                    break
            if pivot_col is not None:
                tableau.pivot(i, pivot_col)
            else:
                del tableau.rows[i]
                del tableau.basis[i]

    phase2_cost = [zero] * n_cols
    for col, (var, sign) in enumerate(col_var):
        phase2_cost[col] = sign * cost_orig[var]
    status, entering = tableau.minimize(phase2_cost, banned=artificial_cols)

    if status == UNBOUNDED:
        direction_std = {entering: one}
        for i, row in enumerate(tableau.rows):
            if row[entering] != 0:
                direction_std[tableau.basis[i]] = -row[entering]
        ray = [zero] * n
        for col, value in direction_std.items():
            if col < n_struct:
                var, sign = col_var[col]
                ray[var] += sign * value
        ray = tuple(ray)
        assert ray_verifies(lp, ray), "simplex produced a bad unbounded ray"
        return LpOutcome(status=UNBOUNDED, x=extract_point(), ray=ray)

    point = extract_point()
    assert solution_feasible(lp, point), "simplex produced an infeasible optimum"
    value = evaluate_row(lp.objective, point)
    return LpOutcome(status=OPTIMAL, x=point, objective=value)
