"""Exact rational linear programming via two-phase simplex.

Everything is computed over exact rationals (gmpy2.mpq when available,
fractions.Fraction otherwise), so returned points satisfy constraints with
exact equality and verdicts like "infeasible" are certain, not numeric.

Design notes:

* Bland's rule everywhere, so the solver terminates on degenerate programs
  and is fully deterministic: the same program always yields the same
  outcome and the same point.
* Variables are free (unrestricted in sign) unless declared nonnegative.
  Free variables are handled by an exact presolve that substitutes them out
  of equality rows where possible; the remainder are split into positive
  and negative parts.
* Feasibility-only programs stop after phase 1 and return the basic
  feasible point found there.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from flatsplit.model import MoneyLike, money

try:  # gmpy2 speeds pivoting up ~3x; the code runs unchanged on Fraction
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

_ZERO = _Q(0)
_ONE = _Q(1)

LE, EQ, GE = "<=", "==", ">="
_RELATIONS = (LE, EQ, GE)


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LpFormatError(ValueError):
    """The program is structurally malformed (dimension mismatch etc.)."""


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    relation: str
    rhs: Fraction


@dataclass(frozen=True)
class LinearProgram:
    """A linear program over named variables.

    ``objective`` is a coefficient vector to maximize, or None for a pure
    feasibility problem.  ``nonneg`` marks variables restricted to >= 0.
    """

    variables: tuple[str, ...]
    constraints: tuple[Constraint, ...]
    objective: Optional[tuple[Fraction, ...]] = None
    nonneg: tuple[bool, ...] = ()

    def __post_init__(self) -> None:
        nvar = len(self.variables)
        if len(set(self.variables)) != nvar:
            raise LpFormatError("duplicate variable names")
        if self.objective is not None and len(self.objective) != nvar:
            raise LpFormatError(
                f"objective has {len(self.objective)} coefficients for {nvar} variables"
            )
        if self.nonneg and len(self.nonneg) != nvar:
            raise LpFormatError("nonneg flags do not match variable count")
        for c in self.constraints:
            if len(c.coeffs) != nvar:
                raise LpFormatError(
                    f"constraint has {len(c.coeffs)} coefficients for {nvar} variables"
                )
            if c.relation not in _RELATIONS:
                raise LpFormatError(f"unknown relation {c.relation!r}")


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    point: Optional[dict[str, Fraction]] = None
    value: Optional[Fraction] = None

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class LpBuilder:
    """Convenience builder using sparse {variable: coefficient} expressions."""

    def __init__(self) -> None:
        self._vars: list[str] = []
        self._index: dict[str, int] = {}
        self._nonneg: list[bool] = []
        self._rows: list[tuple[dict[str, Fraction], str, Fraction]] = []
        self._objective: Optional[dict[str, Fraction]] = None

    def var(self, name: str, nonneg: bool = False) -> str:
        if name in self._index:
            raise LpFormatError(f"variable {name!r} declared twice")
        self._index[name] = len(self._vars)
        self._vars.append(name)
        self._nonneg.append(nonneg)
        return name

    def _norm(self, expr: Mapping[str, MoneyLike]) -> dict[str, Fraction]:
        out: dict[str, Fraction] = {}
        for name, coeff in expr.items():
            if name not in self._index:
                raise LpFormatError(f"unknown variable {name!r}")
            out[name] = money(coeff)
        return out

    def le(self, expr: Mapping[str, MoneyLike], rhs: MoneyLike) -> None:
        self._rows.append((self._norm(expr), LE, money(rhs)))

    def ge(self, expr: Mapping[str, MoneyLike], rhs: MoneyLike) -> None:
        self._rows.append((self._norm(expr), GE, money(rhs)))

    def eq(self, expr: Mapping[str, MoneyLike], rhs: MoneyLike) -> None:
        self._rows.append((self._norm(expr), EQ, money(rhs)))

    def maximize(self, expr: Mapping[str, MoneyLike]) -> None:
        self._objective = self._norm(expr)

    def build(self) -> LinearProgram:
        names = tuple(self._vars)
        idx = self._index
        constraints = tuple(
            Constraint(
                coeffs=tuple(expr.get(v, Fraction(0)) for v in names),
                relation=rel,
                rhs=rhs,
            )
            for expr, rel, rhs in self._rows
        )
        objective = None
        if self._objective is not None:
            objective = tuple(self._objective.get(v, Fraction(0)) for v in names)
        return LinearProgram(
            variables=names,
            constraints=constraints,
            objective=objective,
            nonneg=tuple(self._nonneg),
        )

    def solve(self) -> LpOutcome:
        return solve(self.build())


# ---------------------------------------------------------------------------
# simplex internals
# ---------------------------------------------------------------------------


def _eliminate_equalities(
    nvar: int,
    rows: list[list],
    free: Sequence[bool],
):
    """Gaussian-eliminate free variables out of equality rows.

    Returns (subs, remaining_rows, inconsistent).  ``subs`` is an ordered
    list of (var, expr, const) entries meaning ``x_var = const +
    sum(expr[u] * x_u)``.  An entry's expression never references variables
    eliminated earlier, so forward order substitutes expressions and
    reverse order evaluates a point.  Only free variables are eliminated;
    sign-restricted ones keep their bound.
    """
    subs: list[tuple[int, list, object]] = []
    work = [[list(c), rel, rhs] for c, rel, rhs in rows]
    eq_rows = [r for r in work if r[1] == EQ]
    other = [r for r in work if r[1] != EQ]
    eliminated: set[int] = set()

    for row in eq_rows:
        coeffs, _, rhs = row
        pivot = -1
        for v in range(nvar):
            if v not in eliminated and free[v] and coeffs[v] != 0:
                pivot = v
                break
        if pivot < 0:
            if any(c != 0 for c in coeffs):
                other.append(row)  # equality among surviving vars only
            elif rhs != 0:
                return [], [], True
            continue
        inv = _ONE / coeffs[pivot]
        expr = [-c * inv for c in coeffs]
        const = rhs * inv
        expr[pivot] = _ZERO
        for target in eq_rows + other:
            if target is row:
                continue
            tc = target[0]
            f = tc[pivot]
            if f == 0:
                continue
            for v in range(nvar):
                if expr[v] != 0:
                    tc[v] += f * expr[v]
            tc[pivot] = _ZERO
            target[2] = target[2] - f * const
        subs.append((pivot, expr, const))
        eliminated.add(pivot)

    kept = [(r[0], r[1], r[2]) for r in other]
    return subs, kept, False


class _Tableau:
    """Dense simplex tableau with Bland pivoting over exact rationals."""

    def __init__(self, rows: list[list], b: list, basis: list[int], ncols: int):
        self.rows = rows
        self.b = b
        self.basis = basis
        self.ncols = ncols

    def pivot(self, r: int, c: int) -> None:
        rows, b = self.rows, self.b
        prow = rows[r]
        inv = _ONE / prow[c]
        if inv != 1:
            rows[r] = prow = [x * inv for x in prow]
            b[r] *= inv
        pb = b[r]
        for i in range(len(rows)):
            if i == r:
                continue
            f = rows[i][c]
            if f == 0:
                continue
            row = rows[i]
            rows[i] = [a - f * p for a, p in zip(row, prow)]
            b[i] -= f * pb
        self.basis[r] = c

    def run(self, cost: list, allowed: int) -> tuple[str, list, object]:
        """Maximize cost over columns [0, allowed); returns (status, reduced
        cost row, objective value)."""
        rows, b, basis = self.rows, self.b, self.basis
        red = list(cost)
        zval = _ZERO
        # make reduced costs consistent with the starting basis
        for i, bc in enumerate(basis):
            f = red[bc]
            if f != 0:
                prow = rows[i]
                for j in range(self.ncols):
                    if prow[j] != 0:
                        red[j] -= f * prow[j]
                zval += f * b[i]
        while True:
            enter = -1
            for j in range(allowed):
                if red[j] > 0:
                    enter = j
                    break
            if enter < 0:
                return "optimal", red, zval
            leave = -1
            best = None
            for i in range(len(rows)):
                a = rows[i][enter]
                if a > 0:
                    ratio = b[i] / a
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                        best = ratio
                        leave = i
            if leave < 0:
                return "unbounded", red, zval
            self.pivot(leave, enter)
            f = red[enter]
            prow = rows[leave]
            for j in range(self.ncols):
                if prow[j] != 0:
                    red[j] -= f * prow[j]
            zval += f * b[leave]


def solve(lp: LinearProgram) -> LpOutcome:
    """Solve exactly; see module docstring for guarantees."""
    nvar = len(lp.variables)
    nonneg = list(lp.nonneg) if lp.nonneg else [False] * nvar
    free = [not nn for nn in nonneg]

    rows = [
        ([_Q(x) for x in c.coeffs], c.relation, _Q(c.rhs))
        for c in lp.constraints
    ]
    subs, kept, inconsistent = _eliminate_equalities(nvar, rows, free)
    if inconsistent:
        return LpOutcome(status=LpStatus.INFEASIBLE)

    # column layout: for each original variable either one column (nonneg)
    # or a +/- pair (free); eliminated variables get no column.
    eliminated = {v for v, _, _ in subs}
    col_of_pos: dict[int, int] = {}
    col_of_neg: dict[int, int] = {}
    ncols = 0
    for v in range(nvar):
        if v in eliminated:
            continue
        col_of_pos[v] = ncols
        ncols += 1
        if free[v]:
            col_of_neg[v] = ncols
            ncols += 1

    def expand(coeffs: Sequence) -> list:
        row = [_ZERO] * ncols
        for v, cv in enumerate(coeffs):
            if cv == 0 or v in eliminated:
                continue
            row[col_of_pos[v]] = cv
            if v in col_of_neg:
                row[col_of_neg[v]] = -cv
        return row

    # standard form: every row becomes an equality with rhs >= 0
    mat: list[list] = []
    rhs: list = []
    slack_info: list[tuple[int, int]] = []  # (row index, sign of slack after normalization)
    for coeffs, rel, b in kept:
        row = expand(coeffs)
        if rel == GE:
            row = [-x for x in row]
            b = -b
            rel = LE
        s = 1 if rel == LE else 0
        if b < 0:
            row = [-x for x in row]
            b = -b
            s = -s
        mat.append(row)
        rhs.append(b)
        slack_info.append((len(mat) - 1, s))

    nrows = len(mat)
    slack_col: dict[int, int] = {}
    for r, s in slack_info:
        if s != 0:
            slack_col[r] = ncols
            for i in range(nrows):
                mat[i].append(_ONE if (i == r and s > 0) else (-_ONE if (i == r and s < 0) else _ZERO))
            ncols += 1

    basis = [-1] * nrows
    art_cols: list[int] = []
    for r in range(nrows):
        s = slack_info[r][1]
        if s > 0:
            basis[r] = slack_col[r]
            continue
        for i in range(nrows):
            mat[i].append(_ONE if i == r else _ZERO)
        basis[r] = ncols
        art_cols.append(ncols)
        ncols += 1

    tab = _Tableau(mat, rhs, basis, ncols)

    if art_cols:
        cost1 = [_ZERO] * ncols
        for c in art_cols:
            cost1[c] = -_ONE
        status, _, zval = tab.run(cost1, allowed=ncols)
        if zval != 0:
            return LpOutcome(status=LpStatus.INFEASIBLE)
        # pivot leftover artificials out of the basis (they sit at level 0)
        art_set = set(art_cols)
        for r in range(nrows):
            if tab.basis[r] in art_set:
                target = -1
                for j in range(ncols):
                    if j not in art_set and tab.rows[r][j] != 0:
                        target = j
                        break
                if target >= 0:
                    tab.pivot(r, target)
        drop = [r for r in range(nrows) if tab.basis[r] in art_set]
        for r in sorted(drop, reverse=True):
            del tab.rows[r]
            del tab.b[r]
            del tab.basis[r]
        nrows = len(tab.rows)
        allowed = min(c for c in art_cols)
    else:
        allowed = ncols

    value = None
    if lp.objective is not None:
        # substitute eliminated variables into the objective (forward order:
        # each expression may reference later-eliminated variables only)
        coeffs = [_Q(x) for x in lp.objective]
        obj_const = _ZERO
        for v, expr, const in subs:
            f = coeffs[v]
            if f == 0:
                continue
            obj_const += f * const
            for u in range(nvar):
                if expr[u] != 0:
                    coeffs[u] += f * expr[u]
            coeffs[v] = _ZERO
        cost2 = [_ZERO] * ncols
        for v in range(nvar):
            if v in eliminated or coeffs[v] == 0:
                continue
            cost2[col_of_pos[v]] += coeffs[v]
            if v in col_of_neg:
                cost2[col_of_neg[v]] -= coeffs[v]
        status, _, zval = tab.run(cost2, allowed=allowed)
        if status == "unbounded":
            return LpOutcome(status=LpStatus.UNBOUNDED)
        value = zval + obj_const

    # extract point
    xcols = [_ZERO] * ncols
    for r, bc in enumerate(tab.basis):
        xcols[bc] = tab.b[r]
    xs = [_ZERO] * nvar
    for v in range(nvar):
        if v in eliminated:
            continue
        val = xcols[col_of_pos[v]]
        if v in col_of_neg:
            val = val - xcols[col_of_neg[v]]
        xs[v] = val
    for v, expr, const in reversed(subs):
        val = const
        for u in range(nvar):
            if expr[u] != 0:
                val += expr[u] * xs[u]
        xs[v] = val

    point = {
        name: Fraction(int(xs[v].numerator), int(xs[v].denominator))
        for v, name in enumerate(lp.variables)
    }
    if lp.objective is not None:
        value_f = Fraction(int(value.numerator), int(value.denominator))
    else:
        value_f = None
    return LpOutcome(status=LpStatus.OPTIMAL, point=point, value=value_f)


def check_point(lp: LinearProgram, point: Mapping[str, Fraction]) -> bool:
    """Exact feasibility check of a candidate point; used by tests."""
    xs = [Fraction(point[v]) for v in lp.variables]
    if lp.nonneg:
        for x, nn in zip(xs, lp.nonneg):
            if nn and x < 0:
                return False
    for c in lp.constraints:
        lhs = sum((a * x for a, x in zip(c.coeffs, xs)), Fraction(0))
        if c.relation == LE and lhs > c.rhs:
            return False
        if c.relation == GE and lhs < c.rhs:
            return False
        if c.relation == EQ and lhs != c.rhs:
            return False
    return True
