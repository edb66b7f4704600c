"""Constructive and optimizing solvers for each fairness notion."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from flatsplit.checkers import (
    InternalInconsistencyError,
    Verdict,
    check_strong_nef,
    preferred_set,
)
from flatsplit.lp import LpBuilder, LpOutcome
from flatsplit.matching import welfare_max_profile
from flatsplit.model import (
    Assignment,
    Instance,
    PartialSolution,
    PriceMatrix,
    Solution,
    utilities_in,
    welfare,
)
from flatsplit.pricing import (
    add_ef_rows,
    equal_utility_prices,
    maximin_ef_profile,
)


class SupportCapError(ValueError):
    """Support enumeration would explode; the apartment count is capped."""


DEF_SUPPORT_CAP = 12


@dataclass(frozen=True)
class Objective:
    """An affine function of the chosen apartment's utility vector."""

    coeffs: tuple[Fraction, ...]
    constant: Fraction = Fraction(0)

    def evaluate(self, utils: Sequence[Fraction]) -> Fraction:
        return sum(
            (c * u for c, u in zip(self.coeffs, utils)), Fraction(0)
        ) + self.constant


def maximin_objective(n: int) -> tuple[Objective, ...]:
    """Maximize the utility of the least happy player."""
    unit = [Fraction(0)] * n
    out = []
    for i in range(n):
        coeffs = list(unit)
        coeffs[i] = Fraction(1)
        out.append(Objective(tuple(coeffs)))
    return tuple(out)


def equitability_objective(n: int) -> tuple[Objective, ...]:
    """Minimize the largest utility gap between any two players.

    With one player there is no disparity; the constant-zero objective makes
    every solution optimal with value 0.
    """
    if n == 1:
        return (Objective((Fraction(0),)),)
    out = []
    for i in range(n):
        for i2 in range(n):
            if i2 == i:
                continue
            coeffs = [Fraction(0)] * n
            coeffs[i] = Fraction(1)
            coeffs[i2] = Fraction(-1)
            out.append(Objective(tuple(coeffs)))
    return tuple(out)


def objective_value(objectives: Sequence[Objective], utils: Sequence[Fraction]) -> Fraction:
    return min(obj.evaluate(utils) for obj in objectives)


def _welfare_argmax(inst: Instance, asg: Assignment) -> list[int]:
    welfares = [welfare(inst, asg, j) for j in range(inst.m)]
    top = max(welfares)
    return [j for j in range(inst.m) if welfares[j] == top]


# ---------------------------------------------------------------------------
# universal envy-freeness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UefOutcome:
    found: bool
    solution: Optional[Solution] = None


def _uef_lp(inst: Instance, asg: Assignment, j_star: int) -> LpOutcome:
    b = LpBuilder()
    p = [[b.var(f"p_{j}_{k}") for k in range(inst.n)] for j in range(inst.m)]
    for j in range(inst.m):
        b.eq({p[j][k]: 1 for k in range(inst.n)}, inst.rents[j])
    for i in range(inst.n):
        own = asg.room_of(i, j_star)
        for j in range(inst.m):
            for i2 in range(inst.n):
                if j == j_star and i2 == i:
                    continue
                room = asg.room_of(i2, j)
                # V_i(own) - p(own) >= V_i(room) - p(room)
                b.ge(
                    {p[j][room]: 1, p[j_star][own]: -1},
                    inst.values[i][j][room] - inst.values[i][j_star][own],
                )
    return b.solve()


def solve_uef(inst: Instance) -> UefOutcome:
    """Search for a universally envy-free solution.

    Uses the canonical welfare-maximizing assignment and checks one
    feasibility LP per candidate chosen apartment.  Candidates outside the
    welfare argmax are skipped: universal envy-freeness implies consensus,
    and a consensus apartment must maximize assigned welfare, so those LPs
    are infeasible by construction.
    """
    asg = welfare_max_profile(inst)
    candidates = set(_welfare_argmax(inst, asg))
    for j_star in range(inst.m):
        if j_star not in candidates:
            continue
        out = _uef_lp(inst, asg, j_star)
        if out.optimal:
            prices = PriceMatrix(
                tuple(
                    tuple(out.point[f"p_{j}_{k}"] for k in range(inst.n))
                    for j in range(inst.m)
                )
            )
            return UefOutcome(found=True, solution=Solution(PartialSolution(asg, prices), j_star))
    return UefOutcome(found=False)


# ---------------------------------------------------------------------------
# negotiated envy-freeness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NefConstruction:
    solution: Solution
    witness_q: PriceMatrix


def construct_nef(inst: Instance) -> NefConstruction:
    """Direct construction of a negotiated envy-free solution.

    Start from the per-apartment maximin envy-free prices Q, reprice each
    apartment so all players get equal utility there, then shift each
    player's prices uniformly so their total rent matches Q again.  The
    uniform shift preserves everyone's apartment ranking, so the best
    apartment is a consensus apartment and Q certifies reachability.

    Individual rationality of the result is only guaranteed on normalized
    instances; the construction itself works regardless.
    """
    asg = welfare_max_profile(inst)
    q = maximin_ef_profile(inst, asg)
    if q is None:  # cannot happen: the assignment maximizes welfare everywhere
        raise InternalInconsistencyError("no envy-free prices under a welfare-max assignment")
    equal_rows = [equal_utility_prices(inst, asg, j) for j in range(inst.m)]
    shifts = []
    for i in range(inst.n):
        q_total = sum((q.price(j, asg.room_of(i, j)) for j in range(inst.m)), Fraction(0))
        p_total = sum((equal_rows[j][asg.room_of(i, j)] for j in range(inst.m)), Fraction(0))
        shifts.append((q_total - p_total) / inst.m)
    assert sum(shifts, Fraction(0)) == 0, "shifts must cancel across players"
    rows = [list(r) for r in equal_rows]
    for i in range(inst.n):
        for j in range(inst.m):
            rows[j][asg.room_of(i, j)] += shifts[i]
    prices = PriceMatrix(tuple(tuple(r) for r in rows))
    j_star = min(_welfare_argmax(inst, asg))
    return NefConstruction(
        solution=Solution(PartialSolution(asg, prices), j_star), witness_q=q
    )


@dataclass(frozen=True)
class NefOptimum:
    solution: Solution
    witness_q: PriceMatrix
    value: Fraction


def _lp1(
    inst: Instance,
    asg: Assignment,
    j_prime: int,
    objectives: Sequence[Objective],
    strong_sets: Optional[Sequence[frozenset[int]]] = None,
) -> LpOutcome:
    """The joint optimization program over final prices P and start prices Q.

    Rows: the objective epigraph (z below every objective), consensus in the
    fixed apartment, envy-freeness of Q in every apartment, matching
    per-player rent totals between P and Q, and valid row sums for both.
    ``strong_sets`` additionally caps each player's price cut in the chosen
    apartment by the concession floor computed from the frozen preferred
    sets (linear in Q once frozen).
    """
    n, m = inst.n, inst.m
    b = LpBuilder()
    p = [[b.var(f"p_{j}_{k}") for k in range(n)] for j in range(m)]
    q = [[b.var(f"q_{j}_{k}") for k in range(n)] for j in range(m)]
    z = b.var("z")
    for obj in objectives:
        expr: dict[str, Fraction] = {z: Fraction(1)}
        rhs = obj.constant
        for i in range(n):
            c = obj.coeffs[i]
            if c == 0:
                continue
            room = asg.room_of(i, j_prime)
            # c * (V - p) contributes -c*p to the objective side
            expr[p[j_prime][room]] = expr.get(p[j_prime][room], Fraction(0)) + c
            rhs += c * inst.values[i][j_prime][room]
        b.le(expr, rhs)
    for i in range(n):
        own = asg.room_of(i, j_prime)
        for j in range(m):
            if j == j_prime:
                continue
            room = asg.room_of(i, j)
            b.ge(
                {p[j][room]: 1, p[j_prime][own]: -1},
                inst.values[i][j][room] - inst.values[i][j_prime][own],
            )
    for j in range(m):
        add_ef_rows(b, inst, asg, j, q[j])
        b.eq({p[j][k]: 1 for k in range(n)}, inst.rents[j])
        b.eq({q[j][k]: 1 for k in range(n)}, inst.rents[j])
    for i in range(n):
        expr = {p[j][asg.room_of(i, j)]: Fraction(1) for j in range(m)}
        for j in range(m):
            room = asg.room_of(i, j)
            expr[q[j][room]] = expr.get(q[j][room], Fraction(0)) - 1
        b.eq(expr, 0)
    if strong_sets is not None:
        for i in range(n):
            own_star = asg.room_of(i, j_prime)
            pref = strong_sets[i]
            share = Fraction(1, len(pref) + 1)
            expr = {
                p[j_prime][own_star]: Fraction(-1),
                q[j_prime][own_star]: Fraction(1) - share * len(pref),
            }
            rhs = Fraction(0)
            for j in pref:
                own_j = asg.room_of(i, j)
                expr[q[j][own_j]] = expr.get(q[j][own_j], Fraction(0)) + share
                rhs += share * (inst.values[i][j][own_j] - inst.values[i][j_prime][own_star])
            b.le(expr, rhs)
    b.maximize({z: 1})
    return b.solve()


def _extract_pq(out: LpOutcome, inst: Instance) -> tuple[PriceMatrix, PriceMatrix]:
    assert out.point is not None
    p = PriceMatrix(
        tuple(tuple(out.point[f"p_{j}_{k}"] for k in range(inst.n)) for j in range(inst.m))
    )
    q = PriceMatrix(
        tuple(tuple(out.point[f"q_{j}_{k}"] for k in range(inst.n)) for j in range(inst.m))
    )
    return p, q


def optimize_nef(
    inst: Instance,
    objectives: Sequence[Objective],
    assignment: Optional[Assignment] = None,
) -> NefOptimum:
    """Maximize the minimum of the objectives over negotiated envy-free
    solutions.

    One LP suffices: the chosen apartment is fixed to the smallest
    welfare-argmax apartment (all consensus choices give every player the
    same utility), and any welfare-maximizing assignment yields the same
    optimum, so the canonical one is used unless a caller overrides it.
    """
    if not objectives:
        raise ValueError("need at least one objective function")
    asg = assignment if assignment is not None else welfare_max_profile(inst)
    for obj in objectives:
        if len(obj.coeffs) != inst.n:
            raise ValueError("objective arity must match the player count")
    j_prime = min(_welfare_argmax(inst, asg))
    out = _lp1(inst, asg, j_prime, objectives)
    if not out.optimal:
        raise ValueError(
            "no negotiated envy-free solution under this assignment; "
            "it must maximize welfare in every apartment"
        )
    p, q = _extract_pq(out, inst)
    sol = Solution(PartialSolution(asg, p), j_prime)
    utils = utilities_in(inst, sol.partial, j_prime)
    value = objective_value(objectives, utils)
    assert value == out.value, "epigraph value must match the recomputed objective"
    return NefOptimum(solution=sol, witness_q=q, value=value)


# ---------------------------------------------------------------------------
# strong negotiated envy-freeness
# ---------------------------------------------------------------------------


def transport_prices(
    inst: Instance, from_asg: Assignment, to_asg: Assignment, prices: PriceMatrix
) -> PriceMatrix:
    """Reprice rooms so a different welfare-maximizing assignment gives every
    player the same utility in every apartment: charge each room its new
    occupant's value minus that player's old utility.  Valid rows are
    preserved exactly when both assignments maximize welfare everywhere."""
    rows = []
    for j in range(inst.m):
        row = [Fraction(0)] * inst.n
        for i in range(inst.n):
            old = from_asg.room_of(i, j)
            new = to_asg.room_of(i, j)
            row[new] = inst.values[i][j][new] - inst.values[i][j][old] + prices.price(j, old)
        rows.append(tuple(row))
    return PriceMatrix(tuple(rows))


@dataclass(frozen=True)
class StrongNefConstruction:
    solution: Solution
    start_q: PriceMatrix


def solve_strong_nef(inst: Instance) -> StrongNefConstruction:
    """Rebalancing construction of a strong negotiated envy-free solution.

    Starting from the per-apartment maximin envy-free prices, visit the
    apartments with the welfare-maximizing one first.  Whenever a player
    prefers the visited apartment to the first one, raise their rent there
    (and cut it evenly elsewhere) until indifferent, then spread the
    offsetting cuts over the players who still prefer the first apartment,
    never pushing any of them past indifference.  Each player's price cut
    in the first apartment stays within their concession floor, and totals
    never change, so the start matrix certifies the result.
    """
    n, m = inst.n, inst.m
    asg = welfare_max_profile(inst)
    q = maximin_ef_profile(inst, asg)
    if q is None:
        raise InternalInconsistencyError("no envy-free prices under a welfare-max assignment")
    first = min(_welfare_argmax(inst, asg))
    order = [first] + [j for j in range(m) if j != first]
    rows = [list(r) for r in q.rows]

    def util(i: int, j: int) -> Fraction:
        k = asg.room_of(i, j)
        return inst.values[i][j][k] - rows[j][k]

    for j in order:
        if j == first:
            continue
        while True:
            movers = [i for i in range(n) if util(i, j) > util(i, first)]
            if not movers:
                break
            i = movers[0]
            delta = util(i, j) - util(i, first)
            rows[j][asg.room_of(i, j)] += (m - 1) * delta / m
            for j2 in range(m):
                if j2 != j:
                    rows[j2][asg.room_of(i, j2)] -= delta / m
            remaining = delta
            while remaining > 0:
                takers = [i2 for i2 in range(n) if util(i2, j) < util(i2, first)]
                assert takers, "welfare-max first apartment guarantees takers"
                eps = min(util(i2, first) - util(i2, j) for i2 in takers)
                amount = remaining / len(takers) if eps >= remaining / len(takers) else eps
                for i2 in takers:
                    rows[j][asg.room_of(i2, j)] -= (m - 1) * amount / m
                    for j2 in range(m):
                        if j2 != j:
                            rows[j2][asg.room_of(i2, j2)] += amount / m
                remaining -= len(takers) * amount

    prices = PriceMatrix(tuple(tuple(r) for r in rows))
    sol = Solution(PartialSolution(asg, prices), first)
    return StrongNefConstruction(solution=sol, start_q=q)


@dataclass(frozen=True)
class StrongNefOptimum:
    solution: Solution
    witness_q: PriceMatrix
    value: Fraction
    certified: bool


def optimize_strong_nef(
    inst: Instance, objectives: Sequence[Objective]
) -> StrongNefOptimum:
    """Optimize over strong negotiated envy-free solutions.

    The concession floor depends on the witness Q, so the optimizer freezes
    each player's preferred set, solves the extended program, re-freezes
    from the found Q, and keeps any iterate the strong checker certifies.
    The rebalancing construction is always evaluated as a fallback; the
    best certified candidate wins (ties go to the optimizer's iterate).
    """
    if not objectives:
        raise ValueError("need at least one objective function")
    asg = welfare_max_profile(inst)
    j_prime = min(_welfare_argmax(inst, asg))
    base_q = maximin_ef_profile(inst, asg)
    if base_q is None:
        raise InternalInconsistencyError("no envy-free prices under a welfare-max assignment")

    candidates: list[tuple[Fraction, Solution, PriceMatrix, bool]] = []

    frozen = tuple(preferred_set(inst, asg, base_q, i, j_prime) for i in range(inst.n))
    seen: set[tuple[frozenset[int], ...]] = set()
    for _ in range(inst.n * inst.m):
        if frozen in seen:
            break
        seen.add(frozen)
        out = _lp1(inst, asg, j_prime, objectives, strong_sets=frozen)
        if not out.optimal:
            break
        p, q = _extract_pq(out, inst)
        sol = Solution(PartialSolution(asg, p), j_prime)
        realized = tuple(preferred_set(inst, asg, q, i, j_prime) for i in range(inst.n))
        if realized == frozen:
            verdict = check_strong_nef(inst, sol, candidate_q=q)
            if verdict.verdict is Verdict.TRUE:
                utils = utilities_in(inst, sol.partial, j_prime)
                candidates.append((objective_value(objectives, utils), sol, q, True))
            break
        frozen = realized

    built = solve_strong_nef(inst)
    utils = utilities_in(inst, built.solution.partial, built.solution.chosen)
    candidates.append(
        (objective_value(objectives, utils), built.solution, built.start_q, False)
    )

    best = max(candidates, key=lambda c: (c[0], c[3]))
    value, sol, q, from_lp = best
    return StrongNefOptimum(
        solution=sol, witness_q=q, value=value, certified=True
    )


# ---------------------------------------------------------------------------
# distributional envy-freeness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DefOutcome:
    found: bool
    assignment: Optional[Assignment] = None
    prices: Optional[PriceMatrix] = None
    dist: Optional[tuple[Fraction, ...]] = None


def solve_def(inst: Instance) -> DefOutcome:
    """Search for a lottery-fair solution over uniform-support lotteries.

    Supports are enumerated smallest-first (lexicographic within a size);
    for each, the lottery is uniform over the support and one feasibility
    LP decides whether prices exist with no expected envy and with every
    supported apartment optimal for every player.
    """
    if inst.m > DEF_SUPPORT_CAP:
        raise SupportCapError(
            f"support enumeration cap exceeded: m={inst.m} > {DEF_SUPPORT_CAP}"
        )
    asg = welfare_max_profile(inst)
    n, m = inst.n, inst.m
    for size in range(1, m + 1):
        weight = Fraction(1, size)
        for support in combinations(range(m), size):
            b = LpBuilder()
            p = [[b.var(f"p_{j}_{k}") for k in range(n)] for j in range(m)]
            for j in range(m):
                b.eq({p[j][k]: 1 for k in range(n)}, inst.rents[j])
            for i in range(n):
                for i2 in range(n):
                    if i2 == i:
                        continue
                    # expected utility of own rooms >= of i2's rooms
                    expr: dict[str, Fraction] = {}
                    rhs = Fraction(0)
                    for j in support:
                        own = asg.room_of(i, j)
                        other = asg.room_of(i2, j)
                        expr[p[j][own]] = expr.get(p[j][own], Fraction(0)) - weight
                        expr[p[j][other]] = expr.get(p[j][other], Fraction(0)) + weight
                        rhs += weight * (
                            inst.values[i][j][other] - inst.values[i][j][own]
                        )
                    b.ge(expr, rhs)
                for j_s in support:
                    own_s = asg.room_of(i, j_s)
                    for j in range(m):
                        if j == j_s:
                            continue
                        own_j = asg.room_of(i, j)
                        b.ge(
                            {p[j][own_j]: 1, p[j_s][own_s]: -1},
                            inst.values[i][j][own_j] - inst.values[i][j_s][own_s],
                        )
            out = b.solve()
            if out.optimal:
                prices = PriceMatrix(
                    tuple(
                        tuple(out.point[f"p_{j}_{k}"] for k in range(n))
                        for j in range(m)
                    )
                )
                dist = tuple(
                    weight if j in support else Fraction(0) for j in range(m)
                )
                return DefOutcome(found=True, assignment=asg, prices=prices, dist=dist)
    return DefOutcome(found=False)
