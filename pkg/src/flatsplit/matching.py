"""Welfare-maximizing room assignments via exact max-weight matching.

The Hungarian algorithm runs on exact rationals, so ties are true ties and
the lexicographic tie-break below is exact: among all welfare-maximizing
bijections we return the one whose (room of player 0, room of player 1, ...)
tuple is smallest.  That makes every downstream solver reproducible.
"""

from __future__ import annotations

from fractions import Fraction

from flatsplit.model import Assignment, Instance


def hungarian_max_value(matrix: list[list[Fraction]]) -> Fraction:
    """Maximum total weight of a perfect matching of the square matrix."""
    n = len(matrix)
    if n == 0:
        return Fraction(0)
    big = sum((abs(v) for row in matrix for v in row), Fraction(1))
    # classic potentials formulation, minimizing the negated weights
    cost = [[-matrix[i][j] for j in range(n)] for i in range(n)]
    u = [Fraction(0)] * (n + 1)
    v = [Fraction(0)] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [big] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = big
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    total = Fraction(0)
    for j in range(1, n + 1):
        total += matrix[p[j] - 1][j - 1]
    return total


def _lex_smallest_max_assignment(matrix: list[list[Fraction]]) -> tuple[int, ...]:
    """Lexicographically smallest player->room map among weight maximizers."""
    n = len(matrix)
    best = hungarian_max_value(matrix)
    chosen: list[int] = []
    free_rooms = list(range(n))
    prefix = Fraction(0)
    for i in range(n):
        rest_players = list(range(i + 1, n))
        for k in list(free_rooms):
            rooms_left = [r for r in free_rooms if r != k]
            sub = [[matrix[p][r] for r in rooms_left] for p in rest_players]
            if prefix + matrix[i][k] + hungarian_max_value(sub) == best:
                chosen.append(k)
                free_rooms.remove(k)
                prefix += matrix[i][k]
                break
        else:  # pragma: no cover - a maximizer always extends
            raise AssertionError("no extension reaches the optimum")
    return tuple(chosen)


def max_weight_assignment(inst: Instance, j: int) -> tuple[int, ...]:
    """Welfare-maximizing bijection for apartment ``j`` (player -> room)."""
    inst.check_apartment(j)
    matrix = [[inst.values[i][j][k] for k in range(inst.n)] for i in range(inst.n)]
    return _lex_smallest_max_assignment(matrix)


def welfare_max_profile(inst: Instance) -> Assignment:
    """The canonical assignment: welfare-maximizing in every apartment."""
    return Assignment(tuple(max_weight_assignment(inst, j) for j in range(inst.m)))
