"""Document formats: instances, solutions, and ledgers as JSON.

All money amounts travel as strings: plain decimals whenever the amount has
a finite decimal form, exact "p/q" ratios otherwise.  Parsing is exact both
ways, so documents round-trip without loss and re-checking a written
solution reproduces the verdict bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Sequence

from flatsplit.model import (
    Assignment,
    Instance,
    PriceMatrix,
    Solution,
    money,
    money_str,
)
from flatsplit.negotiation import Negotiation, NegotiationLedger


class DocumentError(ValueError):
    """A document is malformed; the message pinpoints the offending field."""


@dataclass(frozen=True)
class Labels:
    """Display names carried by documents; the engine itself only sees
    indices."""

    players: tuple[str, ...]
    apartments: tuple[str, ...]
    rooms: tuple[tuple[str, ...], ...]

    @staticmethod
    def default(n: int, m: int) -> "Labels":
        return Labels(
            players=tuple(f"player{i + 1}" for i in range(n)),
            apartments=tuple(f"apt{j + 1}" for j in range(m)),
            rooms=tuple(
                tuple(f"apt{j + 1}-room{k + 1}" for k in range(n)) for j in range(m)
            ),
        )

    def player_index(self, name: str) -> int:
        try:
            return self.players.index(name)
        except ValueError:
            raise DocumentError(f"unknown player {name!r}") from None

    def apartment_index(self, name: str) -> int:
        try:
            return self.apartments.index(name)
        except ValueError:
            raise DocumentError(f"unknown apartment {name!r}") from None

    def room_index(self, j: int, name: str) -> int:
        try:
            return self.rooms[j].index(name)
        except ValueError:
            raise DocumentError(
                f"unknown room {name!r} in apartment {self.apartments[j]!r}"
            ) from None


def _need(doc: dict, key: str, where: str) -> Any:
    if key not in doc:
        raise DocumentError(f"{where}: missing field {key!r}")
    return doc[key]


def _parse_money(value: Any, where: str) -> Fraction:
    if not isinstance(value, str):
        raise DocumentError(
            f"{where}: money must be a string, got {type(value).__name__}"
        )
    try:
        return money(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise DocumentError(f"{where}: bad money value {value!r} ({exc})") from None


def instance_to_doc(inst: Instance, labels: Optional[Labels] = None) -> dict:
    labels = labels or Labels.default(inst.n, inst.m)
    return {
        "players": list(labels.players),
        "apartments": [
            {
                "name": labels.apartments[j],
                "rent": money_str(inst.rents[j]),
                "rooms": list(labels.rooms[j]),
            }
            for j in range(inst.m)
        ],
        "values": [
            [[money_str(v) for v in inst.values[i][j]] for j in range(inst.m)]
            for i in range(inst.n)
        ],
        "normalized": inst.normalized,
    }


def instance_from_doc(doc: dict) -> tuple[Instance, Labels]:
    if not isinstance(doc, dict):
        raise DocumentError("instance document must be a JSON object")
    players = _need(doc, "players", "instance")
    apartments = _need(doc, "apartments", "instance")
    values = _need(doc, "values", "instance")
    if not isinstance(players, list) or not players:
        raise DocumentError("instance.players must be a non-empty list")
    n = len(players)
    if not isinstance(apartments, list) or not apartments:
        raise DocumentError("instance.apartments must be a non-empty list")
    m = len(apartments)
    rents = []
    apt_names = []
    room_names = []
    for j, apt in enumerate(apartments):
        where = f"instance.apartments[{j}]"
        if not isinstance(apt, dict):
            raise DocumentError(f"{where}: must be an object")
        apt_names.append(str(_need(apt, "name", where)))
        rents.append(_parse_money(_need(apt, "rent", where), f"{where}.rent"))
        rooms = _need(apt, "rooms", where)
        if not isinstance(rooms, list) or len(rooms) != n:
            raise DocumentError(f"{where}.rooms: need exactly {n} room names")
        room_names.append(tuple(str(r) for r in rooms))
    if len(values) != n:
        raise DocumentError(f"instance.values: need one row per player ({n})")
    grid = []
    for i, per_player in enumerate(values):
        if not isinstance(per_player, list) or len(per_player) != m:
            raise DocumentError(f"instance.values[{i}]: need {m} apartment rows")
        rows = []
        for j, per_apartment in enumerate(per_player):
            where = f"instance.values[{i}][{j}]"
            if not isinstance(per_apartment, list) or len(per_apartment) != n:
                raise DocumentError(f"{where}: need {n} room values")
            rows.append(
                tuple(
                    _parse_money(v, f"{where}[{k}]")
                    for k, v in enumerate(per_apartment)
                )
            )
        grid.append(tuple(rows))
    normalized = bool(doc.get("normalized", False))
    inst = Instance(tuple(grid), tuple(rents), normalized)
    labels = Labels(
        players=tuple(str(p) for p in players),
        apartments=tuple(apt_names),
        rooms=tuple(room_names),
    )
    if len(set(labels.players)) != n:
        raise DocumentError("player names must be unique")
    if len(set(labels.apartments)) != m:
        raise DocumentError("apartment names must be unique")
    return inst, labels


def prices_to_doc(prices: PriceMatrix) -> list[list[str]]:
    return [[money_str(p) for p in row] for row in prices.rows]


def prices_from_doc(doc: Any, n: int, m: int, where: str = "prices") -> PriceMatrix:
    if not isinstance(doc, list) or len(doc) != m:
        raise DocumentError(f"{where}: need one row per apartment ({m})")
    rows = []
    for j, row in enumerate(doc):
        if not isinstance(row, list) or len(row) != n:
            raise DocumentError(f"{where}[{j}]: need {n} room prices")
        rows.append(tuple(_parse_money(v, f"{where}[{j}][{k}]") for k, v in enumerate(row)))
    return PriceMatrix(tuple(rows))


def assignment_to_doc(asg: Assignment, labels: Labels) -> list[list[str]]:
    # assignment[j][i] = room name assigned to player i in apartment j
    return [
        [labels.rooms[j][asg.room_of(i, j)] for i in range(asg.n)]
        for j in range(asg.m)
    ]


def assignment_from_doc(doc: Any, labels: Labels, n: int, m: int) -> Assignment:
    if not isinstance(doc, list) or len(doc) != m:
        raise DocumentError(f"assignment: need one row per apartment ({m})")
    perm = []
    for j, row in enumerate(doc):
        if not isinstance(row, list) or len(row) != n:
            raise DocumentError(f"assignment[{j}]: need {n} room names")
        perm.append(tuple(labels.room_index(j, str(name)) for name in row))
    try:
        return Assignment(tuple(perm))
    except ValueError as exc:
        raise DocumentError(f"assignment: {exc}") from None


def ledger_to_doc(ledger: NegotiationLedger, labels: Labels) -> dict:
    return {
        "start": [[money_str(p) for p in row] for row in ledger.start.rows],
        "steps": [
            {
                "delta": money_str(t.delta),
                "raiser": labels.players[t.i1],
                "partner": labels.players[t.i2],
                "pay_more_in": labels.apartments[t.j1],
                "pay_less_in": labels.apartments[t.j2],
            }
            for t in ledger.steps
        ],
        "end": [[money_str(p) for p in row] for row in ledger.end.rows],
    }


def ledger_from_doc(doc: dict, labels: Labels, asg: Assignment) -> NegotiationLedger:
    n, m = asg.n, asg.m
    start = prices_from_doc(_need(doc, "start", "ledger"), n, m, "ledger.start")
    end = prices_from_doc(_need(doc, "end", "ledger"), n, m, "ledger.end")
    steps = []
    raw_steps = _need(doc, "steps", "ledger")
    if not isinstance(raw_steps, list):
        raise DocumentError("ledger.steps must be a list")
    for t, step in enumerate(raw_steps):
        where = f"ledger.steps[{t}]"
        steps.append(
            Negotiation(
                delta=_parse_money(_need(step, "delta", where), f"{where}.delta"),
                i1=labels.player_index(str(_need(step, "raiser", where))),
                i2=labels.player_index(str(_need(step, "partner", where))),
                j1=labels.apartment_index(str(_need(step, "pay_more_in", where))),
                j2=labels.apartment_index(str(_need(step, "pay_less_in", where))),
            )
        )
    try:
        return NegotiationLedger(asg, start, tuple(steps), end)
    except ValueError as exc:
        raise DocumentError(f"ledger does not replay: {exc}") from None


def solution_to_doc(
    inst: Instance,
    labels: Labels,
    notion: str,
    objective: str,
    sol: Optional[Solution],
    utilities: Optional[Sequence[Fraction]] = None,
    objective_value: Optional[Fraction] = None,
    witness_q: Optional[PriceMatrix] = None,
    ledger: Optional[NegotiationLedger] = None,
    dist: Optional[Sequence[Fraction]] = None,
) -> dict:
    doc: dict[str, Any] = {
        "notion": notion,
        "objective": objective,
        "status": "solved" if sol is not None else "none-exists",
        "instance": instance_to_doc(inst, labels),
    }
    if sol is None:
        return doc
    doc["assignment"] = assignment_to_doc(sol.assignment, labels)
    doc["prices"] = prices_to_doc(sol.prices)
    doc["chosen"] = labels.apartments[sol.chosen]
    if utilities is not None:
        doc["utilities"] = [money_str(u) for u in utilities]
    if objective_value is not None:
        doc["objective_value"] = money_str(objective_value)
    doc["witness_q"] = prices_to_doc(witness_q) if witness_q is not None else None
    doc["ledger"] = ledger_to_doc(ledger, labels) if ledger is not None else None
    if dist is not None:
        doc["dist"] = [money_str(d) for d in dist]
    return doc


def solution_from_doc(doc: dict, inst: Instance, labels: Labels) -> Solution:
    if doc.get("status") == "none-exists":
        raise DocumentError("solution document records no solution")
    asg = assignment_from_doc(_need(doc, "assignment", "solution"), labels, inst.n, inst.m)
    prices = prices_from_doc(_need(doc, "prices", "solution"), inst.n, inst.m)
    chosen = labels.apartment_index(str(_need(doc, "chosen", "solution")))
    from flatsplit.model import PartialSolution

    return Solution(PartialSolution(asg, prices), chosen)
