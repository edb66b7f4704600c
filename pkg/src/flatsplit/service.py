"""HTTP facade for interactive exploration: sessions, edits, solves,
what-if probes.

Sessions are in-memory: an immutable state snapshot guarded by a
per-session lock, so edits serialize while reads always see a consistent
snapshot.  Every response carries money as exact decimal/ratio strings;
the service never emits binary floating point for prices or values.
"""

from __future__ import annotations

import argparse
import json
import os
import threading
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, replace
from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from flatsplit import io as docs
from flatsplit.model import (
    Instance,
    PartialSolution,
    Solution,
    envy_matrix,
    money_str,
    utilities_in,
    validate,
)
from flatsplit.negotiation import NegotiationLedger, reconstruct
from flatsplit.solvers import (
    construct_nef,
    equitability_objective,
    maximin_objective,
    optimize_nef,
    optimize_strong_nef,
    solve_def,
    solve_strong_nef,
    solve_uef,
)


@dataclass(frozen=True)
class SessionState:
    instance: Instance
    labels: docs.Labels
    version: int
    last_solution: Optional[Solution] = None
    last_ledger: Optional[NegotiationLedger] = None
    history: tuple[dict, ...] = ()


class SessionStore:
    def __init__(self) -> None:
        self._sessions: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._global = threading.Lock()

    def create(self, state: SessionState) -> str:
        sid = uuid.uuid4().hex
        with self._global:
            self._sessions[sid] = state
            self._locks[sid] = threading.Lock()
        return sid

    def get(self, sid: str) -> SessionState:
        try:
            return self._sessions[sid]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {sid}") from None

    def lock(self, sid: str) -> threading.Lock:
        try:
            return self._locks[sid]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {sid}") from None

    def put(self, sid: str, state: SessionState) -> None:
        self._sessions[sid] = state

    def items(self):
        return list(self._sessions.items())


def _http_422(msg: str) -> HTTPException:
    return HTTPException(status_code=422, detail=msg)


def _apply_edit(state: SessionState, edit: dict) -> SessionState:
    """One edit against a state snapshot; raises 422 on anything invalid."""
    inst, labels = state.instance, state.labels
    if not isinstance(edit, dict) or "op" not in edit:
        raise _http_422("edit must be an object with an 'op' field")
    op = edit["op"]
    try:
        if op == "set_value":
            i = labels.player_index(str(edit["player"]))
            j = labels.apartment_index(str(edit["apartment"]))
            k = labels.room_index(j, str(edit["room"]))
            value = docs._parse_money(edit["value"], "edit.value")
            grid = [list(map(list, per)) for per in inst.values]
            grid[i][j][k] = value
            new = Instance.build(grid, inst.rents, inst.normalized)
        elif op == "set_rent":
            j = labels.apartment_index(str(edit["apartment"]))
            rent = docs._parse_money(edit["rent"], "edit.rent")
            rents = list(inst.rents)
            rents[j] = rent
            new = Instance.build([list(map(list, per)) for per in inst.values], rents, inst.normalized)
        elif op == "add_apartment":
            name = str(edit.get("name", f"apt{inst.m + 1}"))
            if name in labels.apartments:
                raise _http_422(f"apartment {name!r} already exists")
            rent = docs._parse_money(edit["rent"], "edit.rent")
            rooms = edit.get("rooms") or [f"{name}-room{k + 1}" for k in range(inst.n)]
            if len(rooms) != inst.n:
                raise _http_422(f"need exactly {inst.n} rooms")
            rows = edit["values"]
            if not isinstance(rows, list) or len(rows) != inst.n:
                raise _http_422(f"need one value row per player ({inst.n})")
            parsed = []
            for i, row in enumerate(rows):
                if not isinstance(row, list) or len(row) != inst.n:
                    raise _http_422(f"values[{i}]: need {inst.n} room values")
                parsed.append([docs._parse_money(v, f"values[{i}]") for v in row])
            grid = [list(map(list, per)) + [parsed[i]] for i, per in enumerate(inst.values)]
            new = Instance.build(grid, list(inst.rents) + [rent], inst.normalized)
            labels = docs.Labels(
                players=labels.players,
                apartments=labels.apartments + (name,),
                rooms=labels.rooms + (tuple(str(r) for r in rooms),),
            )
        elif op == "remove_apartment":
            j = labels.apartment_index(str(edit["apartment"]))
            if inst.m == 1:
                raise _http_422("cannot remove the last apartment")
            grid = [
                [list(row) for jj, row in enumerate(per) if jj != j]
                for per in inst.values
            ]
            rents = [r for jj, r in enumerate(inst.rents) if jj != j]
            new = Instance.build(grid, rents, inst.normalized)
            labels = docs.Labels(
                players=labels.players,
                apartments=tuple(a for jj, a in enumerate(labels.apartments) if jj != j),
                rooms=tuple(r for jj, r in enumerate(labels.rooms) if jj != j),
            )
        elif op == "set_normalized":
            new = Instance.build(
                [list(map(list, per)) for per in inst.values],
                inst.rents,
                bool(edit["normalized"]),
            )
        else:
            raise _http_422(f"unknown edit op {op!r}")
    except KeyError as exc:
        raise _http_422(f"edit missing field {exc.args[0]!r}") from None
    except docs.DocumentError as exc:
        raise _http_422(str(exc)) from None
    except (ValueError, TypeError) as exc:
        raise _http_422(str(exc)) from None
    report = validate(new)
    if not report.ok:
        raise _http_422("; ".join(report.violations))
    return replace(state, instance=new, labels=labels)


def _solve_document(state: SessionState, notion: str, objective: str) -> tuple[dict, Optional[Solution], Optional[NegotiationLedger]]:
    inst, labels = state.instance, state.labels
    try:
        if notion == "uef":
            outcome = solve_uef(inst)
            if not outcome.found:
                return docs.solution_to_doc(inst, labels, notion, objective, None), None, None
            sol = outcome.solution
            doc = docs.solution_to_doc(
                inst, labels, notion, objective, sol,
                utilities=utilities_in(inst, sol.partial, sol.chosen),
            )
            return doc, sol, None
        if notion == "def":
            outcome = solve_def(inst)
            if not outcome.found:
                return docs.solution_to_doc(inst, labels, notion, objective, None), None, None
            support = [j for j, d in enumerate(outcome.dist) if d > 0]
            sol = Solution(PartialSolution(outcome.assignment, outcome.prices), support[0])
            doc = docs.solution_to_doc(inst, labels, notion, objective, sol, dist=outcome.dist)
            return doc, sol, None
        if notion == "nef":
            if objective == "none":
                built = construct_nef(inst)
                sol, q, value = built.solution, built.witness_q, None
            else:
                opt = optimize_nef(inst, _objectives(objective, inst.n))
                sol, q, value = opt.solution, opt.witness_q, opt.value
        elif notion == "strong-nef":
            if objective == "none":
                built = solve_strong_nef(inst)
                sol, q, value = built.solution, built.start_q, None
            else:
                opt = optimize_strong_nef(inst, _objectives(objective, inst.n))
                sol, q, value = opt.solution, opt.witness_q, opt.value
        else:
            raise _http_422(f"unknown notion {notion!r}")
    except ValueError as exc:
        raise _http_422(str(exc)) from None
    ledger = reconstruct(sol.assignment, q, sol.prices)
    doc = docs.solution_to_doc(
        inst, labels, notion, objective, sol,
        utilities=utilities_in(inst, sol.partial, sol.chosen),
        objective_value=value,
        witness_q=q,
        ledger=ledger,
    )
    return doc, sol, ledger


def _objectives(objective: str, n: int):
    if objective == "maximin":
        return maximin_objective(n)
    if objective == "equitability":
        return equitability_objective(n)
    raise _http_422(f"unknown objective {objective!r}")


def _check_version(state: SessionState, body: dict) -> None:
    expected = body.get("version")
    if expected is not None and expected != state.version:
        raise HTTPException(
            status_code=409,
            detail=f"version conflict: session is at {state.version}, request expected {expected}",
        )


def create_app(snapshot_path: Optional[str] = None) -> FastAPI:
    store = SessionStore()

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        yield
        _write_snapshot(snapshot_path, store)

    app = FastAPI(title="flatsplit rent service", lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store
    app.state.snapshot_path = snapshot_path

    if snapshot_path and os.path.exists(snapshot_path):
        with open(snapshot_path) as fh:
            snap = json.load(fh)
        for entry in snap.get("sessions", []):
            inst, labels = docs.instance_from_doc(entry["instance"])
            state = SessionState(
                instance=inst,
                labels=labels,
                version=int(entry.get("version", 0)),
                history=tuple(entry.get("history", [])),
            )
            sid = entry.get("id") or uuid.uuid4().hex
            with store._global:
                store._sessions[sid] = state
                store._locks[sid] = threading.Lock()

    @app.post("/sessions")
    def create_session(body: Optional[dict] = None) -> dict:
        body = body or {}
        if "instance" in body:
            try:
                inst, labels = docs.instance_from_doc(body["instance"])
            except docs.DocumentError as exc:
                raise _http_422(str(exc)) from None
            report = validate(inst)
            if not report.ok:
                raise _http_422("; ".join(report.violations))
        else:
            inst, labels = docs.instance_from_doc(
                {
                    "players": ["player1", "player2"],
                    "apartments": [
                        {"name": "apt1", "rent": "0", "rooms": ["apt1-room1", "apt1-room2"]},
                    ],
                    "values": [[["0", "0"]], [["0", "0"]]],
                    "normalized": False,
                }
            )
        sid = store.create(SessionState(instance=inst, labels=labels, version=0))
        return {"id": sid, "version": 0}

    @app.get("/sessions/{sid}/instance")
    def get_instance(sid: str) -> dict:
        state = store.get(sid)
        report = validate(state.instance)
        return {
            "version": state.version,
            "instance": docs.instance_to_doc(state.instance, state.labels),
            "validation": {"ok": report.ok, "violations": list(report.violations)},
        }

    @app.put("/sessions/{sid}/instance")
    def put_instance(sid: str, body: dict) -> dict:
        with store.lock(sid):
            state = store.get(sid)
            _check_version(state, body)
            if "instance" in body:
                try:
                    inst, labels = docs.instance_from_doc(body["instance"])
                except docs.DocumentError as exc:
                    raise _http_422(str(exc)) from None
                report = validate(inst)
                if not report.ok:
                    raise _http_422("; ".join(report.violations))
                new = replace(state, instance=inst, labels=labels)
                event: dict[str, Any] = {"kind": "replace"}
            elif "edits" in body or "edit" in body:
                edits = body.get("edits") or [body["edit"]]
                new = state
                for edit in edits:
                    new = _apply_edit(new, edit)
                event = {"kind": "edit", "edits": edits}
            else:
                raise _http_422("body needs 'instance' or 'edits'")
            new = replace(
                new,
                version=state.version + 1,
                history=state.history + (event,),
                last_solution=None,
                last_ledger=None,
            )
            store.put(sid, new)
            report = validate(new.instance)
            return {
                "version": new.version,
                "instance": docs.instance_to_doc(new.instance, new.labels),
                "validation": {"ok": report.ok, "violations": list(report.violations)},
            }

    @app.post("/sessions/{sid}/solve")
    def solve(sid: str, body: dict) -> dict:
        notion = body.get("notion", "nef")
        objective = body.get("objective", "maximin")
        with store.lock(sid):
            state = store.get(sid)
            _check_version(state, body)
            doc, sol, ledger = _solve_document(state, notion, objective)
            event = {
                "kind": "solve",
                "notion": notion,
                "objective": objective,
                "status": doc["status"],
                "objective_value": doc.get("objective_value"),
            }
            store.put(
                sid,
                replace(
                    state,
                    last_solution=sol if sol is not None else state.last_solution,
                    last_ledger=ledger if ledger is not None else state.last_ledger,
                    history=state.history + (event,),
                ),
            )
        doc["version"] = store.get(sid).version
        return doc

    @app.post("/sessions/{sid}/whatif")
    def whatif(sid: str, body: dict) -> dict:
        notion = body.get("notion", "nef")
        objective = body.get("objective", "maximin")
        state = store.get(sid)
        _check_version(state, body)
        edits = body.get("edits") or ([body["edit"]] if "edit" in body else [])
        probe = state
        for edit in edits:
            probe = _apply_edit(probe, edit)
        doc, _, _ = _solve_document(probe, notion, objective)
        doc["version"] = state.version
        doc["committed"] = False
        return doc

    @app.get("/sessions/{sid}/ledger")
    def ledger(sid: str) -> dict:
        state = store.get(sid)
        if state.last_ledger is None:
            raise HTTPException(
                status_code=404,
                detail="no negotiated solve in this session yet",
            )
        return docs.ledger_to_doc(state.last_ledger, state.labels)

    @app.get("/sessions/{sid}/envy")
    def envy(sid: str) -> dict:
        state = store.get(sid)
        if state.last_solution is None:
            raise HTTPException(status_code=404, detail="no solve in this session yet")
        matrix = envy_matrix(state.instance, state.last_solution)
        return {
            "chosen": state.labels.apartments[matrix.chosen],
            "players": list(state.labels.players),
            "apartments": list(state.labels.apartments),
            "entries": [
                [[money_str(v) for v in per_apartment] for per_apartment in row]
                for row in matrix.entries
            ],
        }

    return app


def _write_snapshot(path: Optional[str], store: SessionStore) -> None:
    if not path:
        return
    payload = {
        "sessions": [
            {
                "id": sid,
                "version": state.version,
                "instance": docs.instance_to_doc(state.instance, state.labels),
                "history": list(state.history),
            }
            for sid, state in store.items()
        ]
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="flatsplit-service")
    parser.add_argument(
        "--port",
        type=int,
        default=int(os.environ.get("RENT_SERVICE_PORT", "8080")),
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--snapshot-path", default=None)
    args = parser.parse_args(argv)
    import uvicorn

    uvicorn.run(create_app(args.snapshot_path), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
