import json

import pytest
from fastapi.testclient import TestClient

from flatsplit import io as docs
from flatsplit.fixtures import (
    dominant_two,
    mirrored_two,
    trio_base,
    trio_tempting_column,
)
from flatsplit.service import create_app


@pytest.fixture
def client():
    return TestClient(create_app())


def make_session(client, inst):
    r = client.post("/sessions", json={"instance": docs.instance_to_doc(inst)})
    assert r.status_code == 200
    return r.json()["id"]


TEMPTING_EDIT = {
    "op": "add_apartment",
    "name": "apt2",
    "rent": "300",
    "values": [[str(v) for v in row] for row in trio_tempting_column()],
}


def test_mirrored_session_solve(client):
    sid = make_session(client, mirrored_two())
    r = client.post(f"/sessions/{sid}/solve", json={"notion": "nef", "objective": "maximin"})
    assert r.status_code == 200
    doc = r.json()
    assert doc["utilities"] == ["0", "0"]
    assert doc["objective_value"] == "0"
    assert doc["status"] == "solved"


def test_uef_none_exists_is_a_normal_response(client):
    sid = make_session(client, mirrored_two())
    r = client.post(f"/sessions/{sid}/solve", json={"notion": "uef"})
    assert r.status_code == 200
    assert r.json()["status"] == "none-exists"


def test_envy_and_ledger_views(client):
    sid = make_session(client, dominant_two())
    r = client.post(f"/sessions/{sid}/solve", json={"notion": "strong-nef", "objective": "maximin"})
    assert r.status_code == 200
    assert r.json()["prices"] == [["99", "1"], ["1", "99"]]

    envy = client.get(f"/sessions/{sid}/envy")
    assert envy.status_code == 200
    body = envy.json()
    assert body["chosen"] == "apt1"
    # player 0 envies player 1 in the chosen apartment by 98
    assert body["entries"][0][1][0] == "98"

    ledger = client.get(f"/sessions/{sid}/ledger")
    assert ledger.status_code == 200
    steps = ledger.json()["steps"]
    assert len(steps) >= 1
    assert ledger.json()["start"] == [["50", "50"], ["50", "50"]]
    assert ledger.json()["end"] == [["99", "1"], ["1", "99"]]


def test_views_404_before_any_solve(client):
    sid = make_session(client, mirrored_two())
    assert client.get(f"/sessions/{sid}/envy").status_code == 404
    assert client.get(f"/sessions/{sid}/ledger").status_code == 404


def test_whatif_does_not_commit(client):
    sid = make_session(client, trio_base())
    before = client.post(f"/sessions/{sid}/solve", json={"notion": "nef", "objective": "maximin"}).json()
    assert before["objective_value"] == "50"

    probe1 = client.post(
        f"/sessions/{sid}/whatif",
        json={"edit": TEMPTING_EDIT, "notion": "nef", "objective": "maximin"},
    )
    assert probe1.status_code == 200
    assert probe1.json()["objective_value"] == "37.5"
    assert probe1.json()["committed"] is False

    probe2 = client.post(
        f"/sessions/{sid}/whatif",
        json={"edit": TEMPTING_EDIT, "notion": "nef", "objective": "maximin"},
    )
    assert probe2.json() == probe1.json()  # side-effect free, byte for byte

    after = client.post(f"/sessions/{sid}/solve", json={"notion": "nef", "objective": "maximin"}).json()
    assert after["objective_value"] == "50"

    commit = client.put(f"/sessions/{sid}/instance", json={"edits": [TEMPTING_EDIT]})
    assert commit.status_code == 200
    committed = client.post(f"/sessions/{sid}/solve", json={"notion": "nef", "objective": "maximin"}).json()
    assert committed["objective_value"] == "37.5"


def test_edit_validation_and_conflicts(client):
    sid = make_session(client, mirrored_two())

    bad = client.put(
        f"/sessions/{sid}/instance",
        json={"edits": [{"op": "set_value", "player": "player1", "apartment": "apt1", "room": "apt1-room1", "value": "-3"}]},
    )
    assert bad.status_code == 422
    assert "negative" in bad.json()["detail"]

    unknown = client.put(
        f"/sessions/{sid}/instance",
        json={"edits": [{"op": "set_rent", "apartment": "nope", "rent": "10"}]},
    )
    assert unknown.status_code == 422

    ok = client.put(
        f"/sessions/{sid}/instance",
        json={"version": 0, "edits": [{"op": "set_rent", "apartment": "apt1", "rent": "300"}]},
    )
    assert ok.status_code == 200
    assert ok.json()["version"] == 1

    stale = client.put(
        f"/sessions/{sid}/instance",
        json={"version": 0, "edits": [{"op": "set_rent", "apartment": "apt1", "rent": "200"}]},
    )
    assert stale.status_code == 409


def test_atomic_multi_edit_rollback(client):
    sid = make_session(client, mirrored_two())
    r = client.put(
        f"/sessions/{sid}/instance",
        json={"edits": [
            {"op": "set_rent", "apartment": "apt1", "rent": "100"},
            {"op": "set_value", "player": "player1", "apartment": "apt1", "room": "apt1-room1", "value": "-1"},
        ]},
    )
    assert r.status_code == 422
    state = client.get(f"/sessions/{sid}/instance").json()
    assert state["instance"]["apartments"][0]["rent"] == "300"  # first edit rolled back
    assert state["version"] == 0


def test_unknown_session_is_404(client):
    assert client.get("/sessions/zzz/instance").status_code == 404
    assert client.post("/sessions/zzz/solve", json={"notion": "nef"}).status_code == 404


def test_solve_responses_pass_cli_checker(client, tmp_path):
    from flatsplit.cli import main

    sid = make_session(client, dominant_two())
    doc = client.post(f"/sessions/{sid}/solve", json={"notion": "nef", "objective": "maximin"}).json()
    inst_path = tmp_path / "inst.json"
    sol_path = tmp_path / "sol.json"
    inst_path.write_text(json.dumps(doc["instance"]))
    sol_path.write_text(json.dumps(doc))
    assert main(["check", "--notion", "nef", "--in", str(inst_path), "--solution", str(sol_path)]) == 0


def test_snapshot_round_trip(tmp_path):
    path = tmp_path / "snap.json"
    app = create_app(snapshot_path=str(path))
    with TestClient(app) as client:
        sid = make_session(client, mirrored_two())
        client.put(
            f"/sessions/{sid}/instance",
            json={"edits": [{"op": "set_rent", "apartment": "apt2", "rent": "300"}]},
        )
    # TestClient context exit triggers shutdown -> snapshot written
    snap = json.loads(path.read_text())
    assert len(snap["sessions"]) == 1
    assert snap["sessions"][0]["version"] == 1

    revived = create_app(snapshot_path=str(path))
    with TestClient(revived) as client:
        state = client.get(f"/sessions/{sid}/instance")
        assert state.status_code == 200
        assert state.json()["version"] == 1
        assert len(state.json()["instance"]["apartments"]) == 2


def test_whatif_remove_apartment_resolves(client):
    sid = make_session(client, dominant_two())
    # removing an apartment from a normalized instance is rejected outright
    rejected = client.post(
        f"/sessions/{sid}/whatif",
        json={"edit": {"op": "remove_apartment", "apartment": "apt1"}, "notion": "nef", "objective": "maximin"},
    )
    assert rejected.status_code == 422
    probe = client.post(
        f"/sessions/{sid}/whatif",
        json={
            "edits": [
                {"op": "set_normalized", "normalized": False},
                {"op": "remove_apartment", "apartment": "apt1"},
            ],
            "notion": "nef",
            "objective": "maximin",
        },
    )
    assert probe.status_code == 200
    doc = probe.json()
    assert doc["chosen"] == "apt2"
    assert doc["status"] == "solved"


def test_full_instance_replace(client):
    sid = make_session(client, mirrored_two())
    doc = docs.instance_to_doc(trio_base())
    r = client.put(f"/sessions/{sid}/instance", json={"instance": doc, "version": 0})
    assert r.status_code == 200
    assert len(r.json()["instance"]["players"]) == 3
    solved = client.post(f"/sessions/{sid}/solve", json={"notion": "nef", "objective": "maximin"})
    assert solved.json()["objective_value"] == "50"


def test_equitability_objective_over_http(client):
    sid = make_session(client, dominant_two())
    r = client.post(f"/sessions/{sid}/solve", json={"notion": "nef", "objective": "equitability"})
    assert r.status_code == 200
    utils = r.json()["utilities"]
    assert utils[0] == utils[1]


def test_lottery_solve_over_http(client):
    sid = make_session(client, mirrored_two())
    r = client.post(f"/sessions/{sid}/solve", json={"notion": "def"})
    assert r.status_code == 200
    assert r.json()["status"] == "solved"
    assert "dist" in r.json()
