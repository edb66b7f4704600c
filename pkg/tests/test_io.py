import json
import random
from fractions import Fraction as F

import pytest

from flatsplit import io as docs
from flatsplit.fixtures import dominant_two, mirrored_two
from flatsplit.model import Assignment, PriceMatrix
from flatsplit.negotiation import Negotiation, NegotiationLedger, apply_negotiation

from conftest import random_instance


def test_instance_document_round_trip():
    rnd = random.Random(3)
    for _ in range(20):
        inst = random_instance(rnd)
        doc = docs.instance_to_doc(inst)
        back, labels = docs.instance_from_doc(json.loads(json.dumps(doc)))
        assert back == inst
        assert len(labels.players) == inst.n


def test_instance_document_third_rents_round_trip():
    inst = mirrored_two()
    skewed = docs.instance_to_doc(inst)
    skewed["apartments"][0]["rent"] = "1/3"
    back, _ = docs.instance_from_doc(skewed)
    assert back.rents[0] == F(1, 3)


def test_instance_document_diagnostics():
    good = docs.instance_to_doc(mirrored_two())

    missing = dict(good)
    del missing["values"]
    with pytest.raises(docs.DocumentError, match="missing field 'values'"):
        docs.instance_from_doc(missing)

    bad_money = json.loads(json.dumps(good))
    bad_money["values"][0][0][1] = "12.3.4"
    with pytest.raises(docs.DocumentError, match=r"values\[0\]\[0\]\[1\]"):
        docs.instance_from_doc(bad_money)

    float_money = json.loads(json.dumps(good))
    float_money["values"][0][0][1] = 12.5
    with pytest.raises(docs.DocumentError, match="must be a string"):
        docs.instance_from_doc(float_money)

    short_row = json.loads(json.dumps(good))
    short_row["values"][1][1] = ["100"]
    with pytest.raises(docs.DocumentError, match="need 2 room values"):
        docs.instance_from_doc(short_row)

    dup = json.loads(json.dumps(good))
    dup["players"] = ["a", "a"]
    with pytest.raises(docs.DocumentError, match="unique"):
        docs.instance_from_doc(dup)


def test_assignment_and_prices_round_trip():
    inst = dominant_two()
    labels = docs.Labels.default(2, 2)
    asg = Assignment.build([(1, 0), (0, 1)])
    doc = docs.assignment_to_doc(asg, labels)
    assert docs.assignment_from_doc(doc, labels, 2, 2) == asg
    prices = PriceMatrix.build([["99.5", "0.5"], ["1/3", "299/3"]])
    pdoc = docs.prices_to_doc(prices)
    assert pdoc[0] == ["99.5", "0.5"]
    assert pdoc[1] == ["1/3", "299/3"]
    assert docs.prices_from_doc(pdoc, 2, 2) == prices


def test_ledger_round_trip():
    asg = Assignment.identity(2, 2)
    labels = docs.Labels.default(2, 2)
    start = PriceMatrix.constant(150, 2, 2)
    step = Negotiation(delta=F(50), i1=0, i2=1, j1=0, j2=1)
    end = apply_negotiation(start, asg, step)
    ledger = NegotiationLedger(asg, start, (step,), end)
    doc = docs.ledger_to_doc(ledger, labels)
    back = docs.ledger_from_doc(json.loads(json.dumps(doc)), labels, asg)
    assert back == ledger


def test_ledger_replay_mismatch_rejected():
    asg = Assignment.identity(2, 2)
    labels = docs.Labels.default(2, 2)
    start = PriceMatrix.constant(150, 2, 2)
    doc = {
        "start": docs.prices_to_doc(start),
        "steps": [
            {
                "delta": "50",
                "raiser": "player1",
                "partner": "player2",
                "pay_more_in": "apt1",
                "pay_less_in": "apt2",
            }
        ],
        "end": docs.prices_to_doc(start),
    }
    with pytest.raises(docs.DocumentError, match="replay"):
        docs.ledger_from_doc(doc, labels, asg)


def test_solution_document_round_trip():
    from flatsplit.model import PartialSolution, Solution
    from flatsplit.model import utilities_in

    inst = mirrored_two()
    labels = docs.Labels.default(2, 2)
    asg = Assignment.identity(2, 2)
    sol = Solution(PartialSolution(asg, PriceMatrix.build([[200, 100], [100, 200]])), 0)
    doc = docs.solution_to_doc(
        inst,
        labels,
        "nef",
        "maximin",
        sol,
        utilities=utilities_in(inst, sol.partial, 0),
        objective_value=F(0),
    )
    back = docs.solution_from_doc(json.loads(json.dumps(doc)), inst, labels)
    assert back == sol
    assert doc["utilities"] == ["0", "0"]
    assert doc["chosen"] == "apt1"
