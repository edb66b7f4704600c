"""Batch command line: solve instances, check solutions, run experiments.

Exit codes: 0 success (solved / verdict true), 2 negative outcome (no
solution exists / verdict false), 3 undecided (strong notion only), 1 bad
input or usage.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from flatsplit import io as docs
from flatsplit.checkers import (
    Verdict,
    check_def,
    check_nef,
    check_strong_nef,
    check_uef,
)
from flatsplit.model import Instance, money, money_str, utilities_in
from flatsplit.negotiation import reconstruct
from flatsplit.solvers import (
    Objective,
    construct_nef,
    equitability_objective,
    maximin_objective,
    optimize_nef,
    optimize_strong_nef,
    solve_def,
    solve_strong_nef,
    solve_uef,
)
from flatsplit.stochastic import (
    closed_form_uef_prob,
    estimate_event_f_prob,
    estimate_uef_prob,
    parse_spec,
    sequential_stopping,
    trial_seed,
)

NOTIONS = ("uef", "nef", "strong-nef", "def")
OBJECTIVES = ("maximin", "equitability", "none")

CSV_HEADER = [
    "n", "m", "spec", "trials", "successes", "estimate", "ci_low", "ci_high", "seed",
]


def _load_instance(path: str) -> tuple[Instance, docs.Labels]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise docs.DocumentError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise docs.DocumentError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None
    return docs.instance_from_doc(doc)


def _objectives(name: str, n: int) -> Sequence[Objective]:
    if name == "maximin":
        return maximin_objective(n)
    if name == "equitability":
        return equitability_objective(n)
    raise docs.DocumentError(f"unknown objective {name!r}")


def _emit(doc: dict, out: Optional[str]) -> None:
    text = json.dumps(doc, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_solve(args: argparse.Namespace) -> int:
    inst, labels = _load_instance(args.infile)
    notion, objective = args.notion, args.objective

    if notion == "uef":
        outcome = solve_uef(inst)
        if not outcome.found:
            _emit(docs.solution_to_doc(inst, labels, notion, objective, None), args.out)
            return 2
        sol = outcome.solution
        doc = docs.solution_to_doc(
            inst, labels, notion, objective, sol,
            utilities=utilities_in(inst, sol.partial, sol.chosen),
        )
        _emit(doc, args.out)
        return 0

    if notion == "def":
        outcome = solve_def(inst)
        if not outcome.found:
            _emit(docs.solution_to_doc(inst, labels, notion, objective, None), args.out)
            return 2
        from flatsplit.model import PartialSolution, Solution

        support = [j for j, d in enumerate(outcome.dist) if d > 0]
        sol = Solution(PartialSolution(outcome.assignment, outcome.prices), support[0])
        doc = docs.solution_to_doc(
            inst, labels, notion, objective, sol, dist=outcome.dist,
        )
        _emit(doc, args.out)
        return 0

    if notion == "nef":
        if objective == "none":
            built = construct_nef(inst)
            sol, q, value = built.solution, built.witness_q, None
        else:
            objs = _objectives(objective, inst.n)
            opt = optimize_nef(inst, objs)
            sol, q, value = opt.solution, opt.witness_q, opt.value
    elif notion == "strong-nef":
        if objective == "none":
            built = solve_strong_nef(inst)
            sol, q, value = built.solution, built.start_q, None
        else:
            objs = _objectives(objective, inst.n)
            opt = optimize_strong_nef(inst, objs)
            sol, q, value = opt.solution, opt.witness_q, opt.value
    else:
        raise docs.DocumentError(f"unknown notion {notion!r}")

    ledger = reconstruct(sol.assignment, q, sol.prices)
    doc = docs.solution_to_doc(
        inst, labels, notion, objective, sol,
        utilities=utilities_in(inst, sol.partial, sol.chosen),
        objective_value=value,
        witness_q=q,
        ledger=ledger,
    )
    _emit(doc, args.out)
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    inst, labels = _load_instance(args.infile)
    try:
        with open(args.solution) as fh:
            sol_doc = json.load(fh)
    except OSError as exc:
        raise docs.DocumentError(f"cannot read {args.solution}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise docs.DocumentError(f"{args.solution}: invalid JSON ({exc.msg})") from None
    sol = docs.solution_from_doc(sol_doc, inst, labels)
    notion = args.notion

    if notion == "uef":
        res = check_uef(inst, sol)
        if res.ok:
            print("true: universally envy-free")
            return 0
        i, i2, j = res.violation
        print(
            f"false: {labels.players[i]} prefers {labels.players[i2]}'s room "
            f"in {labels.apartments[j]}"
        )
        return 2
    if notion == "nef":
        res = check_nef(inst, sol)
        if res.ok:
            print("true: negotiated envy-free; start matrix:")
            print(json.dumps(docs.prices_to_doc(res.witness_q)))
            return 0
        print(f"false: {res.reason}")
        return 2
    if notion == "strong-nef":
        res = check_strong_nef(inst, sol)
        if res.verdict is Verdict.TRUE:
            print("true: strong negotiated envy-free; start matrix:")
            print(json.dumps(docs.prices_to_doc(res.witness_q)))
            return 0
        if res.verdict is Verdict.FALSE:
            print(f"false: {res.reason}")
            return 2
        print(f"unknown: {res.reason}")
        return 3
    if notion == "def":
        raw = sol_doc.get("dist")
        if raw is None:
            raise docs.DocumentError("def check needs a 'dist' field in the solution document")
        dist = [money(d) for d in raw]
        res = check_def(inst, sol.assignment, sol.prices, dist)
        if res.ok:
            print("true: lottery-fair")
            return 0
        print(f"false: {res.reason}")
        return 2
    raise docs.DocumentError(f"unknown notion {notion!r}")


def _write_rows(rows: list[dict], out: Optional[str]) -> None:
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=CSV_HEADER)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out:
            fh.close()


def _m_values(args: argparse.Namespace) -> list[int]:
    if args.m_range:
        lo, _, hi = args.m_range.partition(":")
        return list(range(int(lo), int(hi) + 1))
    if args.m is None:
        raise docs.DocumentError("simulate needs --m or --m-range")
    return [args.m]


def cmd_simulate(args: argparse.Namespace) -> int:
    rows: list[dict] = []
    if args.mode == "closed-form":
        if args.r_grid:
            rs = [Fraction(k, args.r_grid) for k in range(args.r_grid + 1)]
        else:
            rs = [money(args.r)]
        for m in _m_values(args):
            for r in rs:
                p = closed_form_uef_prob(m, r)
                rows.append({
                    "n": 2, "m": m, "spec": f"corr-bernoulli({r})",
                    "trials": 0, "successes": 0,
                    "estimate": money_str(p),
                    "ci_low": money_str(p), "ci_high": money_str(p),
                    "seed": args.seed,
                })
        _write_rows(rows, args.out)
        return 0

    if args.trials < 1 and args.mode in ("estimate", "event-f"):
        raise docs.DocumentError("need --trials >= 1")
    spec = parse_spec(args.spec)

    if args.mode == "estimate":
        for m in _m_values(args):
            rep = estimate_uef_prob(
                args.n, m, spec, args.rent, args.trials, args.seed,
                processes=args.processes,
            )
            rows.append({
                "n": args.n, "m": m, "spec": spec.label(),
                "trials": rep.trials, "successes": rep.successes,
                "estimate": f"{rep.estimate:.6f}",
                "ci_low": f"{rep.ci_low:.6f}", "ci_high": f"{rep.ci_high:.6f}",
                "seed": rep.seed,
            })
    elif args.mode == "event-f":
        for m in _m_values(args):
            rep = estimate_event_f_prob(args.n, m, spec, args.rent, args.trials, args.seed)
            rows.append({
                "n": args.n, "m": m, "spec": spec.label(),
                "trials": rep.trials, "successes": rep.successes,
                "estimate": f"{rep.estimate:.6f}",
                "ci_low": f"{rep.ci_low:.6f}", "ci_high": f"{rep.ci_high:.6f}",
                "seed": rep.seed,
            })
    elif args.mode == "stopping":
        for run in range(args.runs):
            seed = trial_seed(args.seed, run)
            res = sequential_stopping(args.n, spec, args.rent, args.m0, args.cap, seed)
            rows.append({
                "n": args.n, "m": res.stopped_at if res.stopped else "",
                "spec": spec.label(), "trials": 1,
                "successes": 1 if res.stopped else 0,
                "estimate": 1.0 if res.stopped else 0.0,
                "ci_low": "", "ci_high": "",
                "seed": seed,
            })
    else:
        raise docs.DocumentError(f"unknown mode {args.mode!r}")
    _write_rows(rows, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatsplit",
        description="Exact rent division across multiple candidate apartments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve an instance file")
    p_solve.add_argument("--notion", choices=NOTIONS, required=True)
    p_solve.add_argument("--objective", choices=OBJECTIVES, default="none")
    p_solve.add_argument("--in", dest="infile", required=True)
    p_solve.add_argument("--out", default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_check = sub.add_parser("check", help="check a solution file")
    p_check.add_argument("--notion", choices=NOTIONS, required=True)
    p_check.add_argument("--in", dest="infile", required=True)
    p_check.add_argument("--solution", required=True)
    p_check.set_defaults(func=cmd_check)

    p_sim = sub.add_parser("simulate", help="run randomized experiments")
    p_sim.add_argument(
        "--mode", choices=("estimate", "stopping", "event-f", "closed-form"),
        required=True,
    )
    p_sim.add_argument("--n", type=int, default=2)
    p_sim.add_argument("--m", type=int, default=None)
    p_sim.add_argument("--m-range", default=None, help="inclusive range lo:hi")
    p_sim.add_argument("--spec", default="uniform01")
    p_sim.add_argument("--rent", default="1")
    p_sim.add_argument("--trials", type=int, default=1000)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--processes", type=int, default=None)
    p_sim.add_argument("--m0", type=int, default=1, help="stopping: first count checked")
    p_sim.add_argument("--cap", type=int, default=500, help="stopping: apartment cap")
    p_sim.add_argument("--runs", type=int, default=100, help="stopping: independent runs")
    p_sim.add_argument("--r", default="1/2", help="closed-form: correlation")
    p_sim.add_argument("--r-grid", type=int, default=None, help="closed-form: grid density")
    p_sim.add_argument("--out", default=None)
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except docs.DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
