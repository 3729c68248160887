"""Command-line surface.

Exit codes: 0 on success (feasible instance, clean audit, verified witness),
1 when the answer is negative (infeasible instance, violation found, failed
verification), 2 on usage or parse errors.  Randomized commands require an
explicit ``--seed`` and echo it back.  ``--report`` switches output to the
flat ``key: value`` form that round-trips through the report parser.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import formats
from .election import WinnerModel, score_vector, winners
from .properties import (
    TsCriterion,
    VcCriterion,
    audit_anonymity,
    audit_consistency,
    audit_majority,
    audit_neutrality,
    audit_pareto,
    audit_ts,
    audit_vc_monotonicity,
)
from .reductions import tds_to_dbra_uc, x3c_to_ccav, x3c_to_ccdv, x3c_to_cbra_co
from .solutions import SolutionRule
from .strategy import (
    BriberyInstance,
    BriberyProblem,
    ControlInstance,
    ControlProblem,
    SizeError,
    evaluate_action,
    goal_holds,
    solve_bribery,
    solve_control,
    solve_bruteforce,
)

_TS_PROPERTIES = {c.value: c for c in TsCriterion}
_VC_PROPERTIES = {c.value: c for c in VcCriterion}


class UsageError(ValueError):
    pass


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def _emit(args, report: formats.RunReport, human_lines) -> None:
    if args.report:
        sys.stdout.write(formats.format_report(report))
    else:
        for line in human_lines:
            print(line)


def _base_fields(args, started, extra):
    fields = [("command", " ".join(args.argv))]
    fields.extend(extra)
    fields.append(("elapsed-ms", str(int((time.perf_counter() - started) * 1000))))
    return formats.RunReport(tuple(fields))


def _cmd_winners(args) -> int:
    started = time.perf_counter()
    election = formats.parse_election(_read(args.election))
    rule = SolutionRule.parse(args.rule)
    won = sorted(winners(election, rule))
    text = " ".join(election.names[c] for c in won)
    report = _base_fields(args, started, [("rule", str(rule)), ("winners", text)])
    _emit(args, report, [text])
    return 0


def _cmd_score(args) -> int:
    started = time.perf_counter()
    election = formats.parse_election(_read(args.election))
    rule = SolutionRule.parse(args.rule)
    scores = score_vector(election, rule)
    if args.candidate is not None:
        c = election.index(args.candidate)
        lines = [f"{election.names[c]} {scores[c]}"]
    else:
        lines = [f"{name} {score}" for name, score in zip(election.names, scores)]
    report = _base_fields(args, started, [
        ("rule", str(rule)),
        ("scores", " ".join(lines)),
    ])
    _emit(args, report, lines)
    return 0


def _load_control_instance(args) -> ControlInstance:
    election = formats.parse_election(_read(args.election))
    problem = ControlProblem.parse(args.problem)
    pool = ()
    unregistered = frozenset()
    if args.unregistered is not None:
        if problem.operation != "av":
            raise UsageError(f"--unregistered only applies to vote-addition problems, not {problem}")
        pool_block = formats.parse_election(_read(args.unregistered))
        if pool_block.names != election.names:
            raise UsageError("unregistered votes must share the election roster")
        pool = pool_block.votes
    if args.unregistered_candidates:
        if problem.operation != "ac":
            raise UsageError(
                f"--unregistered-candidates only applies to candidate-addition problems, not {problem}")
        unregistered = frozenset(election.index(x) for x in args.unregistered_candidates)
    return ControlInstance(
        problem,
        SolutionRule.parse(args.rule),
        WinnerModel.parse(args.model),
        election,
        election.index(args.distinguished),
        args.budget,
        unregistered_votes=pool,
        unregistered_candidates=unregistered,
    )


def _strategy_epilogue(args, started, inst, outcome) -> int:
    e = inst.election
    lines = ["feasible" if outcome.feasible else "infeasible"]
    fields = [
        ("problem", str(inst.problem)),
        ("rule", str(inst.rule)),
        ("model", str(inst.model)),
        ("feasible", "1" if outcome.feasible else "0"),
        ("cost", str(outcome.cost)),
    ]
    if outcome.feasible and outcome.action is not None:
        action_text = formats.format_action(outcome.action, e)
        lines.append(f"cost {outcome.cost}")
        lines.append(f"action {action_text}")
        fields.append(("action", action_text))
    if args.witness and outcome.feasible:
        _write(args.witness, formats.format_strategy(inst, outcome))
        lines.append(f"witness written to {args.witness}")
    report = _base_fields(args, started, fields)
    _emit(args, report, lines)
    return 0 if outcome.feasible else 1


def _cmd_control(args) -> int:
    started = time.perf_counter()
    if args.instance is not None:
        inst, _ = formats.parse_strategy(_read(args.instance))
        if not isinstance(inst, ControlInstance):
            raise UsageError("instance file holds a bribery problem; use the bribery command")
    else:
        for flag in ("problem", "rule", "model", "distinguished", "budget", "election"):
            if getattr(args, flag) is None:
                raise UsageError(f"--{flag} is required without --instance")
        inst = _load_control_instance(args)
    outcome = solve_control(inst)
    return _strategy_epilogue(args, started, inst, outcome)


def _cmd_bribery(args) -> int:
    started = time.perf_counter()
    if args.instance is not None:
        inst, _ = formats.parse_strategy(_read(args.instance))
        if not isinstance(inst, BriberyInstance):
            raise UsageError("instance file holds a control problem; use the control command")
    else:
        for flag in ("problem", "rule", "model", "distinguished", "budget", "election"):
            if getattr(args, flag) is None:
                raise UsageError(f"--{flag} is required without --instance")
        election = formats.parse_election(_read(args.election))
        inst = BriberyInstance(
            BriberyProblem.parse(args.problem),
            SolutionRule.parse(args.rule),
            WinnerModel.parse(args.model),
            election,
            election.index(args.distinguished),
            args.budget,
        )
    outcome = solve_bribery(inst, algorithm=args.algorithm, unsafe=args.unsafe)
    return _strategy_epilogue(args, started, inst, outcome)


def _cmd_audit(args) -> int:
    started = time.perf_counter()
    rule = SolutionRule.parse(args.rule)
    prop = args.property.lower()
    witness = None
    counts = []
    if prop in _TS_PROPERTIES:
        if args.exhaustive:
            if args.max_candidates is None:
                raise UsageError("--max-candidates is required for solution audits")
            outcome = audit_ts(rule, _TS_PROPERTIES[prop], args.max_candidates,
                               jobs=args.jobs)
        else:
            if args.seed is None or args.trials is None:
                raise UsageError("randomized audits require --trials and --seed")
            outcome = audit_ts(rule, _TS_PROPERTIES[prop],
                               args.max_candidates or 6,
                               exhaustive=False, trials=args.trials, seed=args.seed)
        witness = outcome.witness
        counts = [("tournaments-checked", str(outcome.tournaments_checked)),
                  ("lifts-checked", str(outcome.lifts_checked))]
    elif prop in _VC_PROPERTIES:
        if args.candidates is None or args.votes is None:
            raise UsageError("correspondence audits require --candidates and --votes")
        searchers = {
            VcCriterion.MONOTONICITY: audit_vc_monotonicity,
            VcCriterion.PARETO: audit_pareto,
            VcCriterion.CONSISTENCY: audit_consistency,
            VcCriterion.MAJORITY: audit_majority,
        }
        criterion = _VC_PROPERTIES[prop]
        if criterion in (VcCriterion.ANONYMITY, VcCriterion.NEUTRALITY):
            if args.seed is None or args.trials is None:
                raise UsageError("randomized audits require --trials and --seed")
            fn = audit_anonymity if criterion is VcCriterion.ANONYMITY else audit_neutrality
            witness = fn(rule, args.candidates, args.votes, args.trials, args.seed)
        elif args.exhaustive:
            witness = searchers[criterion](rule, args.candidates, args.votes,
                                           0, exhaustive=True)
        else:
            if args.seed is None or args.trials is None:
                raise UsageError("randomized audits require --trials and --seed")
            witness = searchers[criterion](rule, args.candidates, args.votes,
                                           args.trials, args.seed)
    else:
        raise UsageError(f"unknown property {args.property!r}")

    fields = [("rule", str(rule)), ("property", prop)]
    fields.extend(counts)
    if args.seed is not None:
        fields.append(("seed", str(args.seed)))
    lines = []
    if witness is None:
        fields.append(("violation", "0"))
        lines.append("no violation found")
    else:
        fields.append(("violation", "1"))
        lines.append("violation found")
        text = formats.format_witness(witness)
        if args.witness:
            _write(args.witness, text)
            lines.append(f"witness written to {args.witness}")
        else:
            lines.append(text.rstrip("\n"))
    report = _base_fields(args, started, fields)
    _emit(args, report, lines)
    return 1 if witness is not None else 0


def _cmd_reduce(args) -> int:
    started = time.perf_counter()
    source = args.source.lower()
    target = args.target.lower()
    model = WinnerModel.parse(args.model)
    if source == "x3c":
        inst = formats.parse_x3c(_read(args.input))
        if target in ("ccav", "ccdv"):
            if args.rule is None:
                raise UsageError("--rule is required for control targets")
            rule = SolutionRule.parse(args.rule)
            builder = x3c_to_ccav if target == "ccav" else x3c_to_ccdv
            generated = builder(inst, rule, model, seed=args.seed)
        elif target == "cbra-co":
            generated = x3c_to_cbra_co(inst, model, seed=args.seed,
                                       allow_small=args.allow_small)
        else:
            raise UsageError(f"cannot reduce x3c to {target!r}")
    elif source == "tds":
        if target != "dbra-uc":
            raise UsageError(f"cannot reduce tds to {target!r}")
        generated = tds_to_dbra_uc(formats.parse_tds(_read(args.input)), model,
                                   seed=args.seed)
    else:
        raise UsageError(f"unknown source problem {source!r}")
    text = formats.format_strategy(generated)
    lines = []
    if args.output:
        _write(args.output, text)
        lines.append(f"instance written to {args.output}")
    else:
        lines.append(text.rstrip("\n"))
    fields = [("source", source), ("target", target), ("model", str(model))]
    if args.seed is not None:
        fields.append(("seed", str(args.seed)))
    report = _base_fields(args, started, fields)
    _emit(args, report, lines)
    return 0


def _cmd_verify(args) -> int:
    started = time.perf_counter()
    text = _read(args.witness_file)
    head = next((line for line in text.splitlines()
                 if line.strip() and not line.strip().startswith("#")), "")
    kind = head.split()[0] if head.split() else ""
    if kind == "witness":
        witness = formats.parse_witness(text)
        ok = witness.verify()
        detail = "witness re-verified" if ok else "witness failed re-evaluation"
    elif kind == "strategy":
        inst, outcome = formats.parse_strategy(text)
        if outcome is None:
            raise UsageError("strategy file carries no outcome to verify")
        if outcome.feasible:
            if outcome.action is None or outcome.action.cost > inst.k:
                ok = False
            else:
                election, p = evaluate_action(inst, outcome.action)
                ok = goal_holds(inst, election, p)
            detail = "action replayed successfully" if ok else "action failed to reach the goal"
        else:
            resolved = solve_bruteforce(inst)
            ok = not resolved.feasible
            detail = ("infeasibility confirmed by exhaustive search" if ok
                      else "exhaustive search found a feasible action")
    else:
        raise UsageError("unrecognized witness file; expected a witness or strategy header")
    report = _base_fields(args, started, [("verified", "1" if ok else "0")])
    _emit(args, report, [detail])
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsapproval",
        description="Approval voting over tournament ballots: winners, audits, "
                    "control and bribery solvers, hardness-gadget generators.")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--report", action="store_true",
                       help="emit a flat key: value report instead of plain text")

    p = sub.add_parser("winners", help="winning set of an election file")
    p.add_argument("--election", required=True)
    p.add_argument("--rule", required=True, help="tc, co or uc")
    common(p)
    p.set_defaults(fn=_cmd_winners)

    p = sub.add_parser("score", help="approval scores of an election file")
    p.add_argument("--election", required=True)
    p.add_argument("--rule", required=True)
    p.add_argument("--candidate")
    common(p)
    p.set_defaults(fn=_cmd_score)

    p = sub.add_parser("control", help="solve a control instance")
    p.add_argument("--problem", help="ccav ccdv ccac ccdc dcav dcdv dcac dcdc")
    p.add_argument("--rule")
    p.add_argument("--model")
    p.add_argument("--distinguished")
    p.add_argument("--budget", type=int)
    p.add_argument("--election")
    p.add_argument("--unregistered", help="election file with the unregistered votes")
    p.add_argument("--unregistered-candidates", nargs="*", default=())
    p.add_argument("--instance", help="read a complete instance file instead of flags")
    p.add_argument("--witness", help="write the witness to this path")
    common(p)
    p.set_defaults(fn=_cmd_control)

    p = sub.add_parser("bribery", help="solve an arc-reversal bribery instance")
    p.add_argument("--problem", help="cbra or dbra")
    p.add_argument("--rule")
    p.add_argument("--model")
    p.add_argument("--distinguished")
    p.add_argument("--budget", type=int)
    p.add_argument("--election")
    p.add_argument("--instance")
    p.add_argument("--algorithm", default="bruteforce",
                   help="bruteforce (authoritative) or tc-fast")
    p.add_argument("--unsafe", action="store_true",
                   help="override the enumeration size guards")
    p.add_argument("--witness")
    common(p)
    p.set_defaults(fn=_cmd_bribery)

    p = sub.add_parser("audit", help="search for an axiom violation")
    p.add_argument("--property", required=True,
                   help="ts-monotonicity, exclusive-monotonicity, enm, monotonicity, "
                        "pareto, consistency, majority, anonymity, neutrality")
    p.add_argument("--rule", required=True)
    p.add_argument("--max-candidates", type=int, help="size bound for solution audits")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--candidates", type=int, help="election size for correspondence audits")
    p.add_argument("--votes", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers for exhaustive solution audits")
    p.add_argument("--witness")
    common(p)
    p.set_defaults(fn=_cmd_audit)

    p = sub.add_parser("reduce", help="generate a hardness-gadget instance")
    p.add_argument("--from", dest="source", required=True, help="x3c or tds")
    p.add_argument("--to", dest="target", required=True,
                   help="ccav, ccdv, cbra-co or dbra-uc")
    p.add_argument("--input", required=True)
    p.add_argument("--rule")
    p.add_argument("--model", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--allow-small", action="store_true",
                   help="permit toy kappa for oracle validation of cbra-co")
    p.add_argument("--output")
    common(p)
    p.set_defaults(fn=_cmd_reduce)

    p = sub.add_parser("verify", help="replay a witness or strategy file")
    p.add_argument("witness_file")
    common(p)
    p.set_defaults(fn=_cmd_verify)

    return parser


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    args.argv = ["tsapproval"] + argv
    try:
        return args.fn(args)
    except (UsageError, formats.FormatError, SizeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
