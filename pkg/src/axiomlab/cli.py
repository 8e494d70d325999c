"""Command-line entry point: file I/O, dispatch, and report emission.

Every command prints one JSON document to stdout: the deterministic payload
under ``"result"`` and wall-clock timing under ``"timing"``.  The timing
section is the only non-reproducible part, so golden-file comparisons should
drop it.  Exit codes: 0 pass, 1 fail with witness (or an exhausted search),
2 usage, format, or overflow errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time

from . import jsonio
from .axioms import Axiom, CheckOptions, check_axiom
from .errors import AxiomLabError, BoundsError, PreconditionViolated
from .matchings import (
    blocking_pair,
    find_dominating,
    find_improvement_cycle,
    is_non_wasteful,
    is_pareto_efficient,
    waste_witness,
)
from .model import GENERAL, NULL_BOTTOM, Instance
from .preferences import all_preferences
from .rules import (
    RandomSerialDictatorshipRule,
    SerialDictatorshipRule,
    TopTradingCyclesRule,
    random_serial_dictatorship,
    serial_dictatorship,
    top_trading_cycles,
)
from .theorems import (
    replay_theorem1_proof,
    replay_theorem3_proof,
    search_counterexample,
    verify_proposition1,
    verify_theorem1,
)

AXIOM_NAMES = {
    "strategy-proof": Axiom.STRATEGY_PROOF,
    "pairwise-strategy-proof": Axiom.PAIRWISE_STRATEGY_PROOF,
    "group-strategy-proof": Axiom.GROUP_STRATEGY_PROOF,
    "non-bossy": Axiom.NON_BOSSY,
    "maskin-monotonic": Axiom.MASKIN_MONOTONIC,
    "prob-monotonic": Axiom.PROB_MONOTONIC,
    "equal-treatment": Axiom.EQUAL_TREATMENT,
    "ex-post-pareto": Axiom.EX_POST_PARETO,
    "ex-post-pairwise": Axiom.EX_POST_PAIRWISE,
    "ex-post-non-wasteful": Axiom.EX_POST_NON_WASTEFUL,
    "individual-rationality": Axiom.INDIVIDUAL_RATIONALITY,
}

MATCHING_AXIOMS = ("pareto", "pairwise", "non-wasteful")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="axiomlab")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, **kwargs) -> argparse.ArgumentParser:
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--out", help="also write the report JSON to this path")
        return p

    p = add("gen-instance", help="generate a reproducible instance and profile")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument(
        "--capacity-style",
        choices=("unit", "sum-equals-n", "slack"),
        default="unit",
    )
    p.add_argument("--domain", choices=("general", "null-bottom"), default="general")

    for name in ("rsd", "sd", "ttc"):
        p = add(name, help=f"evaluate the {name} rule on one profile")
        p.add_argument("--instance", required=True)
        p.add_argument("--profile", required=True)
        if name == "sd":
            p.add_argument("--order", help="comma-separated agent order, default 0,1,...")
        if name == "ttc":
            p.add_argument("--endowment", help="matching JSON file, default identity")

    p = add("check-matching", help="check one matching against one efficiency axiom")
    p.add_argument("--instance", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--matching", required=True)
    p.add_argument("--axiom", choices=MATCHING_AXIOMS, required=True)

    p = add("check-rule", help="check one rule against one axiom, exhaustively")
    p.add_argument("--instance")
    p.add_argument("--rule", required=True)
    p.add_argument("--axiom", choices=sorted(AXIOM_NAMES), required=True)
    p.add_argument("--order")
    p.add_argument("--endowment")
    p.add_argument("--max-coalition", type=int)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)

    for name in ("verify-thm1", "verify-prop1"):
        p = add(name, help="run a theorem harness for one rule")
        p.add_argument("--instance")
        p.add_argument("--rule", required=True)
        p.add_argument("--order")
        p.add_argument("--endowment")
        p.add_argument("--workers", type=int, default=os.cpu_count() or 1)

    for name in ("replay-proof", "replay-appendix"):
        p = add(name, help="replay a proof construction on a concrete input")
        p.add_argument("--instance", required=True)
        p.add_argument("--profile", required=True)
        p.add_argument("--matching", required=True, help="the dominated matching")
        p.add_argument("--dominating", help="improving matching; default: first dominator")

    p = add("search-cex", help="search tabulated rules for an axiom counterexample")
    p.add_argument("--instance", required=True)
    p.add_argument("--require", action="append", default=[], choices=sorted(AXIOM_NAMES))
    p.add_argument("--violate", required=True, choices=sorted(AXIOM_NAMES))
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rule-space", choices=("deterministic", "lottery"), default="deterministic")
    p.add_argument("--rule-out", help="write any found rule table to this path")
    return parser


def _load_rule(args, inst, names):
    """Resolve --rule into a descriptor; table files carry their own instance."""
    selector = args.rule
    if selector in ("rsd", "sd", "ttc") and inst is None:
        raise PreconditionViolated(f"--rule {selector} needs --instance")
    if selector == "rsd":
        return inst, names, RandomSerialDictatorshipRule()
    if selector == "sd":
        order = tuple(range(inst.n))
        if getattr(args, "order", None):
            order = tuple(int(x) for x in args.order.split(","))
        return inst, names, SerialDictatorshipRule(order)
    if selector == "ttc":
        endowment = tuple(range(inst.n))
        if getattr(args, "endowment", None):
            endowment = jsonio.load_matching(args.endowment, inst, names)
        return inst, names, TopTradingCyclesRule(endowment)
    file_inst, file_names, rule = jsonio.load_rule_file(selector)
    if inst is not None and (inst, names) != (file_inst, file_names):
        raise PreconditionViolated("--instance disagrees with the rule file's instance")
    return file_inst, file_names, rule


def _instance_for(args):
    if getattr(args, "instance", None):
        return jsonio.load_instance(args.instance)
    return None, None


def gen_instance(seed: int, n: int, k: int, capacity_style: str, domain: str = GENERAL):
    """Reproducible pseudo-random instance and profile; same seed, same bytes."""
    if not 1 <= n <= 8 or not 1 <= k <= 6:
        raise BoundsError(f"supported ranges are 1<=n<=8 and 1<=k<=6, got n={n} k={k}")
    rng = random.Random(seed)
    if capacity_style == "unit":
        if k < n:
            raise BoundsError("unit capacities need k >= n")
        capacities = tuple(1 for _ in range(k))
    else:
        extra = 0 if capacity_style == "sum-equals-n" else 1 + rng.randrange(n)
        capacities = [0] * k
        for _ in range(n + extra):
            capacities[rng.randrange(k)] += 1
        capacities = tuple(capacities)
    null_object = 0 if domain == NULL_BOTTOM else None
    if domain == NULL_BOTTOM and capacities[0] == 0:
        capacities = (1,) + capacities[1:]
    inst = Instance(n, capacities, null_object, domain)
    prefs = all_preferences(inst)
    profile = tuple(prefs[rng.randrange(len(prefs))] for _ in range(n))
    return inst, profile


def _matching_verdict(inst, profile, matching, axiom):
    """Matching-level predicate plus a structured witness for failures."""
    if axiom == "non-wasteful":
        hit = waste_witness(inst, matching, profile)
        if hit is None:
            return True, None
        return False, {"kind": "waste", "agents": [hit[0]], "objects": [hit[1]]}
    if axiom == "pairwise":
        pair = blocking_pair(matching, profile)
        if pair is None:
            return True, None
        i, j = pair
        return False, {"kind": "swap", "agents": [i, j], "objects": [matching[i], matching[j]]}
    if is_pareto_efficient(inst, matching, profile):
        return True, None
    if not is_non_wasteful(inst, matching, profile):
        agent, obj = waste_witness(inst, matching, profile)
        return False, {"kind": "waste", "agents": [agent], "objects": [obj]}
    cycle = find_improvement_cycle(inst, matching, profile)
    return False, {"kind": "cycle", "agents": list(cycle.agents), "objects": list(cycle.objects)}


def _named_profiles(report: dict, names) -> dict:
    """Convert the profile/matching payloads of a replay report to names."""
    out = dict(report)
    for key in ("pushed_profile", "rearranged_profile"):
        if key in out:
            out[key] = jsonio.profile_to_lists(out[key], names)
    if "survivors" in out:
        out["survivors"] = [jsonio.matching_to_list(m, names) for m in out["survivors"]]
    if "sequence" in out:
        out["sequence"] = [jsonio.profile_to_lists(p, names) for p in out["sequence"]]
    if "blocking_swap" in out:
        swap = dict(out["blocking_swap"])
        swap["objects"] = [names[o] for o in swap["objects"]]
        out["blocking_swap"] = swap
    if "delegated" in out:
        out["delegated"] = _named_profiles(out["delegated"], names)
    return out


def _verdict_payload(verdict, names) -> dict:
    payload = verdict.to_dict()
    payload["witness"] = jsonio.witness_with_names(payload["witness"], names)
    payload["hypotheses_verified"] = [
        {**h, "witness": jsonio.witness_with_names(h["witness"], names)}
        for h in payload["hypotheses_verified"]
    ]
    return payload


def _cmd_gen_instance(args):
    domain = NULL_BOTTOM if args.domain == "null-bottom" else GENERAL
    inst, profile = gen_instance(args.seed, args.n, args.k, args.capacity_style, domain)
    names = jsonio.default_object_names(inst)
    result = {
        "instance": jsonio.instance_to_dict(inst, names),
        "profile": jsonio.profile_to_lists(profile, names),
    }
    return 0, result


def _cmd_rule_eval(args):
    inst, names = jsonio.load_instance(args.instance)
    profile = jsonio.load_profile(args.profile, inst, names)
    if args.command == "rsd":
        lottery = random_serial_dictatorship(inst, profile)
        return 0, {"lottery": jsonio.lottery_to_list(lottery, names)}
    if args.command == "sd":
        order = tuple(int(x) for x in args.order.split(",")) if args.order else tuple(range(inst.n))
        outcome = serial_dictatorship(inst, order, profile)
        return 0, {"order": list(order), "matching": jsonio.matching_to_list(outcome, names)}
    endowment = (
        jsonio.load_matching(args.endowment, inst, names)
        if args.endowment
        else tuple(range(inst.n))
    )
    outcome = top_trading_cycles(inst, endowment, profile)
    return 0, {
        "endowment": jsonio.matching_to_list(endowment, names),
        "matching": jsonio.matching_to_list(outcome, names),
    }


def _cmd_check_matching(args):
    inst, names = jsonio.load_instance(args.instance)
    profile = jsonio.load_profile(args.profile, inst, names)
    matching = jsonio.load_matching(args.matching, inst, names)
    ok, witness = _matching_verdict(inst, profile, matching, args.axiom)
    result = {
        "axiom": args.axiom,
        "matching": jsonio.matching_to_list(matching, names),
        "verdict": "pass" if ok else "fail",
        "witness": jsonio.witness_with_names(witness, names),
    }
    return (0 if ok else 1), result


def _cmd_check_rule(args):
    inst, names = _instance_for(args)
    inst, names, rule = _load_rule(args, inst, names)
    axiom = AXIOM_NAMES[args.axiom]
    endowment = None
    if axiom is Axiom.INDIVIDUAL_RATIONALITY:
        if isinstance(rule, TopTradingCyclesRule):
            endowment = rule.endowment
        if getattr(args, "endowment", None):
            endowment = jsonio.load_matching(args.endowment, inst, names)
    opts = CheckOptions(max_coalition=args.max_coalition, workers=args.workers)
    report = check_axiom(inst, rule, axiom, opts, endowment)
    payload = report.to_dict()
    payload["witness"] = jsonio.witness_with_names(payload["witness"], names)
    timing = {"check_wall_time_s": round(report.wall_time, 6)}
    return (0 if report.passed else 1), payload, timing


def _cmd_verify_thm1(args):
    inst, names = _instance_for(args)
    inst, names, rule = _load_rule(args, inst, names)
    verdict = verify_theorem1(inst, rule, CheckOptions(workers=args.workers))
    return (0 if verdict.passed else 1), _verdict_payload(verdict, names), dict(verdict.timings)


def _cmd_verify_prop1(args):
    inst, names = _instance_for(args)
    inst, names, rule = _load_rule(args, inst, names)
    verdict = verify_proposition1(inst, rule, CheckOptions(workers=args.workers))
    return (0 if verdict.passed else 1), _verdict_payload(verdict, names), dict(verdict.timings)


def _cmd_replay(args):
    inst, names = jsonio.load_instance(args.instance)
    profile = jsonio.load_profile(args.profile, inst, names)
    matching = jsonio.load_matching(args.matching, inst, names)
    if args.dominating:
        dominating = jsonio.load_matching(args.dominating, inst, names)
    else:
        dominating = find_dominating(inst, matching, profile)
        if dominating is None:
            raise PreconditionViolated("the matching is not Pareto-dominated")
    replay = replay_theorem1_proof if args.command == "replay-proof" else replay_theorem3_proof
    report = replay(inst, profile, matching, dominating)
    timing = report.pop("timings", {})
    if "delegated" in report:
        timing = report["delegated"].pop("timings", {})
    return (0 if report["passed"] else 1), _named_profiles(report, names), timing


def _cmd_search_cex(args):
    inst, names = jsonio.load_instance(args.instance)
    result = search_counterexample(
        inst,
        [AXIOM_NAMES[a] for a in args.require],
        AXIOM_NAMES[args.violate],
        budget=args.budget,
        seed=args.seed,
        rule_space=args.rule_space,
    )
    payload = {
        "status": result.status,
        "required": result.required,
        "violated": result.violated,
        "candidates_tried": result.candidates_tried,
        "witness": jsonio.witness_with_names(result.witness, names),
    }
    if result.found and args.rule_out:
        jsonio.dump_json_file(args.rule_out, jsonio.rule_to_dict(inst, result.rule, names))
        payload["rule_file"] = args.rule_out
    return (1 if result.found else 0), payload


_HANDLERS = {
    "gen-instance": _cmd_gen_instance,
    "rsd": _cmd_rule_eval,
    "sd": _cmd_rule_eval,
    "ttc": _cmd_rule_eval,
    "check-matching": _cmd_check_matching,
    "check-rule": _cmd_check_rule,
    "verify-thm1": _cmd_verify_thm1,
    "verify-prop1": _cmd_verify_prop1,
    "replay-proof": _cmd_replay,
    "replay-appendix": _cmd_replay,
    "search-cex": _cmd_search_cex,
}


def run(argv=None) -> int:
    """Parse arguments, execute one command, print its JSON report."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    started = time.perf_counter()
    try:
        outcome = _HANDLERS[args.command](args)
        code, result = outcome[0], outcome[1]
        extra_timing = outcome[2] if len(outcome) > 2 else {}
    except AxiomLabError as exc:
        report = {
            "command": args.command,
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }
        print(json.dumps(report, indent=2))
        return 2
    report = {
        "command": args.command,
        "result": result,
        "timing": {"wall_time_s": round(time.perf_counter() - started, 6), **extra_timing},
    }
    text = json.dumps(report, indent=2)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
