"""Exhaustive desk-scale checkers for every rule axiom.

Each checker quantifies the axiom's definition over the instance's complete
profile domain (and over every deviation, coalition, or matching the
definition mentions) and reports the first violation in a fixed lexicographic
scan order: profiles stream lexicographically, agents ascend, misreports
ascend lexicographically, coalitions ascend by size then membership.  The
witness is therefore deterministic: identical inputs yield identical
reports, and a fail witness replayed standalone reproduces the violation.

Profile scans can be partitioned across worker processes; chunks are
contiguous outer-profile ranges, so merging keeps the scan-earliest witness
and results are independent of the worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, product

from .errors import AxiomNotApplicable, PreconditionViolated
from .matchings import (
    blocking_pair,
    find_improvement_cycle,
    is_non_wasteful,
    is_pareto_efficient,
    waste_witness,
)
from .model import Instance, Matching, enumerate_matchings
from .preferences import (
    Profile,
    all_preferences,
    count_profiles,
    enumerate_profiles,
    is_monotonic_transformation,
    prefers,
    weakly_prefers,
)
from .rules import RuleDescriptor, evaluate, evaluate_lottery, is_lottery_rule, rule_label


class Axiom(str, Enum):
    STRATEGY_PROOF = "strategy_proof"
    PAIRWISE_STRATEGY_PROOF = "pairwise_strategy_proof"
    GROUP_STRATEGY_PROOF = "group_strategy_proof"
    NON_BOSSY = "non_bossy"
    MASKIN_MONOTONIC = "maskin_monotonic"
    PROB_MONOTONIC = "prob_monotonic"
    EQUAL_TREATMENT = "equal_treatment"
    EX_POST_PARETO = "ex_post_pareto"
    EX_POST_PAIRWISE = "ex_post_pairwise"
    EX_POST_NON_WASTEFUL = "ex_post_non_wasteful"
    INDIVIDUAL_RATIONALITY = "individual_rationality"


#: Axioms whose definition quantifies over a deterministic outcome function.
DETERMINISTIC_ONLY = frozenset(
    {
        Axiom.STRATEGY_PROOF,
        Axiom.PAIRWISE_STRATEGY_PROOF,
        Axiom.GROUP_STRATEGY_PROOF,
        Axiom.NON_BOSSY,
        Axiom.MASKIN_MONOTONIC,
    }
)


@dataclass
class CheckOptions:
    """Knobs for a checker run; defaults are exhaustive and single-process."""

    max_coalition: int | None = None
    workers: int = 1
    max_profiles: int | None = None


@dataclass
class CheckReport:
    """Outcome of one axiom check.

    ``profiles_checked`` counts outer-loop profiles up to and including the
    witness profile (or the whole domain on a pass), so it does not depend on
    the worker count.  ``wall_time`` is informational only and excluded from
    report comparisons.
    """

    axiom: str
    verdict: str
    witness: dict | None
    profiles_checked: int
    wall_time: float = field(compare=False)
    rule: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "axiom": self.axiom,
            "rule": self.rule,
            "verdict": self.verdict,
            "witness": self.witness,
            "profiles_checked": self.profiles_checked,
        }


def _deterministic_outcomes(inst, rule, max_profiles):
    return {p: evaluate(inst, rule, p) for p in enumerate_profiles(inst, max_profiles)}


def _lottery_outcomes(inst, rule, max_profiles):
    return {p: evaluate_lottery(inst, rule, p) for p in enumerate_profiles(inst, max_profiles)}


def _scan_strategy_proof(inst, rule, start, stop, opts, endowment):
    outcomes = _deterministic_outcomes(inst, rule, opts.max_profiles)
    prefs = all_preferences(inst)
    for idx, profile in enumerate(
        enumerate_profiles(inst, opts.max_profiles, start, stop), start
    ):
        mine = outcomes[profile]
        for agent in range(inst.n):
            truth = profile[agent]
            for misreport in prefs:
                if misreport == truth:
                    continue
                deviated = profile[:agent] + (misreport,) + profile[agent + 1 :]
                got = outcomes[deviated][agent]
                if prefers(truth, got, mine[agent]):
                    return idx, {
                        "kind": "manipulation",
                        "profile": profile,
                        "agent": agent,
                        "misreport": misreport,
                        "truthful_allotment": mine[agent],
                        "manipulated_allotment": got,
                    }
    return None


def _scan_pairwise_strategy_proof(inst, rule, start, stop, opts, endowment):
    outcomes = _deterministic_outcomes(inst, rule, opts.max_profiles)
    prefs = all_preferences(inst)
    for idx, profile in enumerate(
        enumerate_profiles(inst, opts.max_profiles, start, stop), start
    ):
        mine = outcomes[profile]
        for i, j in combinations(range(inst.n), 2):
            for ri, rj in product(prefs, prefs):
                if ri == profile[i] and rj == profile[j]:
                    continue
                deviated = list(profile)
                deviated[i], deviated[j] = ri, rj
                got = outcomes[tuple(deviated)]
                for strict, weak in ((i, j), (j, i)):
                    if prefers(profile[strict], got[strict], mine[strict]) and weakly_prefers(
                        profile[weak], got[weak], mine[weak]
                    ):
                        return idx, {
                            "kind": "pair_manipulation",
                            "profile": profile,
                            "agents": [i, j],
                            "misreports": [ri, rj],
                            "strict_agent": strict,
                        }
    return None


def _scan_group_strategy_proof(inst, rule, start, stop, opts, endowment):
    outcomes = _deterministic_outcomes(inst, rule, opts.max_profiles)
    prefs = all_preferences(inst)
    cap = opts.max_coalition if opts.max_coalition is not None else inst.n
    cap = min(cap, inst.n)
    for idx, profile in enumerate(
        enumerate_profiles(inst, opts.max_profiles, start, stop), start
    ):
        mine = outcomes[profile]
        for size in range(1, cap + 1):
            for coalition in combinations(range(inst.n), size):
                truthful = tuple(profile[a] for a in coalition)
                for reports in product(prefs, repeat=size):
                    if reports == truthful:
                        continue
                    deviated = list(profile)
                    for a, r in zip(coalition, reports):
                        deviated[a] = r
                    got = outcomes[tuple(deviated)]
                    if all(
                        weakly_prefers(profile[a], got[a], mine[a]) for a in coalition
                    ) and any(prefers(profile[a], got[a], mine[a]) for a in coalition):
                        return idx, {
                            "kind": "group_manipulation",
                            "profile": profile,
                            "agents": list(coalition),
                            "misreports": list(reports),
                        }
    return None


def _scan_non_bossy(inst, rule, start, stop, opts, endowment):
    outcomes = _deterministic_outcomes(inst, rule, opts.max_profiles)
    prefs = all_preferences(inst)
    for idx, profile in enumerate(
        enumerate_profiles(inst, opts.max_profiles, start, stop), start
    ):
        mine = outcomes[profile]
        for agent in range(inst.n):
            for misreport in prefs:
                if misreport == profile[agent]:
                    continue
                deviated = profile[:agent] + (misreport,) + profile[agent + 1 :]
                got = outcomes[deviated]
                if got[agent] == mine[agent] and got != mine:
                    return idx, {
                        "kind": "bossiness",
                        "profile": profile,
                        "agent": agent,
                        "misreport": misreport,
                        "outcome": mine,
                        "flipped_outcome": got,
                    }
    return None


def _scan_maskin_monotonic(inst, rule, start, stop, opts, endowment):
    outcomes = _deterministic_outcomes(inst, rule, opts.max_profiles)
    domain = list(outcomes)
    for idx, profile in enumerate(
        enumerate_profiles(inst, opts.max_profiles, start, stop), start
    ):
        chosen = outcomes[profile]
        for transformed in domain:
            if is_monotonic_transformation(profile, transformed, chosen):
                if outcomes[transformed] != chosen:
                    return idx, {
                        "kind": "monotonicity",
                        "profile": profile,
                        "transformed": transformed,
                        "matching": chosen,
                        "new_outcome": outcomes[transformed],
                    }
    return None


def _scan_prob_monotonic(inst, rule, start, stop, opts, endowment):
    lotteries = _lottery_outcomes(inst, rule, opts.max_profiles)
    domain = list(lotteries)
    for idx, profile in enumerate(
        enumerate_profiles(inst, opts.max_profiles, start, stop), start
    ):
        lottery = lotteries[profile]
        support = lottery.support()
        for transformed in domain:
            other = lotteries[transformed]
            for matching in support:
                if is_monotonic_transformation(profile, transformed, matching):
                    if other.weight(matching) < lottery.weight(matching):
                        return idx, {
                            "kind": "prob_monotonicity",
                            "profile": profile,
                            "transformed": transformed,
                            "matching": matching,
                            "weight_before": str(lottery.weight(matching)),
                            "weight_after": str(other.weight(matching)),
                        }
    return None


def _swap_allotments(matching: Matching, i: int, j: int) -> Matching:
    swapped = list(matching)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    return tuple(swapped)


def _scan_equal_treatment(inst, rule, start, stop, opts, endowment):
    lotteries = _lottery_outcomes(inst, rule, opts.max_profiles)
    for idx, profile in enumerate(
        enumerate_profiles(inst, opts.max_profiles, start, stop), start
    ):
        twins = [
            (i, j)
            for i, j in combinations(range(inst.n), 2)
            if profile[i] == profile[j]
        ]
        if not twins:
            continue
        lottery = lotteries[profile]
        for i, j in twins:
            for matching in lottery.support():
                swapped = _swap_allotments(matching, i, j)
                if lottery.weight(swapped) != lottery.weight(matching):
                    return idx, {
                        "kind": "equal_treatment",
                        "profile": profile,
                        "agents": [i, j],
                        "matching": matching,
                        "swapped": swapped,
                        "weight": str(lottery.weight(matching)),
                        "swapped_weight": str(lottery.weight(swapped)),
                    }
    return None


def _support_witness(inst, profile, matching, kind):
    """Structured witness for a support matching failing an ex-post axiom."""
    if kind == "waste":
        agent, obj = waste_witness(inst, matching, profile)
        return {"kind": "waste", "agents": [agent], "objects": [obj]}
    if kind == "swap":
        i, j = blocking_pair(matching, profile)
        return {"kind": "swap", "agents": [i, j], "objects": [matching[i], matching[j]]}
    if not is_non_wasteful(inst, matching, profile):
        agent, obj = waste_witness(inst, matching, profile)
        return {"kind": "waste", "agents": [agent], "objects": [obj]}
    cycle = find_improvement_cycle(inst, matching, profile)
    return {"kind": "cycle", "agents": list(cycle.agents), "objects": list(cycle.objects)}


def _scan_ex_post(predicate_kind):
    def scan(inst, rule, start, stop, opts, endowment):
        lotteries = _lottery_outcomes(inst, rule, opts.max_profiles)
        universe = enumerate_matchings(inst)
        for idx, profile in enumerate(
            enumerate_profiles(inst, opts.max_profiles, start, stop), start
        ):
            for matching in lotteries[profile].support():
                if predicate_kind == "pareto":
                    ok = is_pareto_efficient(inst, matching, profile, universe)
                elif predicate_kind == "swap":
                    ok = blocking_pair(matching, profile) is None
                else:
                    ok = is_non_wasteful(inst, matching, profile)
                if not ok:
                    witness = _support_witness(inst, profile, matching, predicate_kind)
                    witness["profile"] = profile
                    witness["matching"] = matching
                    return idx, witness
        return None

    return scan


def _scan_individual_rationality(inst, rule, start, stop, opts, endowment):
    lotteries = _lottery_outcomes(inst, rule, opts.max_profiles)
    for idx, profile in enumerate(
        enumerate_profiles(inst, opts.max_profiles, start, stop), start
    ):
        for matching in lotteries[profile].support():
            for agent in range(inst.n):
                if not weakly_prefers(profile[agent], matching[agent], endowment[agent]):
                    return idx, {
                        "kind": "individual_rationality",
                        "profile": profile,
                        "matching": matching,
                        "agents": [agent],
                        "objects": [matching[agent], endowment[agent]],
                    }
    return None


_SCANNERS = {
    Axiom.STRATEGY_PROOF: _scan_strategy_proof,
    Axiom.PAIRWISE_STRATEGY_PROOF: _scan_pairwise_strategy_proof,
    Axiom.GROUP_STRATEGY_PROOF: _scan_group_strategy_proof,
    Axiom.NON_BOSSY: _scan_non_bossy,
    Axiom.MASKIN_MONOTONIC: _scan_maskin_monotonic,
    Axiom.PROB_MONOTONIC: _scan_prob_monotonic,
    Axiom.EQUAL_TREATMENT: _scan_equal_treatment,
    Axiom.EX_POST_PARETO: _scan_ex_post("pareto"),
    Axiom.EX_POST_PAIRWISE: _scan_ex_post("swap"),
    Axiom.EX_POST_NON_WASTEFUL: _scan_ex_post("waste"),
    Axiom.INDIVIDUAL_RATIONALITY: _scan_individual_rationality,
}


def _scan_chunk(args):
    inst, rule, axiom, endowment, start, stop, opts = args
    return _SCANNERS[Axiom(axiom)](inst, rule, start, stop, opts, endowment)


def check_axiom(
    inst: Instance,
    rule: RuleDescriptor,
    axiom: Axiom,
    opts: CheckOptions | None = None,
    endowment: Matching | None = None,
) -> CheckReport:
    """Check one axiom for one rule over the full profile domain.

    Pass means the universally quantified definition held everywhere within
    the options' bounds; fail carries the scan-first witness.  Lottery rules
    reject the deterministic-only incentive axioms with AxiomNotApplicable;
    deterministic rules are checked against lottery axioms as the degenerate
    weight-1 lottery.
    """
    axiom = Axiom(axiom)
    opts = opts or CheckOptions()
    if axiom in DETERMINISTIC_ONLY and is_lottery_rule(rule):
        raise AxiomNotApplicable(f"{axiom.value} is defined for deterministic rules only")
    if axiom is Axiom.INDIVIDUAL_RATIONALITY:
        if endowment is None:
            raise AxiomNotApplicable("individual rationality needs an endowment")
        if not inst.is_housing_market():
            raise AxiomNotApplicable("individual rationality is checked on housing markets")

    started = time.perf_counter()
    total = count_profiles(inst)
    if opts.workers > 1 and total >= 4 * opts.workers:
        chunk = (total + opts.workers - 1) // opts.workers
        jobs = [
            (inst, rule, axiom.value, endowment, lo, min(lo + chunk, total), opts)
            for lo in range(0, total, chunk)
        ]
        with ProcessPoolExecutor(max_workers=opts.workers) as pool:
            hits = [h for h in pool.map(_scan_chunk, jobs) if h is not None]
        hit = min(hits, key=lambda h: h[0]) if hits else None
    else:
        hit = _SCANNERS[axiom](inst, rule, 0, None, opts, endowment)
    elapsed = time.perf_counter() - started
    if hit is None:
        return CheckReport(axiom.value, "pass", None, total, elapsed, rule_label(rule))
    return CheckReport(axiom.value, "fail", hit[1], hit[0] + 1, elapsed, rule_label(rule))


def check_individual_rationality(
    inst: Instance,
    rule: RuleDescriptor,
    endowment: Matching,
    opts: CheckOptions | None = None,
) -> CheckReport:
    """Every agent weakly prefers her allotment to her endowment, everywhere."""
    return check_axiom(inst, rule, Axiom.INDIVIDUAL_RATIONALITY, opts, endowment)


def replay_witness(
    inst: Instance, rule: RuleDescriptor, axiom: Axiom, witness: dict
) -> bool:
    """Re-verify a fail witness from scratch against the rule.

    Returns True iff the recorded violation still occurs; used to guarantee
    witness soundness independently of the scan that produced it.
    """
    axiom = Axiom(axiom)
    profile = tuple(tuple(p) for p in witness["profile"])
    if axiom is Axiom.STRATEGY_PROOF:
        mine = evaluate(inst, rule, profile)
        agent = witness["agent"]
        deviated = profile[:agent] + (tuple(witness["misreport"]),) + profile[agent + 1 :]
        return prefers(
            profile[agent], evaluate(inst, rule, deviated)[agent], mine[agent]
        )
    if axiom is Axiom.PAIRWISE_STRATEGY_PROOF:
        mine = evaluate(inst, rule, profile)
        i, j = witness["agents"]
        deviated = list(profile)
        deviated[i], deviated[j] = map(tuple, witness["misreports"])
        got = evaluate(inst, rule, tuple(deviated))
        strict = witness["strict_agent"]
        weak = j if strict == i else i
        return prefers(profile[strict], got[strict], mine[strict]) and weakly_prefers(
            profile[weak], got[weak], mine[weak]
        )
    if axiom is Axiom.GROUP_STRATEGY_PROOF:
        mine = evaluate(inst, rule, profile)
        deviated = list(profile)
        for a, r in zip(witness["agents"], witness["misreports"]):
            deviated[a] = tuple(r)
        got = evaluate(inst, rule, tuple(deviated))
        agents = witness["agents"]
        return all(weakly_prefers(profile[a], got[a], mine[a]) for a in agents) and any(
            prefers(profile[a], got[a], mine[a]) for a in agents
        )
    if axiom is Axiom.NON_BOSSY:
        mine = evaluate(inst, rule, profile)
        agent = witness["agent"]
        deviated = profile[:agent] + (tuple(witness["misreport"]),) + profile[agent + 1 :]
        got = evaluate(inst, rule, deviated)
        return got[agent] == mine[agent] and got != mine
    if axiom is Axiom.MASKIN_MONOTONIC:
        transformed = tuple(tuple(p) for p in witness["transformed"])
        chosen = evaluate(inst, rule, profile)
        return is_monotonic_transformation(profile, transformed, chosen) and evaluate(
            inst, rule, transformed
        ) != chosen
    if axiom is Axiom.PROB_MONOTONIC:
        transformed = tuple(tuple(p) for p in witness["transformed"])
        matching = tuple(witness["matching"])
        before = evaluate_lottery(inst, rule, profile)
        after = evaluate_lottery(inst, rule, transformed)
        return is_monotonic_transformation(profile, transformed, matching) and after.weight(
            matching
        ) < before.weight(matching)
    if axiom is Axiom.EQUAL_TREATMENT:
        lottery = evaluate_lottery(inst, rule, profile)
        matching = tuple(witness["matching"])
        swapped = tuple(witness["swapped"])
        i, j = witness["agents"]
        return profile[i] == profile[j] and lottery.weight(matching) != lottery.weight(swapped)
    if axiom in (Axiom.EX_POST_PARETO, Axiom.EX_POST_PAIRWISE, Axiom.EX_POST_NON_WASTEFUL):
        matching = tuple(witness["matching"])
        lottery = evaluate_lottery(inst, rule, profile)
        if lottery.weight(matching) == 0:
            return False
        if axiom is Axiom.EX_POST_PARETO:
            return not is_pareto_efficient(inst, matching, profile)
        if axiom is Axiom.EX_POST_PAIRWISE:
            return blocking_pair(matching, profile) is not None
        return not is_non_wasteful(inst, matching, profile)
    if axiom is Axiom.INDIVIDUAL_RATIONALITY:
        matching = tuple(witness["matching"])
        lottery = evaluate_lottery(inst, rule, profile)
        agent = witness["agents"][0]
        allotment, endowed = witness["objects"]
        return lottery.weight(matching) > 0 and not weakly_prefers(
            profile[agent], allotment, endowed
        )
    raise PreconditionViolated(f"no replay defined for {axiom}")
