"""Theorem harnesses, proof replays, and counterexample search."""

import pytest

from axiomlab import (
    AxiomNotApplicable,
    Instance,
    Lottery,
    PreconditionViolated,
    RandomSerialDictatorshipRule,
    SerialDictatorshipRule,
    TabulatedLotteryRule,
    TopTradingCyclesRule,
    bossy_flip_rule,
    enumerate_profiles,
    partition_agents,
    random_serial_dictatorship,
    replay_theorem1_proof,
    replay_theorem3_proof,
    search_counterexample,
    serial_dictatorship,
    verify_proposition1,
    verify_theorem1,
)
from axiomlab.axioms import Axiom, check_axiom
from axiomlab.jsonio import rule_from_dict, rule_to_dict
from axiomlab.model import NULL_BOTTOM
from axiomlab.preferences import common_rank_rearrange, push_to_top


def test_verify_theorem1_rsd_tight(unit3):
    verdict = verify_theorem1(unit3, RandomSerialDictatorshipRule())
    assert verdict.theorem == "Thm1b"
    assert all(h["verdict"] == "pass" for h in verdict.hypotheses_verified)
    assert [h["axiom"] for h in verdict.hypotheses_verified] == ["prob_monotonic"]
    assert verdict.conclusion_verified is True
    assert verdict.details["ex_post_pairwise"] and verdict.details["ex_post_pareto"]


def test_verify_theorem1_rsd_slack(slack3):
    verdict = verify_theorem1(slack3, RandomSerialDictatorshipRule())
    assert verdict.theorem == "Thm1a"
    assert [h["axiom"] for h in verdict.hypotheses_verified] == [
        "prob_monotonic",
        "ex_post_non_wasteful",
    ]
    assert verdict.conclusion_verified is True


def test_verify_theorem1_deterministic_labels(unit3):
    for rule in (SerialDictatorshipRule((0, 1, 2)), TopTradingCyclesRule((0, 1, 2))):
        verdict = verify_theorem1(unit3, rule)
        assert verdict.theorem == "Cor2"
        assert verdict.conclusion_verified is True
        assert [h["axiom"] for h in verdict.hypotheses_verified] == ["maskin_monotonic"]
    nb = Instance(3, (1, 1, 1, 1), null_object=0, domain=NULL_BOTTOM)
    verdict_nb = verify_theorem1(nb, SerialDictatorshipRule((0, 1, 2)))
    assert verdict_nb.theorem == "Thm3"
    assert verdict_nb.conclusion_verified is True


def test_verify_theorem1_gates_on_failed_hypotheses(unit3):
    table = {
        p: Lottery.point(serial_dictatorship(unit3, (0, 1, 2), p))
        for p in enumerate_profiles(unit3)
    }
    bad_profile = ((0, 1, 2), (0, 1, 2), (0, 1, 2))
    table[bad_profile] = Lottery.point(serial_dictatorship(unit3, (2, 1, 0), bad_profile))
    verdict = verify_theorem1(unit3, TabulatedLotteryRule(table))
    assert verdict.conclusion_verified is None
    assert verdict.details["status"] == "hypotheses not met"
    assert verdict.witness is not None


def test_replay_theorem1_on_cycle_toy(unit3, cycle_profile):
    report = replay_theorem1_proof(unit3, cycle_profile, (0, 1, 2), (1, 2, 0))
    assert report["passed"]
    assert report["survivors"] == [(1, 2, 0)]
    assert report["matchings_scanned"] == 6


def test_replay_theorem1_on_showcase(showcase8):
    inst, rearranged, dominated, improved = showcase8
    report = replay_theorem1_proof(inst, rearranged, dominated, improved)
    assert report["passed"]
    assert report["survivors"] == [improved]
    # the rearranged profile is a fixed point of both constructions
    assert report["pushed_profile"] == rearranged
    assert report["rearranged_profile"] == rearranged


def test_replay_theorem1_requires_domination(unit3, cycle_profile):
    with pytest.raises(PreconditionViolated):
        replay_theorem1_proof(unit3, cycle_profile, (0, 1, 2), (0, 1, 2))


def test_replay_theorem1_rejects_null_bottom(null_toy):
    inst, profile, matching, improved = null_toy
    with pytest.raises(PreconditionViolated):
        replay_theorem1_proof(inst, profile, matching, improved)


def test_partition_agents(null_toy):
    inst, _, matching, improved = null_toy
    part = partition_agents(inst, matching, improved)
    assert part.cycle_agents == (0, 2, 1)
    assert part.fixed_real == frozenset()
    assert part.null_agents == frozenset({3})
    assert part.kappa == 3


def test_partition_rejects_null_movers():
    inst = Instance(2, (1, 1, 1), null_object=0, domain=NULL_BOTTOM)
    with pytest.raises(PreconditionViolated):
        partition_agents(inst, (1, 0), (1, 2))  # agent 1 moves off the null object


def test_replay_theorem3_toy(null_toy):
    inst, profile, matching, improved = null_toy
    report = replay_theorem3_proof(inst, profile, matching, improved)
    assert report["passed"] and not report["degenerate"]
    assert report["partition"]["cycle_agents"] == [0, 2, 1]
    assert report["partition"]["null_agents"] == [3]
    assert report["sequence_length"] == 3
    assert report["blocking_swap"]["agents"] == [0, 1]
    assert report["blocking_swap"]["cycle_positions"] == [1, 3]


def test_replay_theorem3_degenerate_delegates():
    inst = Instance(3, (1, 1, 1, 1), null_object=0, domain=NULL_BOTTOM)
    profile = ((2, 1, 3, 0), (3, 2, 1, 0), (1, 3, 2, 0))
    matching = (1, 2, 3)
    improved = (2, 3, 1)
    report = replay_theorem3_proof(inst, profile, matching, improved)
    assert report["degenerate"]
    assert report["passed"]
    assert report["delegated"]["assertions"]["unique_survivor_is_improved"]


def test_replay_theorem3_rejects_two_cycle():
    inst = Instance(3, (1, 1, 1, 1), null_object=0, domain=NULL_BOTTOM)
    profile = ((2, 1, 3, 0), (1, 2, 3, 0), (1, 2, 3, 0))
    with pytest.raises(PreconditionViolated):
        replay_theorem3_proof(inst, profile, (1, 2, 0), (2, 1, 0))


def test_replay_theorem3_reduces_multiple_cycles():
    """Two disjoint 3-cycles plus a null-object agent: the replay keeps one
    cycle, re-profiles the other, and still ends at the blocking swap."""
    inst = Instance(7, (1,) * 7, null_object=0, domain=NULL_BOTTOM)
    matching = (1, 2, 3, 4, 5, 6, 0)
    improved = (2, 3, 1, 5, 6, 4, 0)
    base = (1, 2, 3, 4, 5, 6, 0)

    def pref_for(agent):
        if matching[agent] == 0:
            return base
        better = improved[agent]
        rest = [o for o in base if o not in (better, matching[agent])]
        return (better, matching[agent], *rest[:-1], 0)

    profile = tuple(pref_for(i) for i in range(7))
    report = replay_theorem3_proof(inst, profile, matching, improved)
    assert report["passed"]
    assert sorted(report["partition"]["cycle_agents"]) == [0, 1, 2]
    assert report["partition"]["fixed_real"] == [3, 4, 5]  # re-profiled cycle


def test_replay_theorem3_four_cycle_canonical():
    """The unit-capacity canonical layout with a 4-cycle: partition, step
    count, and the first/last cycle agents' blocking swap, all frozen."""
    inst = Instance(7, (2, 1, 1, 1, 1, 1), null_object=0, domain=NULL_BOTTOM)
    matching = (1, 2, 3, 4, 5, 0, 0)
    improved = (4, 1, 2, 3, 5, 0, 0)
    profile = (
        (2, 4, 5, 1, 3, 0),
        (5, 1, 3, 2, 4, 0),
        (2, 5, 4, 3, 1, 0),
        (1, 3, 5, 4, 2, 0),
        (3, 2, 5, 1, 4, 0),
        (2, 3, 1, 5, 4, 0),
        (4, 5, 2, 1, 3, 0),
    )
    report = replay_theorem3_proof(inst, profile, matching, improved)
    assert report["passed"]
    assert report["partition"] == {
        "cycle_agents": [0, 1, 2, 3],
        "fixed_real": [4],
        "null_agents": [5, 6],
        "kappa": 5,
    }
    assert report["sequence_length"] == 4
    assert report["blocking_swap"] == {
        "agents": [0, 3],
        "cycle_positions": [1, 4],
        "objects": [1, 4],
    }


def test_object_counts_after_rearrangement(unit3):
    """At any rearranged profile, every pairwise-efficient non-wasteful
    matching assigns each object exactly as the pushed matching does
    (exhaustive over all profiles and target matchings at n=3)."""
    from axiomlab.model import enumerate_matchings as all_matchings
    from axiomlab.model import object_usage

    matchings = all_matchings(unit3)
    for profile in enumerate_profiles(unit3):
        for target in matchings:
            pushed = push_to_top(unit3, profile, target)
            rearranged = common_rank_rearrange(unit3, pushed, target)
            usage = object_usage(unit3, target)
            for m in matchings:
                from axiomlab import is_non_wasteful, is_pairwise_efficient

                if is_pairwise_efficient(m, rearranged) and is_non_wasteful(
                    unit3, m, rearranged
                ):
                    assert object_usage(unit3, m) == usage


def test_lottery_rule_on_null_bottom_reports_open_domain():
    """The equivalence claim for lottery rules is only proven on the general
    domain; on the null-bottom domain the harness still runs but flags the
    domain in its details."""
    inst = Instance(3, (1, 1, 1, 1), null_object=0, domain=NULL_BOTTOM)
    verdict = verify_theorem1(inst, RandomSerialDictatorshipRule())
    assert verdict.theorem == "Thm1a"  # slack capacity: the null has a spare copy
    assert "note" in verdict.details
    assert verdict.conclusion_verified is True  # RSD behaves here regardless


def test_rsd_puts_full_weight_on_unanimous_top(unit3, cycle_profile):
    """After the rearrangement every agent tops her improved allotment, so
    every dictatorship order delivers it: the lottery is a point mass."""
    improved = (1, 2, 0)
    pushed = push_to_top(unit3, cycle_profile, improved)
    rearranged = common_rank_rearrange(unit3, pushed, improved)
    lottery = random_serial_dictatorship(unit3, rearranged)
    assert lottery == Lottery.point(improved)


def test_verify_proposition1(unit3):
    for rule in (SerialDictatorshipRule((0, 1, 2)), TopTradingCyclesRule((0, 1, 2))):
        verdict = verify_proposition1(unit3, rule)
        assert verdict.conclusion_verified is True
        assert verdict.details["all_hold"] is True
    bossy = verify_proposition1(unit3, bossy_flip_rule(unit3))
    assert bossy.conclusion_verified is True
    assert bossy.details["all_hold"] is False
    assert set(bossy.details["properties"].values()) == {False}
    with pytest.raises(AxiomNotApplicable):
        verify_proposition1(unit3, RandomSerialDictatorshipRule())


def test_search_finds_pairwise_but_not_pareto_rule(unit3):
    result = search_counterexample(
        unit3,
        required=[Axiom.EX_POST_PAIRWISE, Axiom.EX_POST_NON_WASTEFUL],
        violated=Axiom.EX_POST_PARETO,
        budget=5,
        seed=1,
    )
    assert result.found
    assert check_axiom(unit3, result.rule, Axiom.EX_POST_PAIRWISE).passed
    assert check_axiom(unit3, result.rule, Axiom.EX_POST_NON_WASTEFUL).passed
    assert not check_axiom(unit3, result.rule, Axiom.EX_POST_PARETO).passed
    # consistent with the deterministic equivalence: such a rule cannot be
    # Maskin monotonic
    assert not check_axiom(unit3, result.rule, Axiom.MASKIN_MONOTONIC).passed


def test_search_round_trips_through_serialization(unit3):
    result = search_counterexample(
        unit3,
        required=[Axiom.EX_POST_PAIRWISE, Axiom.EX_POST_NON_WASTEFUL],
        violated=Axiom.EX_POST_PARETO,
        budget=3,
        seed=2,
    )
    assert result.found
    payload = rule_to_dict(unit3, result.rule)
    loaded_inst, _, loaded_rule = rule_from_dict(payload)
    assert loaded_inst == unit3
    assert loaded_rule.table == dict(result.rule.table)
    assert not check_axiom(loaded_inst, loaded_rule, Axiom.EX_POST_PARETO).passed


def test_search_respects_theorem1(unit3):
    """Probabilistic monotonicity plus the two weak efficiency axioms leave no
    room for an ex-post Pareto violation; the search must come up empty."""
    for inst in (Instance(2, (1, 1)), unit3):
        result = search_counterexample(
            inst,
            required=[
                Axiom.PROB_MONOTONIC,
                Axiom.EX_POST_NON_WASTEFUL,
                Axiom.EX_POST_PAIRWISE,
            ],
            violated=Axiom.EX_POST_PARETO,
            budget=25,
            seed=3,
            rule_space="lottery",
        )
        assert result.status == "budget_exhausted"
        assert result.rule is None


def test_search_budget_zero(unit3):
    result = search_counterexample(
        unit3, required=[], violated=Axiom.EX_POST_PARETO, budget=0
    )
    assert result.status == "budget_exhausted"
    assert result.candidates_tried == 0
