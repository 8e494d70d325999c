"""Allocation rules and the uniform descriptor the checkers consume.

Lottery weights are exact ``fractions.Fraction`` values throughout; no
floating point is used anywhere, so weight comparisons in the monotonicity
checkers are exact.  A deterministic rule can always be viewed as the
degenerate lottery putting weight 1 on its matching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterator, Mapping, Union

from .errors import PreconditionViolated, SizeOverflow, TableMiss
from .model import Instance, Matching, enumeration_bound
from .preferences import Profile, enumerate_profiles, preference_ranks


class Lottery:
    """A probability distribution over matchings with exact rational weights.

    Zero weights are dropped, the support is kept in lexicographic matching
    order, and the weights must sum to exactly 1.
    """

    __slots__ = ("_weights",)

    def __init__(self, weights: Mapping[Matching, Fraction]):
        cleaned = {
            m: Fraction(w) for m, w in sorted(weights.items()) if w != 0
        }
        if any(w < 0 for w in cleaned.values()):
            raise ValueError("lottery weights must be non-negative")
        if sum(cleaned.values(), Fraction(0)) != 1:
            raise ValueError("lottery weights must sum to exactly 1")
        self._weights = cleaned

    @classmethod
    def point(cls, matching: Matching) -> "Lottery":
        return cls({matching: Fraction(1)})

    def weight(self, matching: Matching) -> Fraction:
        return self._weights.get(matching, Fraction(0))

    def support(self) -> tuple[Matching, ...]:
        return tuple(self._weights)

    def items(self) -> Iterator[tuple[Matching, Fraction]]:
        return iter(self._weights.items())

    def is_degenerate(self) -> bool:
        return len(self._weights) == 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lottery):
            return NotImplemented
        return self._weights == other._weights

    def __hash__(self) -> int:
        return hash(tuple(self._weights.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{m}: {w}" for m, w in self._weights.items())
        return f"Lottery({{{inner}}})"


@dataclass(frozen=True)
class SerialDictatorshipRule:
    """Agents pick their best remaining object in a fixed order."""

    order: tuple[int, ...]


@dataclass(frozen=True)
class RandomSerialDictatorshipRule:
    """Uniform mixture of serial dictatorship over all agent orders."""


@dataclass(frozen=True)
class TopTradingCyclesRule:
    """Endowment exchange on a housing market."""

    endowment: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class TabulatedDeterministicRule:
    """Explicit profile-to-matching table, total over the enumerated domain."""

    table: Mapping[Profile, Matching]


@dataclass(frozen=True, eq=False)
class TabulatedLotteryRule:
    """Explicit profile-to-lottery table, total over the enumerated domain."""

    table: Mapping[Profile, Lottery]


RuleDescriptor = Union[
    SerialDictatorshipRule,
    RandomSerialDictatorshipRule,
    TopTradingCyclesRule,
    TabulatedDeterministicRule,
    TabulatedLotteryRule,
]


def is_lottery_rule(rule: RuleDescriptor) -> bool:
    return isinstance(rule, (RandomSerialDictatorshipRule, TabulatedLotteryRule))


def rule_label(rule: RuleDescriptor) -> str:
    """Short human-readable descriptor for reports."""
    if isinstance(rule, SerialDictatorshipRule):
        return "sd(" + ",".join(map(str, rule.order)) + ")"
    if isinstance(rule, RandomSerialDictatorshipRule):
        return "rsd"
    if isinstance(rule, TopTradingCyclesRule):
        return "ttc(" + ",".join(map(str, rule.endowment)) + ")"
    if isinstance(rule, TabulatedDeterministicRule):
        return "tabulated_deterministic"
    if isinstance(rule, TabulatedLotteryRule):
        return "tabulated_lottery"
    raise TypeError(f"unknown rule {rule!r}")


def serial_dictatorship(inst: Instance, order: tuple[int, ...], profile: Profile) -> Matching:
    """Run serial dictatorship for one agent order.

    >>> inst = Instance(n=2, capacities=(1, 1))
    >>> serial_dictatorship(inst, (0, 1), ((0, 1), (0, 1)))
    (0, 1)
    >>> serial_dictatorship(inst, (1, 0), ((0, 1), (0, 1)))
    (1, 0)
    """
    if sorted(order) != list(range(inst.n)):
        raise PreconditionViolated(f"{order} is not an order of all {inst.n} agents")
    remaining = list(inst.capacities)
    result = [-1] * inst.n
    for agent in order:
        for obj in profile[agent]:
            if remaining[obj] > 0:
                remaining[obj] -= 1
                result[agent] = obj
                break
    assert all(obj >= 0 for obj in result), "total capacity below n slipped through"
    return tuple(result)


def random_serial_dictatorship(
    inst: Instance, profile: Profile, max_orders: int | None = None
) -> Lottery:
    """Exact RSD lottery: weight of a matching = (orders reaching it) / n!.

    Enumerates all n! orders; there is no sampling mode, because the engine
    verifies exact claims and desk-scale n keeps n! small.
    """
    total = math.factorial(inst.n)
    bound = enumeration_bound(max_orders)
    if total > bound:
        raise SizeOverflow(f"{total} agent orders exceed the bound of {bound}")
    counts: dict[Matching, int] = {}
    for order in permutations(range(inst.n)):
        outcome = serial_dictatorship(inst, order, profile)
        counts[outcome] = counts.get(outcome, 0) + 1
    return Lottery({m: Fraction(c, total) for m, c in counts.items()})


def top_trading_cycles(
    inst: Instance, endowment: Matching, profile: Profile
) -> Matching:
    """Top trading cycles on a housing market.

    Every agent points at the owner of her best remaining object; cycles
    trade and leave.  Requires unit capacities, as many objects as agents,
    and a bijective endowment.

    >>> inst = Instance(n=3, capacities=(1, 1, 1))
    >>> top_trading_cycles(inst, (0, 1, 2), ((1, 0, 2), (2, 1, 0), (0, 1, 2)))
    (1, 2, 0)
    """
    if not inst.is_housing_market():
        raise PreconditionViolated("top trading cycles needs a housing market instance")
    if sorted(endowment) != list(range(inst.n)):
        raise PreconditionViolated(f"endowment {endowment} is not a bijection")
    owner = {endowment[i]: i for i in range(inst.n)}
    active = set(range(inst.n))
    result = [-1] * inst.n
    while active:
        best = {}
        points_to = {}
        for agent in sorted(active):
            top = next(obj for obj in profile[agent] if owner.get(obj) in active)
            best[agent] = top
            points_to[agent] = owner[top]
        visited: set[int] = set()
        for agent in sorted(active):
            if agent in visited:
                continue
            path = []
            position = {}
            current = agent
            while current not in visited:
                visited.add(current)
                position[current] = len(path)
                path.append(current)
                current = points_to[current]
            if current in position:  # closed a fresh cycle
                for member in path[position[current]:]:
                    result[member] = best[member]
                    active.discard(member)
                    del owner[endowment[member]]
    return tuple(result)


def evaluate(inst: Instance, rule: RuleDescriptor, profile: Profile):
    """Dispatch a rule descriptor: Matching for deterministic, Lottery otherwise."""
    if isinstance(rule, SerialDictatorshipRule):
        return serial_dictatorship(inst, rule.order, profile)
    if isinstance(rule, RandomSerialDictatorshipRule):
        return random_serial_dictatorship(inst, profile)
    if isinstance(rule, TopTradingCyclesRule):
        return top_trading_cycles(inst, rule.endowment, profile)
    if isinstance(rule, (TabulatedDeterministicRule, TabulatedLotteryRule)):
        try:
            return rule.table[profile]
        except KeyError:
            raise TableMiss(f"no table entry for profile {profile}")
    raise TypeError(f"unknown rule {rule!r}")


def evaluate_lottery(inst: Instance, rule: RuleDescriptor, profile: Profile) -> Lottery:
    """Evaluate any rule as a lottery; deterministic outcomes get weight 1."""
    outcome = evaluate(inst, rule, profile)
    if isinstance(outcome, Lottery):
        return outcome
    return Lottery.point(outcome)


def tabulate(inst: Instance, rule: RuleDescriptor) -> RuleDescriptor:
    """Freeze any rule into a tabulated rule over the full profile domain."""
    table = {p: evaluate(inst, rule, p) for p in enumerate_profiles(inst)}
    if is_lottery_rule(rule):
        return TabulatedLotteryRule(table)
    return TabulatedDeterministicRule(table)


def bossy_flip_rule(inst: Instance) -> TabulatedDeterministicRule:
    """A strategy-proof but bossy showcase rule on 3 agents, 3 unit objects.

    Agent 0 always receives object 0.  Agents 1 and 2 receive objects 1 and 2
    in an order controlled entirely by agent 0's report: if agent 0 ranks
    object 1 above object 2 they get (1, 2), otherwise (2, 1).  Nobody can
    change her own allotment, yet agent 0 flips the other two.
    """
    if inst.n != 3 or inst.capacities != (1, 1, 1):
        raise PreconditionViolated("the showcase bossy rule needs n=3, unit capacities")
    table: dict[Profile, Matching] = {}
    for profile in enumerate_profiles(inst):
        ranks = preference_ranks(profile[0])
        if ranks[1] < ranks[2]:
            table[profile] = (0, 1, 2)
        else:
            table[profile] = (0, 2, 1)
    return TabulatedDeterministicRule(table)


def random_tabulated_rule(inst: Instance, seed: int) -> TabulatedDeterministicRule:
    """Seeded random profile-to-matching table over all feasible matchings."""
    import random

    from .model import enumerate_matchings

    rng = random.Random(seed)
    matchings = enumerate_matchings(inst)
    table = {
        profile: matchings[rng.randrange(len(matchings))]
        for profile in enumerate_profiles(inst)
    }
    return TabulatedDeterministicRule(table)


def rsd_support_is_sound(inst: Instance, profile: Profile) -> bool:
    """Every RSD support matching is reachable by some serial dictatorship."""
    lottery = random_serial_dictatorship(inst, profile)
    outcomes = {
        serial_dictatorship(inst, order, profile)
        for order in permutations(range(inst.n))
    }
    return set(lottery.support()) == outcomes
