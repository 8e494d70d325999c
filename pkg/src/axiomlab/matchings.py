"""Efficiency predicates on matchings and improvement-cycle machinery.

``is_pareto_efficient`` is the ground-truth oracle of the whole engine: it
scans the full matching set for a dominating matching.  Cycle detection is a
cross-check, never a substitute.  All tie-breaking is fixed (lowest agent
ids first) so every witness is reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionViolated
from .model import Instance, Matching, enumerate_matchings, is_feasible, object_usage
from .preferences import Profile, preference_ranks, prefers


@dataclass(frozen=True)
class ImprovementCycle:
    """Agents who each strictly prefer the next agent's allotment, cyclically.

    ``objects[t]`` is the current allotment of ``agents[t]``; clearing the
    cycle hands it to ``agents[t-1]``.
    """

    agents: tuple[int, ...]
    objects: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.agents) < 2 or len(self.agents) != len(self.objects):
            raise PreconditionViolated("a cycle needs at least two agent/object pairs")

    @property
    def length(self) -> int:
        return len(self.agents)

    def verify(self, matching: Matching, profile: Profile) -> bool:
        """Re-check the cycle against a matching and profile."""
        ell = self.length
        for t in range(ell):
            agent = self.agents[t]
            nxt = self.agents[(t + 1) % ell]
            if matching[agent] != self.objects[t]:
                return False
            if not prefers(profile[agent], matching[nxt], matching[agent]):
                return False
        return True


def pareto_dominates(candidate: Matching, matching: Matching, profile: Profile) -> bool:
    """True iff ``candidate`` is weakly better for everyone, strictly for someone."""
    strict = False
    for i, pref in enumerate(profile):
        ranks = preference_ranks(pref)
        if ranks[candidate[i]] > ranks[matching[i]]:
            return False
        if ranks[candidate[i]] < ranks[matching[i]]:
            strict = True
    return strict


def find_dominating(
    inst: Instance,
    matching: Matching,
    profile: Profile,
    universe: list[Matching] | None = None,
) -> Matching | None:
    """Lexicographically first matching that Pareto-dominates ``matching``."""
    if universe is None:
        universe = enumerate_matchings(inst)
    for candidate in universe:
        if pareto_dominates(candidate, matching, profile):
            return candidate
    return None


def is_pareto_efficient(
    inst: Instance,
    matching: Matching,
    profile: Profile,
    universe: list[Matching] | None = None,
) -> bool:
    """Brute-force ground truth: no feasible matching dominates this one."""
    return find_dominating(inst, matching, profile, universe) is None


def blocking_pair(matching: Matching, profile: Profile) -> tuple[int, int] | None:
    """Lowest agent pair who would both strictly gain from swapping allotments."""
    n = len(matching)
    for i in range(n):
        for j in range(i + 1, n):
            if prefers(profile[i], matching[j], matching[i]) and prefers(
                profile[j], matching[i], matching[j]
            ):
                return (i, j)
    return None


def is_pairwise_efficient(matching: Matching, profile: Profile) -> bool:
    """True iff no two agents both strictly prefer each other's allotment."""
    return blocking_pair(matching, profile) is None


def waste_witness(
    inst: Instance, matching: Matching, profile: Profile
) -> tuple[int, int] | None:
    """Lowest (agent, object) pair where the agent prefers an unfilled object."""
    usage = object_usage(inst, matching)
    for i, pref in enumerate(profile):
        for obj in pref:
            if obj == matching[i]:
                break
            if usage[obj] < inst.capacities[obj]:
                return (i, obj)
    return None


def is_non_wasteful(inst: Instance, matching: Matching, profile: Profile) -> bool:
    """True iff no agent prefers an object with remaining capacity to her own."""
    return waste_witness(inst, matching, profile) is None


def find_improvement_cycle(
    inst: Instance, matching: Matching, profile: Profile
) -> ImprovementCycle | None:
    """Shortest improvement cycle of a non-wasteful matching, or None.

    Ties are broken by lowest starting agent id, then lowest next-agent id,
    so the returned witness is deterministic.  All objects on a shortest
    cycle are mutually distinct.  Wasteful matchings are rejected: slack
    capacity makes improvement chains, not cycles, and wastefulness is
    reported separately.
    """
    if not is_feasible(inst, matching):
        raise PreconditionViolated(f"matching {matching} is infeasible")
    if not is_non_wasteful(inst, matching, profile):
        raise PreconditionViolated("matching is wasteful; no cycle search performed")
    n = inst.n
    wants = [
        [j for j in range(n) if j != i and prefers(profile[i], matching[j], matching[i])]
        for i in range(n)
    ]

    def extend(path: list[int], length: int, start: int) -> tuple[int, ...] | None:
        last = path[-1]
        if len(path) == length:
            return tuple(path) if start in wants[last] else None
        for nxt in wants[last]:
            if nxt > start and nxt not in path:
                found = extend(path + [nxt], length, start)
                if found is not None:
                    return found
        return None

    for length in range(2, n + 1):
        for start in range(n):
            found = extend([start], length, start)
            if found is not None:
                return ImprovementCycle(
                    agents=found, objects=tuple(matching[i] for i in found)
                )
    return None


def apply_cycle(matching: Matching, cycle_agents: tuple[int, ...]) -> Matching:
    """Clear a cycle: each listed agent receives the next agent's allotment."""
    result = list(matching)
    ell = len(cycle_agents)
    for t, agent in enumerate(cycle_agents):
        result[agent] = matching[cycle_agents[(t + 1) % ell]]
    return tuple(result)


def trade_cycles(matching: Matching, improved: Matching) -> list[tuple[int, ...]]:
    """Decompose a reallocation into trading cycles with distinct objects.

    Each returned cycle ``(c_1, ..., c_m)`` satisfies: agent ``c_t`` holds at
    ``improved`` the object that ``c_(t+1)`` held at ``matching`` (indices
    cyclic), and the old allotments on one cycle are mutually distinct.
    Cycles are peeled deterministically from the lowest unused agent id,
    always preferring the lowest continuation agent.
    """
    movers = [i for i in range(len(matching)) if matching[i] != improved[i]]
    from collections import Counter

    if Counter(matching[i] for i in movers) != Counter(improved[i] for i in movers):
        raise PreconditionViolated(
            "reallocation changes per-object copy counts; no cycle decomposition"
        )
    unused = set(movers)
    cycles: list[tuple[int, ...]] = []
    while unused:
        start = min(unused)
        walk = [start]
        seen_objects = {matching[start]: 0}
        unused.discard(start)
        while True:
            head = walk[-1]
            needed = improved[head]
            if needed == matching[start]:
                cycles.append(tuple(walk))
                break
            if needed in seen_objects:
                # Peel the inner loop since the first visit of this object.
                cut = seen_objects[needed]
                inner = walk[cut:]
                cycles.append(tuple(inner))
                for agent in inner:
                    del seen_objects[matching[agent]]
                del walk[cut:]
                continue
            nxt = min(i for i in unused if matching[i] == needed)
            unused.discard(nxt)
            seen_objects[matching[nxt]] = len(walk)
            walk.append(nxt)
    return cycles


def reduce_to_single_cycle(
    inst: Instance,
    profile: Profile,
    matching: Matching,
    improved: Matching,
) -> tuple[Profile, Matching, tuple[int, ...]]:
    """Keep one shortest trading cycle of the improvement, neutralize the rest.

    Agents on the other cycles get their current allotment pushed to the top
    of their ranking (a monotonic transformation at ``matching``), and the
    improved matching is replaced by the one that clears only the kept cycle.
    Returns ``(new_profile, new_improved, kept_cycle)``.
    """
    from .preferences import push_object_to_top  # matchings is imported there

    cycles = trade_cycles(matching, improved)
    if not cycles:
        raise PreconditionViolated("the two matchings are identical")
    kept = min(cycles, key=lambda c: (len(c), c))
    new_profile = list(profile)
    for cycle in cycles:
        if cycle is kept:
            continue
        for agent in cycle:
            new_profile[agent] = push_object_to_top(profile[agent], matching[agent])
    return tuple(new_profile), apply_cycle(matching, kept), kept
