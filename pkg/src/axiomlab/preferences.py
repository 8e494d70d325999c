"""Strict preferences, profile enumeration, and monotonic-transformation tools.

A preference is a tuple ranking every object id, best first.  A profile is a
tuple of preferences, one per agent.  Rank lookups go through a cached
object-to-rank inverse so the comparison-heavy checker loops stay O(1) per
comparison.

Besides enumeration this module implements the profile surgeries used by the
proof-replay harnesses:

* ``push_to_top``       -- move each agent's target allotment to the front;
* ``common_rank_rearrange`` -- keep the top fixed and re-sort everything
  below it by one shared object ranking;
* ``appendix_transform_sequence`` -- the stepwise restricted-domain variant
  that never moves the null object off the bottom.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import islice, permutations, product
from typing import Iterator

from .errors import DomainViolation, PreconditionViolated, SizeOverflow
from .model import (
    NULL_BOTTOM,
    Instance,
    Matching,
    enumeration_bound,
    is_feasible,
)

Preference = tuple[int, ...]
Profile = tuple[Preference, ...]
CommonRanking = tuple[int, ...]


@lru_cache(maxsize=None)
def preference_ranks(pref: Preference) -> tuple[int, ...]:
    """Inverse of a ranking: ``ranks[obj]`` is the position of ``obj`` (0 = best)."""
    ranks = [0] * len(pref)
    for position, obj in enumerate(pref):
        ranks[obj] = position
    return tuple(ranks)


def prefers(pref: Preference, a: int, b: int) -> bool:
    """True iff ``a`` is ranked strictly above ``b``."""
    ranks = preference_ranks(pref)
    return ranks[a] < ranks[b]


def weakly_prefers(pref: Preference, a: int, b: int) -> bool:
    ranks = preference_ranks(pref)
    return ranks[a] <= ranks[b]


def lower_contour(pref: Preference, obj: int) -> frozenset[int]:
    """All objects ranked weakly below ``obj``, including ``obj`` itself."""
    ranks = preference_ranks(pref)
    return frozenset(pref[ranks[obj]:])


def validate_preference(inst: Instance, pref: Preference) -> None:
    if sorted(pref) != list(range(inst.k)):
        raise DomainViolation(f"{pref} is not a permutation of 0..{inst.k - 1}")
    if inst.domain == NULL_BOTTOM and pref[-1] != inst.null_object:
        raise DomainViolation(f"{pref} does not rank the null object last")


def validate_profile(inst: Instance, profile: Profile) -> None:
    if len(profile) != inst.n:
        raise DomainViolation(f"profile has {len(profile)} entries for {inst.n} agents")
    for pref in profile:
        validate_preference(inst, pref)


def in_domain(inst: Instance, profile: Profile) -> bool:
    try:
        validate_profile(inst, profile)
    except DomainViolation:
        return False
    return True


def all_preferences(inst: Instance) -> list[Preference]:
    """Every admissible ranking for one agent, in lexicographic order."""
    if inst.domain == NULL_BOTTOM:
        null = inst.null_object
        reals = inst.real_objects()
        return [perm + (null,) for perm in permutations(reals)]
    return list(permutations(range(inst.k)))


def count_profiles(inst: Instance) -> int:
    return len(all_preferences(inst)) ** inst.n


def enumerate_profiles(
    inst: Instance,
    max_count: int | None = None,
    start: int = 0,
    stop: int | None = None,
) -> Iterator[Profile]:
    """Stream all profiles in lexicographic order; never materialized.

    ``start``/``stop`` select a slice of the stream by index, which is how
    parallel workers split the profile space without coordination.
    """
    total = count_profiles(inst)
    bound = enumeration_bound(max_count)
    if total > bound:
        raise SizeOverflow(f"{total} profiles exceed the bound of {bound}")
    stream = product(all_preferences(inst), repeat=inst.n)
    if start or stop is not None:
        stream = islice(stream, start, stop)
    return iter(stream)


@lru_cache(maxsize=None)
def _pref_is_monotonic_at(pref: Preference, transformed: Preference, obj: int) -> bool:
    """Lower contour of ``pref`` at ``obj`` is contained in that of ``transformed``."""
    ranks = preference_ranks(pref)
    new_ranks = preference_ranks(transformed)
    cutoff = new_ranks[obj]
    for other in pref[ranks[obj]:]:
        if new_ranks[other] < cutoff:
            return False
    return True


def is_monotonic_transformation(profile: Profile, transformed: Profile, matching: Matching) -> bool:
    """True iff every agent's lower contour set at her allotment weakly expands."""
    return all(
        _pref_is_monotonic_at(profile[i], transformed[i], matching[i])
        for i in range(len(matching))
    )


def push_object_to_top(pref: Preference, obj: int) -> Preference:
    if pref[0] == obj:
        return pref
    return (obj,) + tuple(o for o in pref if o != obj)


def push_to_top(inst: Instance, profile: Profile, target: Matching) -> Profile:
    """Move each agent's ``target`` allotment to the front of her ranking.

    The relative order of all other objects is preserved.  In the null-bottom
    domain, pushing the null object itself off the bottom is rejected with
    DomainViolation rather than silently clamped.
    """
    if not is_feasible(inst, target):
        raise PreconditionViolated(f"target matching {target} is infeasible")
    pushed = tuple(
        push_object_to_top(profile[i], target[i]) for i in range(inst.n)
    )
    if inst.domain == NULL_BOTTOM:
        for pref in pushed:
            if pref[-1] != inst.null_object:
                raise DomainViolation(
                    "pushing the null object to the top leaves the null-bottom domain"
                )
    return pushed


def common_object_ranking(inst: Instance) -> CommonRanking:
    """Default shared object ranking: ascending object id.

    Excludes the null object in the null-bottom domain, where it is pinned to
    the bottom of every ranking instead.
    """
    if inst.domain == NULL_BOTTOM:
        return inst.real_objects()
    return tuple(range(inst.k))


def validate_common_ranking(inst: Instance, ranking: CommonRanking) -> None:
    expected = sorted(inst.real_objects()) if inst.domain == NULL_BOTTOM else list(range(inst.k))
    if sorted(ranking) != expected:
        raise PreconditionViolated(f"{ranking} is not a ranking of the expected objects")


def _ranked_rest(inst: Instance, ranking: CommonRanking, exclude: tuple[int, ...]) -> tuple[int, ...]:
    """Objects in common-ranking order minus ``exclude``, null appended last."""
    rest = tuple(o for o in ranking if o not in exclude)
    if inst.domain == NULL_BOTTOM:
        return rest + (inst.null_object,)
    return rest


def common_rank_rearrange(
    inst: Instance,
    profile: Profile,
    target: Matching,
    ranking: CommonRanking | None = None,
) -> Profile:
    """Re-sort everything below each agent's top by the shared ranking.

    Requires every agent's ``target`` allotment to already sit on top of her
    ranking (i.e. ``profile`` is a ``push_to_top`` output).  The result keeps
    that top and orders all remaining objects identically across agents.
    """
    if ranking is None:
        ranking = common_object_ranking(inst)
    validate_common_ranking(inst, ranking)
    for i in range(inst.n):
        if profile[i][0] != target[i]:
            raise PreconditionViolated(
                f"agent {i} does not rank her target allotment first"
            )
    return tuple(
        (target[i],) + _ranked_rest(inst, ranking, (target[i],))
        for i in range(inst.n)
    )


def single_trade_cycle(matching: Matching, improved: Matching) -> tuple[int, ...]:
    """The unique trading cycle turning ``matching`` into ``improved``.

    Returned in proof order: the first agent's new allotment is the last
    agent's old one, and every later agent receives her predecessor's old
    allotment.  Raises PreconditionViolated if the reallocation is not a
    single cycle of length at least 3.
    """
    from .matchings import trade_cycles  # matchings depends on this module

    cycles = trade_cycles(matching, improved)
    if len(cycles) != 1:
        raise PreconditionViolated(
            f"reallocation decomposes into {len(cycles)} cycles, expected exactly 1"
        )
    cycle = cycles[0]
    if len(cycle) < 3:
        raise PreconditionViolated(
            "a 2-cycle reallocation is already a blocking swap"
        )
    # trade_cycles orients cycles so each agent receives the *next* agent's
    # old allotment; the stepwise construction wants the predecessor's.
    return (cycle[0],) + tuple(reversed(cycle[1:]))


def appendix_transform_sequence(
    inst: Instance,
    profile: Profile,
    matching: Matching,
    improved: Matching,
) -> list[Profile]:
    """Stepwise profile sequence for the restricted-domain uniqueness argument.

    Input: a null-bottom profile, a non-wasteful ``matching`` and an
    ``improved`` matching that Pareto-dominates it via a single trading cycle
    of length ``ell >= 3``.  Output, with the null object last everywhere:

    1. the profile with each cycle agent's new allotment first and old
       allotment second (kept-allotment agents get theirs first; null-object
       agents are untouched);
    2. the same profile with everything below the old allotment re-sorted by
       the shared ranking, and null-object agents set to the shared ranking;
    3. one profile per cycle position ``s = 3..ell`` where agent ``s`` drops
       her old allotment into shared-ranking position.

    The last element ranks, for every cycle agent, her new allotment first
    and all other real objects in the shared ranking.
    """
    from .matchings import is_non_wasteful, pareto_dominates  # cycle-free import

    if inst.domain != NULL_BOTTOM:
        raise PreconditionViolated("the stepwise construction lives in the null-bottom domain")
    validate_profile(inst, profile)
    if not pareto_dominates(improved, matching, profile):
        raise PreconditionViolated("improved matching does not Pareto-dominate the original")
    if not is_non_wasteful(inst, matching, profile):
        raise PreconditionViolated("original matching is wasteful")

    cycle = single_trade_cycle(matching, improved)
    ell = len(cycle)
    cycle_objects = tuple(matching[agent] for agent in cycle)
    null = inst.null_object
    kept_real = [
        i for i in range(inst.n) if matching[i] == improved[i] and matching[i] != null
    ]
    null_agents = [i for i in range(inst.n) if matching[i] == null]
    # Shared ranking: cycle objects in proof order, then the remaining real
    # objects by ascending id (any fixed completion works).
    ranking: CommonRanking = cycle_objects + tuple(
        o for o in inst.real_objects() if o not in cycle_objects
    )

    first = list(profile)
    for i in cycle:
        first[i] = push_object_to_top(push_object_to_top(profile[i], matching[i]), improved[i])
    for i in kept_real:
        first[i] = push_object_to_top(profile[i], matching[i])
    sequence = [tuple(first)]

    second = list(first)
    for i in cycle:
        second[i] = (improved[i], matching[i]) + _ranked_rest(
            inst, ranking, (improved[i], matching[i])
        )
    for i in kept_real:
        second[i] = (matching[i],) + _ranked_rest(inst, ranking, (matching[i],))
    shared_pref = _ranked_rest(inst, ranking, ())
    for i in null_agents:
        second[i] = shared_pref
    sequence.append(tuple(second))

    current = list(second)
    for s in range(2, ell):  # proof steps 3..ell, zero-based cycle positions
        agent = cycle[s]
        current[agent] = (improved[agent],) + _ranked_rest(inst, ranking, (improved[agent],))
        sequence.append(tuple(current))

    for prof in sequence:
        validate_profile(inst, prof)
    return sequence
