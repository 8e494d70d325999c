"""Shared fixtures: canonical desk-scale instances and profiles."""

import pytest

from axiomlab import GENERAL, NULL_BOTTOM, Instance


@pytest.fixture
def unit3() -> Instance:
    """Three agents, three unit-capacity objects (the workhorse instance)."""
    return Instance(3, (1, 1, 1))


@pytest.fixture
def slack3() -> Instance:
    """Three agents, capacities (2, 1, 1): one object has a spare copy."""
    return Instance(3, (2, 1, 1))


@pytest.fixture
def cycle_profile():
    """Objects a=0, b=1, c=2; agent 0: b>a>c, agent 1: c>b>a, agent 2: a>c>b.

    The matching (a, b, c) is pairwise efficient and non-wasteful here, yet
    the 3-cycle trade to (b, c, a) Pareto-improves it.
    """
    return ((1, 0, 2), (2, 1, 0), (0, 2, 1))


@pytest.fixture
def null_toy():
    """Null-bottom toy: 3-agent trading cycle plus one null-object agent.

    Objects: 0 = null, reals 1, 2, 3, all capacity 1.  The dominated matching
    gives agents 0..2 objects 1, 2, 3 and agent 3 the null object; it is
    pairwise efficient, and rotating the 3-cycle to (2, 3, 1, null) is its
    unique Pareto improvement.
    """
    inst = Instance(4, (1, 1, 1, 1), null_object=0, domain=NULL_BOTTOM)
    profile = ((2, 1, 3, 0), (3, 2, 1, 0), (1, 3, 2, 0), (1, 2, 3, 0))
    matching = (1, 2, 3, 0)
    improved = (2, 3, 1, 0)
    return inst, profile, matching, improved


@pytest.fixture
def showcase8():
    """Eight agents, five objects with capacities (3, 2, 1, 1, 1).

    ``rearranged`` already has every agent's improved allotment on top and
    everything below in ascending object order; ``dominated`` differs from
    ``improved`` by overlapping trading cycles.
    """
    inst = Instance(8, (3, 2, 1, 1, 1), domain=GENERAL)
    improved = (0, 1, 0, 2, 3, 1, 0, 4)
    dominated = (1, 0, 0, 3, 1, 0, 2, 4)
    rearranged = tuple(
        (improved[i],) + tuple(o for o in range(5) if o != improved[i])
        for i in range(8)
    )
    return inst, rearranged, dominated, improved
