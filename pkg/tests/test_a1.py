from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parsched.a1 import (
    A1Plan,
    A1State,
    LaneCapExceeded,
    a1_classify,
    a1_count_cap,
    a1_family,
    a1_family_size,
    a1_partition,
    a1_true_vector,
)
from parsched.core import Job, JobSequence, LaneRunner, select_best
from parsched.harness import gen_planted


def test_partition_examples():
    p = a1_partition(F(1), F(1))
    assert (p.eps_prime, p.levels) == (F(1, 2), 2)
    assert p.bounds == (F(1, 2), F(3, 4), F(9, 8))
    doubled = a1_partition(F(1), F(2))
    assert doubled.bounds == (F(1), F(3, 2), F(9, 4))
    assert a1_partition(F(1, 2), F(1)).levels == 7


def test_classify_examples():
    p = a1_partition(F(1), F(1))
    assert a1_classify(p, F(1, 2)) == 0  # boundary stays small
    assert a1_classify(p, F(3, 5)) == 1
    assert a1_classify(p, F(1)) == 2
    assert a1_classify(p, F(2)) is None
    with pytest.raises(ValueError):
        a1_classify(p, F(0))


@given(eps=st.fractions(min_value=F(1, 20), max_value=F(1)),
       T=st.fractions(min_value=F(1, 5), max_value=F(5)))
@settings(max_examples=80)
def test_partition_covers_assumed_optimum(eps, T):
    p = a1_partition(eps, T)
    assert p.bounds[-1] >= T  # every job of an instance with optimum <= T classifies
    for lo, hi in zip(p.bounds, p.bounds[1:]):
        assert hi == lo * (1 + p.eps_prime)


def test_family_sizes():
    assert a1_family_size(F(1), 2) == 25
    assert a1_family_size(F(1), 5) == 121
    assert a1_family(F(1), 2, F(1)).size == 25
    assert a1_family(F(1), 2, F(1), vector=(1, 1)).size == 1
    with pytest.raises(LaneCapExceeded):
        a1_family(F(1, 2), 2, F(1), lane_cap=1000)  # 9**7 lanes


def test_family_prune_flag():
    full = a1_family(F(1), 2, F(1))
    pruned = a1_family(F(1), 2, F(1), prune=True)
    assert pruned.size < full.size
    budget = 2 * (1 + F(1, 2)) * 1
    for v in pruned.vectors:
        volume = sum(full.partition.rounded_size(i + 1) * v[i] for i in range(2))
        assert volume <= budget


def test_true_vector():
    p = a1_partition(F(1), F(1))
    seq = JobSequence.from_sizes(2, ["0.6", "0.6", "0.3"])
    assert a1_true_vector(seq.jobs, p, 2) == (2, 0)
    assert a1_true_vector([], p, 2) == (0, 0)
    too_many = JobSequence.from_sizes(2, ["0.6"] * (a1_count_cap(2, F(1, 2)) + 1))
    with pytest.raises(ValueError):
        a1_true_vector(too_many.jobs, p, 2)
    assert a1_true_vector(too_many.jobs, p, 2, clamp=True) == (4, 0)


def test_step_follows_virtual_slots():
    p = a1_partition(F(1), F(1))
    plan = A1Plan.build(p, 2, (2, 0))
    assert plan.n_star[0] == (1, 1)
    lane = A1State(plan)
    assert lane.step(Job(1, F(3, 5))) == 1
    assert lane.step(Job(2, F(3, 5))) == 2


def test_step_small_tie_and_fallback():
    p = a1_partition(F(1), F(1))
    small_only = A1State(A1Plan.build(p, 2, (0, 0)))
    assert small_only.step(Job(1, F(1, 4))) == 1  # all keys equal: lowest index
    lane = A1State(A1Plan.build(p, 2, (2, 0)))
    lane.step(Job(1, F(1, 4)))  # small on machine 1
    assert lane.step(Job(2, F(1))) == 2  # class 2 has no slots: least loaded


def test_small_rule_tracks_virtual_plus_small():
    p = a1_partition(F(1), F(1))
    plan = A1Plan.build(p, 2, (1, 0))  # one large slot on machine 1
    lane = A1State(plan)
    assert plan.ell_star == (F(3, 4), F(0))
    assert lane.step(Job(1, F(1, 2))) == 2  # ell*(1)=3/4 beats 0
    assert lane.step(Job(2, F(1, 2))) == 2  # 3/4 still beats 1/2
    assert lane.step(Job(3, F(1, 2))) == 1  # now 3/4 < 1


def _simulate_true_lane(seq, eps, T):
    partition = a1_partition(eps, T)
    vector = a1_true_vector(seq.jobs, partition, seq.m)
    plan = A1Plan.build(partition, seq.m, vector)
    lane = A1State(plan)
    for job in seq:
        machine = lane.step(job)
        assert machine is not None
    return lane


@pytest.mark.parametrize("m,seed", [(2, 0), (3, 1), (5, 2), (8, 3)])
def test_true_lane_guarantee_on_planted(m, seed):
    eps = F(1)
    for k in range(10):
        seq = gen_planted(m, counts=(1, 4), denom=24, seed=seed * 100 + k)
        lane = _simulate_true_lane(seq, eps, F(1))
        assert max(lane.loads) <= (1 + eps) * 1
        # Large jobs never push a machine past its virtual allocation.
        for j in range(m):
            assert lane.large_load[j] <= lane.plan.ell_star[j]


def test_full_family_best_lane_within_guarantee():
    eps = F(1)
    family = a1_family(eps, 3, F(1))
    for seed in range(3):
        seq = gen_planted(3, counts=2, denom=12, seed=seed)
        schedules = []
        for lane in family.lanes():
            runner = LaneRunner(lane, label=lane.label)
            runner.run(seq.jobs)
            schedules.append(runner.schedule)
        assert select_best(schedules).makespan() <= 2
