import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parsched.core import JobSequence
from parsched.oracle import (
    ListScheduler,
    MultisetInstance,
    list_schedule,
    lower_bound,
    lpt_multiset,
    lpt_schedule,
    opt_exact,
    opt_multiset,
)


def brute_opt(sizes, m):
    best = None
    for assignment in itertools.product(range(m), repeat=len(sizes)):
        loads = [F(0)] * m
        for p, j in zip(sizes, assignment):
            loads[j] += p
        mk = max(loads)
        best = mk if best is None or mk < best else best
    return best


def test_opt_exact_examples():
    assert opt_exact(JobSequence.from_sizes(2, [3, 3, 2, 2, 2])) == 6
    assert opt_exact(JobSequence.from_sizes(3, [1])) == 1
    assert opt_exact(JobSequence.from_sizes(3, ["1/3"] * 3 + [1, 1])) == 1
    assert opt_exact(JobSequence.from_sizes(2, [])) == 0


def test_opt_exact_cap():
    with pytest.raises(ValueError):
        opt_exact(JobSequence.from_sizes(2, [1] * 30), cap=24)


def test_lower_bound():
    assert lower_bound(F(5), F(1), 2) == F(5, 2)
    assert lower_bound(F(1), F(1), 4) == F(1)
    assert lower_bound(F(0), F(0), 3) == F(0)


def test_list_and_lpt_examples():
    one_each = list_schedule(JobSequence.from_sizes(3, ["1/3"] * 3))
    assert one_each.loads() == (F(1, 3),) * 3
    assert list_schedule(JobSequence.from_sizes(1, [1, 1])).makespan() == 2
    assert lpt_schedule(JobSequence.from_sizes(2, [2, 2, 3])).makespan() == 4


def test_list_scheduler_permutation():
    from parsched.core import Job

    plain = ListScheduler(3)
    assert plain.propose(Job(1, F(1))) == 1
    rotated = ListScheduler(3, perm=[2, 3, 1])
    job = Job(1, F(1))
    assert rotated.propose(job) == 2
    rotated.record(job, 2)
    assert rotated.propose(Job(2, F(1))) == 3  # machine 2 now loaded


def test_multiset_examples():
    assert opt_multiset(MultisetInstance(((F(3, 4), 2),), 2)).makespan() == F(3, 4)
    two_classes = MultisetInstance(((F(3, 4), 2), (F(9, 8), 1)), 2)
    assert opt_multiset(two_classes).makespan() == F(3, 2)
    assert opt_multiset(MultisetInstance((), 3)).makespan() == 0


def test_multiset_validation():
    with pytest.raises(ValueError):
        MultisetInstance(((F(1), 1), (F(1), 2)), 2)  # duplicate sizes
    with pytest.raises(ValueError):
        MultisetInstance(((F(0), 1),), 2)


small_instance = st.tuples(
    st.integers(min_value=1, max_value=3),
    st.lists(st.fractions(min_value=F(1, 8), max_value=F(4)), min_size=1, max_size=7),
)


@given(inst=small_instance)
@settings(max_examples=80, deadline=None)
def test_opt_exact_matches_enumeration(inst):
    m, sizes = inst
    seq = JobSequence.from_sizes(m, sizes)
    assert opt_exact(seq) == brute_opt(sizes, m)


@given(inst=small_instance)
@settings(max_examples=60, deadline=None)
def test_bounds_chain(inst):
    m, sizes = inst
    seq = JobSequence.from_sizes(m, sizes)
    opt = opt_exact(seq)
    lb = lower_bound(seq.total(), seq.max_p(), m)
    assert lb <= opt
    assert opt <= lpt_schedule(seq).makespan()
    assert opt <= list_schedule(seq).makespan()


@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_multiset_agrees_with_expanded_instance(data):
    m = data.draw(st.integers(min_value=1, max_value=3))
    k = data.draw(st.integers(min_value=1, max_value=3))
    sizes = data.draw(
        st.lists(
            st.fractions(min_value=F(1, 6), max_value=F(3)),
            min_size=k, max_size=k, unique=True,
        )
    )
    counts = data.draw(st.lists(st.integers(0, 3), min_size=k, max_size=k))
    inst = MultisetInstance(tuple(zip(sizes, counts)), m)
    ms = opt_multiset(inst)
    for i, (_, c) in enumerate(inst.normalized()):
        assert sum(ms.counts[i]) == c
    expanded = ms.to_sequence()
    if len(expanded):
        assert ms.makespan() == opt_exact(expanded)
        assert lpt_multiset(inst).makespan() >= ms.makespan()


def test_multiset_budget_guard():
    from parsched.oracle import SearchBudgetExceeded

    sizes = [F(5, 11), F(4, 9), F(3, 7), F(2, 5), F(5, 13), F(4, 13)]
    inst = MultisetInstance(tuple((s, 5) for s in sizes), 7)
    with pytest.raises(SearchBudgetExceeded):
        opt_multiset(inst, node_cap=3)
