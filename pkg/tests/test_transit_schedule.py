import numpy as np

from trawl.apps import make_app
from trawl.core import Sample
from trawl.engine import (
    build_transit_map,
    partition_work_classes,
    subgroup_size,
)
from trawl.engine.driver import StepPlan
from trawl.engine.transit_parallel import TransitGroup


def make_plan(per_sample_transits, m=1):
    """StepPlan over hand-built samples whose step-0 transits are the
    given vertex lists (roots double as transits at step 0)."""
    app = make_app("khop", fanouts=[m])
    samples = []
    for i, transits in enumerate(per_sample_transits):
        samples.append(Sample(i, np.asarray(transits, dtype=np.int64)))
    return StepPlan(app, samples, 0, seed=0)


def test_shared_transit_grouping():
    # three samples share transit 4; transits 1 and 6 appear once
    plan = make_plan([[4], [4, 1], [4, 6]])
    groups = build_transit_map(plan)
    by_transit = {g.transit: g for g in groups}
    assert sorted(by_transit) == [1, 4, 6]
    assert len(by_transit[4].members) == 3
    assert len(by_transit[1].members) == 1
    assert len(by_transit[6].members) == 1


def test_distinct_transits_singletons():
    plan = make_plan([[10], [20], [30]])
    groups = build_transit_map(plan)
    assert len(groups) == 3
    assert all(len(g.members) == 1 for g in groups)


def test_map_inversion_oracle():
    rng = np.random.default_rng(5)
    per_sample = [rng.integers(0, 40, size=rng.integers(1, 8)).tolist()
                  for _ in range(50)]
    plan = make_plan(per_sample)
    groups = build_transit_map(plan)

    # brute-force enumeration, sample-major
    expected = []
    for sid, transits in enumerate(per_sample):
        for ti, t in enumerate(transits):
            expected.append((sid, ti, t))

    flattened = []
    for g in groups:
        prev = None
        for p in g.members:
            pair = (int(plan.pair_sample_id[p]), int(plan.pair_transit_idx[p]))
            if prev is not None:
                assert pair > prev  # member order is sample-major
            prev = pair
            flattened.append((*pair, g.transit))
    assert sorted(flattened) == sorted(expected)
    # every pair's transit matches what the sample declared
    for sid, ti, t in flattened:
        assert per_sample[sid][ti] == t


def test_work_class_thresholds():
    def group(n_members):
        return TransitGroup(transit=0, members=np.arange(n_members))

    sched = partition_work_classes([group(3)], m_i=10)
    assert len(sched.small) == 1 and sched.small[0].work == 30

    sched = partition_work_classes([group(4)], m_i=10)
    assert len(sched.medium) == 1 and sched.medium[0].work == 40

    sched = partition_work_classes([group(110)], m_i=10)
    assert len(sched.large) == 1 and sched.large[0].work == 1100

    # boundary values
    assert partition_work_classes([group(31)], 1).small
    assert partition_work_classes([group(32)], 1).medium
    assert partition_work_classes([group(1024)], 1).medium
    assert partition_work_classes([group(1025)], 1).large


def test_partition_complete_and_disjoint():
    rng = np.random.default_rng(11)
    per_sample = [rng.integers(0, 60, size=5).tolist() for _ in range(400)]
    m = 4
    plan = make_plan(per_sample, m=m)
    groups = build_transit_map(plan)
    sched = partition_work_classes(groups, m)
    classed = sched.all_groups()
    assert len(classed) == len(groups)
    assert len({id(g) for g in classed}) == len(groups)
    for g in sched.small:
        assert g.work < 32
    for g in sched.medium:
        assert 32 <= g.work <= 1024
    for g in sched.large:
        assert g.work > 1024
    # total work equals alive transit-count times m
    assert sum(g.work for g in classed) == sum(len(t) for t in per_sample) * m


def test_scheduling_index_dense_and_stable():
    plan = make_plan([[5, 1], [5, 9], [1], [7]])
    groups = build_transit_map(plan)
    sched = partition_work_classes(groups, m_i=1)
    # groups arrive sorted by transit id; index is the rank within class
    for cls in (sched.small, sched.medium, sched.large):
        transits = [g.transit for g in cls]
        assert transits == sorted(transits)
        for rank, g in enumerate(cls):
            assert sched.scheduling_index[g.transit] == rank


def test_subgroup_size():
    assert subgroup_size(1) == 32
    assert subgroup_size(8) == 4
    assert subgroup_size(10) == 3
    assert subgroup_size(32) == 1
    assert subgroup_size(33) == 1
    assert subgroup_size(1000) == 1
