from __future__ import annotations

import math

import numpy as np
import pytest

from app.domain.scheduler import (
    PilotPlan,
    assign_network,
    assign_pilots,
    contamination_stats,
    pilot_capacity,
    pilots_required,
    sparsity_mask,
)
from app.errors import SchedulingError


def test_equal_class_users_share_one_pilot_with_distinct_phases():
    plan = assign_pilots([3, 3, 3], num_pilots=30, max_class=30)
    assert plan.pilots_used(0) == 1
    assert [a.phase for a in plan.for_cell(0)] == [0, 1, 2]
    assert sparsity_mask(plan, 0, 1).bits.tolist() == [0, 1, 0]
    assert sparsity_mask(plan, 0, 3).bits.tolist() == [1, 0, 0]


def test_mixed_classes_never_share_a_pilot():
    plan = assign_pilots([1, 2, 2, 3, 3, 3], num_pilots=30, max_class=30)
    rows = plan.for_cell(0)
    assert plan.pilots_used(0) == 3
    # descending class order
    assert [rows[k].pilot_id for k in (3, 4, 5)] == [0, 0, 0]
    assert [rows[k].pilot_id for k in (1, 2)] == [1, 1]
    assert rows[0].pilot_id == 2
    assert plan.period() == 6
    assert sparsity_mask(plan, 0, 1).bits.tolist() == [1, 0, 1, 0, 1, 0]


def test_phase_decides_transmission():
    plan = assign_pilots([2, 2], num_pilots=4, max_class=4)
    second = plan.for_cell(0)[1]
    assert second.phase == 1
    assert not second.transmits(4)
    assert second.transmits(5)
    mask = sparsity_mask(plan, 0, 4)
    assert (mask.active, mask.idle) == (1, 1)
    assert mask.uploading() == [0]


@pytest.mark.parametrize(
    "classes, num_pilots, max_class",
    [
        ([0, 1], 30, 30),
        ([31], 30, 30),
        ([1] * 31, 30, 30),
        ([2] * 61, 30, 30),
    ],
)
def test_infeasible_plans_are_rejected(classes, num_pilots, max_class):
    with pytest.raises(SchedulingError):
        assign_pilots(classes, num_pilots, max_class)


def test_capacity_edge_is_feasible():
    plan = assign_pilots([2] * 60, num_pilots=30, max_class=30)
    assert plan.pilots_used(0) == 30
    assert pilot_capacity(30, 2) == 60
    assert pilot_capacity(30, 30) == 900


def test_pilots_required():
    assert pilots_required([]) == 0
    assert pilots_required([1, 1, 1]) == 3
    assert pilots_required([3, 3, 3, 3]) == 2
    assert pilots_required([1, 2, 2, 3]) == 3


def test_missing_cell_is_a_scheduling_error():
    plan = assign_pilots([1], 4, 4)
    with pytest.raises(SchedulingError):
        plan.for_cell(1)


def test_network_plan_covers_each_cell():
    plan = assign_network([[1, 1], [2, 2]], num_pilots=4, max_class=4)
    assert plan.cells() == [0, 1]
    assert plan.classes(1) == [2, 2]
    assert plan.pilot_map(1).tolist() == [0, 0]
    assert plan.period(0) == 1 and plan.period(1) == 2 and plan.period() == 2
    assert PilotPlan.combine([plan]) == plan


def test_random_mixes_respect_exclusivity_and_capacity():
    rng = np.random.default_rng(2024)
    num_pilots, max_class = 30, 6
    feasible = 0
    for _ in range(1000):
        K = int(rng.integers(1, 80))
        classes = [int(n) for n in rng.integers(1, max_class + 1, size=K)]
        if pilots_required(classes) > num_pilots:
            with pytest.raises(SchedulingError):
                assign_pilots(classes, num_pilots, max_class)
            continue
        feasible += 1
        plan = assign_pilots(classes, num_pilots, max_class)
        rows = plan.for_cell(0)
        assert plan.classes(0) == classes
        assert plan.pilots_used(0) <= num_pilots
        period = plan.period()
        uploads = np.zeros(K, dtype=int)
        for t in range(period):
            mask = sparsity_mask(plan, 0, t)
            active = mask.uploading()
            pilots = [rows[k].pilot_id for k in active]
            assert len(pilots) == len(set(pilots))
            assert mask.active <= num_pilots
            uploads[active] += 1
        assert uploads.tolist() == [period // n for n in classes]
    assert feasible > 100


def test_masks_repeat_with_the_plan_period():
    plan = assign_pilots([1, 2, 3, 4, 4], num_pilots=8, max_class=4)
    period = plan.period()
    assert period == 12
    for t in range(period):
        assert np.array_equal(sparsity_mask(plan, 0, t).bits, sparsity_mask(plan, 0, t + period).bits)


@pytest.mark.parametrize(
    "K_prime, alpha, L_prime, L_bar",
    [
        (30, 1.0, 7, 2.8),
        (9, 0.3, 2, 1.3),
        (1, 1 / 30, 1, 1.0),
        (0, 0.0, 1, 1.0),
        (15, 0.5, 4, 1.9),
    ],
)
def test_contamination_stats(K_prime, alpha, L_prime, L_bar):
    stats = contamination_stats(K_prime, num_pilots=30, num_cells=7, gamma=0.3)
    assert stats.alpha == pytest.approx(alpha)
    assert stats.L_prime == L_prime
    assert stats.L_bar_prime == pytest.approx(L_bar)


def test_contamination_overload_is_rejected():
    with pytest.raises(SchedulingError):
        contamination_stats(31, num_pilots=30, num_cells=7, gamma=0.3)


def test_contamination_grows_with_load():
    values = [contamination_stats(k, 30, 7, 0.3).L_prime for k in range(31)]
    assert values == sorted(values)
    assert values[0] == 1 and values[-1] == 7
    # higher classes spread the same users over more slots
    loads = [math.ceil(30 / n) for n in range(1, 31)]
    assert loads == sorted(loads, reverse=True)
