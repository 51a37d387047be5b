from __future__ import annotations

import pytest

from app.config import SystemConfig, build_config
from app.domain.performance import sinr_closed_form
from app.errors import ConfigValidationError
from app.services.sweeps import (
    Provenance,
    SweepSpec,
    antenna_grid,
    check_classes,
    evaluate_point,
    mixed_population_rows,
    parse_class_counts,
    sweep_antennas,
    sweep_class,
    sweep_grid,
)


@pytest.fixture()
def antenna_table(default_config):
    return sweep_antennas(SweepSpec("antennas", antenna_grid(10, 300, 10), default_config), (1, 3))


@pytest.fixture()
def class_table(default_config):
    return sweep_class(SweepSpec("class_index", tuple(range(1, 31)), default_config), 300)


def test_antenna_sweep_shape(antenna_table):
    assert len(antenna_table) == 60
    assert antenna_table.classes() == [1, 3]
    assert [r.M for r in antenna_table.series(1)] == list(range(10, 301, 10))
    assert {r.K_n for r in antenna_table.rows} == {30}


def test_class_1_and_3_use_the_expected_contamination(antenna_table):
    for r in antenna_table.series(1):
        assert (r.K_prime, r.L_prime) == (30, 7)
        assert r.sinr == pytest.approx(30 * (r.M - 1) / (7087 + 54 * r.M))
    for r in antenna_table.series(3):
        assert (r.K_prime, r.L_prime) == (10, 2)
        assert r.sinr == pytest.approx(30 * (r.M - 1) / (1552 + 9 * r.M))


def test_class_3_beats_class_1_and_the_gap_widens(antenna_table):
    one, three = antenna_table.series(1), antenna_table.series(3)
    ee_gaps = [b.ee - a.ee for a, b in zip(one, three)]
    se_gaps = [b.se - a.se for a, b in zip(one, three)]
    assert all(g > 0 for g in ee_gaps)
    assert all(g > 0 for g in se_gaps)
    assert ee_gaps == sorted(ee_gaps)
    assert se_gaps == sorted(se_gaps)
    for a, b in zip(one, three):
        assert 2.0 <= b.ee / a.ee <= 6.0
    at_100 = {r.class_n: r for r in antenna_table.rows if r.M == 100}
    assert at_100[3].ee / at_100[1].ee == pytest.approx(4.66, abs=0.01)


def test_efficiencies_grow_with_antennas(antenna_table):
    for n in (1, 3):
        ee = [r.ee for r in antenna_table.series(n)]
        assert ee == sorted(ee)


def test_class_sweep_contamination_levels(class_table):
    assert [r.L_prime for r in class_table.rows[:6]] == [7, 4, 2, 2, 1, 1]
    assert all(r.L_prime == 1 for r in class_table.rows[4:])


def test_class_sweep_ee_increases_with_diminishing_returns(class_table):
    ee = [r.ee for r in class_table.rows]
    assert all(b > a for a, b in zip(ee, ee[1:]))
    steps = [b - a for a, b in zip(ee[4:], ee[5:])]
    assert all(later < earlier for earlier, later in zip(steps, steps[1:]))


def test_class_sweep_first_row_matches_antenna_sweep(class_table, antenna_table):
    first = class_table.rows[0]
    match = next(r for r in antenna_table.series(1) if r.M == 300)
    assert first == match


def test_grid_sweep_is_sorted_by_class_then_antennas(default_config):
    table = sweep_grid(default_config, (20, 40, 60), (5, 2, 1))
    assert [(r.class_n, r.M) for r in table.rows] == [
        (1, 20), (1, 40), (1, 60), (2, 20), (2, 40), (2, 60), (5, 20), (5, 40), (5, 60),
    ]


def test_sweeps_are_reproducible(default_config):
    spec = SweepSpec("antennas", (10, 50, 90), default_config)
    assert sweep_antennas(spec) == sweep_antennas(spec)
    assert Provenance.of(default_config).config_hash == Provenance.of(SystemConfig()).config_hash
    assert Provenance.of(build_config(rng_seed=2)).config_hash != Provenance.of(default_config).config_hash


@pytest.mark.parametrize(
    "grid, trials",
    [((), 1), ((10, 10), 1), ((20, 10), 1), ((10, 20), 0)],
)
def test_sweep_spec_validation(default_config, grid, trials):
    with pytest.raises(ValueError):
        SweepSpec("antennas", grid, default_config, trials)


def test_sweep_range_checks(default_config):
    with pytest.raises(ValueError):
        sweep_antennas(SweepSpec("antennas", (1, 10), default_config))
    with pytest.raises(ValueError):
        sweep_antennas(SweepSpec("antennas", (10, 20_000), default_config))
    with pytest.raises(ValueError):
        sweep_antennas(SweepSpec("class_index", (1, 2), default_config))
    with pytest.raises(ConfigValidationError):
        sweep_class(SweepSpec("class_index", (1, 31), default_config), 100)
    with pytest.raises(ValueError):
        sweep_class(SweepSpec("antennas", (1, 2), default_config), 100)


@pytest.mark.parametrize("args", [(10, 300, 0), (1, 300, 10), (300, 10, 10)])
def test_antenna_grid_errors(args):
    with pytest.raises(ValueError):
        antenna_grid(*args)


def test_mixed_population_shares_the_pilot_load(default_config):
    table = mixed_population_rows(default_config, {1: 1, 3: 30, 7: 0}, 100)
    assert table.classes() == [1, 3]
    assert {r.K_prime for r in table.rows} == {11}
    assert {r.L_prime for r in table.rows} == {3}
    by_class = {r.class_n: r for r in table.rows}
    assert by_class[1].K_n == 1 and by_class[3].K_n == 30
    pure = evaluate_point(default_config, 100, 3)
    assert by_class[3].sinr < pure.sinr
    assert by_class[3].sinr == pytest.approx(sinr_closed_form(100, 31, 30, 0.3, 3, 1.0))


@pytest.mark.parametrize("classes", [(0, 3), (1, 31), (-2,), ()])
def test_antenna_sweep_rejects_classes_out_of_range(default_config, classes):
    spec = SweepSpec("antennas", (10, 20), default_config)
    with pytest.raises(ConfigValidationError) as err:
        sweep_antennas(spec, classes)
    assert err.value.field == "classes"


def test_check_classes_sorts_and_dedupes():
    assert check_classes([3, 1, 3], 30) == [1, 3]
    assert check_classes(range(1, 31), 30) == list(range(1, 31))


def test_mixed_population_rejects_bad_counts(default_config):
    with pytest.raises(ConfigValidationError):
        mixed_population_rows(default_config, {0: 3}, 100)
    with pytest.raises(ConfigValidationError):
        mixed_population_rows(default_config, {1: -1, 3: 3}, 100)
    with pytest.raises(ConfigValidationError):
        mixed_population_rows(default_config, {3: 0}, 100)
    with pytest.raises(ValueError):
        mixed_population_rows(default_config, {3: 3}, 1)


def test_parse_class_counts():
    assert parse_class_counts("1:1, 3:30,") == {1: 1, 3: 30}
    assert parse_class_counts("3:2,3:4") == {3: 6}
    with pytest.raises(ConfigValidationError):
        parse_class_counts("3")
    with pytest.raises(ConfigValidationError):
        parse_class_counts("a:1")
