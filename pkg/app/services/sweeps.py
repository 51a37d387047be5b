from __future__ import annotations

"""
Closed-form sweeps over the antenna count and the class index.

A class-n population spreads its pilots over n slots, so the per-slot
pilot load is K' = ceil(K / n). The load sets the contamination level L'
which feeds the closed-form SINR; the class also sets the EE prelog.
"""

import hashlib
import math
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Literal, Mapping, Sequence, Tuple

from ..config import SystemConfig, emit_config
from ..domain.performance import MetricsRow, energy_efficiency, sinr_closed_form, spectral_efficiency
from ..domain.scheduler import contamination_stats
from ..errors import ConfigValidationError
from ..logging import get_logger
from ..monitoring import metrics as app_metrics

SweepVariable = Literal["antennas", "class_index"]


@dataclass(frozen=True)
class SweepSpec:
    variable: SweepVariable
    grid: Tuple[int, ...]
    fixed: SystemConfig
    trials: int = 1

    def __post_init__(self) -> None:
        grid = tuple(int(v) for v in self.grid)
        if not grid:
            raise ValueError("sweep grid must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("sweep grid must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True)
class Provenance:
    config_hash: str
    seed: int
    timestamp: float = field(default_factory=time.time, compare=False)

    @classmethod
    def of(cls, config: SystemConfig) -> "Provenance":
        digest = hashlib.sha256(emit_config(config).encode("utf-8")).hexdigest()
        return cls(config_hash=digest[:16], seed=config.rng_seed)


@dataclass(frozen=True)
class ResultTable:
    rows: Tuple[MetricsRow, ...]
    variable: SweepVariable
    provenance: Provenance

    def __len__(self) -> int:
        return len(self.rows)

    def classes(self) -> List[int]:
        return sorted({r.class_n for r in self.rows})

    def series(self, class_n: int) -> List[MetricsRow]:
        return [r for r in self.rows if r.class_n == class_n]


def antenna_grid(m_min: int, m_max: int, m_step: int) -> Tuple[int, ...]:
    if m_step < 1 or m_min < 2 or m_max < m_min:
        raise ValueError("antenna grid needs 2 <= m_min <= m_max and m_step >= 1")
    return tuple(range(m_min, m_max + 1, m_step))


def check_classes(classes: Iterable[int], max_class: int) -> List[int]:
    """Sorted distinct classes, each within [1, max_class]."""
    wanted = sorted({int(n) for n in classes})
    if not wanted:
        raise ConfigValidationError("at least one class is needed", field="classes")
    bad = [n for n in wanted if not 1 <= n <= max_class]
    if bad:
        raise ConfigValidationError(f"classes {bad} outside [1, {max_class}]", field="classes")
    return wanted


def evaluate_point(config: SystemConfig, M: int, class_n: int, K_n: int | None = None, K_prime: int | None = None) -> MetricsRow:
    """Closed-form SINR, SE and EE of a class-n population at M antennas."""
    K = config.num_users
    K_n = K if K_n is None else K_n
    load = math.ceil(K / class_n) if K_prime is None else K_prime
    stats = contamination_stats(load, config.num_pilots, config.num_cells, config.intercell_factor)
    sinr = sinr_closed_form(M, K, config.pilot_len, config.intercell_factor, stats.L_prime, config.uplink_power)
    return MetricsRow(
        M=M,
        class_n=class_n,
        K_n=K_n,
        sinr=sinr,
        se=spectral_efficiency(config.frame_len, config.pilot_len, K_n, sinr),
        ee=energy_efficiency(class_n, config.frame_len, config.pilot_len, K_n, sinr, config.uplink_power),
        K_prime=load,
        L_prime=stats.L_prime,
    )


def sweep_antennas(spec: SweepSpec, classes: Sequence[int] = (1, 3)) -> ResultTable:
    if spec.variable != "antennas":
        raise ValueError("sweep_antennas needs a sweep over antennas")
    if spec.grid[0] < 2 or spec.grid[-1] > 10_000:
        raise ValueError("antenna grid must lie within [2, 10000]")
    wanted = check_classes(classes, spec.fixed.max_class)
    rows = [evaluate_point(spec.fixed, M, n) for n in wanted for M in spec.grid]
    app_metrics.sweep_recorded(len(rows))
    get_logger().info("antenna sweep: %s points over classes %s", len(rows), wanted)
    return ResultTable(tuple(rows), "antennas", Provenance.of(spec.fixed))


def sweep_class(spec: SweepSpec, M: int) -> ResultTable:
    if spec.variable != "class_index":
        raise ValueError("sweep_class needs a sweep over the class index")
    check_classes(spec.grid, spec.fixed.max_class)
    rows = [evaluate_point(spec.fixed, M, n) for n in spec.grid]
    app_metrics.sweep_recorded(len(rows))
    get_logger().info("class sweep: %s classes at M=%s", len(rows), M)
    return ResultTable(tuple(rows), "class_index", Provenance.of(spec.fixed))


def sweep_grid(config: SystemConfig, antennas: Sequence[int], classes: Sequence[int]) -> ResultTable:
    """EE of every class in ``classes`` over the antenna grid; rows sorted by (n, M)."""
    spec = SweepSpec("antennas", tuple(antennas), config)
    return sweep_antennas(spec, classes)


def mixed_population_rows(config: SystemConfig, class_counts: Mapping[int, int], M: int) -> ResultTable:
    """
    Per-class figures when several classes share the cell. Every class
    sees the common per-slot load sum_n ceil(K_n / n), so a single class-1
    user raises the contamination of everybody.
    """
    if any(k < 0 for k in class_counts.values()):
        raise ConfigValidationError("user counts must be >= 0", field="classes")
    counts = {n: k for n, k in sorted(class_counts.items()) if k > 0}
    check_classes(counts, config.max_class)
    if not 2 <= M <= 10_000:
        raise ValueError("antenna count must lie within [2, 10000]")
    load = sum(math.ceil(k / n) for n, k in counts.items())
    population = config.model_copy(update={"num_users": sum(counts.values())})
    rows = [evaluate_point(population, M, n, K_n=k, K_prime=load) for n, k in counts.items()]
    app_metrics.sweep_recorded(len(rows))
    get_logger().info("mixed population: %s users over classes %s, per-slot load %s", population.num_users, list(counts), load)
    return ResultTable(tuple(rows), "class_index", Provenance.of(config))


def parse_class_counts(text: str) -> Dict[int, int]:
    """``"1:1,3:30"`` -> {1: 1, 3: 30}."""
    counts: Dict[int, int] = {}
    for item in text.split(","):
        if not item.strip():
            continue
        try:
            n, k = item.split(":")
            counts[int(n)] = counts.get(int(n), 0) + int(k)
        except ValueError:
            raise ConfigValidationError(f"expected class:count pairs, got {item.strip()!r}", field="classes") from None
    return counts
