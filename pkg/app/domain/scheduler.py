from __future__ import annotations

"""
Time-shifted pilot scheduling.

A class-n user uploads its pilot once every n slots, in the slots t with
t mod n == phase. Up to n users of the same class share one pilot sequence
inside a cell by taking the distinct phases 0..n-1, so at most one of them
transmits that pilot in any slot.
"""

import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from ..errors import SchedulingError


@dataclass(frozen=True)
class UserSlot:
    user_id: int
    cell_id: int
    class_n: int
    pilot_id: int
    phase: int

    def transmits(self, t: int) -> bool:
        return t % self.class_n == self.phase


@dataclass(frozen=True)
class SparsityMask:
    bits: np.ndarray

    @property
    def active(self) -> int:
        """K', the number of users uploading a pilot in this slot."""
        return int(self.bits.sum())

    @property
    def idle(self) -> int:
        return int(self.bits.size - self.bits.sum())

    def uploading(self) -> List[int]:
        return [int(k) for k in np.flatnonzero(self.bits)]


@dataclass(frozen=True)
class ContaminationStats:
    alpha: float
    L_prime: int
    L_bar_prime: float


@dataclass(frozen=True)
class PilotPlan:
    assignments: Tuple[UserSlot, ...]

    def cells(self) -> List[int]:
        return sorted({a.cell_id for a in self.assignments})

    def for_cell(self, cell: int) -> List[UserSlot]:
        rows = sorted((a for a in self.assignments if a.cell_id == cell), key=lambda a: a.user_id)
        if not rows:
            raise SchedulingError(f"plan does not cover cell {cell}")
        return rows

    def classes(self, cell: int) -> List[int]:
        return [a.class_n for a in self.for_cell(cell)]

    def pilot_map(self, cell: int) -> np.ndarray:
        return np.array([a.pilot_id for a in self.for_cell(cell)], dtype=int)

    def pilots_used(self, cell: int) -> int:
        return len({a.pilot_id for a in self.for_cell(cell)})

    def period(self, cell: int | None = None) -> int:
        """Length after which every mask of the cell (or of all cells) repeats."""
        rows = self.assignments if cell is None else self.for_cell(cell)
        return math.lcm(*(a.class_n for a in rows)) if rows else 1

    @classmethod
    def combine(cls, plans: Iterable["PilotPlan"]) -> "PilotPlan":
        rows: List[UserSlot] = []
        for p in plans:
            rows.extend(p.assignments)
        return cls(tuple(sorted(rows, key=lambda a: (a.cell_id, a.user_id))))


def pilots_required(classes: Sequence[int]) -> int:
    counts = Counter(classes)
    return sum(math.ceil(count / n) for n, count in counts.items())


def pilot_capacity(num_pilots: int, class_n: int) -> int:
    """Users one cell can serve without intra-cell pilot reuse collisions when all are class n."""
    return num_pilots * class_n


def assign_pilots(classes: Sequence[int], num_pilots: int, max_class: int, cell_id: int = 0) -> PilotPlan:
    """
    Pack users of equal class onto shared pilots, first fit by descending class.

    ``classes[k]`` is the class of user k. Users of one class fill a pilot
    with consecutive phases 0..n-1 before the next pilot is opened; mixed
    classes never share a pilot.
    """
    for k, n in enumerate(classes):
        if n < 1 or n > max_class:
            raise SchedulingError(f"user {k} has class {n}, outside [1, {max_class}]")
    required = pilots_required(classes)
    if required > num_pilots:
        raise SchedulingError(f"plan needs {required} pilots but only {num_pilots} are available")

    by_class: Dict[int, List[int]] = {}
    for k, n in enumerate(classes):
        by_class.setdefault(n, []).append(k)

    rows: List[UserSlot] = []
    pilot = 0
    for n in sorted(by_class, reverse=True):
        users = by_class[n]
        for start in range(0, len(users), n):
            for phase, k in enumerate(users[start:start + n]):
                rows.append(UserSlot(user_id=k, cell_id=cell_id, class_n=n, pilot_id=pilot, phase=phase))
            pilot += 1
    rows.sort(key=lambda a: a.user_id)
    return PilotPlan(tuple(rows))


def assign_network(classes_per_cell: Sequence[Sequence[int]], num_pilots: int, max_class: int) -> PilotPlan:
    return PilotPlan.combine(
        assign_pilots(classes, num_pilots, max_class, cell_id=cell)
        for cell, classes in enumerate(classes_per_cell)
    )


def sparsity_mask(plan: PilotPlan, cell: int, t: int) -> SparsityMask:
    rows = plan.for_cell(cell)
    return SparsityMask(np.array([1 if a.transmits(t) else 0 for a in rows], dtype=np.int8))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def contamination_stats(K_prime: int, num_pilots: int, num_cells: int, gamma: float) -> ContaminationStats:
    """
    Probability of hitting a contaminated pilot and the number of cells
    reusing it: alpha = K'/OP, L' = max(1, r(L alpha)),
    L-bar' = (L' - 1) gamma + 1.
    """
    if K_prime > num_pilots:
        raise SchedulingError(f"{K_prime} pilots uploaded in one slot but only {num_pilots} exist")
    alpha = K_prime / num_pilots
    L_prime = max(1, _round_half_up(num_cells * alpha))
    return ContaminationStats(alpha=alpha, L_prime=L_prime, L_bar_prime=(L_prime - 1) * gamma + 1.0)
