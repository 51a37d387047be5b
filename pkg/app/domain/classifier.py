from __future__ import annotations

"""
Coherence classification of users.

After each new estimate the base station compares the user's channel with
its previous C(k) estimates. A user whose channel persisted (normalized
correlation at least 1 - eps against all of them) for C(k) + 1 consecutive
evaluations is promoted one class, up to the cap; a user whose channel
changed is demoted. Users that upload once per class interval go through
``update_scheduled``, where a renewal exactly on the interval boundary is
not a change.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np

from ..config import SystemConfig
from ..errors import SimilarityError

DemotionMode = Literal["step", "reset"]


@dataclass(frozen=True)
class ClassifierState:
    user_id: int
    class_n: int = 1
    history: Tuple[np.ndarray, ...] = field(default=(), repr=False)  # newest first
    persist_count: int = 0
    last_persisted: bool = False

    @classmethod
    def seeded(cls, user_id: int, class_n: int, estimate: np.ndarray) -> "ClassifierState":
        """State with one prior estimate in its history."""
        return cls(user_id=user_id, class_n=class_n, history=(np.asarray(estimate),))


@dataclass(frozen=True)
class TraceRow:
    slot: int
    user_id: int
    class_n: int
    persisted: bool
    cell_id: int = 0


def similarity(a: np.ndarray, b: np.ndarray) -> float:
    """|a^H b| / (||a|| ||b||), scale free and in [0, 1]."""
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise SimilarityError("similarity is undefined for a zero vector")
    return min(1.0, abs(complex(np.vdot(a, b))) / (na * nb))


def update_class(
    state: ClassifierState,
    estimate: np.ndarray,
    epsilon: float,
    max_class: int,
    demotion: DemotionMode = "step",
) -> ClassifierState:
    estimate = np.asarray(estimate)
    previous = state.history[: state.class_n]
    # an empty history cannot contradict the estimate
    persisted = all(similarity(estimate, h) >= 1.0 - epsilon for h in previous)
    history = (estimate,) + state.history[: max_class]

    class_n = state.class_n
    if persisted:
        count = state.persist_count + 1
        if count >= class_n + 1 and class_n < max_class:
            class_n += 1
            count = 0
    else:
        count = 0
        class_n = 1 if demotion == "reset" else max(1, class_n - 1)

    return replace(
        state,
        class_n=min(class_n, max_class),
        history=history,
        persist_count=count,
        last_persisted=persisted,
    )


def update_scheduled(
    state: ClassifierState,
    estimate: np.ndarray,
    before: np.ndarray,
    epsilon: float,
    max_class: int,
    demotion: DemotionMode = "step",
) -> ClassifierState:
    """
    Update for a user that only uploads once per class interval.

    ``before`` is the user's channel seen in the slot just before this
    upload. If it still matches the last upload, the channel lasted the
    whole interval, and a new channel at the upload is a renewal on
    schedule: the history restarts at ``estimate`` and class and count are
    kept. Anything else goes through :func:`update_class`.
    """
    if state.history:
        latest = state.history[0]
        held = similarity(before, latest) >= 1.0 - epsilon
        if held and similarity(estimate, latest) < 1.0 - epsilon:
            return replace(state, history=(np.asarray(estimate),), last_persisted=False)
    return update_class(state, estimate, epsilon, max_class, demotion)


class Classifier:
    """Per-user classifier states of one cell, evaluated every ``evaluation_period`` estimates."""

    def __init__(
        self, config: SystemConfig, initial_classes: Optional[List[int]] = None, cell_id: int = 0
    ) -> None:
        self.config = config
        self.cell_id = cell_id
        classes = initial_classes or [1] * config.num_users
        self.states: Dict[int, ClassifierState] = {
            k: ClassifierState(user_id=k, class_n=n) for k, n in enumerate(classes)
        }
        self._opportunities: Dict[int, int] = {k: 0 for k in self.states}

    def observe(
        self, slot: int, user_id: int, estimate: np.ndarray, before: Optional[np.ndarray] = None
    ) -> Optional[TraceRow]:
        """Feed one estimate; with ``before`` the update follows :func:`update_scheduled`."""
        seen = self._opportunities[user_id]
        self._opportunities[user_id] = seen + 1
        if seen % self.config.evaluation_period:
            return None
        cfg = self.config
        if before is None:
            state = update_class(
                self.states[user_id], estimate, cfg.persistence_tol, cfg.max_class, cfg.demotion_mode
            )
        else:
            state = update_scheduled(
                self.states[user_id], estimate, before, cfg.persistence_tol, cfg.max_class, cfg.demotion_mode
            )
        self.states[user_id] = state
        return TraceRow(
            slot=slot,
            user_id=user_id,
            class_n=state.class_n,
            persisted=state.last_persisted,
            cell_id=self.cell_id,
        )

    def classes(self) -> List[int]:
        return [self.states[k].class_n for k in sorted(self.states)]
