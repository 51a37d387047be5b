from __future__ import annotations

"""
Classifier demonstration on a single user with a chosen mobility profile.

The user's true channel is block faded with the coherence class of its
profile; every slot the base station receives the pilot, LS-estimates it
and feeds the estimate to the classifier.
"""

from dataclasses import dataclass
from typing import Dict, List, Literal, Optional

import numpy as np

from ..config import SystemConfig
from ..domain.channel import SeededRng, sample_fast_fading
from ..domain.classifier import Classifier, TraceRow
from ..domain.performance import class_for_coherence, coherence_samples
from ..logging import get_logger

ProfileName = Literal["static", "pedestrian", "train"]

CARRIER_FREQ_HZ = 1.9e9
FADING_STREAM = 16
PILOT_NOISE_STREAM = 1


@dataclass(frozen=True)
class MobilityProfile:
    name: str
    velocity: Optional[float]  # m/s, None for a channel that never changes

    def coherence_class(self, config: SystemConfig, carrier_freq: float = CARRIER_FREQ_HZ) -> int:
        if self.velocity is None:
            return config.max_class
        T_user = coherence_samples(self.velocity, carrier_freq)
        return class_for_coherence(T_user, config.frame_len, config.max_class)


PROFILES: Dict[str, MobilityProfile] = {
    "static": MobilityProfile("static", None),
    "pedestrian": MobilityProfile("pedestrian", 1.38),
    "train": MobilityProfile("train", 300.0 / 3.6),
}


def get_profile(name: str) -> MobilityProfile:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown mobility profile {name!r}, expected one of {sorted(PROFILES)}") from None


def classify_demo(
    config: SystemConfig,
    profile: str,
    num_slots: int,
    noiseless: bool = False,
    trial: int = 0,
) -> List[TraceRow]:
    """Trace of one user's class over ``num_slots`` pilot slots."""
    if num_slots < 1:
        raise ValueError("slots must be >= 1")
    prof = get_profile(profile)
    true_class = prof.coherence_class(config)
    M, tau, Pu, seed = config.num_antennas, config.pilot_len, config.uplink_power, config.rng_seed
    classifier = Classifier(config, initial_classes=[1])
    logger = get_logger()
    logger.info("classify-demo: profile=%s, true class=%s, slots=%s", prof.name, true_class, num_slots)

    trace: List[TraceRow] = []
    g = np.zeros(M, dtype=complex)
    for t in range(num_slots):
        if t == 0 or (prof.velocity is not None and t % true_class == 0):
            g = sample_fast_fading(M, 1, SeededRng(seed, trial, t, 0, FADING_STREAM)).entries[:, 0]
        estimate = np.sqrt(tau * Pu) * g
        if not noiseless:
            # LS projection of white CN(0,1) noise on a unit-norm pilot stays CN(0,1)
            estimate = estimate + SeededRng(seed, trial, t, 0, PILOT_NOISE_STREAM).complex_normal(M)
        row = classifier.observe(t, 0, estimate)
        if row is not None:
            trace.append(row)
    logger.info("classify-demo finished in class %s", classifier.classes()[0])
    return trace
