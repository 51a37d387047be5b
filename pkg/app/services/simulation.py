from __future__ import annotations

"""
Slot-by-slot Monte Carlo simulation of the multi-cell system.

Per slot: users whose coherence block starts get fresh fading, every base
station receives the pilot block of the users scheduled in that slot,
LS-estimates them, refreshes its CSI cache and classifier, then precodes
the downlink with the cache (fresh columns for uploaders, stale for the
rest). Signal and interference-plus-noise powers are accumulated per user;
the empirical SINR is the ratio of the accumulated powers.

The classifier works on per-slot uplink soundings of each user's own
channel. It is updated when a user uploads, with the sounding of the slot
before the upload telling a renewal on schedule from an early change.
A user's true coherence class is independent of its scheduled class and
fading blocks stay anchored at the phases of the initial plan.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..config import Settings, SystemConfig, load_settings
from ..domain.channel import ChannelSet, SeededRng
from ..domain.classifier import Classifier, TraceRow
from ..domain.estimator import (
    CsiCache,
    PilotBook,
    downlink_noise,
    downlink_terms,
    ls_estimate,
    precode_mrt,
    receive_pilots,
    update_cache,
)
from ..domain.performance import to_db
from ..domain.scheduler import PilotPlan, assign_network, pilot_capacity, sparsity_mask
from ..errors import ConfigValidationError, SchedulingError
from ..logging import get_logger
from ..monitoring import metrics as app_metrics
from .classification import get_profile

# stream tags of SeededRng(seed, trial, slot, cell, stream)
PILOT_NOISE_STREAM = 1
SYMBOL_STREAM = 2
DOWNLINK_NOISE_STREAM = 3
SOUNDING_STREAM = 4
FADING_STREAM = 16  # + user index


@dataclass(frozen=True)
class SimulationOptions:
    noiseless_uplink: bool = False
    noiseless_downlink: bool = False
    static_channels: bool = False
    adaptive: bool = False
    # true coherence class per (cell, user); defaults to the plan's classes
    coherence_classes: Optional[Sequence[Sequence[int]]] = None
    num_antennas: Optional[int] = None
    # slots simulated before measuring; defaults to one plan period
    warmup_slots: Optional[int] = None


@dataclass
class TrialResult:
    signal: np.ndarray  # L x K accumulated |desired|^2
    interference: np.ndarray  # L x K accumulated |interference + noise|^2
    samples: int
    trace: List[TraceRow] = field(default_factory=list)
    final_classes: List[List[int]] = field(default_factory=list)

    def empirical_sinr(self) -> np.ndarray:
        return ratio_of_powers(self.signal, self.interference)


@dataclass
class SimulationResult:
    sinr: np.ndarray  # L x K empirical SINR over all trials
    trials: int
    slots: int
    trace: List[TraceRow]
    final_classes: List[List[int]]
    pilots_used: List[int]
    elapsed_seconds: float

    def summary(self, config: SystemConfig) -> Dict[str, object]:
        finite = self.sinr[np.isfinite(self.sinr)]
        mean = float(finite.mean()) if finite.size else math.inf
        classes = [n for cell in self.final_classes for n in cell]
        return {
            "trials": self.trials,
            "slots": self.slots,
            "sinr_mean": mean,
            "sinr_mean_db": to_db(mean),
            "sinr_min": float(self.sinr.min()),
            "sinr_max": float(self.sinr.max()),
            "pilots_used": self.pilots_used,
            "pilot_capacity_class_max": pilot_capacity(config.num_pilots, max(classes) if classes else 1),
            "final_classes": self.final_classes,
            "elapsed_seconds": round(self.elapsed_seconds, 3),
        }


def ratio_of_powers(signal: np.ndarray, interference: np.ndarray) -> np.ndarray:
    out = np.full(signal.shape, math.inf)
    np.divide(signal, interference, out=out, where=interference > 0)
    return out


def build_options(
    config: SystemConfig,
    *,
    noiseless: bool = False,
    static: bool = False,
    adaptive: bool = False,
    num_antennas: Optional[int] = None,
    coherence_class: Optional[int] = None,
    profile: Optional[str] = None,
) -> SimulationOptions:
    """
    Options of a ``run`` request. ``coherence_class`` or a mobility
    ``profile`` sets the true coherence class of every user; without either
    it follows the plan. The static profile holds every channel.
    """
    if coherence_class is not None and profile is not None:
        raise ConfigValidationError("give either a coherence class or a mobility profile", field="profile")
    if profile is not None:
        try:
            prof = get_profile(profile)
        except ValueError as exc:
            raise ConfigValidationError(str(exc), field="profile") from None
        static = static or prof.velocity is None
        coherence_class = prof.coherence_class(config)
    classes = None
    if coherence_class is not None:
        if not 1 <= coherence_class <= config.max_class:
            raise ConfigValidationError(
                f"coherence class {coherence_class} outside [1, {config.max_class}]", field="coherence_class"
            )
        classes = [[coherence_class] * config.num_users for _ in range(config.num_cells)]
    return SimulationOptions(
        noiseless_uplink=noiseless,
        noiseless_downlink=noiseless,
        static_channels=static,
        adaptive=adaptive,
        coherence_classes=classes,
        num_antennas=num_antennas,
    )


def _coherence_offsets(plan: PilotPlan, num_cells: int) -> List[np.ndarray]:
    return [np.array([a.phase for a in plan.for_cell(c)]) for c in range(num_cells)]


def _true_classes(plan: PilotPlan, options: SimulationOptions, num_cells: int) -> List[np.ndarray]:
    if options.coherence_classes is not None:
        return [np.asarray(options.coherence_classes[c], dtype=int) for c in range(num_cells)]
    return [np.array(plan.classes(c), dtype=int) for c in range(num_cells)]


def run_slot_simulation(
    config: SystemConfig,
    plan: PilotPlan,
    num_slots: int,
    trial: int = 0,
    options: SimulationOptions = SimulationOptions(),
) -> TrialResult:
    """
    One trial. A warm-up of one plan period fills every CSI cache before
    ``num_slots`` measured slots; the classifier runs throughout.
    """
    L, K, tau, Pu = config.num_cells, config.num_users, config.pilot_len, config.uplink_power
    seed = config.rng_seed
    channels = ChannelSet.empty(config, options.num_antennas)
    M = channels.num_antennas
    book = PilotBook.fourier(tau, config.num_pilots)
    caches = [CsiCache.empty(M, K) for _ in range(L)]
    classifiers = [Classifier(config, plan.classes(c), cell_id=c) for c in range(L)]
    offsets = _coherence_offsets(plan, L)
    true_classes = _true_classes(plan, options, L)
    logger = get_logger()

    signal = np.zeros((L, K))
    interference = np.zeros((L, K))
    trace: List[TraceRow] = []
    warmup = plan.period() if options.warmup_slots is None else options.warmup_slots
    samples = 0
    previous: Optional[List[np.ndarray]] = None

    for t in range(warmup + num_slots):
        # fading blocks
        for c in range(L):
            if options.static_channels:
                starting = range(K) if t == 0 else ()
            elif t == 0:
                starting = range(K)
            else:
                starting = np.flatnonzero((t - offsets[c]) % true_classes[c] == 0)
            for k in starting:
                draw = SeededRng(seed, trial, t, c, FADING_STREAM + int(k)).complex_normal((L, M))
                channels.set_user_fading(c, int(k), draw)

        # own-channel soundings, M x K per cell
        gains = channels.gains()
        soundings = []
        for j in range(L):
            sounding = np.sqrt(tau * Pu) * gains[j, j]
            if not options.noiseless_uplink:
                sounding = sounding + SeededRng(seed, trial, t, j, SOUNDING_STREAM).complex_normal((M, K))
            soundings.append(sounding)
        before = soundings if previous is None else previous

        masks = [sparsity_mask(plan, c, t) for c in range(L)]
        pilot_maps = [plan.pilot_map(c) for c in range(L)]

        # uplink training at every base station
        for j in range(L):
            rng = None if options.noiseless_uplink else SeededRng(seed, trial, t, j, PILOT_NOISE_STREAM)
            block = receive_pilots(
                [channels.matrix(j, c) for c in range(L)], masks, book, pilot_maps, tau, Pu, rng
            )
            uploading = masks[j].uploading()
            fresh: Dict[int, np.ndarray] = {}
            if uploading:
                by_pilot = ls_estimate(block, book, [int(pilot_maps[j][k]) for k in uploading], tau, Pu)
                fresh = {k: by_pilot[int(pilot_maps[j][k])] for k in uploading}
            caches[j] = update_cache(caches[j], fresh, masks[j])
            for k in uploading:
                row = classifiers[j].observe(t, k, soundings[j][:, k], before=before[j][:, k])
                if row is not None:
                    trace.append(row)
        previous = soundings

        # downlink with fresh and stale CSI
        if t >= warmup:
            precoders = [precode_mrt(caches[j]) for j in range(L)]
            symbols = np.stack([SeededRng(seed, trial, t, c, SYMBOL_STREAM).qpsk(K) for c in range(L)])
            received, desired = downlink_terms(gains, precoders, symbols, config.downlink_power)
            noise_rngs = None if options.noiseless_downlink else [
                SeededRng(seed, trial, t, c, DOWNLINK_NOISE_STREAM) for c in range(L)
            ]
            rest = received - desired + downlink_noise(received.shape, noise_rngs)
            signal += np.abs(desired) ** 2
            interference += np.abs(rest) ** 2
            samples += 1

        # re-pack at period boundaries when classes moved
        if options.adaptive and t > 0 and (t + 1) % plan.period() == 0:
            wanted = [classifiers[c].classes() for c in range(L)]
            if wanted != [plan.classes(c) for c in range(L)]:
                try:
                    plan = assign_network(wanted, config.num_pilots, config.max_class)
                    logger.info("slot %s: rescheduled pilots for classes %s", t, wanted)
                except SchedulingError as exc:
                    logger.warning("slot %s: keeping previous plan, re-pack infeasible: %s", t, exc)

    return TrialResult(
        signal=signal,
        interference=interference,
        samples=samples,
        trace=trace,
        final_classes=[classifiers[c].classes() for c in range(L)],
    )


def run_trials(
    config: SystemConfig,
    plan: PilotPlan,
    num_slots: int,
    trials: int,
    options: SimulationOptions = SimulationOptions(),
    settings: Optional[Settings] = None,
) -> SimulationResult:
    """Independent trials in parallel; powers are summed in trial order."""
    if trials < 1:
        raise ConfigValidationError(f"trials must be >= 1, got {trials}", field="trials")
    if num_slots < 1:
        raise ConfigValidationError(f"slots must be >= 1, got {num_slots}", field="slots")
    settings = settings or load_settings()
    logger = get_logger()
    logger.info(
        "simulation start: trials=%s, slots=%s, L=%s, K=%s, M=%s",
        trials, num_slots, config.num_cells, config.num_users, options.num_antennas or config.num_antennas,
    )
    t0 = time.time()
    workers = max(1, min(settings.trial_workers, trials))
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="trial") as pool:
        results = list(pool.map(lambda i: run_slot_simulation(config, plan, num_slots, i, options), range(trials)))

    signal = np.zeros_like(results[0].signal)
    interference = np.zeros_like(results[0].interference)
    for r in results:
        signal += r.signal
        interference += r.interference
    elapsed = time.time() - t0
    app_metrics.simulation_recorded(trials, trials * num_slots)
    logger.info("simulation finished in %.2fs", elapsed)
    return SimulationResult(
        sinr=ratio_of_powers(signal, interference),
        trials=trials,
        slots=num_slots,
        trace=results[0].trace,
        final_classes=results[0].final_classes,
        pilots_used=[plan.pilots_used(c) for c in range(config.num_cells)],
        elapsed_seconds=elapsed,
    )
