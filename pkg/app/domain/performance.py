from __future__ import annotations

"""
Closed-form performance of the time-shifted pilot scheme and the OFDM
coherence numerology used to map user mobility to a class.
"""

import math
from dataclasses import dataclass
from typing import Sequence

from ..logging import get_logger

SPEED_OF_LIGHT = 299_792_458.0

# Returned by sinr_asymptotic when no other cell shares the pilot.
INTERFERENCE_FREE = math.inf


@dataclass(frozen=True)
class OfdmNumerology:
    symbol_interval: float  # Ts, seconds
    usable_interval: float  # Tu
    guard_interval: float  # Tg

    def __post_init__(self) -> None:
        if min(self.symbol_interval, self.usable_interval, self.guard_interval) <= 0:
            raise ValueError("OFDM intervals must be positive")
        if self.usable_interval > self.symbol_interval:
            raise ValueError("usable interval cannot exceed the symbol interval")

    @property
    def nyquist_tones(self) -> int:
        """Whole tones per symbol when the delay spread equals the guard interval."""
        return int(math.floor(self.usable_interval / self.guard_interval + 1e-9))


TYPICAL_NUMEROLOGY = OfdmNumerology(
    symbol_interval=1e-3 / 14,
    usable_interval=1e-3 / 15,
    guard_interval=1e-3 / 220,
)


@dataclass(frozen=True)
class MetricsRow:
    M: int
    class_n: int
    K_n: int
    sinr: float
    se: float
    ee: float
    K_prime: int = 0
    L_prime: int = 1

    @property
    def sinr_db(self) -> float:
        return to_db(self.sinr)


def to_db(value: float) -> float:
    if value <= 0:
        return -math.inf
    return 10.0 * math.log10(value)


def sinr_asymptotic(beta_serving: float, beta_interferers: Sequence[float]) -> float:
    if beta_serving <= 0:
        raise ValueError("serving large-scale gain must be positive")
    interference = sum(b * b for b in beta_interferers)
    if not beta_interferers or interference == 0:
        return INTERFERENCE_FREE
    return beta_serving ** 2 / interference


def sinr_closed_form(M: int, K: int, tau: int, gamma: float, L_prime: int, Pu: float) -> float:
    """
    Uplink MRC SINR with pilot reuse over L' cells:

        tau (M-1) Pu^2 / ( tau (K Lb^2 - 1 + gamma (L'-1)(M-2)) Pu^2 + Lb (K + tau) Pu + 1 )

    with Lb = (L' - 1) gamma + 1.
    """
    if M < 2 or L_prime < 1 or tau < 1:
        raise ValueError("closed-form SINR needs M >= 2, L' >= 1 and tau >= 1")
    L_bar = (L_prime - 1) * gamma + 1.0
    p2 = Pu * Pu
    numerator = tau * (M - 1) * p2
    denominator = (
        tau * (K * L_bar * L_bar - 1 + gamma * (L_prime - 1) * (M - 2)) * p2
        + L_bar * (K + tau) * Pu
        + 1.0
    )
    return numerator / denominator


def spectral_efficiency(T: int, tau: int, K: int, sinr: float) -> float:
    if tau >= T:
        raise ValueError("tau must be smaller than the frame length")
    return (T - tau) / T * K * math.log2(1.0 + sinr)


def ee_prelog(n: int, T: int, tau: int) -> float:
    """n (T - tau) / (n T - (n - 1) tau): share of a class-n period spent on data."""
    return n * (T - tau) / (n * T - (n - 1) * tau)


def energy_efficiency(n: int, T: int, tau: int, K_n: int, sinr: float, Pu: float) -> float:
    if n < 1 or tau >= T or Pu <= 0:
        raise ValueError("energy efficiency needs n >= 1, tau < T and Pu > 0")
    return ee_prelog(n, T, tau) * K_n * math.log2(1.0 + sinr) / Pu


def coherence_samples(velocity: float, carrier_freq: float, num: OfdmNumerology = TYPICAL_NUMEROLOGY) -> int:
    """
    Coherence interval in samples: time to travel a quarter wavelength,
    in whole OFDM symbols, times the Nyquist tones per symbol. Doubling
    the velocity halves the count to within one symbol of tones.
    """
    if velocity <= 0 or carrier_freq <= 0:
        raise ValueError("velocity and carrier frequency must be positive")
    t_slot = SPEED_OF_LIGHT / carrier_freq / 4.0 / velocity
    symbols = int(math.floor(t_slot / num.symbol_interval + 0.5))
    return symbols * num.nyquist_tones


def class_for_coherence(T_user: int, T_base: int, max_class: int) -> int:
    if T_base < 1:
        raise ValueError("base coherence interval must be at least one sample")
    if T_user < T_base:
        get_logger().warning(
            "coherence interval %s is shorter than the base frame %s; user kept in class 1", T_user, T_base
        )
        return 1
    return min(max_class, T_user // T_base)
