from __future__ import annotations

"""
Channel construction for the multi-cell system.

The channel between the M antennas of a base station and the K users of a
cell is G = H D^{1/2}: H holds i.i.d. CN(0, 1) fast fading, D the per-user
large-scale gains. Cells are indexed from 0.
"""

from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from ..config import SystemConfig
from ..errors import DimensionError

MIN_BETA = 1e-12


class SeededRng:
    """
    Deterministic random stream keyed by (seed, trial, slot, cell, stream).

    Philox is counter based, so any key can be built independently of the
    others and trials never share generator state.
    """

    def __init__(self, seed: int, trial: int = 0, slot: int = 0, cell: int = 0, stream: int = 0) -> None:
        self.key: Tuple[int, int, int, int, int] = (int(seed), int(trial), int(slot), int(cell), int(stream))
        self.generator = np.random.Generator(np.random.Philox(np.random.SeedSequence(list(self.key))))

    def complex_normal(self, shape: int | Sequence[int]) -> np.ndarray:
        """CN(0, 1) samples: independent real and imaginary parts of variance 1/2."""
        re = self.generator.standard_normal(shape)
        im = self.generator.standard_normal(shape)
        return (re + 1j * im) * np.sqrt(0.5)

    def qpsk(self, size: int) -> np.ndarray:
        bits = self.generator.integers(0, 2, size=(2, size))
        return ((1 - 2 * bits[0]) + 1j * (1 - 2 * bits[1])) * np.sqrt(0.5)

    def __repr__(self) -> str:
        return f"SeededRng(key={self.key})"


@dataclass(frozen=True)
class FastFading:
    entries: np.ndarray

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape  # type: ignore[return-value]


@dataclass(frozen=True)
class LargeScale:
    betas: np.ndarray

    def __post_init__(self) -> None:
        betas = np.asarray(self.betas, dtype=float)
        if betas.ndim != 1:
            raise DimensionError("large-scale gains must be a vector")
        if np.any(betas <= 0):
            raise ValueError("large-scale gains must be strictly positive")
        object.__setattr__(self, "betas", betas)

    def __len__(self) -> int:
        return int(self.betas.shape[0])


@dataclass(frozen=True)
class ChannelMatrix:
    entries: np.ndarray
    fading: FastFading = field(repr=False)
    large_scale: LargeScale = field(repr=False)

    @property
    def num_antennas(self) -> int:
        return int(self.entries.shape[0])

    @property
    def num_users(self) -> int:
        return int(self.entries.shape[1])

    def column(self, k: int) -> np.ndarray:
        return self.entries[:, k]


def sample_fast_fading(M: int, K: int, rng: SeededRng) -> FastFading:
    if M < 1 or K < 1:
        raise DimensionError(f"fast fading needs M, K >= 1 (got M={M}, K={K})")
    return FastFading(rng.complex_normal((M, K)))


def compose_channel(H: FastFading, beta: LargeScale) -> ChannelMatrix:
    K = H.entries.shape[1]
    if len(beta) != K:
        raise DimensionError(f"{K} fading columns but {len(beta)} large-scale gains")
    return ChannelMatrix(H.entries * np.sqrt(beta.betas)[None, :], H, beta)


def default_large_scale(config: SystemConfig, serving_cell: int, source_cell: int) -> LargeScale:
    """Unit gain inside the serving cell, ``intercell_factor`` across cells."""
    L = config.num_cells
    if not (0 <= serving_cell < L and 0 <= source_cell < L):
        raise DimensionError(f"cell index out of range [0, {L})")
    if serving_cell == source_cell:
        value = 1.0
    else:
        value = max(config.intercell_factor, MIN_BETA)
    return LargeScale(np.full(config.num_users, value))


def normalized_gram(G: ChannelMatrix | np.ndarray) -> np.ndarray:
    """G^H G / M, which tends to D as M grows."""
    entries = G.entries if isinstance(G, ChannelMatrix) else np.asarray(G)
    return entries.conj().T @ entries / entries.shape[0]


class ChannelSet:
    """
    All channels of one trial: ``fading[b, c]`` is the M x K fast fading
    between base station b and the users of cell c, ``betas[b, c]`` the
    matching large-scale gains. A user's columns are replaced together
    when its coherence block ends.
    """

    def __init__(self, fading: np.ndarray, betas: np.ndarray) -> None:
        if fading.ndim != 4 or betas.shape != (fading.shape[0], fading.shape[1], fading.shape[3]):
            raise DimensionError(
                f"fading {fading.shape} and betas {betas.shape} do not describe the same cells/users"
            )
        self.fading = fading
        self.betas = betas

    @classmethod
    def empty(cls, config: SystemConfig, num_antennas: int | None = None) -> "ChannelSet":
        L, K = config.num_cells, config.num_users
        M = num_antennas or config.num_antennas
        betas = np.empty((L, L, K))
        for b in range(L):
            for c in range(L):
                betas[b, c] = default_large_scale(config, b, c).betas
        return cls(np.zeros((L, L, M, K), dtype=complex), betas)

    @property
    def num_cells(self) -> int:
        return int(self.fading.shape[0])

    @property
    def num_antennas(self) -> int:
        return int(self.fading.shape[2])

    @property
    def num_users(self) -> int:
        return int(self.fading.shape[3])

    def gains(self) -> np.ndarray:
        """G for every (base station, cell) pair, shape (L, L, M, K)."""
        return self.fading * np.sqrt(self.betas)[:, :, None, :]

    def matrix(self, bs: int, cell: int) -> ChannelMatrix:
        return compose_channel(FastFading(self.fading[bs, cell]), LargeScale(self.betas[bs, cell]))

    def set_user_fading(self, cell: int, user: int, draw: np.ndarray) -> None:
        """New fast fading of one user towards every base station, ``draw`` of shape (L, M)."""
        if draw.shape != (self.num_cells, self.num_antennas):
            raise DimensionError(f"fading draw has shape {draw.shape}, expected {(self.num_cells, self.num_antennas)}")
        self.fading[:, cell, :, user] = draw
