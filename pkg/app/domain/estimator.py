from __future__ import annotations

"""
Uplink pilot reception, least-squares estimation, CSI caching and MRT
downlink.

Estimates keep the sqrt(tau Pu) factor of the LS solution: without noise
the estimate of pilot p is sqrt(tau Pu) times the sum of the channels of
every user that sent p in this slot. Users skipping their pilot are
precoded with their cached (stale) estimate.
"""

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from .channel import ChannelMatrix, SeededRng
from .scheduler import SparsityMask
from ..errors import DimensionError, EstimationError


@dataclass(frozen=True)
class PilotBook:
    sequences: np.ndarray  # OP x tau, orthonormal rows

    @classmethod
    def fourier(cls, tau: int, num_pilots: Optional[int] = None) -> "PilotBook":
        """Normalized DFT basis of size tau, truncated to ``num_pilots`` rows."""
        op = tau if num_pilots is None else num_pilots
        if op > tau:
            raise DimensionError(f"only {tau} orthonormal pilots of length {tau} exist, {op} requested")
        n = np.arange(tau)
        basis = np.exp(-2j * np.pi * np.outer(n, n) / tau) / np.sqrt(tau)
        return cls(basis[:op])

    @property
    def tau(self) -> int:
        return int(self.sequences.shape[1])

    def __len__(self) -> int:
        return int(self.sequences.shape[0])

    def sequence(self, pilot_id: int) -> np.ndarray:
        if not 0 <= pilot_id < len(self):
            raise EstimationError(f"unknown pilot id {pilot_id} (book holds {len(self)})")
        return self.sequences[pilot_id]


@dataclass(frozen=True)
class ReceivedPilotBlock:
    samples: np.ndarray  # M x tau


@dataclass(frozen=True)
class CsiCache:
    estimates: np.ndarray  # M x K, one column per user
    ages: np.ndarray  # slots since the column was estimated
    known: np.ndarray  # False until a user's first estimate

    @classmethod
    def empty(cls, num_antennas: int, num_users: int) -> "CsiCache":
        return cls(
            np.zeros((num_antennas, num_users), dtype=complex),
            np.zeros(num_users, dtype=int),
            np.zeros(num_users, dtype=bool),
        )

    @property
    def num_users(self) -> int:
        return int(self.ages.shape[0])

    def last_estimate(self, k: int) -> np.ndarray:
        if not self.known[k]:
            raise EstimationError(f"user {k} has never been estimated")
        return self.estimates[:, k]


def receive_pilots(
    channels: Sequence[ChannelMatrix],
    masks: Sequence[SparsityMask],
    book: PilotBook,
    pilot_map: Sequence[Sequence[int]],
    tau: int,
    Pu: float,
    rng: Optional[SeededRng] = None,
) -> ReceivedPilotBlock:
    """
    Pilot block at one base station. ``channels[l]`` links the users of
    cell l to this station; ``masks[l]`` and ``pilot_map[l]`` say which of
    them send which pilot in this slot. ``rng=None`` means noiseless.
    """
    if not (len(channels) == len(masks) == len(pilot_map)):
        raise DimensionError("channels, masks and pilot maps must cover the same cells")
    if book.tau != tau:
        raise DimensionError(f"pilot book has length {book.tau}, expected tau={tau}")
    M = channels[0].num_antennas
    samples = np.zeros((M, tau), dtype=complex)
    for G, mask, pilots in zip(channels, masks, pilot_map):
        K = G.num_users
        if G.num_antennas != M or mask.bits.shape[0] != K or len(pilots) != K:
            raise DimensionError("cell channel, mask and pilot map disagree on M or K")
        active = np.flatnonzero(mask.bits)
        if active.size == 0:
            continue
        X = np.stack([book.sequence(int(pilots[k])) for k in active])  # K' x tau
        samples += G.entries[:, active] @ X
    samples *= np.sqrt(tau * Pu)
    if rng is not None:
        samples = samples + rng.complex_normal((M, tau))
    return ReceivedPilotBlock(samples)


def ls_estimate(
    block: ReceivedPilotBlock,
    book: PilotBook,
    active_pilots: Sequence[int],
    tau: int,
    Pu: float,
) -> Dict[int, np.ndarray]:
    """Projection of the block on each active pilot, Y x_p^H."""
    if not len(active_pilots):
        raise EstimationError("no active pilots to estimate")
    if block.samples.shape[1] != tau:
        raise DimensionError(f"block has {block.samples.shape[1]} pilot symbols, expected {tau}")
    return {int(p): block.samples @ book.sequence(int(p)).conj() for p in active_pilots}


def update_cache(
    cache: CsiCache,
    new_estimates: Mapping[int, np.ndarray],
    mask: SparsityMask,
) -> CsiCache:
    estimates = cache.estimates.copy()
    ages = cache.ages.copy()
    known = cache.known.copy()
    for k in range(cache.num_users):
        fresh = new_estimates.get(k)
        if mask.bits[k]:
            if fresh is None:
                raise EstimationError(f"user {k} uploaded a pilot but has no new estimate")
            estimates[:, k] = fresh
            ages[k] = 0
            known[k] = True
        else:
            if fresh is not None:
                raise EstimationError(f"user {k} skipped its pilot but an estimate was supplied")
            ages[k] += 1
    return CsiCache(estimates, ages, known)


def sparse_complements(cache: CsiCache) -> Tuple[np.ndarray, np.ndarray]:
    """Split the cache into its fresh part (age 0) and the stale complement."""
    fresh_cols = (cache.ages == 0) & cache.known
    fresh = np.where(fresh_cols[None, :], cache.estimates, 0)
    stale = np.where(fresh_cols[None, :], 0, cache.estimates)
    return fresh, stale


def precode_mrt(cache: CsiCache) -> np.ndarray:
    if not np.all(cache.known):
        missing = [int(k) for k in np.flatnonzero(~cache.known)]
        raise EstimationError(f"no CSI yet for users {missing}")
    fresh, stale = sparse_complements(cache)
    return np.conj(fresh + stale)


def downlink_terms(
    gains: np.ndarray,
    precoders: Sequence[np.ndarray],
    symbols: np.ndarray,
    Pd: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Noiseless downlink samples and their desired parts.

    ``gains[b, c]`` is the M x K channel between base station b and the
    users of cell c, ``precoders[b]`` the M x K precoder of station b and
    ``symbols[c]`` the K symbols meant for cell c. Returns two L x K arrays:
    the full received sample and the part carried by the user's own beam.
    """
    L = gains.shape[0]
    if len(precoders) != L or symbols.shape[0] != L:
        raise DimensionError("one precoder and one symbol vector per cell are required")
    K = gains.shape[3]
    received = np.zeros((L, K), dtype=complex)
    for b in range(L):
        W = precoders[b]
        if W.shape != gains.shape[2:]:
            raise DimensionError(f"precoder of cell {b} has shape {W.shape}, expected {gains.shape[2:]}")
        beam = W @ symbols[b]
        for c in range(L):
            received[c] += gains[b, c].T @ beam
    own = np.stack([np.einsum("mk,mk->k", gains[j, j], precoders[j]) for j in range(L)])
    scale = np.sqrt(Pd)
    return scale * received, scale * own * symbols


def downlink_receive(
    gains: np.ndarray,
    precoders: Sequence[np.ndarray],
    symbols: np.ndarray,
    Pd: float,
    rng: SeededRng | Sequence[SeededRng] | None = None,
) -> np.ndarray:
    received, _ = downlink_terms(gains, precoders, symbols, Pd)
    return received + downlink_noise(received.shape, rng)


def downlink_noise(shape: Tuple[int, int], rng: SeededRng | Sequence[SeededRng] | None) -> np.ndarray:
    if rng is None:
        return np.zeros(shape, dtype=complex)
    if isinstance(rng, SeededRng):
        return rng.complex_normal(shape)
    return np.stack([r.complex_normal(shape[1]) for r in rng])


def normalized_downlink(received: np.ndarray, num_antennas: int, tau: int, Pu: float, Pd: float) -> np.ndarray:
    """y / (M sqrt(tau Pu Pd)), which tends to beta_jk x_jk + sum_l beta_lk x_lk."""
    return received / (num_antennas * np.sqrt(tau * Pu * Pd))


def asymptotic_gram_error(G: ChannelMatrix) -> float:
    """||G^H G / M - D||_F / ||D||_F."""
    D = np.diag(G.large_scale.betas)
    gram = G.entries.conj().T @ G.entries / G.num_antennas
    return float(np.linalg.norm(gram - D) / np.linalg.norm(D))
