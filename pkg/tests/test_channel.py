from __future__ import annotations

import numpy as np
import pytest

from app.config import build_config
from app.domain.channel import (
    MIN_BETA,
    ChannelSet,
    FastFading,
    LargeScale,
    SeededRng,
    compose_channel,
    default_large_scale,
    normalized_gram,
    sample_fast_fading,
)
from app.domain.estimator import asymptotic_gram_error
from app.errors import DimensionError


def test_same_key_gives_identical_draws():
    a = sample_fast_fading(8, 4, SeededRng(7, 1, 2, 3, 4))
    b = sample_fast_fading(8, 4, SeededRng(7, 1, 2, 3, 4))
    assert np.array_equal(a.entries, b.entries)


@pytest.mark.parametrize("key", [(8, 1, 2, 3, 4), (7, 0, 2, 3, 4), (7, 1, 0, 3, 4), (7, 1, 2, 0, 4), (7, 1, 2, 3, 0)])
def test_any_key_component_changes_the_stream(key):
    a = SeededRng(7, 1, 2, 3, 4).complex_normal(16)
    b = SeededRng(*key).complex_normal(16)
    assert not np.allclose(a, b)


def test_fast_fading_is_unit_variance_zero_mean():
    h = sample_fast_fading(100_000, 1, SeededRng(1)).entries
    assert abs(h.mean()) < 0.02
    assert 0.98 <= np.mean(np.abs(h) ** 2) <= 1.02


def test_fast_fading_columns_are_nearly_orthogonal():
    h = sample_fast_fading(10_000, 2, SeededRng(2)).entries
    assert abs(np.vdot(h[:, 0], h[:, 1])) / 10_000 < 0.05


def test_fast_fading_rejects_empty_shapes():
    with pytest.raises(DimensionError):
        sample_fast_fading(0, 3, SeededRng(1))


def test_qpsk_symbols_have_unit_power():
    x = SeededRng(3).qpsk(64)
    assert np.allclose(np.abs(x), 1.0)


def test_compose_with_unit_betas_is_identity():
    H = sample_fast_fading(6, 3, SeededRng(4))
    G = compose_channel(H, LargeScale(np.ones(3)))
    assert np.array_equal(G.entries, H.entries)
    assert G.fading is H


def test_compose_scales_columns_by_sqrt_beta():
    H = sample_fast_fading(6, 3, SeededRng(5))
    G = compose_channel(H, LargeScale(np.full(3, 4.0)))
    assert np.allclose(np.linalg.norm(G.entries, axis=0), 2 * np.linalg.norm(H.entries, axis=0))


def test_compose_direct_arithmetic():
    G = compose_channel(FastFading(np.ones((2, 2), dtype=complex)), LargeScale(np.array([1.0, 9.0])))
    assert np.array_equal(G.entries, np.array([[1, 3], [1, 3]], dtype=complex))
    assert np.array_equal(G.column(1), np.array([3, 3], dtype=complex))
    assert (G.num_antennas, G.num_users) == (2, 2)


def test_compose_dimension_mismatch():
    H = sample_fast_fading(4, 2, SeededRng(6))
    with pytest.raises(DimensionError):
        compose_channel(H, LargeScale(np.ones(3)))


def test_large_scale_validation():
    with pytest.raises(ValueError):
        LargeScale(np.array([1.0, 0.0]))
    with pytest.raises(DimensionError):
        LargeScale(np.ones((2, 2)))


def test_default_large_scale():
    cfg = build_config(num_users=4)
    assert np.array_equal(default_large_scale(cfg, 2, 2).betas, np.ones(4))
    assert np.allclose(default_large_scale(cfg, 0, 3).betas, 0.3)
    flat = build_config(num_users=4, intercell_factor=0.0)
    assert np.all(default_large_scale(flat, 0, 1).betas == MIN_BETA)
    with pytest.raises(DimensionError):
        default_large_scale(cfg, 0, 7)


def test_gram_tends_to_identity_for_unit_betas():
    errors = []
    for M in (100, 1_000, 10_000):
        H = sample_fast_fading(M, 5, SeededRng(11, M))
        G = compose_channel(H, LargeScale(np.ones(5)))
        errors.append(np.linalg.norm(normalized_gram(G) - np.eye(5)) / np.sqrt(5))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 0.05


def test_gram_tends_to_large_scale_matrix():
    betas = np.array([0.5, 1.0, 2.0, 3.0, 4.0])
    worst = 0.0
    for trial in range(100):
        G = compose_channel(sample_fast_fading(10_000, 5, SeededRng(12, trial)), LargeScale(betas))
        worst = max(worst, asymptotic_gram_error(G))
    assert worst < 0.05


def test_column_energy_matches_large_scale_gain():
    betas = np.array([0.3, 1.0, 2.5, 0.7])
    energy = np.zeros(4)
    for trial in range(200):
        G = compose_channel(sample_fast_fading(256, 4, SeededRng(13, trial)), LargeScale(betas))
        energy += np.linalg.norm(G.entries, axis=0) ** 2
    energy /= 200
    assert np.allclose(energy, 256 * betas, rtol=0.05)


def test_channel_set_layout():
    cfg = build_config(num_cells=3, num_users=2, num_antennas=5)
    cs = ChannelSet.empty(cfg)
    assert cs.fading.shape == (3, 3, 5, 2)
    assert (cs.num_cells, cs.num_antennas, cs.num_users) == (3, 5, 2)
    assert np.allclose(cs.betas[1, 1], 1.0) and np.allclose(cs.betas[0, 2], 0.3)

    draw = SeededRng(1).complex_normal((3, 5))
    cs.set_user_fading(2, 1, draw)
    assert np.array_equal(cs.fading[:, 2, :, 1], draw)
    gains = cs.gains()
    assert np.allclose(gains[0, 2, :, 1], draw[0] * np.sqrt(0.3))
    assert np.allclose(cs.matrix(0, 2).entries, gains[0, 2])

    with pytest.raises(DimensionError):
        cs.set_user_fading(0, 0, np.zeros((2, 5)))


def test_channel_set_antenna_override():
    cfg = build_config(num_cells=2, num_users=2)
    assert ChannelSet.empty(cfg, num_antennas=7).num_antennas == 7
