import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import block_diag

from radiostripe import channel, detection
from radiostripe.channel import ChannelRealization
from radiostripe.detection import MRC, OSLP, SumSEEvaluator
from radiostripe.selection import with_ap_block

from conftest import random_realization


def dense_se(real, D, scheme):
    """Per-UE SE at the full stripe from explicitly stacked vectors and block matrices."""
    K, L, N = real.estimate.shape
    p = real.powers
    Hbar = np.zeros((L * N, K), complex)
    blocks = []
    for l in range(L):
        S = real.noise_power * np.eye(N, dtype=complex)
        for i in range(K):
            d = D[i, l * N:(l + 1) * N].astype(float)
            Hbar[l * N:(l + 1) * N, i] = d * real.estimate[i, l]
            S = S + p[i] * (np.outer(d, d) * real.error_cov[i, l])
        blocks.append(S)
    KL = block_diag(*blocks)
    out = np.zeros(K)
    for k in range(K):
        if scheme == MRC:
            v = Hbar[:, k]
        else:
            C = Hbar @ np.diag(p) @ Hbar.conj().T + KL
            v = p[k] * np.linalg.solve(C, Hbar[:, k])
        if not v.any():
            continue
        num = p[k] * abs(v.conj() @ Hbar[:, k]) ** 2
        den = sum(p[i] * abs(v.conj() @ Hbar[:, i]) ** 2 for i in range(K) if i != k)
        den += (v.conj() @ KL @ v).real
        out[k] = real.prelog * np.log2(1 + num / den)
    return out


def state_se(real, D, scheme):
    state = detection.run_sequential_detection(real, D, scheme)
    return detection.prefix_se(state, real.tau_p, real.tau_c)


# weights -------------------------------------------------------------------------

def test_mrc_weights(rng):
    H = channel.complex_normal(rng, (3, 2))
    A, B = detection.mrc_weights(H)
    np.testing.assert_array_equal(A, np.eye(2))
    np.testing.assert_array_equal(B, H.conj().T)
    _, B0 = detection.mrc_weights(np.zeros((3, 2), complex))
    assert not B0.any()


def test_oslp_zero_update(rng):
    P = np.diag([1.0, 2.0]).astype(complex)
    A, T, P1 = detection.oslp_weights(np.zeros((3, 2), complex), 0.1 * np.eye(3), P)
    assert not T.any()
    np.testing.assert_array_equal(A, np.eye(2))
    np.testing.assert_array_equal(P1, P)


def test_oslp_scalar_case():
    h, p, s2 = 0.7 - 0.2j, 2.0, 0.3
    _, T, _ = detection.oslp_weights(np.array([[h]]), np.array([[s2]]), np.array([[p]], complex))
    assert T[0, 0] == pytest.approx(p * np.conj(h) / (s2 + p * abs(h) ** 2))


def test_oslp_error_covariance_shrinks():
    real = random_realization(np.random.default_rng(4), 3, 4, 2)
    state = detection.run_sequential_detection(real, np.ones((3, 8), bool), OSLP)
    for prev, cur in zip(state.P, state.P[1:]):
        np.testing.assert_allclose(cur, cur.conj().T, atol=1e-12)
        assert np.linalg.eigvalsh(prev - cur).min() > -1e-10
        assert np.linalg.eigvalsh(cur).min() > -1e-10


# recursion -----------------------------------------------------------------------

def test_single_ap_augmented_is_b(small):
    real = small
    one = ChannelRealization(real.R[:, :1], real.true[:, :1], real.estimate[:, :1], real.error_cov[:, :1],
                             real.pilots, real.powers, real.noise_power, real.tau_p, real.tau_c)
    for scheme in (MRC, OSLP):
        st_ = detection.run_sequential_detection(one, np.ones((3, 2), bool), scheme)
        np.testing.assert_array_equal(st_.B_aug[0], st_.B[0])


def test_mrc_augmented_is_stacked_hermitian(rng):
    real = random_realization(rng, 3, 2, 2)
    D = rng.random((3, 4)) < 0.6
    st_ = detection.run_sequential_detection(real, D, MRC)
    Hbar = np.vstack(st_.H)
    np.testing.assert_allclose(st_.B_aug[1], Hbar.conj().T)


@pytest.mark.parametrize("scheme", [MRC, OSLP])
def test_augmented_matrix_equals_recursion(rng, scheme):
    real = random_realization(rng, 3, 4, 2)
    D = rng.random((3, 8)) < 0.6
    st_ = detection.run_sequential_detection(real, D, scheme)
    ys = [channel.complex_normal(rng, 2) for _ in range(4)]
    rec = st_.estimate_signal(ys)
    for l in range(1, 5):
        direct = st_.B_aug[l - 1] @ np.concatenate(ys[:l])
        np.testing.assert_allclose(direct, rec[l - 1], rtol=1e-10, atol=1e-12)


# SINR / SE -------------------------------------------------------------------------

def test_spectral_efficiency_values():
    assert detection.spectral_efficiency(0.0, 8, 300) == 0.0
    assert detection.spectral_efficiency(1.0, 8, 300) == pytest.approx(0.973333333)
    assert detection.spectral_efficiency(3.0, 4, 300) == pytest.approx(1.973333333)
    with pytest.raises(ValueError):
        detection.spectral_efficiency(1.0, 300, 300)


def test_zero_row_gives_zero_sinr(rng):
    real = random_realization(rng, 3, 2, 2)
    D = np.ones((3, 4), bool)
    D[1] = False
    st_ = detection.run_sequential_detection(real, D, MRC)
    assert detection.sinr(st_, 1, 2) == 0.0


def test_matched_filter_scalar():
    h = np.array([[[0.8 + 0.6j]]])
    R = np.ones((1, 1, 1, 1), complex)
    real = ChannelRealization(R, h, h, np.zeros_like(R), np.array([0]), np.array([2.0]), 0.5, 1, 300)
    st_ = detection.run_sequential_detection(real, np.ones((1, 1), bool), MRC)
    assert detection.sinr(st_, 0, 1) == pytest.approx(2.0 * 1.0 / 0.5)


@pytest.mark.parametrize("scheme", [MRC, OSLP])
def test_sinr_matches_dense_oracle(scheme):
    rng = np.random.default_rng(21)
    for _ in range(10):
        real = random_realization(rng, 2, 2, 2, tau_p=1)
        D = rng.random((2, 4)) < 0.5
        got = state_se(real, D, scheme)[-1]
        np.testing.assert_allclose(got, dense_se(real, D, scheme), rtol=1e-10, atol=1e-14)


def test_oslp_equals_lmmse_oracle(rng):
    for _ in range(10):
        K, L, N = rng.integers(1, 5), rng.integers(1, 5), rng.integers(1, 3)
        real = random_realization(rng, K, L, N)
        D = rng.random((K, L * N)) < 0.7
        np.testing.assert_allclose(state_se(real, D, OSLP)[-1], detection.centralized_lmmse_oracle(real, D),
                                   rtol=1e-8, atol=1e-14)


def test_oracle_dominates_mrc(rng):
    for _ in range(10):
        real = random_realization(rng, 3, 3, 2, tau_p=2)
        D = np.ones((3, 6), bool)
        assert np.all(detection.centralized_lmmse_oracle(real, D) >= state_se(real, D, MRC)[-1] - 1e-12)


def test_oracle_single_ue_whitened_filter(rng):
    real = random_realization(rng, 1, 3, 2)
    D = np.ones((1, 6), bool)
    hbar = real.estimate[0].reshape(-1)
    KL = block_diag(*[real.powers[0] * real.error_cov[0, l] + real.noise_power * np.eye(2) for l in range(3)])
    snr = real.powers[0] * (hbar.conj() @ np.linalg.solve(KL, hbar)).real
    assert detection.centralized_lmmse_oracle(real, D)[0] == pytest.approx(real.prelog * np.log2(1 + snr))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_oslp_prefix_se_monotone_per_ue(seed):
    rng = np.random.default_rng(seed)
    real = random_realization(rng, 3, 4, 2, tau_p=2)
    se = state_se(real, np.ones((3, 8), bool), OSLP)
    assert np.all(np.diff(se, axis=0) >= -1e-10)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), scheme=st.sampled_from([MRC, OSLP]))
def test_sinr_finite_nonnegative(seed, scheme):
    rng = np.random.default_rng(seed)
    real = random_realization(rng, 3, 3, 2, tau_p=2)
    D = rng.random((3, 6)) < 0.5
    s = SumSEEvaluator(real, scheme).prefix_sinr(D)
    assert np.all(np.isfinite(s)) and np.all(s >= 0)


def test_deselected_antennas_are_ignored(rng):
    real = random_realization(rng, 3, 3, 2, tau_p=2)
    D = rng.random((3, 6)) < 0.5
    mask = ~D.reshape(3, 3, 2)
    noisy = ChannelRealization(real.R, np.where(mask, 0, real.true),
                               np.where(mask, channel.complex_normal(rng, real.estimate.shape), real.estimate),
                               real.error_cov, real.pilots, real.powers, real.noise_power, real.tau_p, real.tau_c)
    for scheme in (MRC, OSLP):
        np.testing.assert_allclose(state_se(noisy, D, scheme), state_se(real, D, scheme), rtol=1e-12)


# batched evaluator -----------------------------------------------------------------

@pytest.mark.parametrize("scheme", [MRC, OSLP])
def test_evaluator_matches_state(rng, scheme):
    real = random_realization(rng, 4, 3, 2, tau_p=2)
    pop = rng.random((6, 4, 6)) < 0.5
    ev = SumSEEvaluator(real, scheme)
    got = ev.prefix_sum_se(pop)
    want = np.array([state_se(real, D, scheme).sum(axis=1) for D in pop])
    np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-12)
    assert ev.evaluations == 6


def test_substituted_sum_se_matches_full(rng):
    real = random_realization(rng, 4, 5, 2, tau_p=2)
    ev = SumSEEvaluator(real, MRC)
    frozen = rng.random((4, 10)) < 0.5
    cand = rng.random((7, 4, 2)) < 0.5
    for l in range(5):
        D = with_ap_block(frozen, l, cand, 2)
        np.testing.assert_allclose(ev.substituted_sum_se(frozen, l, cand), ev.sum_se(D), rtol=1e-12)
        prefix = ev.prefix_sum_se(D, upto=l + 1)
        np.testing.assert_allclose(ev.substituted_sum_se(frozen, l, cand, l + 1), prefix[:, -1], rtol=1e-12)
        np.testing.assert_allclose(ev.substituted_sum_se(frozen, l, cand, l + 1, cumulative=True),
                                   prefix.sum(axis=1), rtol=1e-12)
    with pytest.raises(ValueError):
        SumSEEvaluator(real, OSLP).substituted_sum_se(frozen, 0, cand)


def test_local_sum_se_is_single_ap_network(rng):
    real = random_realization(rng, 3, 4, 2, tau_p=2)
    ev = SumSEEvaluator(real, MRC)
    cand = rng.random((5, 3, 2)) < 0.5
    for l in range(4):
        one = ChannelRealization(real.R[:, l:l + 1], real.true[:, l:l + 1], real.estimate[:, l:l + 1],
                                 real.error_cov[:, l:l + 1], real.pilots, real.powers, real.noise_power,
                                 real.tau_p, real.tau_c)
        np.testing.assert_allclose(ev.local_sum_se(cand, l), SumSEEvaluator(one, MRC).sum_se(cand), rtol=1e-12)
    assert ev.local_evaluations == 20 and ev.evaluations == 0
