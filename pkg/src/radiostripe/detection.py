"""Sequential uplink detection along the stripe and its SINR / SE.

Each AP ``l`` refines the running signal estimate as
``s_l = A_l s_{l-1} + B_l y_l``. Two weight rules are provided: MRC
(``A_l = I``, ``B_l = H_l^H``) and optimal sequential linear processing
(OSLP), a Kalman-style update that ends at the centralized LMMSE combiner.

Row ``k`` of the augmented matrix ``Bbar_l`` maps the stacked received
signal of APs ``1..l`` to the estimate of UE ``k``; its conjugate is the
combining vector used in the SINR. The SINR of a whole population of
selections is computed without materialising ``Bbar_l`` by carrying
``G_l = Bbar_l Hbar_l`` and ``Q_l = Bbar_l K_l Bbar_l^H`` along the stripe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .channel import ChannelRealization
from .linalg import herm, hermitize, hpd_solve
from .selection import as_blocks, sigma_matrices

MRC = "MRC"
OSLP = "OSLP"
SCHEMES = (MRC, OSLP)


def _check_scheme(scheme: str) -> str:
    scheme = scheme.upper()
    if scheme not in SCHEMES:
        raise ValueError(f"unknown detection scheme {scheme!r}; expected one of {SCHEMES}")
    return scheme


def mrc_weights(H_l: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``H_l`` is the masked (..., N, K) estimate matrix of one AP."""
    K = H_l.shape[-1]
    A = np.broadcast_to(np.eye(K, dtype=complex), H_l.shape[:-2] + (K, K)).copy()
    return A, herm(H_l)


def oslp_weights(H_l: np.ndarray, sigma: np.ndarray, P_prev: np.ndarray):
    """One OSLP step; returns ``(A_l, B_l, P_l)``.

    ``T_l = P_{l-1} H^H (Sigma_l + H P_{l-1} H^H)^-1`` is obtained from an HPD
    solve of the innovation covariance, never an explicit inverse.
    """
    innovation = hermitize(sigma + H_l @ P_prev @ herm(H_l))
    T = herm(hpd_solve(innovation, H_l @ P_prev))
    K = H_l.shape[-1]
    A = np.eye(K) - T @ H_l
    P = hermitize(A @ P_prev)
    return A, T, P


def spectral_efficiency(sinr, tau_p: int, tau_c: int):
    if not 0 < tau_p < tau_c:
        raise ValueError(f"need 0 < tau_p < tau_c, got tau_p={tau_p}, tau_c={tau_c}")
    return (1.0 - tau_p / tau_c) * np.log2(1.0 + np.asarray(sinr))


def _sinr_from_products(G: np.ndarray, Q_diag: np.ndarray, powers: np.ndarray) -> np.ndarray:
    """SINR of every UE from ``G = Bbar Hbar`` (..., K, K) and ``diag(Bbar K Bbar^H)``."""
    gain = np.abs(G) ** 2 * powers
    signal = np.diagonal(gain, axis1=-2, axis2=-1)
    interference = gain.sum(axis=-1) - signal
    den = interference + np.maximum(Q_diag, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(den > 0, signal / den, 0.0)
    return out


def masked_estimates(realization: ChannelRealization, D: np.ndarray) -> np.ndarray:
    """``(..., K, L, N)`` estimates with deselected antennas zeroed."""
    blocks = as_blocks(np.asarray(D, bool), realization.n_antennas)
    return np.where(blocks, realization.estimate, 0)


@dataclass
class DetectionState:
    """Every intermediate quantity of one pass along the stripe.

    Lists are indexed by 0-based AP position; ``P[0]`` is the prior
    ``diag(p)`` so ``P[l]`` follows AP ``l``'s update (OSLP only).
    """

    scheme: str
    powers: np.ndarray
    H: list[np.ndarray]  # masked (N, K) estimate matrix per AP
    sigma: list[np.ndarray]
    A: list[np.ndarray]
    B: list[np.ndarray]
    B_aug: list[np.ndarray]
    P: list[np.ndarray] | None

    @property
    def n_aps(self) -> int:
        return len(self.H)

    def noise_cov(self, l: int) -> np.ndarray:
        """``K_l = blockdiag(Sigma_1..Sigma_l)`` for a prefix of ``l`` APs."""
        return block_diag(*self.sigma[:l])

    def stacked_estimates(self, l: int) -> np.ndarray:
        return np.vstack(self.H[:l])

    def estimate_signal(self, received: list[np.ndarray]) -> list[np.ndarray]:
        """Run ``s_l = A_l s_{l-1} + B_l y_l`` on concrete received vectors."""
        s = np.zeros(self.A[0].shape[0], dtype=complex)
        out = []
        for A, B, y in zip(self.A, self.B, received):
            s = A @ s + B @ y
            out.append(s)
        return out


def run_sequential_detection(realization: ChannelRealization, D: np.ndarray, scheme: str) -> DetectionState:
    scheme = _check_scheme(scheme)
    N = realization.n_antennas
    blocks = as_blocks(np.asarray(D, bool), N)
    Hm = np.where(blocks, realization.estimate, 0)
    sig = sigma_matrices(blocks, realization.error_cov, realization.powers, realization.noise_power)
    P_prev = np.diag(realization.powers).astype(complex)
    state = DetectionState(scheme, realization.powers, [], [], [], [], [], [P_prev] if scheme == OSLP else None)
    for l in range(realization.n_aps):
        H_l = Hm[:, l, :].T
        if scheme == MRC:
            A, B = mrc_weights(H_l)
        else:
            A, B, P_prev = oslp_weights(H_l, sig[l], P_prev)
            state.P.append(P_prev)
        aug = B if l == 0 else np.hstack([A @ state.B_aug[-1], B])
        state.H.append(H_l)
        state.sigma.append(sig[l])
        state.A.append(A)
        state.B.append(B)
        state.B_aug.append(aug)
    return state


def sinr(state: DetectionState, k: int, l: int) -> float:
    """SINR of UE ``k`` (0-based) after a prefix of ``l`` APs (1-based length)."""
    b = state.B_aug[l - 1][k]
    if not np.any(b):
        return 0.0
    g = b @ state.stacked_estimates(l)
    p = state.powers
    signal = p[k] * abs(g[k]) ** 2
    interference = np.sum(np.delete(p * np.abs(g) ** 2, k))
    noise = float(np.real(b @ state.noise_cov(l) @ b.conj()))
    den = interference + noise
    return float(signal / den) if den > 0 else 0.0


def prefix_se(state: DetectionState, tau_p: int, tau_c: int) -> np.ndarray:
    """(L, K) SE of every UE after each prefix of the stripe."""
    K = len(state.powers)
    s = np.array([[sinr(state, k, l) for k in range(K)] for l in range(1, state.n_aps + 1)])
    return spectral_efficiency(s, tau_p, tau_c)


def centralized_lmmse_oracle(realization: ChannelRealization, D: np.ndarray) -> np.ndarray:
    """Per-UE SE of centralized LMMSE combining over all stacked, masked antennas.

    Built directly from dense stacked matrices, independently of the
    sequential recursion.
    """
    K, L, N = realization.estimate.shape
    D = np.asarray(D, bool)
    p = realization.powers
    Hbar = np.zeros((L * N, K), dtype=complex)
    sigmas = []
    for l in range(L):
        sig = realization.noise_power * np.eye(N, dtype=complex)
        for i in range(K):
            d = D[i, l * N:(l + 1) * N]
            Hbar[l * N:(l + 1) * N, i] = d * realization.estimate[i, l]
            sig += p[i] * np.outer(d, d) * realization.error_cov[i, l]
        sigmas.append(sig)
    KL = block_diag(*sigmas)
    C = (Hbar * p) @ Hbar.conj().T + KL
    V = np.linalg.solve(C, Hbar * p)  # columns are the combiners v_k
    se = np.zeros(K)
    for k in range(K):
        v = V[:, k]
        if not np.any(Hbar[:, k]):
            continue
        g = v.conj() @ Hbar
        signal = p[k] * abs(g[k]) ** 2
        interference = np.sum(np.delete(p * np.abs(g) ** 2, k))
        noise = np.real(v.conj() @ KL @ v)
        se[k] = np.log2(1.0 + signal / (interference + noise))
    return realization.prelog * se


class SumSEEvaluator:
    """Vectorised SINR / SE of many selections on one channel realization.

    ``evaluations`` counts individual selections scored; ``macs`` is a rough
    multiply-accumulate tally of the arithmetic actually executed.
    """

    def __init__(self, realization: ChannelRealization, scheme: str = MRC):
        self.realization = realization
        self.scheme = _check_scheme(scheme)
        self.powers = realization.powers
        self.evaluations = 0
        self.local_evaluations = 0
        self.macs = 0

    # full-stripe evaluation --------------------------------------------------
    def prefix_sinr(self, D: np.ndarray, upto: int | None = None) -> np.ndarray:
        """SINR after each prefix of APs; returns ``(..., upto, K)``."""
        r = self.realization
        K, L, N = r.estimate.shape
        upto = L if upto is None else upto
        blocks = as_blocks(np.asarray(D, bool), N)[..., :upto, :]
        Hm = np.where(blocks, r.estimate[:, :upto], 0)
        sig = sigma_matrices(blocks, r.error_cov[:, :upto], self.powers, r.noise_power)
        batch = Hm.shape[:-3]
        n = int(np.prod(batch)) if batch else 1
        self.evaluations += n
        if self.scheme == MRC:
            G = np.cumsum(np.einsum("...kln,...iln->...lki", Hm.conj(), Hm), axis=-3)
            Q = np.cumsum(np.einsum("...kla,...lab,...klb->...lk", Hm.conj(), sig, Hm).real, axis=-2)
            self.macs += n * upto * (K * K * N + K * N * N + 2 * K * N * N)
            return _sinr_from_products(G, Q, self.powers)
        return self._oslp_prefix_sinr(Hm, sig, batch, n)

    def _oslp_prefix_sinr(self, Hm, sig, batch, n):
        K, L, N = Hm.shape[-3:]
        P = np.broadcast_to(np.diag(self.powers).astype(complex), batch + (K, K))
        G = np.zeros(batch + (K, K), dtype=complex)
        Q = np.zeros(batch + (K, K), dtype=complex)
        out = np.empty(batch + (L, K))
        for l in range(L):
            H_l = np.swapaxes(Hm[..., :, l, :], -1, -2)
            A, T, P = oslp_weights(H_l, sig[..., l, :, :], P)
            G = A @ G + T @ H_l
            Q = A @ Q @ herm(A) + T @ sig[..., l, :, :] @ herm(T)
            out[..., l, :] = _sinr_from_products(G, np.diagonal(Q, axis1=-2, axis2=-1).real, self.powers)
        self.macs += n * L * (6 * K**3 + 6 * K * K * N + 4 * K * N * N + N**3)
        return out

    def prefix_sum_se(self, D: np.ndarray, upto: int | None = None) -> np.ndarray:
        """(..., upto) sum SE after each prefix."""
        r = self.realization
        return r.prelog * np.log2(1.0 + self.prefix_sinr(D, upto)).sum(axis=-1)

    def ue_se(self, D: np.ndarray) -> np.ndarray:
        r = self.realization
        return r.prelog * np.log2(1.0 + self.prefix_sinr(D)[..., -1, :])

    def sum_se(self, D: np.ndarray) -> np.ndarray:
        return self.ue_se(D).sum(axis=-1)

    # single-AP evaluation ----------------------------------------------------
    def _mrc_ap_terms(self, block: np.ndarray, l: int):
        """MRC contributions of AP ``l`` alone: ``G`` (..., K, K) and ``diag Q`` (..., K)."""
        r = self.realization
        K, N = block.shape[-2:]
        b = np.asarray(block, bool)
        Hm = np.where(b, r.estimate[:, l], 0)
        bf = b.astype(float)
        sig = np.einsum("...ka,...kb,kab->...ab", bf, bf, self.powers[:, None, None] * r.error_cov[:, l])
        sig = sig + r.noise_power * np.eye(N)
        G = np.einsum("...kn,...in->...ki", Hm.conj(), Hm)
        Q = np.einsum("...ka,...ab,...kb->...k", Hm.conj(), sig, Hm).real
        batch = b.shape[:-2]
        self.macs += (int(np.prod(batch)) if batch else 1) * (K * K * N + 3 * K * N * N)
        return G, Q

    def local_sum_se(self, block: np.ndarray, l: int) -> np.ndarray:
        """Sum SE with AP ``l`` (0-based) detecting alone under MRC.

        ``block`` is ``(..., K, N)``; only AP ``l``'s own estimates and error
        statistics are read.
        """
        G, Q = self._mrc_ap_terms(block, l)
        batch = np.shape(block)[:-2]
        self.local_evaluations += int(np.prod(batch)) if batch else 1
        sinr_ = _sinr_from_products(G, Q, self.powers)
        return self.realization.prelog * np.log2(1.0 + sinr_).sum(axis=-1)

    def substituted_sum_se(self, frozen: np.ndarray, l: int, block: np.ndarray, upto: int | None = None,
                           cumulative: bool = False) -> np.ndarray:
        """MRC sum SE of ``frozen`` with AP ``l``'s block replaced by each candidate.

        Only APs ``0..upto-1`` are counted (``l < upto``). MRC contributions add
        over APs, so the frozen APs are summed once and the candidates only
        need their own AP's terms. With ``cumulative`` the prefix sum SEs of
        every prefix up to ``upto`` are added.
        """
        if self.scheme != MRC:
            raise ValueError("block substitution relies on MRC additivity")
        r = self.realization
        K, L, N = r.estimate.shape
        upto = L if upto is None else upto
        fb = as_blocks(np.asarray(frozen, bool), N)
        G_ap, Q_ap = self._frozen_terms(fb, upto)
        keep = np.arange(upto) != l
        G_c, Q_c = self._mrc_ap_terms(block, l)
        batch = np.shape(block)[:-2]
        self.evaluations += int(np.prod(batch)) if batch else 1
        G = G_ap[keep].sum(axis=0) + G_c
        Q = Q_ap[keep].sum(axis=0) + Q_c
        value = r.prelog * np.log2(1.0 + _sinr_from_products(G, Q, self.powers)).sum(axis=-1)
        if cumulative and upto > 1:
            Gp = np.cumsum(G_ap[:upto - 1], axis=0)
            Qp = np.cumsum(Q_ap[:upto - 1], axis=0)
            value = value + r.prelog * np.log2(1.0 + _sinr_from_products(Gp, Qp, self.powers)).sum()
        return value

    def _frozen_terms(self, fb: np.ndarray, upto: int):
        G = np.empty((upto,) + (fb.shape[0],) * 2, dtype=complex)
        Q = np.empty((upto, fb.shape[0]))
        for j in range(upto):
            G[j], Q[j] = self._mrc_ap_terms(fb[:, j], j)
        return G, Q
