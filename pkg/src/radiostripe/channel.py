"""Correlated Rayleigh channels and MMSE channel estimation with pilot reuse.

Conventions used throughout the package: powers are linear in mW, channel
gains are linear, and per-(UE, AP) arrays are indexed ``[k, l, ...]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import InvalidParameterError
from .linalg import herm, hermitize, hpd_solve, psd_sqrt

BOLTZMANN = 1.38e-23  # J/K


def large_scale_fading_db(d_m, f_c_ghz: float, shadow_db=0.0, shadow_threshold_m: float = 13.0):
    """Indoor path loss in dB, with the shadow term active beyond ``shadow_threshold_m``."""
    d = np.asarray(d_m, dtype=float)
    if np.any(d <= 0):
        raise InvalidParameterError("distance must be positive")
    path = -36.7 * np.log10(d) - 22.7 - 26.0 * np.log10(f_c_ghz)
    out = path + np.where(d > shadow_threshold_m, shadow_db, 0.0)
    return out if out.ndim else float(out)


def _decay_matrix(points: np.ndarray, decorrelation_m: float) -> np.ndarray:
    d = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
    return 2.0 ** (-d / decorrelation_m)


def shadowing_components(
    ue_positions: np.ndarray,
    ap_positions: np.ndarray,
    variance_db2: float,
    decorrelation_m: float,
    rng: np.random.Generator,
    size: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Independent UE-side and AP-side Gaussian fields (dB) that build ``F``."""
    if variance_db2 <= 0 or decorrelation_m <= 0:
        raise InvalidParameterError("shadowing variance and decorrelation distance must be positive")
    shape = () if size is None else (size,)
    K, L = len(ue_positions), len(ap_positions)
    a = np.zeros(shape + (K,))
    if K:
        s_ue = psd_sqrt(variance_db2 * _decay_matrix(ue_positions, decorrelation_m)).real
        a = rng.standard_normal(shape + (K,)) @ s_ue.T
    s_ap = psd_sqrt(variance_db2 * _decay_matrix(ap_positions, decorrelation_m)).real
    b = rng.standard_normal(shape + (L,)) @ s_ap.T
    return a, b


def combine_shadowing(a: np.ndarray, b: np.ndarray, ue_share: float) -> np.ndarray:
    return np.sqrt(ue_share) * a[..., :, None] + np.sqrt(1.0 - ue_share) * b[..., None, :]


def correlated_shadowing(
    ue_positions: np.ndarray,
    ap_positions: np.ndarray,
    variance_db2: float,
    ue_share: float,
    decorrelation_m: float,
    rng: np.random.Generator,
    size: int | None = None,
) -> np.ndarray:
    """Shadow fading ``F[k, l]`` in dB with UE-UE and AP-AP spatial correlation.

    ``E[F_kl F_ij] = var * (ue_share * 2**(-|u_k - u_i| / d_c)
    + (1 - ue_share) * 2**(-|a_l - a_j| / d_c))``.
    """
    if not 0.0 <= ue_share <= 1.0:
        raise InvalidParameterError(f"ue_share must lie in [0, 1], got {ue_share}")
    a, b = shadowing_components(ue_positions, ap_positions, variance_db2, decorrelation_m, rng, size)
    return combine_shadowing(a, b, ue_share)


def conditional_ue_shadow(
    old_positions: np.ndarray,
    old_values: np.ndarray,
    new_position: np.ndarray,
    variance_db2: float,
    decorrelation_m: float,
    rng: np.random.Generator,
) -> float:
    """Draw the UE-side shadow field at a new point given its values at existing UEs."""
    if len(old_positions) == 0:
        return float(np.sqrt(variance_db2) * rng.standard_normal())
    pts = np.vstack([old_positions, new_position])
    cov = variance_db2 * _decay_matrix(pts, decorrelation_m)
    c_oo, c_no = cov[:-1, :-1], cov[-1, :-1]
    gain = np.linalg.lstsq(c_oo, c_no, rcond=None)[0]
    mean = gain @ old_values
    var = max(cov[-1, -1] - c_no @ gain, 0.0)
    return float(mean + np.sqrt(var) * rng.standard_normal())


def local_scattering_correlation(
    beta: float, angle_rad: float, angular_std_rad: float, n_antennas: int, spacing_wl: float = 0.5
) -> np.ndarray:
    """Gaussian local-scattering spatial correlation (closed-form approximation)."""
    m = np.arange(n_antennas)
    diff = m[:, None] - m[None, :]
    phase = 2 * np.pi * spacing_wl * diff
    return beta * np.exp(1j * phase * np.sin(angle_rad)) * np.exp(
        -(angular_std_rad**2) / 2 * (phase * np.cos(angle_rad)) ** 2
    )


def correlation_matrices(beta_linear: np.ndarray, angles: np.ndarray, angular_std_rad: float, n_antennas: int,
                         spacing_wl: float = 0.5) -> np.ndarray:
    """Stack of ``R_kl`` for every (UE, AP) pair, shape (K, L, N, N)."""
    m = np.arange(n_antennas)
    phase = 2 * np.pi * spacing_wl * (m[:, None] - m[None, :])
    sin = np.sin(angles)[..., None, None]
    cos = np.cos(angles)[..., None, None]
    R = np.exp(1j * phase * sin) * np.exp(-(angular_std_rad**2) / 2 * (phase * cos) ** 2)
    return beta_linear[..., None, None] * R


def noise_power_dbm(bandwidth_hz: float, noise_figure_db: float, temperature_k: float = 290.0) -> float:
    if bandwidth_hz <= 0:
        raise InvalidParameterError(f"bandwidth must be positive, got {bandwidth_hz}")
    return 10 * np.log10(BOLTZMANN * temperature_k * 1e3) + 10 * np.log10(bandwidth_hz) + noise_figure_db


def db2pow(x):
    return 10.0 ** (np.asarray(x) / 10.0)


def assign_pilots(n_ues: int, n_pilots: int) -> np.ndarray:
    """Round-robin pilot indices (0-based): UE ``k`` gets ``k mod tau_p``."""
    if n_pilots < 1:
        raise InvalidParameterError(f"need at least one pilot, got {n_pilots}")
    return np.arange(n_ues) % n_pilots


def sample_channels(R: np.ndarray, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw ``h ~ CN(0, R)`` for each leading index of ``R`` (..., N, N)."""
    shape = R.shape[:-1] if size is None else (size,) + R.shape[:-1]
    return np.einsum("...ab,...b->...a", psd_sqrt(R), complex_normal(rng, shape))


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


@dataclass
class ChannelRealization:
    """One coherence block: true channels, MMSE estimates and error statistics.

    Arrays ``R``, ``error_cov`` are (K, L, N, N); ``true``, ``estimate`` are
    (K, L, N). ``pilots`` holds 0-based pilot indices.
    """

    R: np.ndarray
    true: np.ndarray
    estimate: np.ndarray
    error_cov: np.ndarray
    pilots: np.ndarray
    powers: np.ndarray
    noise_power: float
    tau_p: int
    tau_c: int

    @property
    def n_ues(self) -> int:
        return self.R.shape[0]

    @property
    def n_aps(self) -> int:
        return self.R.shape[1]

    @property
    def n_antennas(self) -> int:
        return self.R.shape[2]

    @property
    def estimate_cov(self) -> np.ndarray:
        return self.R - self.error_cov

    @property
    def prelog(self) -> float:
        return 1.0 - self.tau_p / self.tau_c


def mmse_filters(R, pilots, powers, tau_p, noise_power):
    """Per-(k, l) MMSE filter ``sqrt(p_k tau_p) R Psi^-1`` and error covariance."""
    K, L, N, _ = R.shape
    same = (pilots[:, None] == pilots[None, :]).astype(float)
    psi = np.einsum("ki,ilab->klab", same * (powers * tau_p)[None, :], R) + noise_power * np.eye(N)
    psi_inv_R = hpd_solve(psi, R)
    gain = np.sqrt(powers * tau_p)[:, None, None, None]
    filt = gain * herm(psi_inv_R)  # R Psi^-1 (both Hermitian)
    est_cov = hermitize((powers * tau_p)[:, None, None, None] * (R @ psi_inv_R))
    return filt, hermitize(R - est_cov)


def received_pilots(h, pilots, powers, tau_p, pilot_noise):
    """Despread pilot signal per (k, l): co-pilot channels plus that pilot's noise."""
    same = (pilots[:, None] == pilots[None, :]).astype(float)
    mix = same * np.sqrt(powers * tau_p)[None, :]
    return np.einsum("ki,...iln->...kln", mix, h) + pilot_noise[..., pilots, :, :]


def mmse_estimate(
    R: np.ndarray,
    h: np.ndarray,
    pilots: np.ndarray,
    powers: np.ndarray,
    tau_p: int,
    noise_power: float,
    tau_c: int,
    rng: np.random.Generator | None = None,
    pilot_noise: np.ndarray | None = None,
) -> ChannelRealization:
    """MMSE estimates of ``h`` from one pilot phase.

    ``pilot_noise`` is (tau_p, L, N) with ``CN(0, noise_power I)`` entries,
    one vector per (pilot, AP); it is drawn from ``rng`` when omitted.
    """
    if pilot_noise is None:
        if rng is None:
            raise ValueError("need rng or pilot_noise")
        pilot_noise = complex_normal(rng, (tau_p,) + R.shape[1:3], noise_power)
    filt, err = mmse_filters(R, pilots, powers, tau_p, noise_power)
    y = received_pilots(h, pilots, powers, tau_p, pilot_noise)
    est = np.einsum("klab,klb->kla", filt, y)
    return ChannelRealization(R, h, est, err, np.asarray(pilots), np.asarray(powers, float),
                              float(noise_power), int(tau_p), int(tau_c))
