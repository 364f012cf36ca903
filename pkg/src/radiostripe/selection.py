"""AP-UE antenna association matrices.

A selection is a boolean ``(K, L*N)`` array. Column block ``l`` (width N)
belongs to AP ``l``; within it, row ``k`` says which of that AP's antennas
take part in detecting UE ``k``. Functions accept a leading batch axis
where noted so that whole GA populations can be processed at once.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


def as_blocks(D: np.ndarray, n_antennas: int) -> np.ndarray:
    """View ``(..., K, L*N)`` as ``(..., K, L, N)``."""
    K, LN = D.shape[-2:]
    if LN % n_antennas:
        raise ValueError(f"width {LN} is not a multiple of N={n_antennas}")
    return D.reshape(D.shape[:-2] + (K, LN // n_antennas, n_antennas))


def from_blocks(blocks: np.ndarray) -> np.ndarray:
    K, L, N = blocks.shape[-3:]
    return blocks.reshape(blocks.shape[:-3] + (K, L * N))


def ap_block(D: np.ndarray, l: int, n_antennas: int) -> np.ndarray:
    """Sub-matrix ``D_l`` (K, N) for AP ``l`` (0-based)."""
    return D[..., l * n_antennas:(l + 1) * n_antennas]


def with_ap_block(D: np.ndarray, l: int, block: np.ndarray, n_antennas: int) -> np.ndarray:
    """Copy of ``D`` (broadcast against ``block``'s batch shape) with block ``l`` replaced."""
    block = np.asarray(block, dtype=bool)
    out = np.broadcast_to(D, block.shape[:-2] + D.shape[-2:]).copy()
    out[..., l * n_antennas:(l + 1) * n_antennas] = block
    return out


def mask_channel(d_kl: np.ndarray, h_kl: np.ndarray) -> np.ndarray:
    d_kl = np.asarray(d_kl)
    h_kl = np.asarray(h_kl)
    if d_kl.shape[-1] != h_kl.shape[-1]:
        raise ValueError(f"mask length {d_kl.shape[-1]} != channel length {h_kl.shape[-1]}")
    return np.where(d_kl.astype(bool), h_kl, 0)


def error_masks(blocks: np.ndarray) -> np.ndarray:
    """``E_kl = D_kl D_kl^T`` for ``(..., K, L, N)`` blocks -> ``(..., K, L, N, N)``."""
    b = blocks.astype(bool)
    return b[..., :, None] & b[..., None, :]


def sigma_matrices(blocks: np.ndarray, error_cov: np.ndarray, powers: np.ndarray,
                   noise_power: float) -> np.ndarray:
    """Per-AP error-plus-noise covariance ``Sigma_l``, shape ``(..., L, N, N)``.

    ``Sigma_l = sum_i p_i (E_il * Rtilde_il) + noise * I``.
    """
    b = blocks.astype(float)
    weighted = powers[:, None, None, None] * error_cov
    N = error_cov.shape[-1]
    return np.einsum("...kla,...klb,klab->...lab", b, b, weighted) + noise_power * np.eye(N)


def sigma_l(masks: np.ndarray, error_cov_l: np.ndarray, powers: np.ndarray,
            noise_power: float) -> np.ndarray:
    """Single-AP form: ``masks`` and ``error_cov_l`` are (K, N, N)."""
    N = error_cov_l.shape[-1]
    return np.einsum("k,kab->ab", powers, masks * error_cov_l) + noise_power * np.eye(N)


def warm_start_add_ue(D: np.ndarray) -> np.ndarray:
    D = np.asarray(D, dtype=bool)
    return np.vstack([D, np.zeros((1, D.shape[1]), dtype=bool)])


def warm_start_remove_ue(D: np.ndarray, ue_index: int) -> np.ndarray:
    """Drop row ``ue_index`` (0-based)."""
    D = np.asarray(D, dtype=bool)
    if not 0 <= ue_index < D.shape[0]:
        raise IndexError(f"UE index {ue_index} out of range for K={D.shape[0]}")
    return np.delete(D, ue_index, axis=0)


def to_text(D: np.ndarray) -> str:
    """K lines of '0'/'1' characters, one per UE."""
    return "".join("".join("1" if x else "0" for x in row) + "\n" for row in np.asarray(D, bool))


def from_text(text: str, width: int | None = None) -> np.ndarray:
    rows = [line.strip() for line in text.splitlines() if line.strip()]
    if not rows:
        return np.zeros((0, width or 0), dtype=bool)
    widths = {len(r) for r in rows}
    if len(widths) != 1 or (width is not None and widths != {width}):
        raise ValueError(f"ragged or wrong-width selection matrix: widths {sorted(widths)}")
    if any(set(r) - {"0", "1"} for r in rows):
        raise ValueError("selection matrix may only contain '0' and '1'")
    return np.array([[c == "1" for c in r] for r in rows], dtype=bool)


def save(D: np.ndarray, path) -> None:
    Path(path).write_text(to_text(D))


def load(path, width: int | None = None) -> np.ndarray:
    return from_text(Path(path).read_text(), width)
