"""Batched Hermitian helpers shared by the channel and detection code."""

from __future__ import annotations

import numpy as np

SOLVE_RTOL = 1e-8


class MatrixSolveError(np.linalg.LinAlgError):
    """A Hermitian positive-definite solve failed or was inaccurate."""


class MatrixDecompositionError(np.linalg.LinAlgError):
    """A covariance could not be factored as positive semi-definite."""


def herm(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2).conj()


def hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + herm(a))


def hpd_solve(a: np.ndarray, b: np.ndarray, rtol: float = SOLVE_RTOL) -> np.ndarray:
    """Solve ``a @ x = b`` for stacks of Hermitian positive-definite ``a``.

    The Cholesky factorisation doubles as the positive-definiteness check;
    the normwise backward error of the result must stay below ``rtol``.
    """
    try:
        np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise MatrixSolveError(f"matrix is not positive definite: {exc}") from exc
    x = np.linalg.solve(a, b)
    resid = np.linalg.norm(a @ x - b, axis=(-2, -1))
    scale = np.linalg.norm(a, axis=(-2, -1)) * np.linalg.norm(x, axis=(-2, -1)) + np.linalg.norm(
        b, axis=(-2, -1)
    )
    bad = resid > rtol * np.where(scale > 0, scale, 1.0)
    if np.any(bad):
        raise MatrixSolveError(f"solve residual above {rtol:g} in {int(bad.sum())} system(s)")
    return x


def psd_sqrt(cov: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Hermitian square root of (stacks of) PSD matrices via ``eigh``.

    Eigenvalues down to ``-tol * max_eig`` are treated as round-off and
    clipped; anything more negative raises.
    """
    cov = hermitize(np.asarray(cov))
    w, v = np.linalg.eigh(cov)
    top = np.max(np.abs(w), axis=-1, keepdims=True)
    if np.any(w < -tol * np.where(top > 0, top, 1.0)):
        raise MatrixDecompositionError("covariance is not positive semi-definite")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)[..., None, :]) @ herm(v)
