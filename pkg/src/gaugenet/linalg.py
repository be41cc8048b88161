"""Small dense complex matrices: traces, exponentials and random ensembles.

All functions accept stacks of matrices (leading batch axes) where that is
natural, so a whole lattice worth of link variables is handled in one call.
"""
from __future__ import annotations

import numpy as np

HERMITIAN_RTOL = 1e-12
UNITARY_ATOL = 1e-10


def make_rng(seed=None) -> np.random.Generator:
    """Counter-based (Philox) generator; ``seed`` may be an int or SeedSequence."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def split_rng(rng: np.random.Generator, count: int) -> list[np.random.Generator]:
    """Deterministically derive ``count`` independent child generators."""
    return [np.random.Generator(bg) for bg in rng.bit_generator.spawn(count)]


def _check_finite(M):
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def dagger(M: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(M, -1, -2))


def trace(M: np.ndarray):
    """Unnormalised trace over the last two axes (``trace(eye(N)) == N``)."""
    M = np.asarray(M)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise ValueError(f"trace needs square matrices, got shape {M.shape}")
    return np.trace(M, axis1=-2, axis2=-1)


def hermitian(M) -> np.ndarray:
    """Symmetrise to an exactly Hermitian matrix (or stack)."""
    M = _check_finite(np.asarray(M, dtype=complex))
    if M.shape[-1] != M.shape[-2]:
        raise ValueError(f"Hermitian matrices must be square, got shape {M.shape}")
    return 0.5 * (M + dagger(M))


def hermiticity_residual(M) -> float:
    M = np.asarray(M)
    scale = np.max(np.abs(M), initial=0.0)
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(M - dagger(M))) / scale)


def unitarity_residual(U) -> float:
    U = np.asarray(U)
    eye = np.eye(U.shape[-1])
    return float(np.max(np.abs(dagger(U) @ U - eye), initial=0.0))


def check_hermitian(M, rtol=HERMITIAN_RTOL):
    _check_finite(M)
    res = hermiticity_residual(M)
    if res > rtol:
        raise ValueError(f"matrix is not Hermitian (relative residual {res:.3e})")
    return M


def check_unitary(U, atol=UNITARY_ATOL):
    _check_finite(U)
    res = unitarity_residual(U)
    if res > atol:
        raise ValueError(f"matrix is not unitary (residual {res:.3e})")
    return U


def exp_i_hermitian(H, scale=1.0) -> np.ndarray:
    """Return ``exp(i * scale * H)`` for Hermitian ``H`` via eigendecomposition.

    Works on stacks of matrices; ``scale`` may broadcast against the batch axes.
    """
    H = check_hermitian(np.asarray(H, dtype=complex))
    try:
        w, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"eigendecomposition failed: {exc}") from exc
    phases = np.exp(1j * np.asarray(scale)[..., None] * w)
    U = (V * phases[..., None, :]) @ dagger(V)
    return _check_finite(U)


def haar_unitary(N: int, rng: np.random.Generator, size=()) -> np.ndarray:
    """Haar-distributed unitaries from the QR decomposition of Ginibre matrices.

    The phases of R's diagonal are absorbed into Q, which makes the
    distribution exactly Haar rather than merely QR-biased.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    shape = tuple(np.atleast_1d(size)) if size != () else ()
    Z = (rng.standard_normal(shape + (N, N)) + 1j * rng.standard_normal(shape + (N, N))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    diag = np.diagonal(R, axis1=-2, axis2=-1)
    return Q * (diag / np.abs(diag))[..., None, :]


def gue_hermitian(N: int, scale: float, rng: np.random.Generator, size=()) -> np.ndarray:
    """Gaussian Hermitian matrices whose entries all have variance ``scale**2``.

    Off-diagonal entries are complex with ``E|h_ij|^2 = scale^2``; diagonal
    entries are real ``N(0, scale^2)``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    shape = tuple(np.atleast_1d(size)) if size != () else ()
    G = scale * (rng.standard_normal(shape + (N, N)) + 1j * rng.standard_normal(shape + (N, N))) / np.sqrt(2)
    return (G + dagger(G)) / np.sqrt(2)


def matrix_power_trace(M, m: int):
    """``tr(M^m)`` for a matrix or stack of matrices."""
    if m < 1:
        raise ValueError("power must be >= 1")
    return trace(np.linalg.matrix_power(M, m))


def complex_to_json(M) -> list:
    """Nested lists with every complex entry written as ``[re, im]``."""
    M = np.asarray(M, dtype=complex)
    return np.stack([M.real, M.imag], axis=-1).tolist()


def complex_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return _check_finite(arr[..., 0] + 1j * arr[..., 1])
