"""Euclidean gamma matrices and chirality in two and four dimensions."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
_ID2 = np.eye(2, dtype=complex)


@dataclass(frozen=True, eq=False)
class CliffordBasis:
    """Hermitian generators ``gammas[mu]`` and the grading ``chirality``."""

    d: int
    gammas: np.ndarray  # (d, dim_s, dim_s)
    chirality: np.ndarray  # (dim_s, dim_s)

    @property
    def dim_s(self) -> int:
        return self.chirality.shape[0]

    def max_violation(self) -> float:
        """Largest deviation from the Clifford and grading relations."""
        eye = np.eye(self.dim_s)
        g, chi = self.gammas, self.chirality
        worst = 0.0
        for mu in range(self.d):
            for nu in range(self.d):
                anti = g[mu] @ g[nu] + g[nu] @ g[mu]
                worst = max(worst, np.max(np.abs(anti - 2 * (mu == nu) * eye)))
            worst = max(worst, np.max(np.abs(chi @ g[mu] + g[mu] @ chi)))
            worst = max(worst, np.max(np.abs(g[mu] - g[mu].conj().T)))
        worst = max(worst, np.max(np.abs(chi @ chi - eye)))
        worst = max(worst, np.max(np.abs(chi - chi.conj().T)))
        return float(worst)


@lru_cache(maxsize=None)
def build_gammas(d: int) -> CliffordBasis:
    """Gamma matrices for ``d`` in {2, 4}.

    In d=2 these are sigma_1, sigma_2 with chirality sigma_3 = -i sigma_1 sigma_2.
    The d=4 basis doubles it: ``sigma_1 (x) gamma_k`` for the two d=2 gammas and
    their chirality, plus ``sigma_2 (x) 1``; the chirality is ``sigma_3 (x) 1``.
    """
    if d == 2:
        gammas = np.stack([SIGMA_1, SIGMA_2])
        chirality = SIGMA_3.copy()
    elif d == 4:
        low = build_gammas(2)
        gammas = np.stack(
            [np.kron(SIGMA_1, g) for g in low.gammas]
            + [np.kron(SIGMA_1, low.chirality), np.kron(SIGMA_2, _ID2)]
        )
        chirality = np.kron(SIGMA_3, _ID2)
    else:
        raise ValueError(f"unsupported dimension d={d}; expected 2 or 4")
    gammas.setflags(write=False)
    chirality.setflags(write=False)
    return CliffordBasis(d, gammas, chirality)
