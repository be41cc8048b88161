"""Gauge network configurations: vertex operators D_v and link unitaries L_e.

A configuration is a candidate representation of the lattice's path category
in finite spectral triples ``(M_N(C), C^N, D_v)``.  The edge morphisms are
stored only through their unitaries ``L_e``; the algebra map is conjugation
by ``L_e`` and is never materialised.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .lattice import DirectedPath, Edge, TorusLattice


@dataclass(eq=False)
class GaugeNetworkConfig:
    lattice: TorusLattice
    N: int
    D: np.ndarray  # (V, N, N) Hermitian, vertex order
    L: np.ndarray  # (E, N, N) unitary, edge order
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        V, E, N = self.lattice.num_vertices, self.lattice.num_edges, self.N
        self.D = np.asarray(self.D, dtype=complex)
        self.L = np.asarray(self.L, dtype=complex)
        if self.D.shape != (V, N, N):
            raise ValueError(f"D must have shape {(V, N, N)}, got {self.D.shape}")
        if self.L.shape != (E, N, N):
            raise ValueError(f"L must have shape {(E, N, N)}, got {self.L.shape}")
        linalg.check_hermitian(self.D)
        linalg.check_unitary(self.L)

    def D_at(self, vertex) -> np.ndarray:
        return self.D[self.lattice.vertex_index(vertex)]

    def L_at(self, edge: Edge) -> np.ndarray:
        return self.L[self.lattice.edge_index(edge)]

    @property
    def D_source(self) -> np.ndarray:
        return self.D[self.lattice.edge_sources]

    @property
    def D_target(self) -> np.ndarray:
        return self.D[self.lattice.edge_targets]

    def replace(self, D=None, L=None) -> "GaugeNetworkConfig":
        return GaugeNetworkConfig(
            self.lattice, self.N,
            self.D if D is None else D,
            self.L if L is None else L,
            dict(self.provenance),
        )

    # -- serialisation ------------------------------------------------------

    def to_dict(self) -> dict:
        out = {}
        if self.provenance:
            out["provenance"] = self.provenance
        out.update({
            "lattice": self.lattice.to_dict(),
            "N": self.N,
            "D": linalg.complex_to_json(self.D),
            "L": linalg.complex_to_json(self.L),
        })
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "GaugeNetworkConfig":
        lattice = TorusLattice.from_dict(data["lattice"])
        N = int(data["N"])
        D = linalg.complex_from_json(data["D"]).reshape(lattice.num_vertices, N, N)
        L = linalg.complex_from_json(data["L"]).reshape(lattice.num_edges, N, N)
        return cls(lattice, N, D, L, dict(data.get("provenance", {})))

    @classmethod
    def from_json(cls, text: str) -> "GaugeNetworkConfig":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ConstrainedSpec:
    """Spectrum of the reference vertex operator as ``(eigenvalue, multiplicity)`` levels."""

    levels: tuple[tuple[float, int], ...]
    N: int | None = None

    def __post_init__(self):
        levels = tuple((float(v), int(m)) for v, m in self.levels)
        if not levels or any(m < 1 for _, m in levels):
            raise ValueError("every level needs a positive multiplicity")
        total = sum(m for _, m in levels)
        if self.N is not None and total != self.N:
            raise ValueError(f"multiplicities sum to {total}, expected N={self.N}")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "N", total)

    @classmethod
    def from_eigenvalues(cls, eigenvalues: Sequence[float]) -> "ConstrainedSpec":
        values, counts = [], []
        for x in eigenvalues:
            x = float(x)
            if values and x == values[-1]:
                counts[-1] += 1
            elif x in values:
                counts[values.index(x)] += 1
            else:
                values.append(x)
                counts.append(1)
        return cls(tuple(zip(values, counts)))

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.concatenate([np.full(m, v) for v, m in self.levels])

    @property
    def blocks(self) -> list[slice]:
        out, start = [], 0
        for _, m in self.levels:
            out.append(slice(start, start + m))
            start += m
        return out


def random_unconstrained(lattice: TorusLattice, N: int, scale: float, rng) -> GaugeNetworkConfig:
    """Independent Gaussian D_v and Haar L_e; the edge constraint generically fails."""
    rng = linalg.make_rng(rng)
    D = linalg.gue_hermitian(N, scale, rng, size=lattice.num_vertices)
    L = linalg.haar_unitary(N, rng, size=lattice.num_edges)
    return GaugeNetworkConfig(lattice, N, D, L, {"generator": "unconstrained", "scale": scale})


def random_constrained(lattice: TorusLattice, spec: ConstrainedSpec, rng) -> GaugeNetworkConfig:
    """Random configuration satisfying ``D_t(e) = L_e D_s(e) L_e^*`` on every edge.

    With ``D0 = diag(spectrum)``: ``D_v = U_v D0 U_v^*`` for Haar ``U_v`` and
    ``L_e = U_t W_e U_s^*`` with ``W_e`` Haar inside each eigenspace of D0.
    """
    rng = linalg.make_rng(rng)
    N = spec.N
    D0 = np.diag(spec.eigenvalues).astype(complex)
    U = linalg.haar_unitary(N, rng, size=lattice.num_vertices)
    W = np.zeros((lattice.num_edges, N, N), dtype=complex)
    for block in spec.blocks:
        m = block.stop - block.start
        W[:, block, block] = linalg.haar_unitary(m, rng, size=lattice.num_edges)
    D = linalg.hermitian(U @ D0 @ linalg.dagger(U))
    Us, Ut = U[lattice.edge_sources], U[lattice.edge_targets]
    L = Ut @ W @ linalg.dagger(Us)
    prov = {"generator": "constrained", "spectrum": [list(level) for level in spec.levels]}
    return GaugeNetworkConfig(lattice, N, D, L, prov)


def from_continuum(lattice: TorusLattice, fields) -> GaugeNetworkConfig:
    """Sample smooth fields: ``L_e = exp(i l A_mu(x_v))`` and ``D_v = Phi(x_v)``.

    ``fields`` must provide ``T``, ``N``, ``A(points)`` returning shape
    (d, P, N, N) and ``Phi(points)`` returning (P, N, N).
    """
    ratio = lattice.physical_size / fields.T
    if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
        raise ValueError(
            f"field period {fields.T} does not tile the lattice of size {lattice.physical_size}"
        )
    x = lattice.l * lattice.coords.astype(float)
    A = fields.A(x)  # (d, V, N, N)
    A_edges = np.swapaxes(A, 0, 1).reshape(lattice.num_edges, fields.N, fields.N)
    L = linalg.exp_i_hermitian(A_edges, lattice.l)
    D = linalg.hermitian(fields.Phi(x))
    return GaugeNetworkConfig(lattice, fields.N, D, L, {"generator": "continuum"})


def check_representation(config: GaugeNetworkConfig) -> float:
    """Max over edges of ``|D_t - L D_s L^*|_max``."""
    L = config.L
    diff = config.D_target - L @ config.D_source @ linalg.dagger(L)
    return float(np.max(np.abs(diff), initial=0.0))


def path_holonomy(config: GaugeNetworkConfig, path: DirectedPath) -> np.ndarray:
    """Ordered product along ``path``; later steps multiply from the left."""
    config.lattice.check_path(path)
    hol = np.eye(config.N, dtype=complex)
    for edge, forward in path.steps:
        Le = config.L_at(edge)
        hol = (Le if forward else Le.conj().T) @ hol
    return hol


def gauge_transform(config: GaugeNetworkConfig, U) -> GaugeNetworkConfig:
    """Apply vertex unitaries: ``D_v -> U_v D_v U_v^*``, ``L_e -> U_t L_e U_s^*``."""
    lat = config.lattice
    U = linalg.check_unitary(np.asarray(U, dtype=complex))
    if U.shape != (lat.num_vertices, config.N, config.N):
        raise ValueError(f"expected one {config.N}x{config.N} unitary per vertex")
    D = linalg.hermitian(U @ config.D @ linalg.dagger(U))
    L = U[lat.edge_targets] @ config.L @ linalg.dagger(U[lat.edge_sources])
    return config.replace(D=D, L=L)


def random_gauge(lattice: TorusLattice, N: int, rng) -> np.ndarray:
    return linalg.haar_unitary(N, linalg.make_rng(rng), size=lattice.num_vertices)
