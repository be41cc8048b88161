"""Periodic hypercubic lattice: vertices, directed edges, plaquettes and paths.

Vertices are indexed in lexicographic (C) order of their coordinates, edges
by ``source_index * d + direction`` and plaquettes by base vertex followed by
the direction pair ``(mu, nu)`` with ``mu < nu``.  Directions are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import NamedTuple

import numpy as np

SUPPORTED_DIMENSIONS = (2, 4)


class Edge(NamedTuple):
    source: tuple[int, ...]
    direction: int


class Plaquette(NamedTuple):
    base: tuple[int, ...]
    mu: int
    nu: int


class Step(NamedTuple):
    edge: Edge
    forward: bool = True


@dataclass(frozen=True)
class DirectedPath:
    """Ordered sequence of steps from ``start`` to ``end``.

    A reverse step traverses its edge from target to source.
    """

    start: tuple[int, ...]
    end: tuple[int, ...]
    steps: tuple[Step, ...] = ()

    def __len__(self):
        return len(self.steps)

    def __add__(self, other: "DirectedPath") -> "DirectedPath":
        if self.end != other.start:
            raise ValueError(f"cannot compose paths: {self.end} != {other.start}")
        return DirectedPath(self.start, other.end, self.steps + other.steps)


@dataclass(frozen=True)
class TorusLattice:
    """The lattice (Z/nZ)^d with physical spacing ``l``."""

    d: int
    n: int
    l: float = 1.0

    def __post_init__(self):
        if self.d not in SUPPORTED_DIMENSIONS:
            raise ValueError(f"d must be one of {SUPPORTED_DIMENSIONS}, got {self.d}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if not (np.isfinite(self.l) and self.l > 0):
            raise ValueError(f"lattice spacing must be positive, got {self.l}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def num_vertices(self) -> int:
        return self.n**self.d

    @property
    def num_edges(self) -> int:
        return self.d * self.num_vertices

    @property
    def num_plaquettes(self) -> int:
        return self.d * (self.d - 1) // 2 * self.num_vertices

    @property
    def physical_size(self) -> float:
        return self.n * self.l

    @property
    def direction_pairs(self) -> list[tuple[int, int]]:
        return list(combinations(range(self.d), 2))

    # -- index arrays (vectorised geometry) ---------------------------------

    @cached_property
    def coords(self) -> np.ndarray:
        """Integer coordinates of every vertex, shape (V, d)."""
        grid = np.indices(self.shape).reshape(self.d, -1)
        return np.ascontiguousarray(grid.T)

    @cached_property
    def forward(self) -> np.ndarray:
        """``forward[v, mu]`` is the index of ``v + e_mu``, shape (V, d)."""
        out = np.empty((self.num_vertices, self.d), dtype=np.intp)
        for mu in range(self.d):
            shifted = self.coords.copy()
            shifted[:, mu] = (shifted[:, mu] + 1) % self.n
            out[:, mu] = np.ravel_multi_index(shifted.T, self.shape)
        return out

    @cached_property
    def edge_sources(self) -> np.ndarray:
        return np.repeat(np.arange(self.num_vertices), self.d)

    @cached_property
    def edge_directions(self) -> np.ndarray:
        return np.tile(np.arange(self.d), self.num_vertices)

    @cached_property
    def edge_targets(self) -> np.ndarray:
        return self.forward.reshape(-1)

    @cached_property
    def plaquette_edge_indices(self) -> np.ndarray:
        """Edge indices (e1, e2, e3, e4) of every plaquette, shape (P, 4).

        e1: v -> v+mu, e2: v+mu -> v+mu+nu, e3: v+nu -> v+mu+nu, e4: v -> v+nu.
        """
        d = self.d
        v = np.arange(self.num_vertices)
        rows = []
        for mu, nu in self.direction_pairs:
            rows.append(np.stack([
                v * d + mu,
                self.forward[v, mu] * d + nu,
                self.forward[v, nu] * d + mu,
                v * d + nu,
            ], axis=1))
        # vertex-major ordering: stack (pairs, V, 4) -> (V, pairs, 4)
        return np.ascontiguousarray(np.stack(rows, axis=1).reshape(-1, 4))

    # -- object-level API ---------------------------------------------------

    def vertex(self, coords) -> tuple[int, ...]:
        coords = tuple(int(c) % self.n for c in coords)
        if len(coords) != self.d:
            raise ValueError(f"expected {self.d} coordinates, got {len(coords)}")
        return coords

    def vertex_index(self, coords) -> int:
        return int(np.ravel_multi_index(self.vertex(coords), self.shape))

    def edge_index(self, edge: Edge) -> int:
        if not 0 <= edge.direction < self.d:
            raise ValueError(f"direction {edge.direction} out of range for d={self.d}")
        return self.vertex_index(edge.source) * self.d + edge.direction

    def shift(self, coords, mu: int, steps: int = 1) -> tuple[int, ...]:
        out = list(self.vertex(coords))
        out[mu] = (out[mu] + steps) % self.n
        return tuple(out)

    def target(self, edge: Edge) -> tuple[int, ...]:
        return self.shift(edge.source, edge.direction)

    def vertices(self) -> list[tuple[int, ...]]:
        return list(product(range(self.n), repeat=self.d))

    def edges(self) -> list[Edge]:
        return [Edge(v, mu) for v in self.vertices() for mu in range(self.d)]

    def plaquettes(self) -> list[Plaquette]:
        return [Plaquette(v, mu, nu) for v in self.vertices() for mu, nu in self.direction_pairs]

    def enumerate(self):
        """Return ``(vertices, edges, plaquettes)`` in the canonical order."""
        return self.vertices(), self.edges(), self.plaquettes()

    def plaquette_edges(self, p: Plaquette) -> tuple[Edge, Edge, Edge, Edge]:
        if not 0 <= p.mu < p.nu < self.d:
            raise ValueError(f"plaquette directions must satisfy 0 <= mu < nu < d, got {(p.mu, p.nu)}")
        v = self.vertex(p.base)
        return (
            Edge(v, p.mu),
            Edge(self.shift(v, p.mu), p.nu),
            Edge(self.shift(v, p.nu), p.mu),
            Edge(v, p.nu),
        )

    def plaquette_loop(self, p: Plaquette) -> DirectedPath:
        """Closed path e1, e2, reverse(e3), reverse(e4) around ``p``."""
        e1, e2, e3, e4 = self.plaquette_edges(p)
        steps = (Step(e1), Step(e2), Step(e3, False), Step(e4, False))
        return DirectedPath(e1.source, e1.source, steps)

    def directed_path(self, start, end) -> DirectedPath:
        """Forward-only path from ``start`` to ``end``, walking one axis at a time.

        Each axis is traversed ``(end - start) mod n`` times in the positive
        direction, wrapping around the torus where needed.
        """
        start, end = self.vertex(start), self.vertex(end)
        steps = []
        here = start
        for mu in range(self.d):
            for _ in range((end[mu] - start[mu]) % self.n):
                steps.append(Step(Edge(here, mu)))
                here = self.shift(here, mu)
        assert here == end
        return DirectedPath(start, end, tuple(steps))

    def check_path(self, path: DirectedPath) -> None:
        """Raise ``ValueError`` unless consecutive steps compose."""
        here = self.vertex(path.start)
        for i, (edge, forward) in enumerate(path.steps):
            src, tgt = self.vertex(edge.source), self.target(edge)
            if not forward:
                src, tgt = tgt, src
            if src != here:
                raise ValueError(f"step {i} starts at {src}, expected {here}")
            here = tgt
        if here != self.vertex(path.end):
            raise ValueError(f"path ends at {here}, expected {path.end}")

    def to_dict(self) -> dict:
        return {"d": self.d, "n": self.n, "l": self.l}

    @classmethod
    def from_dict(cls, data: dict) -> "TorusLattice":
        return cls(d=int(data["d"]), n=int(data["n"]), l=float(data["l"]))

    @property
    def has_short_wrapping_loops(self) -> bool:
        """True if closed walks of length <= 4 can wind around the torus (n = 2 or 4).

        On such lattices the Dirac operator picks up Polyakov-loop terms in
        ``Tr D^4`` and the exact plaquette/Higgs decomposition does not hold.
        """
        return self.n in (2, 4)
