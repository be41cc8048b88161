"""Smooth periodic fields, their lattice discretisation, and l -> 0 sweeps.

Fields are trigonometric polynomials on the torus of side ``T``::

    A_mu(x) = sum_k C_k cos(2 pi k.x / T + phase_k)      (C_k Hermitian)

so every continuum integral used as a reference is computed exactly by a
rectangle rule with enough points per side.

Sign conventions: links are ``exp(+i l A_mu)``, the covariant derivative is
``d - iA`` and the curvature is ``F = dA_nu - dA_mu - i[A_mu, A_nu]``.  With the
plaquette holonomy ``L4^* L3^* L2 L1`` this gives ``U_p = exp(i l^2 F_{mu nu} + ...)``.
"""
from __future__ import annotations

import csv
import io
import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .action import wilson_action
from .config import GaugeNetworkConfig, from_continuum
from .lattice import TorusLattice


@dataclass(frozen=True, eq=False)
class Mode:
    k: tuple[int, ...]
    coeff: np.ndarray  # Hermitian N x N
    phase: float = 0.0

    def to_dict(self) -> dict:
        return {"k": list(self.k), "coeff": linalg.complex_to_json(self.coeff), "phase": self.phase}

    @classmethod
    def from_dict(cls, data: dict) -> "Mode":
        return cls(tuple(int(k) for k in data["k"]), linalg.complex_from_json(data["coeff"]),
                   float(data.get("phase", 0.0)))


@dataclass(eq=False)
class SmoothFieldSpec:
    """Gauge potential ``A_mu`` (one mode list per direction) and Higgs field ``Phi``."""

    d: int
    N: int
    T: float
    A_modes: list[list[Mode]] = field(default_factory=list)
    Phi_modes: list[Mode] = field(default_factory=list)

    def __post_init__(self):
        if not self.A_modes:
            self.A_modes = [[] for _ in range(self.d)]
        if len(self.A_modes) != self.d:
            raise ValueError(f"need one mode list per direction ({self.d})")
        for mode in [m for ms in self.A_modes for m in ms] + list(self.Phi_modes):
            if len(mode.k) != self.d:
                raise ValueError(f"wavevector {mode.k} has wrong length")
            if mode.coeff.shape != (self.N, self.N):
                raise ValueError(f"mode coefficient has shape {mode.coeff.shape}")
            linalg.check_hermitian(mode.coeff)

    @property
    def k_max(self) -> int:
        ks = [abs(k) for ms in self.A_modes + [self.Phi_modes] for m in ms for k in m.k]
        return max(ks, default=0)

    def without_higgs(self) -> "SmoothFieldSpec":
        return SmoothFieldSpec(self.d, self.N, self.T, self.A_modes, [])

    def without_gauge(self) -> "SmoothFieldSpec":
        return SmoothFieldSpec(self.d, self.N, self.T, [], self.Phi_modes)

    # -- evaluation on point sets x of shape (P, d) --------------------------

    def _sum(self, modes, x, deriv=None):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.zeros((x.shape[0], self.N, self.N), dtype=complex)
        w = 2 * np.pi / self.T
        for m in modes:
            arg = w * (x @ np.asarray(m.k, dtype=float)) + m.phase
            if deriv is None:
                f = np.cos(arg)
            else:
                f = -w * m.k[deriv] * np.sin(arg)
            out += f[:, None, None] * m.coeff
        return out

    def A(self, x) -> np.ndarray:
        """Shape (d, P, N, N)."""
        return np.stack([self._sum(ms, x) for ms in self.A_modes])

    def dA(self, x) -> np.ndarray:
        """``dA[mu, nu] = d_nu A_mu``, shape (d, d, P, N, N)."""
        return np.stack([np.stack([self._sum(ms, x, nu) for nu in range(self.d)]) for ms in self.A_modes])

    def Phi(self, x) -> np.ndarray:
        return self._sum(self.Phi_modes, x)

    def dPhi(self, x) -> np.ndarray:
        return np.stack([self._sum(self.Phi_modes, x, mu) for mu in range(self.d)])

    def to_dict(self) -> dict:
        return {
            "d": self.d, "N": self.N, "T": self.T,
            "A_modes": [[m.to_dict() for m in ms] for ms in self.A_modes],
            "Phi_modes": [m.to_dict() for m in self.Phi_modes],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SmoothFieldSpec":
        d = int(data["d"])
        A = data.get("A_modes") or [[] for _ in range(d)]
        return cls(d, int(data["N"]), float(data["T"]),
                   [[Mode.from_dict(m) for m in ms] for ms in A],
                   [Mode.from_dict(m) for m in data.get("Phi_modes", [])])


def _comm(a, b):
    return a @ b - b @ a


def curvature(fields: SmoothFieldSpec, x, mu: int, nu: int) -> np.ndarray:
    """``F_{mu nu}(x)``; ``x`` may be a single point or an array of points."""
    if mu == nu:
        raise ValueError("curvature needs mu != nu")
    single = np.ndim(x) == 1
    A, dA = fields.A(x), fields.dA(x)
    F = dA[nu, mu] - dA[mu, nu] - 1j * _comm(A[mu], A[nu])
    F = linalg.hermitian(F)
    return F[0] if single else F


def covariant_gradient(fields: SmoothFieldSpec, x) -> np.ndarray:
    """``d_mu Phi - i[A_mu, Phi]`` for every direction, shape (d, P, N, N)."""
    A, Phi = fields.A(x), fields.Phi(x)
    return fields.dPhi(x) - 1j * _comm(A, Phi[None])


def quadrature_grid(fields: SmoothFieldSpec, quad_n: int):
    """Points and cell volume of the ``quad_n^d`` rectangle rule on the torus."""
    axis = np.arange(quad_n) * fields.T / quad_n
    pts = np.stack(np.meshgrid(*([axis] * fields.d), indexing="ij"), axis=-1).reshape(-1, fields.d)
    return pts, (fields.T / quad_n) ** fields.d


def _check_quad(fields, quad_n, strict):
    need = 4 * fields.k_max + 2
    if quad_n < need:
        msg = f"quad_n={quad_n} below the exactness threshold {need}"
        if strict:
            raise ValueError(msg)
        warnings.warn(msg)


def _integrate(fields, quad_n, strict, integrand):
    _check_quad(fields, quad_n, strict)
    pts, vol = quadrature_grid(fields, quad_n)
    total = 0.0
    # chunk to bound memory on fine 4d grids
    for chunk in np.array_split(pts, max(1, len(pts) // 4096)):
        total += float(np.sum(integrand(chunk)))
    return vol * total


def ym_integral(fields: SmoothFieldSpec, quad_n: int | None = None, strict: bool = True) -> float:
    """``sum_{mu<nu} int tr(F_{mu nu}^2)`` over the torus."""
    quad_n = quad_n or 4 * fields.k_max + 2

    def integrand(x):
        s = 0.0
        for mu in range(fields.d):
            for nu in range(mu + 1, fields.d):
                F = curvature(fields, x, mu, nu)
                s += np.sum(linalg.trace(F @ F).real)
        return s

    return _integrate(fields, quad_n, strict, integrand)


def higgs_targets(fields: SmoothFieldSpec, quad_n: int | None = None, strict: bool = True) -> dict:
    """Continuum references for the quartic, covariant-kinetic and mass observables."""
    quad_n = quad_n or 4 * fields.k_max + 2

    def quartic(x):
        P = fields.Phi(x)
        return np.sum(linalg.trace(np.linalg.matrix_power(P, 4)).real)

    def kinetic(x):
        G = covariant_gradient(fields, x)
        return np.sum(linalg.trace(G @ G).real)

    def mass(x):
        P = fields.Phi(x)
        return fields.d * np.sum(linalg.trace(P @ P).real)

    return {name: _integrate(fields, quad_n, strict, f)
            for name, f in (("quartic", quartic), ("kinetic", kinetic), ("mass", mass))}


def higgs_observables(config: GaugeNetworkConfig) -> dict:
    """Lattice Higgs-sector sums normalised to approximate continuum integrals."""
    lat = config.lattice
    l, d = lat.l, lat.d
    Ds, Dt, L = config.D_source, config.D_target, config.L
    diff = linalg.dagger(L) @ Dt @ L - Ds
    return {
        "quartic": l**d * float(np.sum(linalg.trace(np.linalg.matrix_power(config.D, 4)).real)),
        "kinetic": l ** (d - 2) * float(np.sum(linalg.trace(diff @ diff).real)),
        "mass": l**d * 0.5 * float(np.sum(linalg.trace(Ds @ Ds + Dt @ Dt).real)),
    }


def subtracted_wilson(config: GaugeNetworkConfig) -> float:
    """``W + 2 N P``, i.e. the Wilson action with its flat-field value removed."""
    return wilson_action(config) + 2 * config.N * config.lattice.num_plaquettes


def fit_order(l_values: Sequence[float], errors: Sequence[float]):
    """Least-squares slope of ``log(error)`` against ``log(l)``.

    Returns ``(slope, residual)`` where ``residual`` is the RMS deviation of
    the log-errors from the fitted line.  Non-positive errors are dropped with
    a warning; fewer than three remaining points is an error.
    """
    l_values = np.asarray(l_values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = errors > 0
    if not np.all(keep):
        warnings.warn(f"dropping {np.count_nonzero(~keep)} point(s) with non-positive error")
    if np.count_nonzero(keep) < 3:
        raise ValueError("need at least 3 points with positive error to fit an order")
    x, y = np.log(l_values[keep]), np.log(errors[keep])
    X = np.stack([x, np.ones_like(x)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(X, y, rcond=None)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), residual


@dataclass
class ConvergenceReport:
    observable: str
    rows: list[dict]
    order: float | None = None
    fit_residual: float | None = None
    mode: str = "relative"
    extras: dict = field(default_factory=dict)

    CSV_COLUMNS = ("n", "l", "observable", "target", "abs_err", "rel_err")

    @property
    def errors(self) -> np.ndarray:
        key = "rel_err" if self.mode == "relative" else "abs_err"
        return np.array([r[key] for r in self.rows], dtype=float)

    @property
    def l_values(self) -> np.ndarray:
        return np.array([r["l"] for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_COLUMNS)
        for r in self.rows:
            writer.writerow([r[c] if r[c] is not None else "" for c in self.CSV_COLUMNS])
        return buf.getvalue()

    def summary(self) -> dict:
        return {"observable": self.observable, "order": self.order, "fit_residual": self.fit_residual,
                "mode": self.mode, **self.extras}


def _build_report(name, ns, ls, values, target):
    rows = []
    absolute = target == 0
    for n, l, v in zip(ns, ls, values):
        err = abs(v - target)
        rows.append({"n": n, "l": l, "observable": v, "target": target, "abs_err": err,
                     "rel_err": None if absolute else err / abs(target)})
    report = ConvergenceReport(name, rows, mode="absolute" if absolute else "relative")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            report.order, report.fit_residual = fit_order(report.l_values, report.errors)
    except ValueError as exc:
        report.extras["fit_note"] = str(exc)
    return report


def _sweep(fields, n_list, job, threads):
    n_list = [int(n) for n in n_list]
    if len(n_list) < 3:
        raise ValueError("a convergence sweep needs at least 3 lattice sizes")
    if sorted(n_list) != n_list or len(set(n_list)) != len(n_list):
        raise ValueError("n_list must be strictly ascending")
    lattices = [TorusLattice(fields.d, n, fields.T / n) for n in n_list]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(job, lattices))
    else:
        results = [job(lat) for lat in lattices]
    return n_list, [lat.l for lat in lattices], results


def wilson_limit_sweep(fields: SmoothFieldSpec, n_list: Sequence[int], threads: int = 1,
                       quad_n: int | None = None) -> ConvergenceReport:
    """``l^(d-4) (W + 2NP)`` against ``sum_{mu<nu} int tr F^2`` as ``l = T/n -> 0``.

    The relative error is taken against the target itself (expected constant 1);
    the ratio measured at the finest lattice is reported as ``kappa``.
    """
    gauge_only = fields.without_higgs()

    def job(lat):
        cfg = from_continuum(lat, gauge_only)
        return lat.l ** (lat.d - 4) * subtracted_wilson(cfg)

    ns, ls, values = _sweep(fields, n_list, job, threads)
    target = ym_integral(fields, quad_n)
    report = _build_report("wilson", ns, ls, values, target)
    report.extras["kappa"] = values[-1] / target if target else None
    report.extras["ym_integral"] = target
    return report


def higgs_limit_sweep(fields: SmoothFieldSpec, n_list: Sequence[int], threads: int = 1,
                      quad_n: int | None = None) -> dict[str, ConvergenceReport]:
    """Quartic, covariant-kinetic and mass observables against their integrals."""

    def job(lat):
        return higgs_observables(from_continuum(lat, fields))

    ns, ls, results = _sweep(fields, n_list, job, threads)
    targets = higgs_targets(fields, quad_n)
    return {name: _build_report(name, ns, ls, [r[name] for r in results], targets[name])
            for name in ("quartic", "kinetic", "mass")}


# -- ready-made fields -------------------------------------------------------

def _unit(d, mu):
    k = [0] * d
    k[mu] = 1
    return tuple(k)


def abelian_wave(d: int = 2, T: float = 1.0, amplitude: float = 0.5) -> SmoothFieldSpec:
    """``A_1 = a cos(2 pi x_0 / T)``, all other components zero (N = 1)."""
    A = [[] for _ in range(d)]
    A[1] = [Mode(_unit(d, 0), np.array([[amplitude]], dtype=complex))]
    return SmoothFieldSpec(d, 1, T, A)


def higgs_wave(d: int = 2, T: float = 1.0, amplitude: float = 0.5) -> SmoothFieldSpec:
    """``Phi = b cos(2 pi x_0 / T)`` with no gauge field (N = 1)."""
    return SmoothFieldSpec(d, 1, T, [], [Mode(_unit(d, 0), np.array([[amplitude]], dtype=complex))])


def nonabelian_two_mode(d: int = 4, T: float = 1.0, a: float = 0.6, b: float = 0.5) -> SmoothFieldSpec:
    """U(2) field in the (0, 1) plane with a genuinely non-abelian curvature.

    ``A_0 = a s1 (cos(2 pi x_1/T) + 1/2)`` and
    ``A_1 = b (s2 cos(2 pi x_0/T + 0.4) + s3 cos(2 pi x_0/T + 1.1))``.
    Each ``A_mu`` is constant along its own direction, so ``exp(i l A_mu(x_v))``
    is the exact parallel transporter along the edge.  The s3 component makes
    ``int tr(dA [A_0, A_1])`` non-zero, so the limit depends on the sign of the
    commutator term in the curvature.
    """
    from .clifford import SIGMA_1, SIGMA_2, SIGMA_3

    A = [[] for _ in range(d)]
    A[0] = [Mode(_unit(d, 1), a * SIGMA_1), Mode((0,) * d, 0.5 * a * SIGMA_1)]
    A[1] = [Mode(_unit(d, 0), b * SIGMA_2, 0.4), Mode(_unit(d, 0), b * SIGMA_3, 1.1)]
    return SmoothFieldSpec(d, 2, T, A)
