import warnings

import numpy as np
import pytest
from scipy import integrate

from gaugenet import linalg
from gaugenet.clifford import SIGMA_1, SIGMA_2, SIGMA_3
from gaugenet.config import (
    ConstrainedSpec, from_continuum, gauge_transform, random_constrained,
)
from gaugenet.continuum import (
    Mode, SmoothFieldSpec, abelian_wave, curvature, fit_order, higgs_limit_sweep,
    higgs_observables, higgs_targets, nonabelian_two_mode, subtracted_wilson, wilson_limit_sweep,
    ym_integral,
)
from gaugenet.lattice import TorusLattice


def test_curvature_constant_field():
    A = [[Mode((0, 0), 0.3 * SIGMA_1)], [Mode((0, 0), 0.7 * SIGMA_2)]]
    fields = SmoothFieldSpec(2, 2, 1.0, A)
    F = curvature(fields, np.array([0.2, 0.4]), 0, 1)
    expected = -1j * (0.3 * 0.7) * (SIGMA_1 @ SIGMA_2 - SIGMA_2 @ SIGMA_1)
    assert np.allclose(F, expected)
    assert linalg.hermiticity_residual(F) <= 1e-12


def test_curvature_abelian_closed_form():
    a, T = 0.8, 2.0
    fields = abelian_wave(T=T, amplitude=a)
    x = np.random.default_rng(0).uniform(0, T, size=(50, 2))
    F = curvature(fields, x, 0, 1)[:, 0, 0]
    assert np.allclose(F, -(2 * np.pi * a / T) * np.sin(2 * np.pi * x[:, 0] / T), atol=1e-14)
    assert np.allclose(curvature(fields, x, 1, 0)[:, 0, 0], -F)
    with pytest.raises(ValueError):
        curvature(fields, x, 1, 1)


def test_curvature_abelian_general_derivatives():
    A = [[Mode((1, 2), np.array([[0.4]]), 0.3)], [Mode((2, 1), np.array([[-0.6]]), 1.0)]]
    fields = SmoothFieldSpec(2, 1, 1.5, A)
    x = np.array([0.37, 1.1])
    h = 1e-5
    A0 = lambda y: fields.A(y)[0, 0, 0, 0].real
    A1 = lambda y: fields.A(y)[1, 0, 0, 0].real
    e0, e1 = np.array([h, 0]), np.array([0, h])
    fd = (A1(x + e0) - A1(x - e0)) / (2 * h) - (A0(x + e1) - A0(x - e1)) / (2 * h)
    assert np.isclose(curvature(fields, x, 0, 1)[0, 0].real, fd, rtol=1e-8)


def test_ym_integral_flat_and_closed_form():
    assert ym_integral(SmoothFieldSpec(2, 1, 1.0)) == 0.0
    a, T = 0.5, 1.3
    fields = abelian_wave(T=T, amplitude=a)
    closed = (2 * np.pi * a / T) ** 2 * T**2 / 2
    val = ym_integral(fields)
    assert np.isclose(val, closed, rtol=1e-12)
    quad, _ = integrate.dblquad(lambda y, x: curvature(fields, np.array([x, y]), 0, 1)[0, 0].real ** 2,
                                0, T, 0, T)
    assert np.isclose(val, quad, rtol=1e-8)
    assert abs(ym_integral(fields, 20) - val) <= 1e-12 * (1 + val)


def test_ym_integral_nonabelian_quadrature_exact():
    fields = nonabelian_two_mode(d=2)
    a, b = ym_integral(fields, 6), ym_integral(fields, 13)
    assert abs(a - b) <= 1e-12 * a


def test_ym_integral_refuses_coarse_grid():
    with pytest.raises(ValueError):
        ym_integral(abelian_wave(), quad_n=3)
    with pytest.warns(UserWarning):
        ym_integral(abelian_wave(), quad_n=3, strict=False)


def test_field_spec_roundtrip_and_validation():
    f = nonabelian_two_mode()
    g = SmoothFieldSpec.from_dict(f.to_dict())
    x = np.random.default_rng(1).uniform(0, 1, size=(5, 4))
    assert np.array_equal(f.A(x), g.A(x))
    assert f.k_max == 1
    with pytest.raises(ValueError):
        SmoothFieldSpec(2, 1, 1.0, [[Mode((1, 0), np.array([[1j]]))], []])
    with pytest.raises(ValueError):
        SmoothFieldSpec(2, 1, 1.0, [[Mode((1, 0, 0), np.array([[1.0]]))], []])


# -- fit_order ---------------------------------------------------------------

def test_fit_order_exact_power_laws():
    l = np.array([0.4, 0.2, 0.1, 0.05])
    slope, res = fit_order(l, 3.0 * l**2)
    assert abs(slope - 2) <= 1e-6 and res <= 1e-10
    assert abs(fit_order(l, 0.2 * l)[0] - 1) <= 1e-6


def test_fit_order_mixed_terms():
    l = np.logspace(-2, -1, 6)
    slope, _ = fit_order(l, 1.0 * l**2 + 10.0 * l**4)
    assert 1.9 <= slope <= 2.1


def test_fit_order_drops_and_refuses():
    l = [0.4, 0.2, 0.1, 0.05]
    with pytest.warns(UserWarning):
        slope, _ = fit_order(l, [0.16, 0.04, 0.01, 0.0])
    assert np.isclose(slope, 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(ValueError):
            fit_order(l, [0.16, 0.0, 0.0, 0.0])


# -- sweeps --------------------------------------------------------------------

def test_wilson_sweep_flat_field():
    rep = wilson_limit_sweep(SmoothFieldSpec(2, 2, 1.0), [4, 6, 8])
    assert rep.mode == "absolute"
    assert all(r["observable"] == 0 for r in rep.rows)
    assert rep.order is None


def test_wilson_sweep_abelian():
    rep = wilson_limit_sweep(abelian_wave(amplitude=0.5), [8, 16, 32, 64])
    assert 1.6 <= rep.order <= 2.4
    assert abs(rep.extras["kappa"] - 1) < 1e-2


def test_sweep_preconditions():
    with pytest.raises(ValueError):
        wilson_limit_sweep(abelian_wave(), [8, 16])
    with pytest.raises(ValueError):
        wilson_limit_sweep(abelian_wave(), [16, 8, 32])


def test_sweep_threads_do_not_change_results():
    f = nonabelian_two_mode(d=2)
    a = wilson_limit_sweep(f, [6, 8, 10, 12], threads=1)
    b = wilson_limit_sweep(f, [6, 8, 10, 12], threads=4)
    assert a.to_csv() == b.to_csv()


def test_csv_layout():
    text = wilson_limit_sweep(abelian_wave(), [8, 16, 32]).to_csv()
    lines = text.splitlines()
    assert lines[0] == "n,l,observable,target,abs_err,rel_err"
    assert len(lines) == 4 and lines[1].startswith("8,0.125,")


def test_higgs_constant_field_has_no_kinetic_term():
    fields = SmoothFieldSpec(2, 2, 1.0, [], [Mode((0, 0), np.array([[1.0, 0.2], [0.2, -0.5]]))])
    reps = higgs_limit_sweep(fields, [4, 6, 8])
    assert all(r["observable"] == 0 for r in reps["kinetic"].rows)


def test_higgs_closed_form_kinetic():
    b, T = 0.7, 1.0
    fields = SmoothFieldSpec(2, 1, T, [], [Mode((1, 0), np.array([[b]]))])
    assert np.isclose(higgs_targets(fields)["kinetic"], (2 * np.pi * b / T) ** 2 * T**2 / 2, rtol=1e-12)
    reps = higgs_limit_sweep(fields, [8, 16, 32, 64])
    assert 1.6 <= reps["kinetic"].order <= 2.4
    for name in ("quartic", "mass"):
        assert max(r["rel_err"] for r in reps[name].rows) <= 1e-10


def test_covariant_kinetic_converges_with_gauge_field():
    A = nonabelian_two_mode(d=2).A_modes
    Phi = [Mode((1, 1), 0.4 * SIGMA_3), Mode((0, 1), 0.3 * SIGMA_1, 0.2)]
    fields = SmoothFieldSpec(2, 2, 1.0, A, Phi)
    reps = higgs_limit_sweep(fields, [12, 24, 48, 96])
    errs = reps["kinetic"].errors
    assert errs[-1] < errs[0] / 20  # converges at least like l^1.4


def test_constrained_configs_freeze_higgs_sector():
    spec = ConstrainedSpec.from_eigenvalues([1.5, 1.5, -0.5])
    for n in (3, 4, 6):
        lat = TorusLattice(2, n, 1.0 / n)
        obs = higgs_observables(random_constrained(lat, spec, n))
        vol = lat.num_vertices * lat.l**2
        assert abs(obs["kinetic"]) <= 1e-10
        assert np.isclose(obs["quartic"] / vol, np.sum(spec.eigenvalues**4), rtol=1e-12)
        assert np.isclose(obs["mass"] / vol, 2 * np.sum(spec.eigenvalues**2), rtol=1e-12)


def _smooth_gauge(lat, T):
    chi = SmoothFieldSpec(lat.d, 2, T, [], [Mode((1, 0), 0.9 * SIGMA_2), Mode((0, 1), 0.4 * SIGMA_3, 0.5)])
    return linalg.exp_i_hermitian(chi.Phi(lat.l * lat.coords), 1.0)


def test_sweep_observables_gauge_covariant():
    A = nonabelian_two_mode(d=2).A_modes
    fields = SmoothFieldSpec(2, 2, 1.0, A, [Mode((1, 0), 0.5 * SIGMA_1)])
    for n in (6, 10, 16):
        lat = TorusLattice(2, n, 1.0 / n)
        cfg = from_continuum(lat, fields)
        g = gauge_transform(cfg, _smooth_gauge(lat, 1.0))
        w0, w1 = subtracted_wilson(cfg), subtracted_wilson(g)
        k0, k1 = higgs_observables(cfg)["kinetic"], higgs_observables(g)["kinetic"]
        assert abs(w0 - w1) <= 1e-9 * abs(w0)
        assert abs(k0 - k1) <= 1e-9 * abs(k0)
