import itertools

import numpy as np
import pytest

from gaugenet.clifford import build_gammas


@pytest.mark.parametrize("d", [2, 4])
def test_clifford_relations(d):
    cl = build_gammas(d)
    assert cl.dim_s == 2 ** (d // 2)
    assert cl.max_violation() <= 1e-12
    assert abs(np.trace(cl.chirality)) == 0
    for g in cl.gammas:
        assert abs(np.trace(g)) == 0


def test_traces_d2():
    cl = build_gammas(2)
    assert np.trace(cl.gammas[0] @ cl.gammas[1]) == 0


@pytest.mark.parametrize("d", [2, 4])
def test_trace_identities(d):
    cl = build_gammas(d)
    g, chi, s = cl.gammas, cl.chirality, cl.dim_s
    for mu, nu in itertools.product(range(d), repeat=2):
        assert np.isclose(np.trace(g[mu] @ g[nu]), s * (mu == nu))
        expected = s if mu == nu else -s
        assert np.isclose(np.trace(g[mu] @ g[nu] @ g[mu] @ g[nu]), expected)
        assert np.isclose(np.trace(g[mu] @ chi @ g[nu] @ chi), -s * (mu == nu))


def test_chirality_sandwich_d4():
    cl = build_gammas(4)
    for g in cl.gammas:
        assert np.isclose(np.trace(g @ cl.chirality @ g @ cl.chirality), -4)


def test_unsupported_dimension():
    with pytest.raises(ValueError):
        build_gammas(3)
