import numpy as np
import pytest
from hypothesis import given, strategies as st

from phbc import (MatrixField, PHSystem, Scheme, check_generation, default_horizon,
                  diagonalize_field, traversal_times)
from phbc.exceptions import IllPosedError, RankError
from phbc.models import graded_wave, transport_system, uniform_wave, wave_independence

from helpers import cmat, hermitian, random_system

seeds = st.integers(0, 2**32 - 1)


def test_graded_wave_speeds_and_factorization():
    sys = graded_wave()
    d = diagonalize_field(sys.P1, sys.H)
    z = d.grid
    assert d.n_pos == 1
    assert np.allclose(d.Delta[:, 0], 1 / (1 + z)) and np.allclose(d.Delta[:, 1], -1 / (1 + z))
    for S, Si, lam, H in zip(d.S.samples, d.Sinv.samples, d.Delta, sys.H.samples):
        assert np.allclose(S @ Si, np.eye(2))
        assert np.allclose(Si @ np.diag(lam) @ S, sys.P1 @ H)


def test_eigenvectors_vary_continuously():
    sys = graded_wave()
    d = diagonalize_field(sys.P1, sys.H)
    jumps = np.abs(np.diff(d.Sinv.samples, axis=0)).max()
    assert jumps < 1e-2


@given(seeds, st.integers(1, 4))
def test_factorization_random(seed, n):
    rng = np.random.default_rng(seed)
    P1 = hermitian(rng, n, signed=True)
    H = MatrixField(np.array([hermitian(rng, n), hermitian(rng, n)]))
    d = diagonalize_field(P1, H)
    assert np.all(np.diff(d.Delta, axis=1) <= 0)
    for S, Si, lam, Hj in zip(d.S.samples, d.Sinv.samples, d.Delta, H.samples):
        assert np.allclose(Si @ np.diag(lam) @ S, P1 @ Hj, atol=1e-10)


def test_zero_speed_is_rejected():
    with pytest.raises(RankError):
        diagonalize_field(np.diag([1.0, 0.0]), MatrixField.constant(np.eye(2)))


def test_traversal_times():
    t = transport_system()
    assert traversal_times(diagonalize_field(t.P1, t.H)) == pytest.approx([1.0])
    g = graded_wave()
    d = diagonalize_field(g.P1, g.H)
    assert traversal_times(d) == pytest.approx([1.5, 1.5], rel=1e-4)
    assert default_horizon(d) == pytest.approx(3.75, rel=1e-4)


def test_generation_transport_direction():
    assert check_generation(transport_system()).holds
    assert not check_generation(transport_system(WB=(0.0, 1.0))).holds


def test_generation_wave_examples():
    rep = check_generation(uniform_wave())
    assert not rep.holds and rep.sigma_min < 1e-12
    assert check_generation(uniform_wave(W0=np.eye(2))).holds
    g = check_generation(graded_wave())
    assert g.holds and g.heuristic


def test_generation_with_diagonalization_matches():
    g = graded_wave()
    d = diagonalize_field(g.P1, g.H)
    assert check_generation(g, d).holds == check_generation(g).holds


@given(seeds)
def test_generation_agrees_with_wave_criterion(seed):
    rng = np.random.default_rng(seed)
    rho1, T1, rho0, T0 = rng.uniform(0.3, 3.0, 4)
    W1 = rng.standard_normal((2, 2))
    W0 = rng.standard_normal((2, 2))
    if rng.random() < 0.5:
        # force dependence: W0 [-g0; T0] parallel to W1 [g1; T1]
        a = W1 @ [np.sqrt(T1 / rho1), T1]
        b = np.array([-np.sqrt(T0 / rho0), T0])
        W0 = np.outer(a, b) / (b @ b) * rng.uniform(0.5, 2)
        W0 += np.outer(rng.standard_normal(2), [T0, np.sqrt(T0 / rho0)])
    H = MatrixField(np.array([np.diag([1 / rho0, T0]), np.diag([1 / rho1, T1])]))
    sys = PHSystem(P1=[[0, 1], [1, 0]], H=H, WB=np.hstack([W1, W0]))
    assert check_generation(sys).holds == wave_independence(W1, W0, rho1, T1, rho0, T0)


@given(seeds, st.integers(1, 3))
def test_generation_matches_scheme_solvability(seed, n):
    rng = np.random.default_rng(seed)
    sys = random_system(rng, n)
    if rng.random() < 0.3:
        # make the map onto the incoming directions singular
        WB = sys.WB.copy()
        WB[-1] = WB[0]
        sys = sys.replace(WB=WB)
    ok = check_generation(sys).holds
    try:
        Scheme(sys, 10)
        built = True
    except IllPosedError:
        built = False
    assert ok == built
