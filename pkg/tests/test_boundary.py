import numpy as np
import pytest
from hypothesis import given, strategies as st

from phbc import (BoundaryPair, build_lift, check_contraction, check_impedance_energy_preserving,
                  convert_boundary_matrices, from_flow_effort, right_inverse_construct,
                  to_flow_effort, to_trace_matrices)
from phbc.exceptions import DimensionError, RankError
from phbc.models import SWAP

from helpers import cmat, hermitian, rank_deficient_pair

seeds = st.integers(0, 2**32 - 1)


def test_flow_effort_examples():
    f, e = to_flow_effort(np.eye(1), np.array([1.0]), np.array([1.0]))
    assert f == pytest.approx([0]) and e == pytest.approx([np.sqrt(2)])
    f, e = to_flow_effort(np.eye(1), np.array([1.0]), np.array([0.0]))
    assert f == pytest.approx([1 / np.sqrt(2)]) and e == pytest.approx([1 / np.sqrt(2)])


@given(seeds, st.integers(1, 5))
def test_flow_effort_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    P1 = hermitian(rng, n, signed=True)
    t1, t0 = cmat(rng, n), cmat(rng, n)
    b1, b0 = from_flow_effort(P1, *to_flow_effort(P1, t1, t0))
    assert np.allclose(b1, t1, atol=1e-12) and np.allclose(b0, t0, atol=1e-12)


def test_flow_effort_dimension_error():
    with pytest.raises(DimensionError):
        to_flow_effort(np.eye(2), np.zeros(3), np.zeros(3))


def test_convert_example_and_inverse():
    bp = convert_boundary_matrices(np.eye(1), [[1.0, 0.0]])
    assert bp.WB_fe.real == pytest.approx(np.array([[1, 1]]) / np.sqrt(2))
    assert bp.k == 0
    with pytest.raises(RankError):
        convert_boundary_matrices(np.zeros((1, 1)), [[1.0, 0.0]])


@given(seeds, st.integers(1, 4))
def test_conversion_is_invertible(seed, n):
    rng = np.random.default_rng(seed)
    P1 = hermitian(rng, n, signed=True)
    W = cmat(rng, n, 2 * n)
    V = cmat(rng, n, 2 * n)
    bp = convert_boundary_matrices(P1, W, V)
    assert np.allclose(to_trace_matrices(P1, bp.WB_fe), W, atol=1e-10)
    assert np.allclose(to_trace_matrices(P1, bp.WC_fe), V, atol=1e-10)
    assert np.linalg.matrix_rank(bp.WB_fe) == np.linalg.matrix_rank(W)


def test_contraction_transport_and_wave():
    assert check_contraction(np.eye(1), [[1.0, 0.0]])[0]
    holds, lam = check_contraction(np.eye(1), [[0.0, 1.0]])
    assert not holds and lam == pytest.approx(1.0)
    holds, lam = check_contraction(SWAP, np.hstack([np.eye(2), np.diag([-1.0, 1.0])]))
    assert not holds and lam > 0
    assert check_contraction(SWAP, np.hstack([np.eye(2), np.eye(2)]))[0]


@given(seeds, st.integers(1, 5))
def test_reference_pair_is_energy_preserving(seed, n):
    rng = np.random.default_rng(seed)
    R1 = cmat(rng, n, n)
    Z = np.zeros((n, n))
    bp = BoundaryPair(np.hstack([np.linalg.inv(R1), Z]), np.hstack([Z, R1.conj().T]))
    holds, res, _ = check_impedance_energy_preserving(bp)
    assert holds and res <= 1e-10


def test_energy_preserving_needs_square_output():
    bp = BoundaryPair(np.hstack([np.eye(2), np.zeros((2, 2))]), np.zeros((1, 4)))
    holds, res, reason = check_impedance_energy_preserving(bp)
    assert not holds and res == np.inf and 'k=1' in reason


def test_sign_flipped_output_is_not_energy_preserving():
    Z = np.zeros((2, 2))
    bp = BoundaryPair(np.hstack([np.eye(2), Z]), np.hstack([Z, -np.eye(2)]))
    assert not check_impedance_energy_preserving(bp)[0]


def test_right_inverse_identity_blocks():
    R = right_inverse_construct(np.eye(3), np.eye(3))
    assert np.allclose(R.R1, np.eye(3) / 2) and np.allclose(R.R0, np.eye(3) / 2)


def test_right_inverse_w0_zero():
    rng = np.random.default_rng(0)
    W1 = cmat(rng, 3, 3)
    R = right_inverse_construct(W1, np.zeros((3, 3)))
    assert np.allclose(R.R1 @ W1, np.eye(3)) and np.allclose(R.R0, np.eye(3))


@given(seeds, st.integers(1, 6), st.data())
def test_right_inverse_random_ranks(seed, n, data):
    rng = np.random.default_rng(seed)
    r1 = data.draw(st.integers(0, n))
    W1, W0 = rank_deficient_pair(rng, n, r1)
    R = right_inverse_construct(W1, W0)
    assert R.residual <= 1e-10
    assert R.sigma_min_R1 > 1e-8 and R.sigma_min_R0 > 1e-8


def test_right_inverse_rank_error():
    with pytest.raises(RankError):
        right_inverse_construct(np.ones((2, 2)), np.ones((2, 2)))
    with pytest.raises(DimensionError):
        right_inverse_construct(np.eye(2), np.eye(3))


@given(seeds, st.integers(1, 4))
def test_lift_satisfies_boundary_condition(seed, n):
    rng = np.random.default_rng(seed)
    WB = cmat(rng, n, 2 * n)
    H = lambda z: np.broadcast_to(np.eye(n), np.shape(z) + (n, n))
    lift = build_lift(WB)
    assert np.allclose(WB @ np.vstack([lift.S1, lift.S2]), np.eye(n), atol=1e-10)
    u = cmat(rng, n)
    x = lift.apply(H, u, np.array([1.0, 0.0]))
    assert np.allclose(WB @ np.concatenate([x[0], x[1]]), u, atol=1e-10)


def test_lift_errors():
    with pytest.raises(RankError):
        build_lift(np.ones((2, 4)))
    with pytest.raises(DimensionError):
        build_lift(np.ones((2, 3)))
