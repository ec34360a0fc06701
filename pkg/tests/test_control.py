import numpy as np
import pytest
from hypothesis import given, strategies as st

from phbc import (ControlSignal, StateGrid, admissible, build_plan, check_generation,
                  check_impedance_energy_preserving, closed_loop_identity,
                  convert_boundary_matrices, discretize, gramian, output_feedback, reach_error,
                  scale_input_equivalence, simulate, synthesize)
from phbc.boundary import BoundaryPair
from phbc.exceptions import DimensionError, SingularGramianError
from phbc.models import energy_preserving_wave, graded_wave, transport_system, uniform_wave

from helpers import random_system

seeds = st.integers(0, 2**32 - 1)


def fe(sys):
    return convert_boundary_matrices(sys.P1, sys.WB).WB_fe


def test_trivial_plan_for_impedance_form():
    sys = energy_preserving_wave()
    plan = build_plan(sys)
    assert plan.trivial and plan.alpha == 1.0 and not np.any(plan.F)
    assert np.allclose(plan.Bo, fe(sys))
    assert closed_loop_identity(plan, fe(sys)) == 0.0


def test_transport_plan_takes_unit_alpha():
    plan = build_plan(transport_system())
    assert plan.D.is_zero and plan.alpha == 1.0
    assert closed_loop_identity(plan, fe(transport_system())) <= 1e-10


def test_ill_posed_transport_pipeline_runs_and_is_flagged():
    sys = transport_system(WB=(0.0, 1.0))
    plan = build_plan(sys)
    assert closed_loop_identity(plan, fe(sys)) <= 1e-10
    assert not plan.well_posed and plan.notes


def test_perturbed_plan_breaks_identity():
    sys = graded_wave()
    plan = build_plan(sys)
    bumped = plan.__class__(**{**plan.__dict__, 'R0': plan.R0 + 1e-3})
    res = closed_loop_identity(bumped, fe(sys))
    W0 = fe(sys)[:, 2:]
    assert 1e-5 * np.linalg.norm(W0, 2) < res < 1e-1 * np.linalg.norm(W0, 2)


@given(seeds, st.integers(1, 3))
def test_plan_invariants(seed, n):
    rng = np.random.default_rng(seed)
    sys = random_system(rng, n)
    if not check_generation(sys).holds:
        return
    plan = build_plan(sys)
    assert plan.iep_residual <= 1e-10
    assert check_impedance_energy_preserving(BoundaryPair(plan.Bo, plan.Ctilde))[0]
    assert plan.alpha > 0
    assert closed_loop_identity(plan, fe(sys)) <= 1e-10
    if not plan.trivial and not plan.D.is_zero:
        assert plan.DF_norm <= 0.5 + 1e-10
        assert admissible(plan.F, plan.D.D)


def test_plan_reference_and_output_systems():
    sys = graded_wave()
    plan = build_plan(sys)
    ref = plan.reference_system(sys)
    assert check_generation(ref).holds
    out = plan.output_system(sys)
    assert np.allclose(convert_boundary_matrices(out.P1, out.WB, out.WC).WC_fe,
                       plan.Co / plan.alpha)
    d = plan.as_dict()
    assert d['alpha'] == plan.alpha and len(d['R1']) == 2


def test_output_feedback_algebra():
    sys = energy_preserving_wave()
    F = np.array([[1.0, 2.0], [0.0, -1.0]])
    assert np.allclose(output_feedback(sys, F).WB, sys.WB - F @ sys.WC)
    with pytest.raises(DimensionError):
        output_feedback(sys, np.eye(3))


def test_transport_discretization_is_a_shift():
    lti = discretize(transport_system(), 4, cfl=1.0)
    shift = np.eye(4, k=1)
    assert np.allclose(lti.Ad, shift)
    assert np.allclose(lti.Bd[:, 0], [0, 0, 0, 1])
    x0 = np.arange(1.0, 5.0)
    assert not np.any(np.linalg.matrix_power(lti.Ad, 4) @ x0)


def test_bd_columns_are_one_step_responses():
    sys = graded_wave()
    lti = discretize(sys, 20)
    for i in range(2):
        u = np.eye(2)[i]
        x1 = lti.scheme.step(np.zeros((20, 2)), u)[0].reshape(-1)
        assert np.array_equal(x1, lti.Bd[:, i])


def test_spectral_radius_of_contractive_wave():
    lti = discretize(uniform_wave(W0=np.eye(2)), 40)
    assert lti.spectral_radius() <= 1 + 1e-12
    lti = discretize(graded_wave(), 40)
    assert lti.spectral_radius() <= 1 + 10 * lti.dt


def test_gramian_examples():
    lti = discretize(transport_system(), 50, cfl=1.0)
    g0 = gramian(lti, 0)
    assert not np.any(g0.W)
    full = gramian(lti, int(round(1.2 / lti.dt)))
    assert full.lambda_min > 0.5
    short = gramian(lti, int(round(0.5 / lti.dt)))
    assert short.lambda_min <= 1e-14 * short.lambda_max


def test_gramian_monotone_in_horizon():
    lti = discretize(uniform_wave(W0=np.eye(2)), 30, cfl=0.9)
    lams = [gramian(lti, K).lambda_min for K in range(10, 120, 10)]
    assert all(b >= a - 1e-13 for a, b in zip(lams, lams[1:]))


@pytest.mark.parametrize('sys', [transport_system(), uniform_wave(W0=np.eye(2))],
                         ids=['transport', 'wave'])
def test_controllability_witness_uniform_in_N(sys):
    lam = []
    for N in (50, 100):
        lti = discretize(sys, N, cfl=1.0)
        g = gramian(lti, int(np.ceil(1.2 / lti.dt)))
        lam.append(g.lambda_min)
    assert lam[0] > 0 and lam[1] > 0 and lam[1] >= lam[0] / 4


def test_synthesize_zero_target():
    lti = discretize(transport_system(), 20, cfl=1.0)
    u = synthesize(lti, StateGrid.zeros(20, 1), 30)
    assert u.samples.shape == (30, 1) and not np.any(u.samples)


def test_synthesize_transport_bump():
    sys = transport_system()
    lti = discretize(sys, 200, cfl=1.0)
    K = int(round(1.5 / lti.dt))
    target = StateGrid.from_function(lambda z: [np.exp(-((z - 0.5) / 0.1) ** 2)], 200)
    u = synthesize(lti, target, K)
    err, _ = reach_error(sys, lti, u, target)
    assert err <= 0.02 and not u.regularized


def test_synthesize_short_horizon_is_singular():
    lti = discretize(transport_system(), 40, cfl=1.0)
    target = StateGrid.from_function(lambda z: [1.0], 40)
    with pytest.raises(SingularGramianError):
        synthesize(lti, target, 20)
    with pytest.raises(DimensionError):
        synthesize(lti, np.ones(7), 60)


def test_regularized_synthesis_on_graded_wave():
    sys = graded_wave()
    N = 80
    lti = discretize(sys, N, cfl=1.0)
    K = int(np.ceil(3.75 / lti.dt))
    target = StateGrid.from_function(lambda z: [np.sin(np.pi * z), 0.0], N)
    with pytest.raises(SingularGramianError):
        synthesize(lti, target, K)
    u = synthesize(lti, target, K, regularize=True)
    assert u.regularized
    assert reach_error(sys, lti, u, target)[0] <= 0.02


def test_min_norm_control_is_smaller_than_alternatives():
    sys = uniform_wave(W0=np.eye(2))
    N = 30
    lti = discretize(sys, N, cfl=1.0)
    K = int(round(2.5 / lti.dt))
    g = gramian(lti, K)
    target = StateGrid.from_function(lambda z: [np.sin(np.pi * z), z], N)
    u = synthesize(lti, target, K, g)
    # adding a null-space direction of the reachability map keeps the target
    Phi = g.blocks[::-1].transpose(1, 0, 2).reshape(N * 2, -1)
    v = np.linalg.svd(Phi)[2][-1].conj()
    alt = ControlSignal(u.samples + 0.1 * v.reshape(K, 2), lti.dt)
    assert np.allclose(Phi @ alt.samples.reshape(-1), target.values.reshape(-1), atol=1e-8)
    assert alt.l2_norm() > u.l2_norm()


def test_scale_input_equivalence():
    rng = np.random.default_rng(5)
    with pytest.raises(ValueError):
        scale_input_equivalence(transport_system(), 0)
    for sys, alpha in ((transport_system(), 1.0), (transport_system(), 2.0),
                       (uniform_wave(W0=np.eye(2)), -3.0), (graded_wave(), 0.1)):
        N = 40
        x0 = rng.standard_normal((N, sys.n))
        dt = discretize(sys, N).dt
        u = ControlSignal(rng.standard_normal((60, sys.n)), dt)
        assert scale_input_equivalence(sys, alpha).max_deviation(x0, u, 60 * dt) <= 1e-12


def test_dissipative_closed_loop_on_reference_pair():
    sys = graded_wave()
    ref = build_plan(sys).reference_system(sys)
    x0 = StateGrid.from_function(lambda z: [np.sin(np.pi * z), np.cos(np.pi * z)], 80)
    tr = simulate(ref, x0, None, 5.0, feedback=-np.eye(2))
    assert np.all(np.diff(tr.energy) <= 1e-14)
    assert tr.energy[-1] / tr.energy[0] <= 0.9
