"""Feedback decomposition of the input map and Gramian-based control synthesis.

Any well-posed system ``(A, alpha B)`` is written as the closed loop of a
reference system whose input ``Bo = [R1^-1, 0]`` (flow/effort coordinates)
together with ``C~ = [0, R1^*]`` is impedance energy preserving. With
``W1 R1 + W0 R0 = I`` and ``Co = alpha [R1^-1, -R0^-1]``, the feedback
``F = W0 R0 / alpha`` gives ``alpha (Bo - F Co) = alpha W_B``.

Exact controllability is exhibited on the discretized system: the
reachability Gramian of the one-step map of :class:`phbc.simulate.Scheme`
is positive definite past the characteristic travel time, and the
minimum-norm input steering zero to a target follows from it.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .boundary import (check_impedance_energy_preserving, convert_boundary_matrices,
                       right_inverse_construct, to_trace_matrices, BoundaryPair)
from .exceptions import DimensionError, SingularGramianError
from .frequency import admissible, estimate_feedthrough
from .simulate import ControlSignal, Scheme, simulate
from .spectral import check_generation
from .systems import StateGrid, energy_norm

__all__ = ['FeedbackPlan', 'DiscreteLTI', 'Gramian', 'build_plan', 'closed_loop_identity',
           'output_feedback', 'discretize', 'gramian', 'synthesize', 'InputScaling',
           'scale_input_equivalence', 'reach_error']


@dataclass(frozen=True)
class FeedbackPlan:
    """Everything needed to read ``(A, alpha B)`` as a closed loop.

    Matrices `Bo`, `Ctilde`, `Co` act on boundary flow/effort. `D` is the
    feedthrough of ``(A, Bo, Co)`` evaluated with the unit output scale
    ``Co / alpha``; the feedthrough at the chosen scale is ``alpha * D.D``.
    """

    W1: np.ndarray
    W0: np.ndarray
    R1: np.ndarray
    R0: np.ndarray
    Bo: np.ndarray
    Ctilde: np.ndarray
    Co: np.ndarray
    alpha: float
    F: np.ndarray
    D: object
    trivial: bool
    alpha_fallback: bool
    well_posed: bool
    iep_residual: float
    identity_residual: float
    loop_gain: float
    notes: list = field(default_factory=list)

    @property
    def DF_norm(self):
        """``||D F||`` for the unit-scale feedthrough used to pick alpha."""
        if self.D is None:
            return 0.0
        return float(np.linalg.norm(self.D.D @ self.F, 2))

    def reference_system(self, sys):
        """The impedance energy preserving system ``(A, Bo, C~)`` in trace coordinates."""
        return sys.replace(WB=to_trace_matrices(sys.P1, self.Bo),
                           WC=to_trace_matrices(sys.P1, self.Ctilde))

    def output_system(self, sys):
        """``(A, Bo, Co / alpha)`` in trace coordinates, the system whose feedthrough is `D`."""
        return sys.replace(WB=to_trace_matrices(sys.P1, self.Bo),
                           WC=to_trace_matrices(sys.P1, self.Co / self.alpha))

    def as_dict(self):
        c = lambda a: np.stack([np.real(a), np.imag(a)], axis=-1).tolist()
        return {
            'trivial': self.trivial, 'well_posed': self.well_posed,
            'alpha': self.alpha, 'alpha_fallback': self.alpha_fallback,
            'W1': c(self.W1), 'W0': c(self.W0), 'R1': c(self.R1), 'R0': c(self.R0),
            'Bo': c(self.Bo), 'Ctilde': c(self.Ctilde), 'Co': c(self.Co), 'F': c(self.F),
            'D': None if self.D is None else c(self.D.D),
            'D_gap': None if self.D is None else self.D.convergence_gap,
            'DF_norm': self.DF_norm, 'loop_gain': self.loop_gain,
            'iep_residual': self.iep_residual,
            'identity_residual': self.identity_residual,
            'notes': list(self.notes),
        }


def _identity_residual(W1, W0, R1, R0, alpha, WB_fe, Bo=None):
    n = W1.shape[0]
    if Bo is None:
        Bo = np.hstack([np.linalg.inv(R1), np.zeros((n, n))])
    Co = alpha * np.hstack([np.linalg.inv(R1), -np.linalg.inv(R0)])
    F = (W0 @ R0) / alpha
    return float(np.linalg.norm(alpha * (Bo - F @ Co) - alpha * WB_fe, 2))


def closed_loop_identity(plan, W_B):
    """``||alpha (Bo - F Co) - alpha W_B||`` for the flow/effort matrix ``W_B = [W1 W0]``.

    Recomputed from ``plan.R1``, ``plan.R0`` and ``plan.alpha``, so a
    perturbed plan shows a nonzero residual.
    """
    W_B = np.asarray(W_B, dtype=complex)
    n = W_B.shape[0]
    W1, W0 = W_B[:, :n], W_B[:, n:]
    if plan.trivial:
        return float(np.linalg.norm(plan.alpha * plan.Bo - plan.alpha * W_B, 2))
    return _identity_residual(W1, W0, plan.R1, plan.R0, plan.alpha, W_B)


def build_plan(sys, s0=None, levels=8, gap_tol=1e-6):
    """Assemble the feedback decomposition of ``(A, B)``.

    Steps: convert WB to flow/effort ``[W1 W0]``; construct invertible
    ``R1, R0``; form ``Bo``, ``C~``, ``Co``; if ``W0 = 0`` return the trivial
    plan (``alpha = 1``, ``F = 0``); else estimate the feedthrough D of
    ``(A, Bo, Co)`` at unit output scale and set
    ``alpha = 2 ||D|| ||W0 R0||`` (spectral norms; 1 if D = 0) and
    ``F = W0 R0 / alpha``. If the D estimate does not converge,
    ``alpha = 2 ||W0 R0||`` is used and the plan is flagged.
    """
    n = sys.n
    bp = convert_boundary_matrices(sys.P1, sys.WB)
    WB_fe = bp.WB_fe
    W1, W0 = WB_fe[:, :n], WB_fe[:, n:]
    R = right_inverse_construct(W1, W0)
    R1, R0 = R.R1, R.R0
    Z = np.zeros((n, n))
    well_posed = check_generation(sys).holds
    notes = []
    if not well_posed:
        notes.append('open-loop boundary condition fails the generation check')

    trivial = bool(np.linalg.norm(W0) <= 1e-10 * np.linalg.norm(WB_fe))
    if trivial:
        Bo = np.hstack([W1, Z])
    else:
        Bo = np.hstack([np.linalg.inv(R1), Z])
    Ctilde = np.hstack([Z, R1.conj().T])
    _, iep_res, _ = check_impedance_energy_preserving(BoundaryPair(Bo, Ctilde))

    if trivial:
        alpha, F = 1.0, np.zeros((n, n), dtype=complex)
        Co = np.hstack([np.linalg.inv(R1), -np.linalg.inv(R0)])
        notes.append('W0 = 0: input already in impedance form')
        return FeedbackPlan(W1, W0, R1, R0, Bo, Ctilde, Co, alpha, F, None, True, False,
                            well_posed, iep_res,
                            float(np.linalg.norm(alpha * Bo - alpha * WB_fe, 2)), 0.0, notes)

    Co1 = np.hstack([np.linalg.inv(R1), -np.linalg.inv(R0)])
    out_sys = sys.replace(WB=to_trace_matrices(sys.P1, Bo), WC=to_trace_matrices(sys.P1, Co1))
    D = estimate_feedthrough(out_sys, s0=s0, levels=levels, tol=gap_tol)
    W0R0 = W0 @ R0
    nW0R0 = float(np.linalg.norm(W0R0, 2))
    fallback = not D.converged
    if fallback:
        alpha = 2.0 * nW0R0
        notes.append(f'feedthrough estimate did not converge (gap {D.convergence_gap:.2e}); '
                     'alpha from ||W0 R0|| only')
    elif D.is_zero:
        alpha = 1.0
    else:
        alpha = 2.0 * float(np.linalg.norm(D.D, 2)) * nW0R0
    F = W0R0 / alpha
    Co = alpha * Co1
    # feedthrough at scale alpha is alpha * D, so the loop gain alpha D F = D W0 R0
    loop_gain = float(np.linalg.norm(D.D @ W0R0, 2))
    if not admissible(F, alpha * D.D):
        notes.append('I - D F is singular at the chosen scale: closed loop not admissible')
    res = _identity_residual(W1, W0, R1, R0, alpha, WB_fe)
    return FeedbackPlan(W1, W0, R1, R0, Bo, Ctilde, Co, alpha, F, D, False, fallback,
                        well_posed, iep_res, res, loop_gain, notes)


def output_feedback(sys, F):
    """Closed loop under ``u = F y + v``: the new input map is ``WB - F WC``."""
    F = np.atleast_2d(np.asarray(F, dtype=complex))
    if F.shape != (sys.n, sys.k):
        raise DimensionError(f'feedback must be {sys.n} x {sys.k}, got {F.shape}')
    return sys.replace(WB=sys.WB - F @ sys.WC)


@dataclass(frozen=True)
class DiscreteLTI:
    """One-step map ``x+ = Ad x + Bd u`` of the scheme, state flattened cell-major."""

    Ad: np.ndarray
    Bd: np.ndarray
    dt: float
    N: int
    n: int
    scheme: Scheme = None

    def spectral_radius(self):
        return float(np.abs(np.linalg.eigvals(self.Ad)).max())


def discretize(sys, N, cfl=0.9):
    """Assemble ``(Ad, Bd)`` column by column from the scheme's step."""
    scheme = Scheme(sys, N, cfl=cfl)
    n = sys.n
    dim = N * n
    X = np.eye(dim, dtype=complex).reshape(dim, N, n)
    Ad = scheme.step(X, np.zeros((dim, n)))[0].reshape(dim, dim).T
    Bd = scheme.step(np.zeros((n, N, n)), np.eye(n))[0].reshape(n, dim).T
    return DiscreteLTI(Ad, Bd, scheme.dt, N, n, scheme)


@dataclass(frozen=True)
class Gramian:
    """``W_K = sum_{j<K} Ad^j Bd Bd^* (Ad^*)^j`` with its extreme eigenvalues.

    ``blocks[j] = Ad^j Bd`` is kept for synthesis.
    """

    W: np.ndarray
    lambda_min: float
    lambda_max: float
    K: int
    blocks: np.ndarray

    @property
    def cond(self):
        return self.lambda_max / self.lambda_min if self.lambda_min > 0 else np.inf


def gramian(lti, K):
    dim = lti.Ad.shape[0]
    m = lti.Bd.shape[1]
    blocks = np.empty((K, dim, m), dtype=complex)
    P = lti.Bd
    for j in range(K):
        blocks[j] = P
        P = lti.Ad @ P
    Phi = blocks.transpose(1, 0, 2).reshape(dim, K * m)
    W = Phi @ Phi.conj().T
    W = 0.5 * (W + W.conj().T)
    if K == 0:
        return Gramian(W, 0.0, 0.0, 0, blocks)
    lam = np.linalg.eigvalsh(W)
    return Gramian(W, float(lam[0]), float(lam[-1]), K, blocks)


def synthesize(lti, target, K, gram=None, rtol=1e-14, regularize=False):
    """Minimum-norm input steering 0 to `target` in `K` steps.

    ``u_j = Bd^* (Ad^*)^{K-1-j} W_K^-1 x_target``, with the Gramian system
    solved by Cholesky. A shift of ``1e-12 lambda_max`` is added (and the
    result flagged ``regularized``) if the factorization fails, or if the
    Gramian is numerically singular and `regularize` is set. The shifted
    solve still reaches smooth targets when only grid-scale modes are
    unreachable, as happens under the numerical diffusion of the scheme.

    Raises
    ------
    SingularGramianError
        If ``lambda_min <= rtol * lambda_max`` and `regularize` is false.
    """
    if gram is None:
        gram = gramian(lti, K)
    x = target.values if isinstance(target, StateGrid) else np.asarray(target, dtype=complex)
    x = x.reshape(-1)
    if x.size != lti.Ad.shape[0]:
        raise DimensionError(f'target has {x.size} entries, expected {lti.Ad.shape[0]}')
    if not np.any(x):
        return ControlSignal(np.zeros((K, lti.n)), lti.dt)
    singular = gram.lambda_min <= rtol * gram.lambda_max
    if singular and not regularize:
        raise SingularGramianError(
            f'Gramian singular: lambda_min={gram.lambda_min:.3e}, lambda_max={gram.lambda_max:.3e}')
    shift = 1e-12 * gram.lambda_max * np.eye(len(x))
    regularized = singular
    try:
        c = sla.cho_solve(sla.cho_factor(gram.W + shift if singular else gram.W), x)
    except np.linalg.LinAlgError:
        c = sla.cho_solve(sla.cho_factor(gram.W + shift), x)
        regularized = True
    # u_{K-1-j} = (Ad^j Bd)^* c
    u = np.einsum('jdm,d->jm', gram.blocks.conj(), c)[::-1]
    return ControlSignal(u, lti.dt, regularized)


def reach_error(sys, lti, u, target):
    """Relative energy-norm error of the state reached from 0 under `u`."""
    T = len(u.samples) * lti.dt
    traj = simulate(sys, np.zeros((lti.N, lti.n)), u, T, scheme=lti.scheme)
    diff = traj.states[-1] - (target.values if isinstance(target, StateGrid) else target)
    return energy_norm(sys, diff) / energy_norm(sys, target), traj


@dataclass(frozen=True)
class InputScaling:
    """Paired systems ``(A, B)`` and ``(A, alpha B)``."""

    base: object
    scaled: object
    alpha: float

    def max_deviation(self, x0, u, T, cfl=0.9):
        """Largest state difference between base under u and scaled under alpha u."""
        N = (x0.values if isinstance(x0, StateGrid) else np.asarray(x0)).shape[0]
        scheme = Scheme(self.base, N, cfl=cfl)
        a = simulate(self.base, x0, u, T, dt=scheme.dt)
        if isinstance(u, ControlSignal):
            ua = ControlSignal(self.alpha * u.samples, u.dt)
        elif u is None:
            ua = None
        else:
            ua = lambda t: self.alpha * np.asarray(u(t))
        b = simulate(self.scaled, x0, ua, T, dt=scheme.dt)
        return float(np.abs(a.states - b.states).max())


def scale_input_equivalence(sys, alpha):
    if alpha == 0:
        raise ValueError('alpha must be nonzero')
    return InputScaling(sys, sys.replace(WB=alpha * sys.WB), alpha)
