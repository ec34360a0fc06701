"""Transfer function and feedthrough of the boundary control system.

For an exponential solution ``x(zeta) e^{st}`` the effort ``e = Hx`` solves
the two-point problem

    d/dzeta e = P1^-1 (s H(zeta)^-1 - P0) e,

so ``e(1) = E(s) e(0)``. With input ``u = WB [e(1); e(0)]`` and output
``y = WC [e(1); e(0)]`` the transfer function is

    G(s) = WC [E; I] (WB [E; I])^-1.

``E(s)`` grows like ``exp(s / min|lambda|)``, so G is evaluated from an
orthonormal basis of the column space of ``[E; I]`` tracked along zeta,
which stays well conditioned for large s.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .exceptions import DimensionError, SpectralPointError, StiffnessError

__all__ = ['TransferSample', 'FeedthroughEstimate', 'propagate', 'transfer',
           'trace_subspace', 'estimate_feedthrough', 'probe_base', 'admissible', 'step_count']

STEPS_PER_UNIT = 200
MAX_STEPS = 20000


@dataclass(frozen=True)
class TransferSample:
    s: complex
    G: np.ndarray


@dataclass(frozen=True)
class FeedthroughEstimate:
    """High-frequency limit of G along the real axis.

    `convergence_gap` is the change of the limit between the last two probe
    levels in the extrapolation column `column` (0 means raw samples);
    the estimate is usable only if `converged`.
    """

    D: np.ndarray
    s_values: np.ndarray
    convergence_gap: float
    converged: bool
    G_values: np.ndarray = None
    raw_gap: float = np.nan
    column: int = 0

    @property
    def is_zero(self):
        return bool(np.linalg.norm(self.D, 2) <= 1e-10)


def _K(sys, s, zeta):
    """Batched ``P1^-1 (s H(zeta)^-1 - P0)``."""
    Hinv = np.linalg.inv(sys.H(zeta))
    return np.linalg.solve(sys.P1, s * Hinv - sys.P0)


def _K_bound(sys, s):
    K = _K(sys, s, sys.H.grid)
    return float(np.max(np.linalg.norm(K, 2, axis=(-2, -1))))


def step_count(sys, s, per_unit=STEPS_PER_UNIT, max_steps=MAX_STEPS):
    """Number of RK4 steps over [0, 1] for frequency `s`, aligned with the H grid.

    Aims at ``h ||K|| <= 1 / per_unit`` but never more than `max_steps`;
    raises :class:`StiffnessError` if even ``h ||K|| <= 1`` cannot be met.
    """
    cells = sys.H.m - 1
    kb = _K_bound(sys, s)
    if kb > max_steps:
        raise StiffnessError(f'|s| too large: need {int(np.ceil(kb))} steps, max {max_steps}')
    target = min(max(int(np.ceil(per_unit * kb)), 4 * cells), max_steps)
    q = max(1, int(np.ceil(target / cells)))
    return q * cells


def _rk4_matrices(sys, s, n_steps):
    """One-step transition matrices of classical RK4 for ``e' = K e``."""
    h = 1.0 / n_steps
    z = np.linspace(0.0, 1.0, 2 * n_steps + 1)
    K = _K(sys, s, z)
    Ka, Km, Kb = K[0:-1:2], K[1::2], K[2::2]
    eye = np.eye(sys.n)
    k1 = Ka
    k2 = Km @ (eye + 0.5 * h * k1)
    k3 = Km @ (eye + 0.5 * h * k2)
    k4 = Kb @ (eye + h * k3)
    return eye + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def propagate(sys, s, n_steps=None):
    """Fundamental matrix ``E(s)`` with ``(Hx)(1) = E(s) (Hx)(0)``.

    Integrates the spatial ODE with classical RK4 on a grid aligned with the
    samples of H (so the piecewise-linear H is smooth inside every step).

    Raises
    ------
    StiffnessError
        If the entries overflow; use :func:`transfer` for large s.
    """
    if n_steps is None:
        n_steps = step_count(sys, s)
    T = _rk4_matrices(sys, s, n_steps)
    with np.errstate(over='ignore', invalid='ignore'):
        while T.shape[0] > 1:
            if T.shape[0] % 2:
                T = np.concatenate([T, np.eye(sys.n)[None]])
            T = T[1::2] @ T[0::2]
    E = T[0]
    if not np.all(np.isfinite(E)):
        raise StiffnessError(f'E(s) overflows at s={s}')
    return E


def _orth(Y):
    return np.linalg.qr(Y)[0]


def _const_subspace(sys, s):
    n = sys.n
    K = _K(sys, s, 0.0)
    kappa, V = np.linalg.eig(K)
    if np.linalg.cond(V) > 1e8:
        return None
    V = V / np.linalg.norm(V, axis=0)
    Y = np.empty((2 * n, n), dtype=complex)
    grow = kappa.real > 0
    Y[:n, grow] = V[:, grow]
    Y[n:, grow] = V[:, grow] * np.exp(-kappa[grow])
    Y[:n, ~grow] = V[:, ~grow] * np.exp(kappa[~grow])
    Y[n:, ~grow] = V[:, ~grow]
    return _orth(Y)


def _march(steps, n):
    Y1 = np.eye(n, dtype=complex)
    Y0 = np.eye(n, dtype=complex)
    for T in steps:
        Y1 = T @ Y1
        if np.abs(Y1).max() > 1e2:
            Y = _orth(np.vstack([Y1, Y0]))
            Y1, Y0 = Y[:n], Y[n:]
    return _orth(np.vstack([Y1, Y0]))


def trace_subspace(sys, s, n_steps=None):
    """Orthonormal 2n x n basis of ``{[e(1); e(0)]}`` over solutions at frequency s."""
    if sys.H.is_constant and n_steps is None:
        Y = _const_subspace(sys, s)
        if Y is not None:
            return Y
        K = _K(sys, s, 0.0)
        m = max(1, int(np.ceil(np.linalg.norm(K, 2))))
        T = sla.expm(K / m)
        return _march((T for _ in range(m)), sys.n)
    if n_steps is None:
        n_steps = step_count(sys, s)
    return _march(_rk4_matrices(sys, s, n_steps), sys.n)


def transfer(sys, s, s_min=1.0, n_steps=None):
    """Transfer function sample ``G(s) = WC [E; I] (WB [E; I])^-1``.

    Raises
    ------
    SpectralPointError
        If ``WB [E; I]`` is singular (s is a point of the spectrum).
    """
    if sys.k == 0:
        raise DimensionError('system has no output (k = 0)')
    if np.real(s) < s_min:
        raise ValueError(f'Re s must be >= s_min={s_min}, got {s}')
    Y = trace_subspace(sys, s, n_steps)
    A = sys.WB @ Y
    # Y is orthonormal, so ||WB|| is the natural scale of WB Y
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-12 * np.linalg.norm(sys.WB, 2):
        raise SpectralPointError(f'WB [E; I] is singular at s={s}')
    G = np.linalg.solve(A.T, (sys.WC @ Y).T).T
    return TransferSample(s, G)


def probe_base(sys, base=8.0):
    """Default first probe ``base * max(1, max |lambda|)``.

    Transients of G decay like ``exp(-s / max|lambda|)``, so the probe
    ladder is measured in units of the fastest characteristic speed.
    """
    speeds = np.linalg.eigvals(sys.P1[None] @ sys.H.samples)
    return base * max(1.0, float(np.abs(speeds).max()))


def estimate_feedthrough(sys, s0=None, levels=8, tol=1e-6, order=3):
    """Estimate ``D = lim G(s)`` for real ``s -> inf``.

    Probes ``s_j = s0 2^j`` (j = 0..levels; `s0` defaults to
    :func:`probe_base`) and builds a Richardson table in
    powers of ``1/s`` up to depth `order`. Column 0 holds the raw samples,
    whose last difference ``||G(s_max) - G(s_max / 2)||`` is `raw_gap`.
    Constant coefficients converge exponentially and are best served by
    column 0; varying coefficients converge like ``1/s`` and need the
    deeper columns. The column with the smallest last difference supplies
    D and `convergence_gap`.
    """
    if s0 is None:
        s0 = probe_base(sys)
    s_values = s0 * 2.0 ** np.arange(levels + 1)
    Gs = np.array([transfer(sys, s, s_min=min(1.0, s0)).G for s in s_values])
    L = min(order, levels - 1)
    col = Gs
    best_gap, D, best_col = np.inf, None, 0
    for i in range(L + 1):
        if i:
            f = 2.0 ** i
            col = (f * col[1:] - col[:-1]) / (f - 1.0)
        gap = float(np.linalg.norm(col[-1] - col[-2], 2))
        if i == 0:
            raw_gap = gap
        if gap < best_gap:
            best_gap, D, best_col = gap, col[-1], i
    return FeedthroughEstimate(D, s_values, best_gap, best_gap <= tol, Gs, raw_gap, best_col)


def admissible(F, D, tol=1e-10):
    """``I - D F`` invertible (smallest singular value above `tol`)."""
    F = np.atleast_2d(np.asarray(F, dtype=complex))
    D = np.atleast_2d(np.asarray(D, dtype=complex))
    if D.shape[1] != F.shape[0] or D.shape[0] != F.shape[1]:
        raise DimensionError(f'D {D.shape} and F {F.shape} are not conformable')
    sv = np.linalg.svd(np.eye(D.shape[0]) - D @ F, compute_uv=False)
    return bool(sv[-1] > tol)
