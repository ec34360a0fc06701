"""Boundary matrix algebra.

Boundary conditions are given either on the traces ``[(Hx)(1); (Hx)(0)]``
(matrices written with a tilde in the literature, here ``*_tilde`` or plain
``WB``/``WC`` on a :class:`~phbc.systems.PHSystem`) or on boundary flow and
effort

    [f; e] = M [(Hx)(1); (Hx)(0)],    M = 1/sqrt(2) [[P1, -P1], [I, I]],

so that ``W_tilde = W M``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .exceptions import DimensionError, RankError
from .systems import RANK_RTOL, numerical_rank

__all__ = ['BoundaryPair', 'RightInversePair', 'LiftOperator',
           'flow_effort_matrix', 'to_flow_effort', 'from_flow_effort',
           'convert_boundary_matrices', 'to_trace_matrices', 'check_contraction',
           'check_impedance_energy_preserving', 'right_inverse_construct',
           'build_lift', 'SIGMA_TOL']

#: Tolerance for the energy-preserving block identity and the contraction test.
SIGMA_TOL = 1e-10


@dataclass(frozen=True)
class BoundaryPair:
    """Input/output boundary matrices in flow/effort coordinates."""

    WB_fe: np.ndarray
    WC_fe: np.ndarray

    @property
    def n(self):
        return self.WB_fe.shape[0]

    @property
    def k(self):
        return self.WC_fe.shape[0]


@dataclass(frozen=True)
class RightInversePair:
    """Invertible ``R1``, ``R0`` with ``W1 R1 + W0 R0 = I``."""

    R1: np.ndarray
    R0: np.ndarray
    residual: float
    sigma_min_R1: float
    sigma_min_R0: float


@dataclass(frozen=True)
class LiftOperator:
    """Right inverse of the input map: ``(B u)(zeta) = H(zeta)^-1 (S1 zeta + S2 (1 - zeta)) u``."""

    S1: np.ndarray
    S2: np.ndarray

    def apply(self, H, u, zeta):
        """Evaluate the lifted state at the points `zeta`; returns shape ``zeta.shape + (n,)``."""
        zeta = np.asarray(zeta, dtype=float)
        u = np.asarray(u, dtype=complex)
        e = (np.multiply.outer(zeta, self.S1 @ u) + np.multiply.outer(1 - zeta, self.S2 @ u))
        return np.linalg.solve(H(zeta), e[..., None])[..., 0]


def flow_effort_matrix(P1):
    """The invertible 2n x 2n map from traces to boundary flow/effort."""
    P1 = np.asarray(P1, dtype=complex)
    n = P1.shape[0]
    eye = np.eye(n)
    return np.block([[P1, -P1], [eye, eye]]) / np.sqrt(2)


def to_flow_effort(P1, trace1, trace0):
    """Boundary flow and effort from the traces ``(Hx)(1)`` and ``(Hx)(0)``."""
    P1 = np.asarray(P1, dtype=complex)
    trace1 = np.asarray(trace1, dtype=complex)
    trace0 = np.asarray(trace0, dtype=complex)
    if trace1.shape[-1] != P1.shape[0] or trace0.shape != trace1.shape:
        raise DimensionError('traces must be n-vectors matching P1')
    f = (trace1 - trace0) @ P1.T / np.sqrt(2)
    e = (trace1 + trace0) / np.sqrt(2)
    return f, e


def from_flow_effort(P1, f, e):
    """Inverse of :func:`to_flow_effort`; returns ``(trace1, trace0)``."""
    P1 = np.asarray(P1, dtype=complex)
    g = np.linalg.solve(P1, np.asarray(f, dtype=complex).T).T
    e = np.asarray(e, dtype=complex)
    return (g + e) / np.sqrt(2), (e - g) / np.sqrt(2)


def _check_width(W, n, name):
    W = np.atleast_2d(np.asarray(W, dtype=complex))
    if W.size == 0:
        return np.zeros((0, 2 * n), dtype=complex)
    if W.shape[1] != 2 * n:
        raise DimensionError(f'{name} must have {2 * n} columns, got {W.shape}')
    return W


def convert_boundary_matrices(P1, WB_tilde, WC_tilde=None):
    """Trace-coordinate boundary matrices to flow/effort coordinates.

    Returns the :class:`BoundaryPair` with ``W = W_tilde M^-1``.
    """
    P1 = np.asarray(P1, dtype=complex)
    n = P1.shape[0]
    sv = np.linalg.svd(P1, compute_uv=False)
    if sv[-1] <= RANK_RTOL * sv[0]:
        raise RankError('P1 is singular')
    WB_tilde = _check_width(WB_tilde, n, 'WB_tilde')
    WC_tilde = _check_width(np.zeros((0, 2 * n)) if WC_tilde is None else WC_tilde, n, 'WC_tilde')
    M = flow_effort_matrix(P1)
    # W M = W_tilde  <=>  M^T W^T = W_tilde^T
    conv = lambda Wt: np.linalg.solve(M.T, Wt.T).T if Wt.shape[0] else Wt.copy()
    return BoundaryPair(conv(WB_tilde), conv(WC_tilde))


def to_trace_matrices(P1, W_fe):
    """Flow/effort boundary matrix to trace coordinates, ``W_tilde = W M``."""
    return np.asarray(W_fe, dtype=complex) @ flow_effort_matrix(P1)


def check_contraction(P1, WB_tilde, tol=SIGMA_TOL):
    """Test ``v* P1 v - w* P1 w <= 0`` on the kernel of `WB_tilde`.

    Returns
    -------
    holds : bool
    max_violation : float
        Largest eigenvalue of the quadratic form restricted to the kernel.
    """
    P1 = np.asarray(P1, dtype=complex)
    n = P1.shape[0]
    WB_tilde = _check_width(WB_tilde, n, 'WB_tilde')
    K = sla.null_space(WB_tilde, rcond=RANK_RTOL)
    if K.shape[1] == 0:
        return True, -np.inf
    Z = np.zeros_like(P1)
    Q = K.conj().T @ np.block([[P1, Z], [Z, -P1]]) @ K
    lam = np.linalg.eigvalsh(0.5 * (Q + Q.conj().T))[-1]
    return bool(lam <= tol), float(lam)


def check_impedance_energy_preserving(bp, tol=SIGMA_TOL):
    """Block identity ``[WB; WC] Sigma [WB; WC]^* = Sigma`` with ``Sigma = [[0, I], [I, 0]]``.

    Returns ``(holds, residual, reason)``. Requires a square output (k = n).
    """
    n, k = bp.n, bp.k
    if k != n:
        return False, np.inf, f'output dimension k={k} differs from n={n}'
    eye = np.eye(n)
    Sig = np.block([[np.zeros((n, n)), eye], [eye, np.zeros((n, n))]])
    WB, WC = bp.WB_fe, bp.WC_fe
    res = max(np.linalg.norm(WB @ Sig @ WB.conj().T, 2),
              np.linalg.norm(WC @ Sig @ WC.conj().T, 2),
              np.linalg.norm(WB @ Sig @ WC.conj().T - eye, 2))
    return bool(res <= tol), float(res), ''


def _svd_split(A, rtol=RANK_RTOL):
    """SVD with numerical rank; returns (U, s, Vh, rank)."""
    U, s, Vh = np.linalg.svd(A)
    r = int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0
    return U, s, Vh, r


def right_inverse_construct(W1, W0):
    """Invertible ``R1``, ``R0`` with ``W1 R1 + W0 R0 = I``.

    Follows the row-reduction argument: find an invertible row operation G
    such that the last k rows of ``G W1`` vanish, the leading ``n - k`` rows
    of ``G W1`` and the trailing ``n - l`` rows of ``G W0`` have full row
    rank (``k = n - rank W1``, ``l = n - rank W0``). Right inverses of those
    blocks completed by kernel bases give invertible square ``R1``, ``R0``;
    ``M = G W1 R1 + G W0 R0`` is then invertible and the result is
    ``(R1 M^-1 G, R0 M^-1 G)``. Rank decisions use SVDs with threshold
    ``1e-10 * sigma_max``.

    Raises
    ------
    RankError
        If ``[W1 W0]`` does not have full row rank.
    """
    W1 = np.asarray(W1, dtype=complex)
    W0 = np.asarray(W0, dtype=complex)
    n = W1.shape[0]
    if W1.shape != (n, n) or W0.shape != (n, n):
        raise DimensionError('W1 and W0 must both be n x n')
    W = np.hstack([W1, W0])
    if numerical_rank(W) < n:
        raise RankError('[W1 W0] does not have full row rank')
    eye = np.eye(n)

    if np.linalg.norm(W0) <= RANK_RTOL * np.linalg.norm(W):
        R1, R0 = np.linalg.inv(W1), eye.astype(complex)
    else:
        U1, s1, Vh1, r1 = _svd_split(W1)
        k = n - r1
        _, _, Vh0, r0 = _svd_split(W0)
        ell = n - r0
        if k + ell > n:
            raise RankError('inconsistent numerical ranks of W1 and W0')

        # G = diag(P, I_k) U1^*: zeroes the last k rows of G W1. P reorders the
        # top block so its trailing rows complete the bottom block of G W0.
        B = (U1.conj().T @ W0)[:r1]
        C = (U1.conj().T @ W0)[r1:]
        if k:
            Qc = sla.orth(C.conj().T, rcond=RANK_RTOL)
            Bp = B - (B @ Qc) @ Qc.conj().T
        else:
            Bp = B
        P = np.linalg.svd(Bp)[0].conj().T[::-1] if r1 else np.zeros((0, 0))
        G = sla.block_diag(P, np.eye(k)) @ U1.conj().T
        GW1, GW0 = G @ W1, G @ W0

        top1 = GW1[:r1]
        R1 = np.hstack([np.linalg.pinv(top1), Vh1[r1:].conj().T])
        bot0 = GW0[ell:]
        R0 = np.hstack([Vh0[r0:].conj().T, np.linalg.pinv(bot0)])

        M = GW1 @ R1 + GW0 @ R0
        sm = np.linalg.svd(M, compute_uv=False)
        if sm[-1] <= RANK_RTOL * sm[0]:
            raise RankError('reduced matrix M is singular')
        Minv_G = np.linalg.solve(M, G)
        R1, R0 = R1 @ Minv_G, R0 @ Minv_G

    res = float(np.linalg.norm(W1 @ R1 + W0 @ R0 - eye, 2))
    smin = lambda A: float(np.linalg.svd(A, compute_uv=False)[-1])
    return RightInversePair(R1, R0, res, smin(R1), smin(R0))


def build_lift(WB_tilde, H=None):
    """Lift ``S1, S2`` from the Moore-Penrose right inverse of `WB_tilde`.

    ``[S1; S2] = WB^* (WB WB^*)^-1`` gives ``WB [S1; S2] = I``, hence the
    lifted state satisfies the boundary condition with data u. `H` is
    accepted for interface symmetry; the matrices do not depend on it.
    """
    WB = np.atleast_2d(np.asarray(WB_tilde, dtype=complex))
    n = WB.shape[0]
    if WB.shape[1] != 2 * n:
        raise DimensionError(f'WB_tilde must be n x 2n, got {WB.shape}')
    G = WB @ WB.conj().T
    sv = np.linalg.svd(G, compute_uv=False)
    if sv[-1] <= RANK_RTOL * sv[0]:
        raise RankError('WB_tilde WB_tilde^* is singular')
    S = np.linalg.solve(G.T, WB.conj()).T
    return LiftOperator(S[:n], S[n:])
