"""Characteristic decomposition of ``P1 H(zeta)``.

``P1 H`` is similar to the Hermitian matrix ``H^{1/2} P1 H^{1/2}``, so its
eigenvalues (the characteristic speeds) are real and it is diagonalizable.
With the convention ``dz/dt = lambda dz/dzeta``, a positive speed carries
information towards zeta = 0: it *enters* the domain at zeta = 1. Negative
speeds enter at zeta = 0.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .exceptions import RankError
from .systems import MatrixField

__all__ = ['Diagonalization', 'GenerationReport', 'diagonalize_field',
           'traversal_times', 'default_horizon', 'check_generation',
           'incoming_bases', 'hermitian_sqrt', 'SPEED_TOL']

#: Smallest admissible |characteristic speed|.
SPEED_TOL = 1e-10


@dataclass(frozen=True)
class Diagonalization:
    """``P1 H(zeta_j) = Sinv_j diag(Delta_j) S_j`` on the sample grid of H.

    Speeds in each row of `Delta` are sorted in descending order, so the
    first `n_pos` columns of ``Sinv`` are the positive-speed directions.
    """

    S: MatrixField
    Sinv: MatrixField
    Delta: np.ndarray
    n_pos: int

    @property
    def grid(self):
        return self.S.grid

    @property
    def max_speed(self):
        return float(np.abs(self.Delta).max())


@dataclass(frozen=True)
class GenerationReport:
    holds: bool
    sigma_min: float
    heuristic: bool
    T_in: np.ndarray
    n_pos: int


def hermitian_sqrt(H):
    """Square root and inverse square root of a Hermitian positive matrix."""
    w, V = np.linalg.eigh(0.5 * (H + H.conj().T))
    if w[0] <= 0:
        raise ValueError('matrix is not positive definite')
    r = np.sqrt(w)
    return (V * r) @ V.conj().T, (V / r) @ V.conj().T


def _sym_eig(P1, H):
    """Descending speeds and an orthonormal eigenbasis Q of ``H^1/2 P1 H^1/2``."""
    Hh, Hih = hermitian_sqrt(H)
    C = Hh @ P1 @ Hh
    lam, Q = np.linalg.eigh(0.5 * (C + C.conj().T))
    return lam[::-1], Q[:, ::-1], Hh, Hih


def _align(Q, Qprev, lam, scale):
    """Rotate eigenvector clusters of Q onto Qprev (orthogonal Procrustes)."""
    Q = Q.copy()
    n = len(lam)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and abs(lam[stop] - lam[stop - 1]) <= 1e-8 * scale:
            stop += 1
        blk = slice(start, stop)
        U, _, Vh = np.linalg.svd(Q[:, blk].conj().T @ Qprev[:, blk])
        Q[:, blk] = Q[:, blk] @ (U @ Vh)
        start = stop
    return Q


def diagonalize_field(P1, H):
    """Diagonalize ``P1 H(zeta_j)`` at every sample of `H`.

    Eigenvectors are continued along zeta by aligning each cluster with the
    previous grid point, so that ``S`` and ``Sinv`` vary continuously.

    Raises
    ------
    RankError
        If a speed is below :data:`SPEED_TOL` in magnitude or the sign
        pattern of the speeds changes along the domain.
    """
    P1 = np.asarray(P1, dtype=complex)
    n = P1.shape[0]
    S, Sinv, Delta = [], [], []
    Qprev = None
    for Hj in H.samples:
        lam, Q, Hh, Hih = _sym_eig(P1, Hj)
        if Qprev is not None:
            Q = _align(Q, Qprev, lam, max(1.0, np.abs(lam).max()))
        Qprev = Q
        Sinv.append(Hih @ Q)
        S.append(Q.conj().T @ Hh)
        Delta.append(lam)
    Delta = np.array(Delta)
    if np.abs(Delta).min() < SPEED_TOL:
        raise RankError('P1 H has a (numerically) zero characteristic speed')
    npos = (Delta > 0).sum(axis=1)
    if np.any(npos != npos[0]):
        raise RankError('sign pattern of the characteristic speeds changes along zeta')
    return Diagonalization(MatrixField(np.array(S)), MatrixField(np.array(Sinv)),
                           Delta, int(npos[0]))


def traversal_times(diag):
    """Travel time ``int_0^1 dzeta / |lambda_i(zeta)|`` of each characteristic, ascending."""
    inv = 1.0 / np.abs(diag.Delta)
    return np.sort(trapezoid(inv, diag.grid, axis=0))


def default_horizon(diag, factor=2.5):
    """Control horizon ``factor * max traversal time``."""
    return factor * float(traversal_times(diag)[-1])


def incoming_bases(P1, H1, H0):
    """Orthonormal bases of incoming trace directions in ``Hx`` coordinates.

    Returns ``(U1, V0)``: ``U1`` (n x n_pos) spans the directions of
    ``(Hx)(1)`` carried by positive speeds, ``V0`` (n x n_neg) those of
    ``(Hx)(0)`` carried by negative speeds. A trace direction of speed
    lambda is an eigenvector of ``H P1`` (i.e. ``H r`` for ``P1 H r = lambda r``).
    """
    P1 = np.asarray(P1, dtype=complex)
    lam1, Q1, Hh1, _ = _sym_eig(P1, H1)
    lam0, Q0, Hh0, _ = _sym_eig(P1, H0)
    U1 = np.linalg.qr(Hh1 @ Q1[:, lam1 > 0])[0] if np.any(lam1 > 0) else Q1[:, :0]
    V0 = np.linalg.qr(Hh0 @ Q0[:, lam0 < 0])[0] if np.any(lam0 < 0) else Q0[:, :0]
    return U1, V0


def check_generation(sys, diag=None, tol=1e-10):
    """Incoming-characteristic test for well-posedness.

    Forms ``T_in = WB blockdiag(U1, V0)`` from the incoming trace directions
    at both ends (see :func:`incoming_bases`); the boundary condition fixes
    the incoming characteristics iff ``T_in`` is invertible. The verdict is
    ``sigma_min(T_in) > tol * ||WB||``. For non-constant H the test uses the
    endpoint values and is flagged as heuristic.
    """
    n = sys.n
    H1, H0 = sys.H.samples[-1], sys.H.samples[0]
    if diag is None:
        U1, V0 = incoming_bases(sys.P1, H1, H0)
    else:
        p = diag.n_pos
        U1 = np.linalg.qr(H1 @ diag.Sinv.samples[-1][:, :p])[0]
        V0 = np.linalg.qr(H0 @ diag.Sinv.samples[0][:, p:])[0]
    if U1.shape[1] + V0.shape[1] != n:
        raise RankError('P1 H has a zero characteristic speed at the boundary')
    T_in = np.hstack([sys.WB[:, :n] @ U1, sys.WB[:, n:] @ V0])
    sv = np.linalg.svd(T_in, compute_uv=False)
    scale = np.linalg.norm(sys.WB, 2)
    return GenerationReport(bool(sv[-1] > tol * scale), float(sv[-1]),
                            not sys.H.is_constant, T_in, U1.shape[1])
