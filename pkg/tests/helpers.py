"""Random data generators shared by the test modules."""

import numpy as np
from scipy.stats import unitary_group

from phbc import PHSystem


def cmat(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def unitary(rng, n):
    if n == 1:
        return np.exp(2j * np.pi * rng.random()) * np.eye(1)
    return unitary_group.rvs(n, random_state=rng)


def hermitian(rng, n, lo=0.5, hi=2.0, signed=False):
    """Hermitian matrix with eigenvalue magnitudes in [lo, hi]."""
    U = unitary(rng, n)
    lam = rng.uniform(lo, hi, n)
    if signed:
        lam = lam * rng.choice([-1.0, 1.0], n)
    return (U * lam) @ U.conj().T


def skew(rng, n):
    C = cmat(rng, n, n)
    return 0.5 * (C - C.conj().T)


def row_orthonormal(rng, rows, cols):
    return np.linalg.qr(cmat(rng, cols, rows))[0].conj().T


def rank_deficient_pair(rng, n, r1):
    """``W1`` of rank `r1` and ``W0`` such that ``[W1 W0]`` has full row rank."""
    W1 = cmat(rng, n, r1) @ cmat(rng, r1, n) if r1 else np.zeros((n, n), complex)
    W0 = cmat(rng, n, n)
    return W1, W0


def random_system(rng, n, with_p0=True, WC=None):
    P0 = skew(rng, n) if with_p0 else None
    return PHSystem(P1=hermitian(rng, n, signed=True), P0=P0, H=hermitian(rng, n),
                    WB=row_orthonormal(rng, n, 2 * n), WC=WC)
