"""Data model for linear port-Hamiltonian systems on the interval [0, 1].

The PDE is

    dx/dt = (P1 d/dzeta + P0) (H(zeta) x),
    u(t)  = WB [(Hx)(1, t); (Hx)(0, t)],
    y(t)  = WC [(Hx)(1, t); (Hx)(0, t)],

with P1 Hermitian invertible, P0 skew-adjoint, H(zeta) uniformly positive
and WB of full row rank. All matrices are stored as complex arrays.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError

__all__ = ['MatrixField', 'PHSystem', 'StateGrid', 'Check', 'ValidationReport',
           'validate_system', 'energy_norm', 'cell_centers', 'HERMITIAN_TOL',
           'RANK_RTOL', 'numerical_rank']

#: Absolute tolerance on ||P1 - P1*|| and ||P0 + P0*|| (spectral norm).
HERMITIAN_TOL = 1e-10
#: Relative singular value threshold for rank decisions.
RANK_RTOL = 1e-10


def _as_matrix(a, name, shape=None):
    a = np.array(a, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f'{name} must be a 2D array, got shape {a.shape}')
    if shape is not None and a.shape != shape:
        raise DimensionError(f'{name} must have shape {shape}, got {a.shape}')
    a.setflags(write=False)
    return a


def numerical_rank(a, rtol=RANK_RTOL):
    """Rank of `a` using the singular value threshold ``rtol * sigma_max``."""
    a = np.asarray(a)
    if a.size == 0:
        return 0
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def cell_centers(N):
    """Centers of `N` uniform cells on (0, 1)."""
    return (np.arange(N) + 0.5) / N


class MatrixField:
    """Matrix-valued function on [0, 1] given by uniform samples.

    Samples sit at ``zeta_j = j / (m - 1)``; between samples the field is
    evaluated by piecewise-linear interpolation.

    Parameters
    ----------
    samples : array_like, shape (m, n, n)
        Matrix values at the grid points. ``m >= 2``.
    """

    def __init__(self, samples):
        samples = np.array(samples, dtype=complex)
        if samples.ndim != 3 or samples.shape[1] != samples.shape[2]:
            raise DimensionError(f'samples must have shape (m, n, n), got {samples.shape}')
        if samples.shape[0] < 2:
            raise DimensionError('a MatrixField needs at least two samples')
        if not np.all(np.isfinite(samples)):
            raise ValueError('MatrixField samples must be finite')
        samples.setflags(write=False)
        self._samples = samples

    @classmethod
    def constant(cls, matrix, m=2):
        matrix = np.asarray(matrix, dtype=complex)
        return cls(np.broadcast_to(matrix, (m,) + matrix.shape))

    @classmethod
    def from_function(cls, func, m):
        """Sample ``func(zeta) -> (n, n)`` at `m` uniform points."""
        grid = np.linspace(0.0, 1.0, m)
        return cls(np.stack([np.asarray(func(z), dtype=complex) for z in grid]))

    @property
    def samples(self):
        return self._samples

    @property
    def m(self):
        return self._samples.shape[0]

    @property
    def n(self):
        return self._samples.shape[1]

    @property
    def grid(self):
        return np.linspace(0.0, 1.0, self.m)

    @property
    def is_constant(self):
        return bool(np.all(self._samples == self._samples[0]))

    def __call__(self, zeta):
        """Evaluate at `zeta` (scalar or array); result has shape ``zeta.shape + (n, n)``."""
        zeta = np.asarray(zeta, dtype=float)
        if np.any((zeta < 0) | (zeta > 1)):
            raise ValueError('zeta must lie in [0, 1]')
        pos = zeta * (self.m - 1)
        idx = np.clip(np.floor(pos).astype(int), 0, self.m - 2)
        w = (pos - idx)[..., None, None]
        return (1 - w) * self._samples[idx] + w * self._samples[idx + 1]

    def map(self, func):
        """Apply `func` samplewise and return a new field."""
        return MatrixField(np.stack([func(s) for s in self._samples]))

    def __repr__(self):
        return f'MatrixField(m={self.m}, n={self.n})'


@dataclass(frozen=True)
class PHSystem:
    """Port-Hamiltonian boundary control (and observation) system.

    `WB` and `WC` act on the boundary traces ``[(Hx)(1); (Hx)(0)]``. `WC` may
    have zero rows (no output). Standing assumptions are *not* enforced here;
    use :func:`validate_system`.
    """

    P1: np.ndarray
    P0: np.ndarray = None
    H: MatrixField = None
    WB: np.ndarray = None
    WC: np.ndarray = None

    def __post_init__(self):
        P1 = _as_matrix(self.P1, 'P1')
        n = P1.shape[0]
        if P1.shape != (n, n):
            raise DimensionError(f'P1 must be square, got {P1.shape}')
        P0 = _as_matrix(np.zeros((n, n)) if self.P0 is None else self.P0, 'P0', (n, n))
        if self.H is None or self.WB is None:
            raise DimensionError('H and WB are required')
        H = self.H if isinstance(self.H, MatrixField) else MatrixField.constant(self.H)
        if H.n != n:
            raise DimensionError(f'H must be {n}x{n}, got {H.n}x{H.n}')
        WB = _as_matrix(self.WB, 'WB', (n, 2 * n))
        WC = np.zeros((0, 2 * n)) if self.WC is None else np.array(self.WC, dtype=complex)
        WC = _as_matrix(WC.reshape(0, 2 * n) if WC.size == 0 else np.atleast_2d(WC), 'WC')
        if WC.shape[1] != 2 * n or WC.shape[0] > n:
            raise DimensionError(f'WC must be k x {2 * n} with k <= {n}, got {WC.shape}')
        object.__setattr__(self, 'P1', P1)
        object.__setattr__(self, 'P0', P0)
        object.__setattr__(self, 'H', H)
        object.__setattr__(self, 'WB', WB)
        object.__setattr__(self, 'WC', WC)

    @property
    def n(self):
        return self.P1.shape[0]

    @property
    def k(self):
        return self.WC.shape[0]

    def replace(self, **changes):
        """Copy with some fields replaced."""
        fields = dict(P1=self.P1, P0=self.P0, H=self.H, WB=self.WB, WC=self.WC)
        fields.update(changes)
        return PHSystem(**fields)


@dataclass(frozen=True)
class StateGrid:
    """Cell-average representation of a state in L2((0,1); C^n)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2:
            raise DimensionError(f'state values must have shape (N, n), got {v.shape}')
        if not np.all(np.isfinite(v)):
            raise ValueError('state values must be finite')
        v.setflags(write=False)
        object.__setattr__(self, 'values', v)

    @classmethod
    def from_function(cls, func, N):
        """Sample ``func(zeta) -> n-vector`` at the `N` cell centers."""
        z = cell_centers(N)
        return cls(np.array([np.atleast_1d(func(t)) for t in z]))

    @classmethod
    def zeros(cls, N, n):
        return cls(np.zeros((N, n)))

    @property
    def N(self):
        return self.values.shape[0]

    @property
    def n(self):
        return self.values.shape[1]

    @property
    def zeta(self):
        return cell_centers(self.N)


def _state_values(x):
    return x.values if isinstance(x, StateGrid) else np.asarray(x, dtype=complex)


def energy_norm(sys, x):
    """Discrete energy norm ``sqrt(sum_j x_j^* H(zeta_j) x_j dzeta)``.

    H is evaluated at the cell centers of `x`.
    """
    v = _state_values(x)
    if v.ndim == 1:
        v = v[:, None]
    if v.ndim != 2 or v.shape[1] != sys.n:
        raise DimensionError(f'state must have shape (N, {sys.n}), got {v.shape}')
    N = v.shape[0]
    Hc = sys.H(cell_centers(N))
    q = np.einsum('ji,jik,jk->', v.conj(), Hc, v).real / N
    return float(np.sqrt(max(q, 0.0)))


@dataclass
class Check:
    name: str
    passed: bool
    margin: float
    detail: str = ''


@dataclass
class ValidationReport:
    """Outcome of :func:`validate_system`, one :class:`Check` per assumption."""

    checks: list = field(default_factory=list)
    m0: float = np.nan
    M0: float = np.nan

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def as_dict(self):
        return {'ok': self.ok, 'm0': self.m0, 'M0': self.M0,
                'checks': [dict(name=c.name, passed=c.passed, margin=c.margin,
                                detail=c.detail) for c in self.checks]}

    def __str__(self):
        lines = []
        for c in self.checks:
            flag = 'PASS' if c.passed else 'FAIL'
            lines.append(f'[{flag}] {c.name:<24s} margin={c.margin:.3e} {c.detail}')
        return '\n'.join(lines)


def validate_system(sys):
    """Check the standing assumptions and report measured margins.

    Never raises on a failed assumption; the caller inspects the report.
    """
    rep = ValidationReport()
    n = sys.n
    add = rep.checks.append

    herm = np.linalg.norm(sys.P1 - sys.P1.conj().T, 2)
    add(Check('P1 hermitian', herm <= HERMITIAN_TOL, herm, '||P1 - P1*||'))
    sv = np.linalg.svd(sys.P1, compute_uv=False)
    add(Check('P1 invertible', sv[-1] > RANK_RTOL * sv[0], sv[-1], 'sigma_min(P1)'))

    skew = np.linalg.norm(sys.P0 + sys.P0.conj().T, 2)
    add(Check('P0 skew-adjoint', skew <= HERMITIAN_TOL, skew, '||P0 + P0*||'))

    Hs = sys.H.samples
    hherm = max(np.linalg.norm(h - h.conj().T, 2) for h in Hs)
    add(Check('H hermitian', hherm <= HERMITIAN_TOL, hherm, 'max_j ||H_j - H_j*||'))
    eigs = np.linalg.eigvalsh(0.5 * (Hs + Hs.conj().transpose(0, 2, 1)))
    rep.m0, rep.M0 = float(eigs.min()), float(eigs.max())
    add(Check('H positive', rep.m0 > 0, rep.m0,
              f'min eig (m0), max eig M0={rep.M0:.3e}, m={sys.H.m}'))

    svb = np.linalg.svd(sys.WB, compute_uv=False)
    rb = numerical_rank(sys.WB)
    add(Check('WB full row rank', rb == n, svb[-1] / svb[0] if svb[0] else 0.0,
              f'rank {rb} of {n}'))
    if sys.k:
        stacked = np.vstack([sys.WB, sys.WC])
        svs = np.linalg.svd(stacked, compute_uv=False)
        rs = numerical_rank(stacked)
        add(Check('[WB; WC] full row rank', rs == n + sys.k,
                  svs[-1] / svs[0] if svs[0] else 0.0, f'rank {rs} of {n + sys.k}'))
    return rep
