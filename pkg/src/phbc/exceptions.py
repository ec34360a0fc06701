"""Exception classes raised by :mod:`phbc`."""

import numpy as np


class PHBCError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(PHBCError, ValueError):
    """Array shapes are not conformable."""


class RankError(PHBCError, ValueError):
    """A matrix expected to have full row rank does not."""


class IllPosedError(PHBCError, ValueError):
    """The boundary condition does not determine the incoming characteristics."""


class CFLError(PHBCError, ValueError):
    """Time step exceeds the stability limit of the explicit scheme."""


class StiffnessError(PHBCError, ArithmeticError):
    """Spatial propagation would need more steps than allowed."""


class SpectralPointError(PHBCError, np.linalg.LinAlgError):
    """The boundary two-point problem is singular at the requested frequency."""


class SingularGramianError(PHBCError, np.linalg.LinAlgError):
    """Reachability Gramian is (numerically) singular."""
