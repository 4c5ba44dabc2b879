"""Exact-arithmetic tropical intersection theory on fans and polyhedral complexes."""

from .errors import (
    CoarseningError,
    ContinuityViolation,
    DimensionMismatch,
    FanInvalid,
    NonIntegral,
    NotBalanced,
    SupportMismatch,
    TropintError,
)
from .lattice import (
    INFINITE,
    QuotientLattice,
    SnfDecomposition,
    integer_kernel,
    lattice_index,
    primitive,
    smith_normal_form,
)

__version__ = "0.1.0"
