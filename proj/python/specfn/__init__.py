"""Spectral functions of symmetric matrices.

F(X) = f(eigenvalues(X)) for a permutation-symmetric f, with exact
directional derivatives of order n computed through the operator
representation on the spectral data, stable across repeated eigenvalues.
"""

from ._core import (
    DomainError,
    InputError,
    NumericalError,
    check_symmetry,
    dirderiv,
    eigen_derivative,
    eval_f,
    fd_dirderiv,
    gradient,
    hessian_apply,
    lift,
    power_sums,
    radial_dirderiv,
    run_suite,
    spectrum,
    __version__,
)

__all__ = [
    "DomainError",
    "InputError",
    "NumericalError",
    "check_symmetry",
    "dirderiv",
    "eigen_derivative",
    "eval_f",
    "fd_dirderiv",
    "gradient",
    "hessian_apply",
    "lift",
    "power_sums",
    "radial_dirderiv",
    "run_suite",
    "spectrum",
    "__version__",
]
