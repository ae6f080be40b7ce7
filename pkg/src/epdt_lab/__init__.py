"""Numerical laboratory for the semilinear Euler-Poisson-Darboux-Tricomi equation.

``u_tt - t**(2 ell) Lap u + mu/t u_t + nu2/t**2 u = |u|**p`` for ``t >= 1``.

Submodules
----------
model       critical exponents, characteristic roots, light-cone geometry
special     Gauss hypergeometric function
kernel      kernels of the one-dimensional representation formula
linear1d    representation-formula solver and a leapfrog oracle
kato        Kato-type ODE blow-up lemma
radon       Radon transform of radial functions, averaging operator
semilinear  finite-difference solver, blow-up times, residual checks
iteration   sequences and lifespan bound of the iteration argument
cli         command-line front end
"""
from .errors import EPDTError, NumericFailure, ValidationError
from .model import ModelParams, spectral_constants, strauss_exponent, strauss_exponent_shifted

__all__ = [
    "EPDTError",
    "NumericFailure",
    "ValidationError",
    "ModelParams",
    "spectral_constants",
    "strauss_exponent",
    "strauss_exponent_shifted",
]
__version__ = "0.1.0"
