"""Representation kernels of the one-dimensional linear problem.

All functions broadcast over array arguments for ``b`` and ``y`` (and ``x``);
scalar inputs give Python floats.  ``s = y - x`` enters only through ``s**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, OutsideCone
from .model import ModelParams, kernel_constant, kernel_gamma, phi_ell
from .special import hyp2f1

__all__ = [
    "KernelPoint",
    "z_argument",
    "z_values",
    "kernel_E",
    "kernel_E_original",
    "kernel_E_transformed",
    "E_values",
    "kernel_K1",
    "kernel_K0",
    "dz_db",
    "dz_db_at_1",
]

_CONE_SLACK = 1e-12


@dataclass(frozen=True)
class KernelPoint:
    """Observation point ``(t, x)`` and source point ``(b, y)``."""

    t: float
    x: float
    b: float
    y: float

    def __post_init__(self):
        if not (1.0 <= self.b <= self.t):
            raise DomainError(f"need 1 <= b <= t, got b={self.b}, t={self.t}")


def _out(v):
    v = np.asarray(v, dtype=float)
    return float(v) if v.ndim == 0 else v


def _geometry(t, x, b, y, ell):
    """Return ``(z, P, phi_t, phi_b, s2)`` with the numerator in factored form."""
    t, x, b, y = (np.asarray(v, dtype=float) for v in (t, x, b, y))
    # The formulas extend smoothly to 0 < b < 1, which central differences at b = 1 use.
    if np.any(b <= 0.0) or np.any(b > t):
        raise DomainError("need 0 < b <= t")
    pt, pb = phi_ell(t, ell), phi_ell(b, ell)
    s = np.abs(y - x)
    gap = pt - pb - s
    if np.any(gap < -_CONE_SLACK * np.maximum(1.0, pt)):
        raise OutsideCone("source point lies outside the backward light cone")
    gap = np.maximum(gap, 0.0)
    num = gap * (pt - pb + s)
    P = (pt + pb - s) * (pt + pb + s)
    return num / P, P, pt, pb, s * s


def z_values(t, x, b, y, ell):
    return _out(_geometry(t, x, b, y, ell)[0])


def z_argument(pt: KernelPoint, ell: float) -> float:
    """Hypergeometric argument ``z`` in ``[0, 1)`` for a cone-interior point."""
    return z_values(pt.t, pt.x, pt.b, pt.y, ell)


def _exponents(params: ModelParams):
    sd = math.sqrt(params.require_admissible().delta)
    return sd, 0.5 * (1.0 - sd), 0.5 * (1.0 + sd)


def kernel_E_original(t, x, b, y, params: ModelParams):
    sd, lo, _ = _exponents(params)
    g, c = kernel_gamma(params), kernel_constant(params)
    z, P, *_ = _geometry(t, x, b, y, params.ell)
    mu = params.mu
    val = c * np.power(t, -mu / 2 + lo) * np.power(b, mu / 2 + lo) * P ** (-g) * hyp2f1(g, g, 1.0, z)
    return _out(val)


def _transformed_prefactor(params: ModelParams):
    g, c = kernel_gamma(params), kernel_constant(params)
    return (2.0 / (params.ell + 1.0)) ** (2.0 * (1.0 - 2.0 * g)) * c


def E_transformed_values(t, x, b, y, params: ModelParams):
    _, _, hi = _exponents(params)
    g = kernel_gamma(params)
    z, P, *_ = _geometry(t, x, b, y, params.ell)
    mu = params.mu
    val = (_transformed_prefactor(params) * np.power(t, -mu / 2 + hi) * np.power(b, mu / 2 + hi)
           * P ** (g - 1.0) * hyp2f1(1.0 - g, 1.0 - g, 1.0, z))
    return _out(val)


def E_values(t, x, b, y, params: ModelParams, form: str = "auto"):
    """Kernel ``E(t, x; b, y)``.

    Parameters
    ----------
    form : {"auto", "original", "transformed"}
        ``"auto"`` uses the transformed form when the kernel exponent
        ``gamma`` is negative and the original form otherwise.
    """
    if form == "auto":
        form = "transformed" if kernel_gamma(params.require_admissible()) < 0 else "original"
    if form == "original":
        return kernel_E_original(t, x, b, y, params)
    if form == "transformed":
        return E_transformed_values(t, x, b, y, params)
    raise ValueError(f"unknown kernel form {form!r}")


def kernel_E(pt: KernelPoint, params: ModelParams, form: str = "auto") -> float:
    return E_values(pt.t, pt.x, pt.b, pt.y, params, form)


def kernel_E_transformed(pt: KernelPoint, params: ModelParams) -> float:
    return E_transformed_values(pt.t, pt.x, pt.b, pt.y, params)


def kernel_K1(t, x, y, params: ModelParams, form: str = "auto"):
    """Kernel multiplying the initial velocity: ``E`` at source time ``b = 1``."""
    return E_values(t, x, 1.0, y, params, form)


def dz_db(t, x, b, y, ell):
    """Partial derivative of ``z`` in the source time ``b``.

    Equals ``-4 b**ell phi(t) (phi(t)**2 - phi(b)**2 - (y-x)**2) / P**2``,
    which is nonpositive inside the cone.
    """
    z, P, pt, pb, s2 = _geometry(t, x, b, y, ell)
    b = np.asarray(b, dtype=float)
    bracket = (pt - pb) * (pt + pb) - s2
    return _out(-4.0 * np.power(b, ell) * pt * bracket / (P * P))


def dz_db_at_1(t, x, y, ell):
    return dz_db(t, x, 1.0, y, ell)


def kernel_K0(t, x, y, params: ModelParams):
    """Kernel multiplying the initial displacement, ``mu E - dE/db`` at ``b = 1``.

    Evaluated in closed form from the transformed representation of ``E``.
    """
    sd, _, hi = _exponents(params)
    g = kernel_gamma(params)
    mu, ell = params.mu, params.ell
    z, P, pt, p1, _ = _geometry(t, x, 1.0, y, ell)
    dz = np.asarray(dz_db(t, x, 1.0, y, ell))
    a1 = 1.0 - g
    F = hyp2f1(a1, a1, 1.0, z)
    F2 = hyp2f1(a1 + 1.0, a1 + 1.0, 2.0, z)
    curly = ((mu - 1.0 - sd) / 2.0 + 2.0 * a1 * (pt + p1) / P) * F - a1 * a1 * dz * F2
    val = _transformed_prefactor(params) * np.power(t, -mu / 2 + hi) * P ** (g - 1.0) * curly
    return _out(val)
