"""Gauss hypergeometric function 2F1(a, b; c; z) on 0 <= z < 1.

The power series is summed directly with Kahan compensation.  When
``a + b > c`` and ``z > 0.5`` the Euler transformation

    F(a, b; c; z) = (1 - z)**(c - a - b) F(c - a, c - b; c; z)

is applied first, so the series that is actually summed always has
``c - a - b >= 0`` near ``z = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidC, NearBoundary, Nonconvergence

__all__ = [
    "HypergeometricQuery",
    "gauss_2f1",
    "hyp2f1",
    "hyp2f1_series",
    "euler_transform_identity_check",
    "gauss_2f1_derivative",
    "BOUNDARY_GAP",
    "MAX_TERMS",
]

BOUNDARY_GAP = 1e-12
MAX_TERMS = 10**6


@dataclass(frozen=True)
class HypergeometricQuery:
    a: float
    b: float
    c: float
    z: float
    rel_tol: float = 1e-13


def _check(c, z):
    if c <= 0 and float(c).is_integer():
        raise InvalidC(f"c = {c} is a nonpositive integer")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(z >= 1) or np.any(~np.isfinite(z)):
        raise DomainError("z must lie in [0, 1)")
    if np.any(z > 1.0 - BOUNDARY_GAP):
        raise NearBoundary(f"z within {BOUNDARY_GAP:g} of 1")
    return z


def _series_scalar(a, b, c, z, rel_tol, max_terms):
    total, comp, term = 1.0, 0.0, 1.0
    if z == 0.0:
        return 1.0
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
        if term == 0.0:
            return total
        k1 = k + 1
        rho = max(abs((a + k1) * (b + k1) / ((c + k1) * (k1 + 1.0))) * z, z)
        if rho < 1.0 and abs(term) * rho / (1.0 - rho) <= rel_tol * abs(total):
            return total
    raise Nonconvergence(f"2F1({a}, {b}; {c}; {z!r}) not converged after {max_terms} terms")


def hyp2f1_series(a, b, c, z, rel_tol=1e-13, max_terms=MAX_TERMS):
    """Direct power series, vectorized over ``z``; no transformation applied."""
    z = _check(c, z)
    if z.size == 1:
        v = _series_scalar(a, b, c, float(z.reshape(-1)[0]), rel_tol, max_terms)
        return v if z.ndim == 0 else np.full(z.shape, v)
    out = np.ones(z.shape)
    flat = out.reshape(-1)
    idx = np.flatnonzero(z.reshape(-1) > 0)
    zi = z.reshape(-1)[idx]
    total = np.ones_like(zi)
    comp = np.zeros_like(zi)
    term = np.ones_like(zi)
    k = 0
    while idx.size:
        if idx.size <= 4:
            # A few slow stragglers near z = 1: the scalar loop has far less overhead.
            for j, zj in zip(idx, zi):
                flat[j] = _series_scalar(a, b, c, float(zj), rel_tol, max_terms)
            break
        if k >= max_terms:
            raise Nonconvergence(
                f"2F1({a}, {b}; {c}; z) not converged after {max_terms} terms "
                f"(max z = {zi.max():.17g})"
            )
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * zi
        # Kahan step
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
        k += 1
        nxt = abs((a + k) * (b + k) / ((c + k) * (k + 1.0)))
        rho = np.maximum(nxt * zi, zi)
        done = (term == 0.0) | (np.abs(term) * rho <= rel_tol * np.abs(total) * (1.0 - rho))
        if done.any():
            flat[idx[done]] = total[done]
            keep = ~done
            idx, zi, total, comp, term = idx[keep], zi[keep], total[keep], comp[keep], term[keep]
    return out


def hyp2f1(a, b, c, z, rel_tol=1e-13, max_terms=MAX_TERMS):
    """2F1 with the Euler switch for ``a + b > c`` and ``z > 0.5``; vectorized over ``z``."""
    z = _check(c, z)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    if a + b - c > 0:
        far = z > 0.5
    else:
        far = np.zeros(z.shape, dtype=bool)
    if np.any(~far):
        out[~far] = hyp2f1_series(a, b, c, z[~far], rel_tol, max_terms)
    if np.any(far):
        zf = z[far]
        out[far] = (1.0 - zf) ** (c - a - b) * hyp2f1_series(c - a, c - b, c, zf, rel_tol, max_terms)
    return float(out[0]) if scalar else out


def gauss_2f1(q: HypergeometricQuery) -> float:
    return hyp2f1(q.a, q.b, q.c, q.z, rel_tol=q.rel_tol)


def euler_transform_identity_check(a, b, c, z, rel_tol=1e-14):
    """Both sides of the Euler transformation, each by the plain series."""
    lhs = hyp2f1_series(a, b, c, z, rel_tol)
    rhs = (1.0 - np.asarray(z, dtype=float)) ** (c - a - b) * hyp2f1_series(c - a, c - b, c, z, rel_tol)
    return lhs, (float(rhs) if np.ndim(rhs) == 0 else rhs)


def gauss_2f1_derivative(a, b, c, z, rel_tol=1e-13):
    """d/dz 2F1(a, b; c; z) = (a b / c) 2F1(a+1, b+1; c+1; z)."""
    if a == 0 or b == 0:
        _check(c, z)
        return 0.0 if np.ndim(z) == 0 else np.zeros(np.shape(z))
    return (a * b / c) * hyp2f1(a + 1, b + 1, c + 1, z, rel_tol)
