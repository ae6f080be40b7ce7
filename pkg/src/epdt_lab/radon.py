"""Radon transform of radial functions and the radial averaging operator.

For a radial ``f(x) = f0(|x|)`` on ``R^n`` the hyperplane integral over
``{x . xi = rho}`` is independent of the direction ``xi`` and equals

    omega * int_{|rho|}^inf f0(r) (r**2 - rho**2)**((n-3)/2) r dr,

with ``omega = 2 pi**((n-1)/2) / Gamma((n-1)/2)`` the area of the unit
sphere in ``R^(n-1)``.  The substitution ``r = |rho| + s**2`` removes the
endpoint singularity that appears for ``n = 2``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as sp_integrate

from .errors import DegenerateUpperLimit, DimensionTooSmall, ValidationError
from .model import ModelParams, amplitude
from .quadrature import integrate

__all__ = [
    "RadialFunction",
    "sphere_constant",
    "radon_radial",
    "radon_hyperplane_oracle",
    "radial_laplacian",
    "radon_laplacian_identity_check",
    "averaging_operator",
    "averaging_matrix",
    "empirical_operator_norm",
    "box_bank",
    "write_profile_csv",
]


@dataclass(frozen=True)
class RadialFunction:
    """Radial profile ``f0(r)`` on ``r >= 0`` vanishing for ``r > support_radius``.

    ``profile`` may be any vectorized callable, including a
    :class:`~epdt_lab.linear1d.GridFunction` sampled on ``[0, r_max]``.
    """

    profile: Callable
    support_radius: float
    n: int

    def __post_init__(self):
        if not self.support_radius >= 0:
            raise ValidationError("support_radius must be nonnegative")
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError("n must be a positive integer")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= self.support_radius, self.profile(np.minimum(r, self.support_radius)), 0.0)


def sphere_constant(n: int) -> float:
    """Area of the unit sphere in ``R^(n-1)`` (2 for ``n = 2``)."""
    if n < 2:
        raise DimensionTooSmall(f"need n >= 2, got {n}")
    return 2.0 * math.pi ** ((n - 1) / 2) / math.gamma((n - 1) / 2)


def radon_radial(f: RadialFunction, rho: float, tol: float = 1e-11) -> float:
    """Hyperplane integral of ``f`` at signed distance ``rho`` from the origin."""
    n = f.n
    omega = sphere_constant(n)
    rho = abs(float(rho))
    Rs = f.support_radius
    if rho >= Rs:
        return 0.0
    e = (n - 3) / 2.0

    def g(s):
        r = rho + s * s
        # 2 s (r**2 - rho**2)**e r with r**2 - rho**2 = s**2 (2 rho + s**2)
        return 2.0 * s ** (n - 2) * (2.0 * rho + s * s) ** e * r * f(r)

    return omega * integrate(g, 0.0, math.sqrt(Rs - rho), abs_tol=tol).value


def radon_hyperplane_oracle(f: RadialFunction, rho: float, tol: float = 1e-10) -> float:
    """Brute-force slice integral in Cartesian coordinates on the hyperplane.

    Integrates ``f(sqrt(rho**2 + |w|**2))`` over ``w`` in the ``(n-1)``-ball of
    radius ``sqrt(R**2 - rho**2)`` with scipy's nested adaptive quadrature;
    supports ``n`` in {2, 3, 4}.
    """
    n = f.n
    rho = abs(float(rho))
    Rs = f.support_radius
    if rho >= Rs:
        return 0.0
    a = math.sqrt(Rs * Rs - rho * rho)
    ev = lambda *w: float(f(math.sqrt(rho * rho + sum(c * c for c in w))))
    opts = dict(epsabs=tol, epsrel=tol)
    if n == 2:
        return sp_integrate.quad(ev, -a, a, **opts)[0]
    if n == 3:
        return sp_integrate.dblquad(lambda y, x: ev(x, y), -a, a,
                                    lambda x: -math.sqrt(max(a * a - x * x, 0.0)),
                                    lambda x: math.sqrt(max(a * a - x * x, 0.0)), **opts)[0]
    if n == 4:
        def zb(x, y):
            return math.sqrt(max(a * a - x * x - y * y, 0.0))
        return sp_integrate.tplquad(lambda z, y, x: ev(x, y, z), -a, a,
                                    lambda x: -math.sqrt(max(a * a - x * x, 0.0)),
                                    lambda x: math.sqrt(max(a * a - x * x, 0.0)),
                                    lambda x, y: -zb(x, y), zb, **opts)[0]
    raise DimensionTooSmall(f"oracle supports n in (2, 3, 4), got {n}")


def radial_laplacian(f: RadialFunction, h: float = 1e-4) -> RadialFunction:
    """``f0'' + (n-1)/r f0'`` by central differences (``n f0''`` at the origin)."""
    n = f.n

    def lap(r):
        r = np.asarray(r, dtype=float)
        ra = np.abs(r)
        fp = (f(ra + h) - f(np.abs(ra - h))) / (2 * h)
        fpp = (f(ra + h) - 2 * f(ra) + f(np.abs(ra - h))) / (h * h)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(ra > 10 * h, fpp + (n - 1) * fp / np.where(ra > 0, ra, 1.0), n * fpp)

    return RadialFunction(lap, f.support_radius + h, n)


def radon_laplacian_identity_check(f: RadialFunction, rho_grid: Sequence[float], h: float = 1e-3) -> float:
    """Max over ``rho_grid`` of ``|R[lap f] - d2/drho2 R[f]|`` (second difference, step ``h``)."""
    if f.n < 2:
        raise DimensionTooSmall(f"need n >= 2, got {f.n}")
    lap = radial_laplacian(f)
    worst = 0.0
    for rho in rho_grid:
        d2 = (radon_radial(f, rho + h) - 2 * radon_radial(f, rho) + radon_radial(f, rho - h)) / (h * h)
        # The differenced Laplacian carries ~1e-8 roundoff, so its integral cannot go tighter.
        worst = max(worst, abs(radon_radial(lap, rho, tol=1e-8) - d2))
    return worst


def _upper(params: ModelParams, t: float) -> float:
    return amplitude(t, params.ell) + params.R


def averaging_operator(h: Callable, t: float, tau: float, params: ModelParams, tol: float = 1e-11) -> float:
    """Weighted average of ``h`` over ``[tau, M]`` with ``M = A(t) + R``."""
    n = params.n
    if n < 2:
        raise DimensionTooSmall(f"need n >= 2, got {n}")
    M = _upper(params, t)
    if tau >= M:
        raise DegenerateUpperLimit(f"tau = {tau} >= A(t) + R = {M}")
    # r = tau + s**2: |r - tau|**((n-3)/2) dr = 2 s**(n-2) ds
    g = lambda s: 2.0 * s ** (n - 2) * np.asarray(h(tau + s * s), dtype=float)
    val = integrate(g, 0.0, math.sqrt(M - tau), abs_tol=tol).value
    return val * (M - tau) ** (-(n - 1) / 2.0)


def averaging_matrix(edges: np.ndarray, taus: np.ndarray, n: int, M: float) -> np.ndarray:
    """Exact weights applying the operator to piecewise-constant cell values.

    Row ``i`` maps cell values on ``[edges[j], edges[j+1]]`` to the operator at
    ``taus[i] < M``; ``edges`` must lie in ``[0, M]``.
    """
    k = (n - 1) / 2.0
    d = np.clip(edges[None, :] - taus[:, None], 0.0, None) ** k
    w = (d[:, 1:] - d[:, :-1]) / k
    return w * (M - taus)[:, None] ** (-k)


def box_bank(count: int, scale: float, rng: np.random.Generator) -> list:
    """Indicators of random subintervals of ``[0, scale]``."""
    bank = []
    for _ in range(count):
        lo, hi = np.sort(rng.uniform(0, scale, 2))
        hi = max(hi, lo + 0.05 * scale)
        bank.append(lambda r, lo=lo, hi=hi: ((r >= lo) & (r <= hi)).astype(float))
    return bank


def _tau_grid(M: float, n_cells: int) -> np.ndarray:
    near = np.linspace(-M, M, 2 * n_cells, endpoint=False)
    far = -M * np.geomspace(20.0, 1.0, n_cells, endpoint=False)
    return np.concatenate([far, near])


def empirical_operator_norm(params: ModelParams, t_grid: Sequence[float], test_bank: Sequence[Callable],
                            p: float = 2.0, n_cells: int = 400) -> float:
    """Largest observed ``||T_t h||_p / ||h||_p`` over ``t_grid`` and the bank.

    ``h`` is sampled at cell midpoints on ``[0, M]`` (``M = A(t) + R``) and
    treated as piecewise constant; the operator is applied with exact cell
    weights on a ``tau`` grid covering ``[-20 M, M)``.  Both norms use the
    trapezoid rule on their grids.
    """
    if params.n < 2:
        raise DimensionTooSmall(f"need n >= 2, got {params.n}")
    worst = 0.0
    for t in t_grid:
        M = _upper(params, t)
        edges = np.linspace(0.0, M, n_cells + 1)
        mids = 0.5 * (edges[1:] + edges[:-1])
        taus = _tau_grid(M, n_cells)
        W = averaging_matrix(edges, taus, params.n, M)
        for h in test_bank:
            hv = np.asarray(h(mids), dtype=float)
            hn = np.trapezoid(np.abs(hv) ** p, mids) ** (1 / p)
            if hn == 0:
                continue
            Th = W @ hv
            worst = max(worst, np.trapezoid(np.abs(Th) ** p, taus) ** (1 / p) / hn)
    return float(worst)


def write_profile_csv(path, rhos, values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rho", "radon"])
        for r, v in zip(rhos, values):
            w.writerow([repr(float(r)), repr(float(v))])
