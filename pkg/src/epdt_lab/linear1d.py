"""One-dimensional linear problem: representation formula and a leapfrog oracle.

The equation is ``u_tt - t**(2 ell) u_xx + mu/t u_t + nu2/t**2 u = g`` for
``t >= 1`` with ``u(1) = u0`` and ``u_t(1) = u1``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import CFLViolation, DomainError, DomainTooSmall, NonfiniteState, ValidationError
from .kernel import E_values, kernel_K0, kernel_K1
from .model import ModelParams, amplitude, phi_ell
from .quadrature import integrate

__all__ = [
    "GridFunction",
    "LinearProblem",
    "FDSolution",
    "solve_representation",
    "solve_representation_many",
    "dalembert",
    "solve_fd_oracle",
    "check_initial_velocity",
    "relative_linf",
    "write_solution_csv",
]

CFL_SAFETY = 0.5


@dataclass(frozen=True)
class GridFunction:
    """Samples on a uniform grid, evaluated between nodes by a cubic spline.

    Outside ``[x0, x0 + (len(values) - 1) dx]`` the function is zero.
    """

    x0: float
    dx: float
    values: np.ndarray
    support_radius: float | None = None
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValidationError("GridFunction needs at least two samples")
        if not self.dx > 0:
            raise ValidationError("dx must be positive")
        object.__setattr__(self, "values", v)
        if self.support_radius is not None:
            if self.support_radius < 0:
                raise ValidationError("support_radius must be nonnegative")
            outside = np.abs(self.grid) > self.support_radius + 1e-12
            if np.any(np.abs(v[outside]) > 1e-14):
                raise ValidationError("nonzero samples outside the declared support")
        object.__setattr__(self, "_spline", CubicSpline(self.grid, v, extrapolate=False))

    @property
    def grid(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.values.size)

    @classmethod
    def from_callable(cls, f, x0, x1, dx, support_radius=None) -> "GridFunction":
        n = int(round((x1 - x0) / dx)) + 1
        x = x0 + dx * np.arange(n)
        return cls(x0, dx, np.asarray(f(x), dtype=float), support_radius)

    def __call__(self, x):
        out = np.nan_to_num(self._spline(np.asarray(x, dtype=float)), nan=0.0)
        return float(out) if out.ndim == 0 else out


def _as_vectorized(f):
    if f is None:
        return None
    def wrapped(*args):
        return np.asarray(f(*args), dtype=float) * np.ones(np.broadcast(*args).shape)
    return wrapped


@dataclass
class LinearProblem:
    """Cauchy problem data; ``params.n`` is forced to 1.

    ``u0``, ``u1`` map arrays of ``x`` to arrays; ``g`` maps ``(t, x)`` arrays
    to arrays and may be ``None``.  Data (and ``g``) are assumed supported in
    ``[-params.R, params.R]``.
    """

    params: ModelParams
    u0: Callable
    u1: Callable
    g: Callable | None = None
    t_end: float = 3.0

    def __post_init__(self):
        if self.params.n != 1:
            self.params = self.params.with_(n=1)
        self.params.require_admissible()
        if not self.t_end > 1:
            raise ValidationError("t_end must exceed 1")
        h = 1e-3
        xs = np.linspace(-self.params.R - 0.5, self.params.R + 0.5, 2001)
        v = np.asarray(self.u0(xs), dtype=float)
        d2 = (self.u0(xs + h) - 2 * v + self.u0(xs - h)) / h**2
        # a jump produces second differences of order amplitude / h**2
        limit = 1e4 * max(np.max(np.abs(v)), 1e-300) / min(1.0, self.params.R) ** 2
        if not np.all(np.isfinite(d2)) or np.max(np.abs(d2)) > limit:
            raise ValidationError("u0 fails the sampled smoothness check")


def _data_integral(f, kernel, t, x, A, R, tol):
    lo, hi = x - A, x + A
    bps = [p for p in (-R, R) if lo < p < hi]
    res = integrate(lambda y: f(y) * kernel(y), lo, hi, abs_tol=tol, breakpoints=bps)
    return res.value


def _duhamel(prob: LinearProblem, t, x, tol):
    p = prob.params
    pt = phi_ell(t, p.ell)
    R = p.R
    g = _as_vectorized(prob.g)

    def inner(b):
        w = pt - phi_ell(b, p.ell)
        if w <= 0:
            return 0.0
        lo, hi = x - w, x + w
        bps = [q for q in (-R, R) if lo < q < hi]
        bb = float(b)
        return integrate(lambda y: g(np.full_like(y, bb), y) * E_values(t, x, bb, y, p),
                         lo, hi, abs_tol=tol / (t - 1.0), breakpoints=bps).value

    outer = integrate(lambda bs: np.array([inner(b) for b in bs]), 1.0, t, abs_tol=tol)
    return outer.value


def solve_representation(prob: LinearProblem, t: float, x: float, tol: float = 1e-9) -> float:
    """Solution value at ``(t, x)`` from the representation formula.

    The three integrals are computed by adaptive Gauss-Kronrod quadrature;
    the source term is integrated iteratively (outer in source time, inner in
    space) with a tenth of the tolerance per level.
    """
    p = prob.params
    if not 1.0 <= t <= prob.t_end:
        raise DomainError(f"t = {t} outside [1, {prob.t_end}]")
    if t == 1.0:
        return float(prob.u0(np.asarray(x, dtype=float)))
    A = amplitude(t, p.ell)
    R = p.R
    pref = 0.5 * t ** (-(p.mu + p.ell) / 2.0)
    val = pref * (float(prob.u0(np.asarray(x + A))) + float(prob.u0(np.asarray(x - A))))
    val += _data_integral(prob.u0, lambda y: kernel_K0(t, x, y, p), t, x, A, R, tol / 3)
    val += _data_integral(prob.u1, lambda y: kernel_K1(t, x, y, p), t, x, A, R, tol / 3)
    if prob.g is not None:
        val += _duhamel(prob, t, x, tol / 30)
    return float(val)


def solve_representation_many(prob: LinearProblem, t: float, xs: Sequence[float], tol: float = 1e-9) -> np.ndarray:
    return np.array([solve_representation(prob, t, float(x), tol) for x in xs])


def dalembert(u0, u1, t, x, tol=1e-12):
    """Closed-form solution of the undamped wave equation started at ``t = 1``."""
    a = t - 1.0
    val = 0.5 * (float(u0(np.asarray(x + a))) + float(u0(np.asarray(x - a))))
    if a > 0:
        val += 0.5 * integrate(u1, x - a, x + a, abs_tol=tol).value
    return val


@dataclass(frozen=True)
class FDSolution:
    times: np.ndarray
    snapshots: list
    dx: float
    dt: float


def solve_fd_oracle(prob: LinearProblem, t_end: float, dx: float, dt: float | None = None,
                    save_times: Sequence[float] | None = None, half_width: float | None = None) -> FDSolution:
    """Leapfrog solution on a uniform grid with homogeneous Dirichlet ends.

    Parameters
    ----------
    dt : float, optional
        Time step; defaults to the largest stable step that lands on ``t_end``.
    save_times : sequence of float, optional
        Times (rounded to the step grid) at which snapshots are kept;
        the default keeps only ``t_end``.
    half_width : float, optional
        Domain is ``[-half_width, half_width]``; by default
        ``R + A(t_end) + 5 dx``.
    """
    p = prob.params
    ell, mu, nu2 = p.ell, p.mu, p.nu2
    speed_max = max(1.0, t_end**ell)
    dt_max = CFL_SAFETY * dx / speed_max
    n_steps = int(math.ceil((t_end - 1.0) / dt_max - 1e-12))
    if dt is None:
        dt = (t_end - 1.0) / n_steps
    elif dt > dt_max * (1 + 1e-12):
        raise CFLViolation(f"dt = {dt} exceeds {dt_max} = {CFL_SAFETY} dx / max speed")
    else:
        n_steps = int(round((t_end - 1.0) / dt))
        dt = (t_end - 1.0) / n_steps
    reach = p.R + amplitude(t_end, ell)
    if half_width is None:
        half_width = reach + 5 * dx
    elif half_width <= reach:
        raise DomainTooSmall(f"half width {half_width} is inside the cone radius {reach}")
    m = int(math.ceil(half_width / dx))
    x = dx * np.arange(-m, m + 1)
    g = _as_vectorized(prob.g)

    def accel(t, u):
        lap = np.zeros_like(u)
        lap[1:-1] = (u[2:] - 2 * u[1:-1] + u[:-2]) / dx**2
        a = t ** (2 * ell) * lap - nu2 / t**2 * u
        if g is not None:
            a = a + g(np.full_like(x, t), x)
        return a

    u0 = np.asarray(prob.u0(x), dtype=float)
    u1 = np.asarray(prob.u1(x), dtype=float)
    u_prev = u0
    u = u0 + dt * u1 + 0.5 * dt**2 * (accel(1.0, u0) - mu * u1)
    u[0] = u[-1] = 0.0
    save_steps = {n_steps} if save_times is None else {int(round((s - 1.0) / dt)) for s in save_times}
    times, snaps = [], []
    if 0 in save_steps:
        times.append(1.0)
        snaps.append(GridFunction(x[0], dx, u0.copy()))
    for k in range(1, n_steps + 1):
        if k in save_steps:
            times.append(1.0 + k * dt)
            snaps.append(GridFunction(x[0], dx, u.copy()))
        if k == n_steps:
            break
        t = 1.0 + k * dt
        damp = mu * dt / (2 * t)
        u_next = (2 * u - (1 - damp) * u_prev + dt**2 * accel(t, u)) / (1 + damp)
        u_next[0] = u_next[-1] = 0.0
        u_prev, u = u, u_next
        if not np.all(np.isfinite(u)):
            raise NonfiniteState(f"non-finite state at t = {t}")
    return FDSolution(np.array(times), snaps, dx, dt)


def check_initial_velocity(prob: LinearProblem, h: float = 1e-4, xs=None) -> float:
    """Max deviation of the one-sided time difference at ``t = 1`` from ``u1``."""
    if xs is None:
        xs = np.linspace(-prob.params.R - 0.25, prob.params.R + 0.25, 41)
    dev = 0.0
    for x in xs:
        du = (solve_representation(prob, 1.0 + h, float(x)) - float(prob.u0(np.asarray(x)))) / h
        dev = max(dev, abs(du - float(prob.u1(np.asarray(x)))))
    return dev


def relative_linf(approx, exact) -> float:
    approx, exact = np.asarray(approx), np.asarray(exact)
    return float(np.max(np.abs(approx - exact)) / np.max(np.abs(exact)))


def write_solution_csv(path, rows):
    """Write ``(t, x, u)`` rows with full float precision and LF line endings."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x", "u"])
        for t, x, u in rows:
            w.writerow([repr(float(t)), repr(float(x)), repr(float(u))])
