"""Finite-difference solver for ``u_tt - t**(2 ell) Lap u + mu/t u_t + nu2/t**2 u = |u|**p``.

Data are ``u(1) = eps u0`` and ``u_t(1) = eps u1``.  For ``n = 1`` the grid is
symmetric in ``x``; for ``n >= 2`` solutions are radial and the grid covers
``r >= 0`` with the even reflection ``u(-r) = u(r)`` at the origin.

Time stepping is a variable-step leapfrog.  The step only ever shrinks: it is
halved whenever the CFL bound ``0.5 dx / max(1, t**ell)`` or the stiffness bound
``dt**2 p |u|**(p-1) <= 0.1`` is violated.  A step that pushes ``sup |u|`` past
the blow-up threshold is retried at half length until it is shorter than
``1e-10 t``, so the reported crossing time is resolved to that precision.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import DimensionTooSmall, SweepIncomplete, ValidationError
from .kato import euler_homogeneous
from .model import (ModelParams, amplitude, amplitude_inv, characteristic_roots, kernel_gamma,
                    phi_ell)
from .quadrature import integrate

__all__ = [
    "bump",
    "SemilinearProblem",
    "Grid",
    "LifespanRecord",
    "SemilinearRun",
    "solve_semilinear",
    "spatial_average",
    "u_ode_residual",
    "u_representation_check",
    "TestFunction",
    "default_test_bank",
    "weak_form_residual",
    "support_leak",
    "FrameReport",
    "iteration_frame_check",
    "threshold_shift",
    "LifespanSweep",
    "lifespan_sweep",
    "write_lifespan_table",
    "write_series_csv",
]

CFL_SAFETY = 0.5
STIFF_BOUND = 0.1
DT_UNDERFLOW = 1e-12
BISECT_REL = 1e-10
MARGIN_CELLS = 3
PAD_CELLS = 120
TAIL_FLOOR = 1e-30


@dataclass(frozen=True)
class Bump:
    """``(1 - (x/R)**2)**power`` on ``|x| <= R``, zero outside (picklable for worker pools)."""

    R: float = 1.0
    power: int = 3

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.clip(1.0 - (x / self.R) ** 2, 0.0, None) ** self.power


def bump(R: float = 1.0, power: int = 3) -> Callable:
    return Bump(float(R), power)


def _sphere_area(n: int) -> float:
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


@dataclass(frozen=True)
class Grid:
    """Spatial grid with quadrature weights (radial measure for ``n >= 2``)."""

    dx: float
    n: int
    coords: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, dx: float, n: int, half_width: float) -> "Grid":
        if not dx > 0:
            raise ValidationError("dx must be positive")
        m = int(math.ceil(half_width / dx))
        if n == 1:
            x = dx * np.arange(-m, m + 1)
            w = np.full(x.size, dx)
        else:
            x = dx * np.arange(m + 1)
            w = _sphere_area(n) * x ** (n - 1) * dx
        w[0] *= 0.5
        w[-1] *= 0.5
        return cls(dx, n, x, w)

    @property
    def center(self) -> int:
        return (self.coords.size - 1) // 2 if self.n == 1 else 0

    def active(self, radius: float, cells: int = 0) -> tuple[int, int]:
        """Index range ``[lo, hi)`` covering ``|x| <= radius`` and ``cells`` cells, plus a margin, away from the ends."""
        a = max(int(math.ceil(radius / self.dx)), cells) + MARGIN_CELLS
        if self.n == 1:
            c = self.center
            return max(1, c - a), min(self.coords.size - 1, c + a + 1)
        return 0, min(self.coords.size - 1, a + 1)

    def spec(self) -> dict:
        return {"dx": self.dx, "n": self.n, "half_width": float(self.coords[-1]), "points": int(self.coords.size)}


@dataclass
class SemilinearProblem:
    """Cauchy data and exponent for the semilinear problem.

    ``u0`` and ``u1`` are profiles in ``x`` (``n = 1``) or ``r = |x|``; both
    default to :func:`bump` on ``[-R, R]``.  With ``theorem_data`` set the data
    are checked to be nonnegative and supported in the ball of radius ``R``,
    ``u1 + r2 u0 >= 0`` pointwise and ``int (u1 + r1 u0) > 0``, where
    ``r1 >= r2`` are the characteristic roots.
    """

    params: ModelParams
    p: float
    eps: float
    u0: Callable | None = None
    u1: Callable | None = None
    nonlinear: bool = True
    theorem_data: bool = True

    def __post_init__(self):
        self.params.require_admissible()
        if not (self.p > 1 and math.isfinite(self.p)):
            raise ValidationError(f"p must be finite and exceed 1, got {self.p}")
        if not self.eps >= 0:
            raise ValidationError(f"eps must be nonnegative, got {self.eps}")
        R = self.params.R
        if self.u0 is None:
            self.u0 = bump(R)
        if self.u1 is None:
            self.u1 = bump(R)
        if self.theorem_data:
            self._check_data()

    def _check_data(self):
        R, n = self.params.R, self.params.n
        r1, r2 = characteristic_roots(self.params.mu, self.params.nu2)
        lo = -R - 1.0 if n == 1 else 0.0
        x = np.linspace(lo, R + 1.0, 4001)
        v0 = np.asarray(self.u0(x), dtype=float)
        v1 = np.asarray(self.u1(x), dtype=float)
        if np.any(v0 < 0) or np.any(v1 < 0):
            raise ValidationError("data must be nonnegative")
        outside = np.abs(x) > R * (1 + 1e-12)
        if np.any(v0[outside] != 0) or np.any(v1[outside] != 0):
            raise ValidationError(f"data must vanish outside the ball of radius {R}")
        if np.any(v1 + r2 * v0 < -1e-14):
            raise ValidationError("u1 + r2 u0 must be nonnegative")
        weight = 1.0 if n == 1 else _sphere_area(n) * np.abs(x) ** (n - 1)
        if not np.trapezoid((v1 + r1 * v0) * weight, x) > 0:
            raise ValidationError("int (u1 + r1 u0) must be positive")


@dataclass(frozen=True)
class LifespanRecord:
    eps: float
    T_numeric: float
    blew_up: bool
    final_sup_norm: float
    dt_min: float
    grid: dict

    def __post_init__(self):
        if self.blew_up != math.isfinite(self.T_numeric):
            raise ValidationError("blew_up must coincide with a finite T_numeric")


@dataclass
class SemilinearRun:
    """Per-step series of a run plus optional stored levels and snapshots.

    ``U`` is the spatial integral of ``u``, ``Np`` the integral of ``|u|**p``
    (the source of the ODE for ``U``; zero when the nonlinearity is off) and
    ``lp`` the integral of ``|u|**p`` regardless of that switch.
    """

    problem: SemilinearProblem
    grid: Grid
    record: LifespanRecord
    t: np.ndarray
    U: np.ndarray
    Np: np.ndarray
    lp: np.ndarray
    sup: np.ndarray
    levels: list | None = None
    snapshots: dict = field(default_factory=dict)
    u1_integral: float = 0.0


def _laplacian(u: np.ndarray, lo: int, hi: int, grid: Grid) -> np.ndarray:
    dx2 = grid.dx * grid.dx
    if grid.n == 1:
        return (u[lo + 1:hi + 1] - 2 * u[lo:hi] + u[lo - 1:hi - 1]) / dx2
    n = grid.n
    out = np.empty(hi - lo)
    # symmetric stencil at the origin: (n-1)/r u_r -> (n-1) u_rr
    out[0] = n * 2.0 * (u[1] - u[0]) / dx2
    r = grid.coords[1:hi]
    um, uc, up = u[0:hi - 1], u[1:hi], u[2:hi + 1]
    out[1:] = (up - 2 * uc + um) / dx2 + (n - 1) * (up - um) / (2 * grid.dx * r)
    return out


def spatial_average(values: np.ndarray, grid: Grid) -> float:
    """Integral of a snapshot over space (radial measure for ``n >= 2``)."""
    return float(np.dot(grid.weights, values))


def _cfl(dx: float, t: float, ell: float) -> float:
    return CFL_SAFETY * dx / max(1.0, t ** ell)


def solve_semilinear(prob: SemilinearProblem, t_max: float, dx: float, blowup_threshold: float = 1e8,
                     snapshot_times: Sequence[float] = (), store_levels: bool = False,
                     dt: float | None = None) -> SemilinearRun:
    """Integrate until ``t_max``, blow-up or step underflow.

    Parameters
    ----------
    dt : float, optional
        Initial step; by default the CFL step at ``t = 1`` shortened so that a
        whole number of steps reaches ``t_max`` when no halving is needed.
    snapshot_times : sequence of float
        Steps are shortened to land on these times; copies of ``u`` are kept.
    store_levels : bool
        Keep every accepted time level (needed by :func:`weak_form_residual`).
    """
    p_ = prob.params
    ell, mu, nu2, R, n = p_.ell, p_.mu, p_.nu2, p_.R, p_.n
    p, eps = prob.p, prob.eps
    if not t_max > 1:
        raise ValidationError("t_max must exceed 1")
    grid = Grid.build(dx, n, R + amplitude(t_max, ell) + PAD_CELLS * dx)
    x = grid.coords
    u = eps * np.asarray(prob.u0(x), dtype=float)
    v1 = eps * np.asarray(prob.u1(x), dtype=float)
    if dt is None:
        dt = _cfl(dx, 1.0, ell)
        dt = (t_max - 1.0) / math.ceil((t_max - 1.0) / dt - 1e-9)
    targets = sorted({float(s) for s in snapshot_times if 1.0 < s < t_max} | {float(t_max)})
    snapshots = {1.0: u.copy()} if 1.0 in snapshot_times else {}
    levels = [u.copy()] if store_levels else None

    def source(t, w, lo, hi):
        seg = w[lo:hi]
        f = t ** (2 * ell) * _laplacian(w, lo, hi, grid) - nu2 / (t * t) * seg
        if prob.nonlinear:
            f = f + np.abs(seg) ** p
        return f

    def integrals(w):
        a = np.abs(w) ** p
        return spatial_average(w, grid), spatial_average(a, grid)

    U0, L0 = integrals(u)
    ts, Us, Nps, lps, sups = [1.0], [U0], [L0 if prob.nonlinear else 0.0], [L0], [float(np.max(np.abs(u)))]
    t, u_prev, k_prev = 1.0, None, None
    # cells carrying values above TAIL_FLOOR * sup: the scheme's numerical domain of
    # dependence outruns the cone, so the update region follows it
    reach = 0
    dt_min = dt
    blew_up, T_blow = False, math.inf
    ti = 0
    while ti < len(targets):
        target = targets[ti]
        h = dt
        s = sups[-1]
        while h > _cfl(dx, t + h, ell) * (1 + 1e-12) or h * h * p * s ** (p - 1) > STIFF_BOUND:
            h *= 0.5
        if h < DT_UNDERFLOW:
            blew_up, T_blow = True, t
            break
        dt = h
        landing = False
        if t + h >= target - 1e-9 * h:
            h, landing = target - t, True
        lo, hi = grid.active(R + amplitude(min(t + h, t_max), ell), reach + 1)
        while True:
            new = np.zeros_like(u)
            f = source(t, u, lo, hi)
            if u_prev is None:
                new[lo:hi] = u[lo:hi] + h * v1[lo:hi] + 0.5 * h * h * (f - mu * v1[lo:hi])
            else:
                c = mu * h / (2 * t)
                new[lo:hi] = (u[lo:hi] + (h / k_prev) * (u[lo:hi] - u_prev[lo:hi]) + c * u_prev[lo:hi]
                              + 0.5 * h * (h + k_prev) * f) / (1 + c)
            s_new = float(np.max(np.abs(new[lo:hi])))
            if math.isfinite(s_new) and s_new < blowup_threshold:
                break
            if h <= BISECT_REL * t:
                blew_up, T_blow = True, t + h
                break
            h *= 0.5
            landing = False
            dt = h
        if blew_up:
            break
        dt_min = min(dt_min, h)
        live = np.flatnonzero(np.abs(new[lo:hi]) > TAIL_FLOOR * s_new) + lo
        if live.size:
            reach = int(np.max(np.abs(live - grid.center)))
        t_new = target if landing else t + h
        u_prev, u, k_prev, t = u, new, h, t_new
        Uk, Lk = integrals(u)
        ts.append(t)
        Us.append(Uk)
        Nps.append(Lk if prob.nonlinear else 0.0)
        lps.append(Lk)
        sups.append(s_new)
        if store_levels:
            levels.append(u.copy())
        if landing:
            if target in snapshot_times:
                snapshots[target] = u.copy()
            ti += 1
    if not blew_up and float(t_max) in {float(s) for s in snapshot_times}:
        snapshots[float(t_max)] = u.copy()
    record = LifespanRecord(float(eps), float(T_blow), blew_up, sups[-1], float(dt_min), grid.spec())
    return SemilinearRun(prob, grid, record, np.array(ts), np.array(Us), np.array(Nps), np.array(lps),
                         np.array(sups), levels, snapshots, spatial_average(v1, grid))


def _uniform_segments(t: np.ndarray, rel: float = 1e-9):
    """Maximal index ranges ``[a, b]`` over which the step is constant."""
    h = np.diff(t)
    segs, a = [], 0
    for i in range(1, h.size + 1):
        if i == h.size or abs(h[i] - h[a]) > rel * h[a]:
            segs.append((a, i))
            a = i
    return segs


def u_ode_residual(run: SemilinearRun, t_stop: float | None = None) -> float:
    """Largest defect of ``U'' + mu/t U' + nu2/t**2 U = int |u|**p`` along the run.

    Derivatives of the recorded ``U`` use fourth-order five-point stencils on
    stretches of constant step; only points with two neighbours on each side
    in the same stretch (and ``t <= t_stop``) are used.  The defect therefore
    measures the second-order error of the computed trajectory.
    """
    p_ = run.problem.params
    t, U, N = run.t, run.U, run.Np
    worst = 0.0
    for a, b in _uniform_segments(t):
        # levels a..b share the step h
        if b - a < 4:
            continue
        h = t[a + 1] - t[a]
        k = np.arange(a + 2, b - 1)
        if t_stop is not None:
            k = k[t[k] <= t_stop]
        if k.size == 0:
            continue
        d2 = (-U[k + 2] + 16 * U[k + 1] - 30 * U[k] + 16 * U[k - 1] - U[k - 2]) / (12 * h * h)
        d1 = (-U[k + 2] + 8 * U[k + 1] - 8 * U[k - 1] + U[k - 2]) / (12 * h)
        tk = t[k]
        res = d2 + p_.mu / tk * d1 + p_.nu2 / tk**2 * U[k] - N[k]
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def u_representation_check(run: SemilinearRun) -> float:
    """Relative discrepancy between ``U`` and its representation via the ``|u|**p`` series.

    ``U(t) = U_lin(t) + t**-r1 int_1^t s**(r1-r2-1) int_1^s tau**(r2+1) N(tau) dtau ds``
    where ``U_lin`` solves the homogeneous ODE with the discrete initial
    values; both integrals use the trapezoid rule on the run's time levels.
    """
    p_ = run.problem.params
    r1, r2 = characteristic_roots(p_.mu, p_.nu2)
    t = run.t
    scale = float(np.max(np.abs(run.U)))
    if scale == 0.0:
        return 0.0
    lin = euler_homogeneous(p_.mu, p_.nu2, run.U[0], run.u1_integral, t)
    inner = cumulative_trapezoid(t ** (r2 + 1) * run.Np, t, initial=0.0)
    outer = cumulative_trapezoid(t ** (r1 - r2 - 1) * inner, t, initial=0.0)
    return float(np.max(np.abs(run.U - lin - t ** (-r1) * outer)) / scale)


@dataclass(frozen=True)
class TestFunction:
    """Gaussian ``exp(-((t-tc)/tw)**2 - ((x-xc)/xw)**2)`` (radial ones need ``xc = 0``)."""

    t_center: float
    t_width: float
    x_center: float
    x_width: float

    def _time(self, t):
        s = (t - self.t_center) / self.t_width
        chi = math.exp(-s * s)
        return chi, -2 * s / self.t_width * chi

    def _space(self, x):
        return np.exp(-((x - self.x_center) / self.x_width) ** 2)

    def value(self, t, x):
        return self._time(t)[0] * self._space(x)

    def time_derivative(self, t, x):
        return self._time(t)[1] * self._space(x)

    def laplacian(self, t, x, n: int):
        w2 = self.x_width ** 2
        d = x - self.x_center
        g = self._space(x)
        return self._time(t)[0] * g * (4 * d * d / (w2 * w2) - 2 * n / w2)


def default_test_bank(n: int, R: float = 1.0, t_end: float = 3.0) -> list[TestFunction]:
    mid = 0.5 * (1.0 + t_end)
    if n == 1:
        return [TestFunction(1.0, 2.0, 0.0, R), TestFunction(mid, 1.0, 0.5 * R, 0.7 * R),
                TestFunction(t_end, 1.5, -R, R), TestFunction(mid, 3.0, 1.5 * R, 0.5 * R),
                TestFunction(1.5, 1.0, -0.3 * R, 2.0 * R)]
    return [TestFunction(1.0, 2.0, 0.0, R), TestFunction(mid, 1.0, 0.0, 0.7 * R),
            TestFunction(t_end, 1.5, 0.0, 1.5 * R), TestFunction(mid, 3.0, 0.0, 0.5 * R),
            TestFunction(1.5, 1.0, 0.0, 2.0 * R)]


def _time_derivatives(t: np.ndarray, levels: list, u_t0: np.ndarray, upto: int) -> list:
    out = [u_t0]
    for k in range(1, upto + 1):
        h1, h2 = t[k] - t[k - 1], t[k + 1] - t[k]
        out.append((h1 * h1 * levels[k + 1] - h2 * h2 * levels[k - 1] + (h2 * h2 - h1 * h1) * levels[k])
                   / (h1 * h2 * (h1 + h2)))
    return out


def weak_form_residual(run: SemilinearRun, test_bank: Sequence[TestFunction]) -> float:
    """Largest normalized defect of the integral identity over ``test_bank``.

    The identity is evaluated at the second-to-last stored level so that the
    time derivative there is a centred difference.  The gradient pairing is
    moved onto the test function (``-int u Lap phi``), space integrals use the
    grid weights and time integrals the trapezoid rule.  Each defect is divided
    by the sum of the absolute values of the identity's terms.
    """
    if run.levels is None:
        raise ValidationError("weak_form_residual needs a run with store_levels=True")
    prob, grid = run.problem, run.grid
    p_ = prob.params
    t = run.t
    K = len(run.levels) - 2
    if K < 1:
        raise ValidationError("run too short for the weak form")
    x = grid.coords
    u_t0 = prob.eps * np.asarray(prob.u1(x), dtype=float)
    ut = _time_derivatives(t, run.levels, u_t0, K)
    w = grid.weights
    worst = 0.0
    for phi in test_bank:
        dens = np.empty(K + 1)
        src = np.empty(K + 1)
        for k in range(K + 1):
            s, u, v = t[k], run.levels[k], ut[k]
            val = phi.value(s, x)
            dens[k] = np.dot(w, -v * phi.time_derivative(s, x) - s ** (2 * p_.ell) * u * phi.laplacian(s, x, grid.n)
                             + p_.mu / s * v * val + p_.nu2 / (s * s) * u * val)
            src[k] = np.dot(w, np.abs(u) ** prob.p * val) if prob.nonlinear else 0.0
        tk = t[:K + 1]
        terms = [np.dot(w, ut[K] * phi.value(t[K], x)), np.trapezoid(dens, tk),
                 -np.dot(w, u_t0 * phi.value(1.0, x)), -np.trapezoid(src, tk)]
        scale = sum(abs(q) for q in terms)
        if scale > 0:
            worst = max(worst, abs(sum(terms)) / scale)
    return worst


def support_leak(run: SemilinearRun, rel: float = 1e-3, cells: int = 2) -> float:
    """Largest distance by which ``{|u| > rel * sup |u|}`` exceeds ``R + A(t) + cells dx`` over the levels.

    The leapfrog scheme spreads an O(dx**2) precursor ahead of the cone, so
    the numerical support is measured at a relative level ``rel``.
    """
    if run.levels is None:
        raise ValidationError("support_leak needs a run with store_levels=True")
    p_ = run.problem.params
    ax = np.abs(run.grid.coords)
    worst = -math.inf
    for s, u in zip(run.t, run.levels):
        m = float(np.max(np.abs(u)))
        if m == 0:
            continue
        reach = float(np.max(ax[np.abs(u) > rel * m]))
        worst = max(worst, reach - (p_.R + amplitude(s, p_.ell) + cells * run.grid.dx))
    return worst


@dataclass(frozen=True)
class FrameReport:
    """Largest constant ``K_max`` for which the frame inequality holds on the sampled times.

    ``ratios`` holds ``||u(t)||_p**p / RHS(t)`` at ``times`` (``RHS`` with unit
    constant); ``K_max = min(ratios)``.  ``doubled_fails`` records that ``2 K_max``
    violates the inequality at ``t_critical``.
    """

    times: np.ndarray
    ratios: np.ndarray
    K_max: float
    t_critical: float
    doubled_fails: bool


def _frame_rhs(t: float, run: SemilinearRun, cum_t: np.ndarray, cum: np.ndarray, tol: float) -> float:
    prob = run.problem
    p_ = prob.params
    ell, mu, n, R, p = p_.ell, p_.mu, p_.n, p_.R, prob.p
    sd = math.sqrt(p_.delta)
    gam = kernel_gamma(p_)
    A = amplitude(t, ell)
    pt, p1 = phi_ell(t, ell), phi_ell(1.0, ell)
    R1 = 0.0 if gam >= 0 else p1 - R
    e = (n - 1) * (1 - p / 2)
    e_pos, e_neg = max(e, 0.0), max(-e, 0.0)

    def f(rho):
        upper = amplitude_inv(np.maximum(0.5 * (A - rho - R), 0.0), ell)
        inner = np.interp(upper, cum_t, cum)
        return (rho ** e_pos * ((pt + R1) ** 2 - rho * rho) ** (-gam * p)
                * (A + R - rho) ** (-(n - 1) * p / 2) * inner ** p)

    body = integrate(f, 0.0, A - R, abs_tol=tol).value
    return t ** (-mu * p / 2 + (1 - sd) * p / 2) * (A + R) ** (-e_neg) * body


def iteration_frame_check(run: SemilinearRun, n_times: int = 40, tol: float = 1e-14) -> FrameReport:
    """Largest ``K`` with ``||u(t)||_p**p >= K * RHS(t)`` along a radial run.

    ``RHS`` is the lower-bound functional of the iteration argument built from
    the recorded ``||u(b)||_p**p`` series (trapezoid cumulative integral, linear
    interpolation in ``b``); the outer ``rho`` integral is adaptive.  Times
    are sampled on ``t > A^-1(R)`` where the ``rho`` range is nonempty.
    """
    p_ = run.problem.params
    if p_.n < 2:
        raise DimensionTooSmall("the frame check needs a radial run with n >= 2")
    sd = math.sqrt(p_.delta)
    t = run.t
    cum = cumulative_trapezoid(t ** (p_.mu / 2 + (1 - sd) / 2) * run.lp, t, initial=0.0)
    t_start = amplitude_inv(p_.R, p_.ell)
    cand = t[t > t_start * (1 + 1e-6)]
    if cand.size == 0:
        raise ValidationError(f"run ends before A^-1(R) = {t_start}")
    idx = np.unique(np.linspace(0, cand.size - 1, min(n_times, cand.size)).round().astype(int))
    times = cand[idx]
    lp_at = np.interp(times, t, run.lp)
    rhs = np.array([_frame_rhs(s, run, t, cum, tol) for s in times])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(rhs > 0, lp_at / rhs, np.inf)
    i = int(np.argmin(ratios))
    K = float(ratios[i])
    fails = bool(math.isfinite(K) and lp_at[i] < 2 * K * rhs[i])
    return FrameReport(times, ratios, K, float(times[i]), fails)


def threshold_shift(prob: SemilinearProblem, t_max: float, dx: float, threshold: float = 1e8,
                    factor: float = 100.0) -> float:
    """Relative change of the blow-up time when the threshold is multiplied by ``factor``."""
    a = solve_semilinear(prob, t_max, dx, threshold).record
    b = solve_semilinear(prob, t_max, dx, threshold * factor).record
    if not (a.blew_up and b.blew_up):
        return math.inf
    return abs(b.T_numeric - a.T_numeric) / a.T_numeric


@dataclass(frozen=True)
class LifespanSweep:
    """Records ordered by ``eps`` and the least-squares fit ``ln T = E * eps**-(p(p-1)) + c``."""

    records: list
    p: float
    slope: float
    intercept: float
    fit_residual: float
    monotone: bool
    incomplete: tuple

    def require_complete(self):
        if self.incomplete:
            raise SweepIncomplete(f"no blow-up before t_max for eps in {list(self.incomplete)}")
        return self


def _sweep_one(args):
    prob, t_max, dx, threshold = args
    return solve_semilinear(prob, t_max, dx, threshold).record


def lifespan_sweep(params: ModelParams, p: float, eps_grid: Sequence[float], t_max: float, dx: float,
                   blowup_threshold: float = 1e8, jobs: int = 1, u0=None, u1=None) -> LifespanSweep:
    """Blow-up times over ``eps_grid`` and the fit of ``ln T`` against ``eps**-(p(p-1))``.

    ``monotone`` means the finite times are strictly decreasing in ``eps`` and
    no larger ``eps`` survives past ``t_max`` while a smaller one blows up.
    """
    eps_sorted = sorted(float(e) for e in eps_grid)
    tasks = [(SemilinearProblem(params, p, e, u0, u1), t_max, dx, blowup_threshold) for e in eps_sorted]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            records = list(ex.map(_sweep_one, tasks))
    else:
        records = [_sweep_one(a) for a in tasks]
    T = np.array([r.T_numeric for r in records])
    monotone = bool(np.all(np.diff(T[np.isfinite(T)]) < 0)) and not any(
        not math.isfinite(T[i + 1]) and math.isfinite(T[i]) for i in range(len(T) - 1))
    done = np.isfinite(T)
    slope = intercept = resid = math.nan
    if done.sum() >= 2:
        X = np.array(eps_sorted)[done] ** (-p * (p - 1))
        Y = np.log(T[done])
        (slope, intercept), res, *_ = np.polyfit(X, Y, 1, full=True)
        resid = float(math.sqrt(res[0] / done.sum())) if res.size else 0.0
    incomplete = tuple(e for e, r in zip(eps_sorted, records) if not r.blew_up)
    return LifespanSweep(records, float(p), float(slope), float(intercept), resid, monotone, incomplete)


def write_lifespan_table(path, records: Sequence[LifespanRecord]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["eps", "T", "blew_up", "dt_min"])
        for r in records:
            w.writerow([repr(r.eps), repr(r.T_numeric), int(r.blew_up), repr(r.dt_min)])


def write_series_csv(path, run: SemilinearRun):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "U", "lp_norm_p", "sup"])
        for row in zip(run.t, run.U, run.lp, run.sup):
            w.writerow([repr(float(v)) for v in row])
