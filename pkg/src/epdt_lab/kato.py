"""Kato-type blow-up lemma for ``G'' + mu/t G' + nu2/t**2 G >= B t**-q |G|**p``.

Thresholds, ODE simulation of the equality case with threshold-crossing
blow-up detection, and an empirical check of the lifespan bound ``T <= 2 T1``.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (InvalidCriticalCondition, NegativeDelta, NonfiniteState, ValidationError,
                     ZeroDenominator)
from .model import characteristic_roots, delta

__all__ = [
    "KatoProblem",
    "KatoThresholds",
    "KatoTrajectory",
    "KatoReport",
    "kato_thresholds",
    "kato_simulate",
    "kato_lemma_check",
    "threshold_doubling_shift",
    "euler_homogeneous",
    "g_lin",
    "factorization_identity_check",
    "sample_problem",
    "monte_carlo",
    "write_monte_carlo_csv",
]

CRITICAL_TOL = 1e-12
PREMISE_TOL = 1e-10


@dataclass(frozen=True)
class KatoProblem:
    mu: float
    nu2: float
    p: float
    q: float
    a: float
    B: float
    K: float
    T0: float
    G1: float
    G1p: float
    beta: float | None = None

    def __post_init__(self):
        if self.mu < 0 or self.nu2 < 0:
            raise ValidationError("mu and nu2 must be nonnegative")
        if delta(self.mu, self.nu2) < 0:
            raise NegativeDelta(f"delta < 0 for mu={self.mu}, nu2={self.nu2}")
        if not self.p > 1 or self.q < 0:
            raise ValidationError("need p > 1 and q >= 0")
        if not (self.B > 0 and self.K > 0):
            raise ValidationError("need B > 0 and K > 0")
        if not self.T0 >= 1:
            raise ValidationError("need T0 >= 1")
        if self.G1 < 0 or self.G1p < 0:
            raise ValidationError("need G(1) >= 0 and G'(1) >= 0")
        if abs(self.a * (self.p - 1) - (self.q - 2)) > CRITICAL_TOL * max(1.0, abs(self.q)):
            raise InvalidCriticalCondition(f"a(p-1) = {self.a * (self.p - 1)} but q-2 = {self.q - 2}")
        r1, _ = self.roots
        lead = self.G1p + r1 * self.G1
        if lead == 0:
            raise ZeroDenominator("G'(1) + r1 G(1) = 0")
        if lead < 0:
            raise ValidationError("need G'(1) + r1 G(1) > 0")
        if self.a + r1 < -CRITICAL_TOL:
            raise ValidationError(f"need a + r1 >= 0, got {self.a + r1}")
        if self.beta is None:
            object.__setattr__(self, "beta", (self.p - 1) / 4.0)
        elif not 0 < self.beta < (self.p - 1) / 2:
            raise ValidationError("beta must lie in (0, (p-1)/2)")

    @property
    def roots(self) -> tuple[float, float]:
        return characteristic_roots(self.mu, self.nu2)

    def with_(self, **changes) -> "KatoProblem":
        d = asdict(self)
        d.update(changes)
        return KatoProblem(**d)


@dataclass(frozen=True)
class KatoThresholds:
    T0_tilde: float
    K0: float
    T1: float


def _lower_time(prob: KatoProblem) -> float:
    r1, r2 = prob.roots
    ratio = prob.G1 / (prob.G1p + r1 * prob.G1)
    if r1 == r2:
        return math.exp(ratio)
    return (1.0 + (r1 - r2) * ratio) ** (1.0 / (r1 - r2))


def _k0(prob: KatoProblem) -> float:
    r1, _ = prob.roots
    s = prob.a + r1
    head = ((prob.p + 1) / prob.B) ** (1.0 / (prob.p - 1))
    if s > 0:
        return head * (s / -math.expm1(-prob.beta * s * math.log(2.0))) ** (2.0 / (prob.p - 1))
    return head * (prob.beta * math.log(2.0)) ** (-2.0 / (prob.p - 1))


def kato_thresholds(prob: KatoProblem) -> KatoThresholds:
    T0t = _lower_time(prob)
    return KatoThresholds(T0_tilde=T0t, K0=_k0(prob), T1=max(prob.T0, T0t))


@dataclass
class KatoTrajectory:
    """Output of :func:`kato_simulate`; ``sol`` is the dense interpolant."""

    t: np.ndarray
    G: np.ndarray
    Gp: np.ndarray
    blowup_time: float
    sol: object
    status: str


def _rhs(prob: KatoProblem):
    mu, nu2, B, q, p = prob.mu, prob.nu2, prob.B, prob.q, prob.p

    def f(t, y):
        G, Gp = y
        with np.errstate(over="ignore", invalid="ignore"):
            return [Gp, -mu / t * Gp - nu2 / t**2 * G + B * t ** (-q) * abs(G) ** p]
    return f


def kato_simulate(prob: KatoProblem, t_max: float, blowup_threshold: float = 1e12,
                  method: str = "DOP853", rtol: float = 1e-10, atol: float = 1e-12) -> KatoTrajectory:
    """Integrate the equality case from ``t = 1`` until ``|G|`` reaches the threshold.

    The crossing time is located by the solver's event root finder on the
    dense output.  A step failure (step size underflow near the vertical
    asymptote) is reported as blow-up at the last accepted time.
    """
    if not t_max > 1:
        raise ValidationError("t_max must exceed 1")
    if not blowup_threshold > 0:
        raise ValidationError("blowup_threshold must be positive")

    def hit(t, y):
        return abs(y[0]) - blowup_threshold
    hit.terminal = True
    hit.direction = 1

    sol = solve_ivp(_rhs(prob), (1.0, t_max), [prob.G1, prob.G1p], method=method,
                    rtol=rtol, atol=atol, events=hit, dense_output=True)
    t, G, Gp = sol.t, sol.y[0], sol.y[1]
    if sol.status == 1:
        T, status = float(sol.t_events[0][0]), "threshold"
    elif sol.status == -1:
        if not np.all(np.isfinite(G)):
            raise NonfiniteState(sol.message)
        T, status = float(t[-1]), "step_underflow"
    else:
        T, status = math.inf, "no_blowup"
    return KatoTrajectory(t=t, G=G, Gp=Gp, blowup_time=T, sol=sol.sol, status=status)


def threshold_doubling_shift(prob: KatoProblem, t_max: float, threshold: float = 1e12) -> float:
    """Relative change of the blow-up time when the detection threshold doubles."""
    T1 = kato_simulate(prob, t_max, threshold).blowup_time
    T2 = kato_simulate(prob, t_max, 2 * threshold).blowup_time
    if math.isinf(T1) or math.isinf(T2):
        return math.inf if T1 != T2 else 0.0
    return abs(T2 - T1) / T1


@dataclass(frozen=True)
class KatoReport:
    thresholds: KatoThresholds
    premise_holds: bool
    K_sup: float
    blowup_time: float
    bound_satisfied: bool | None
    status: str


def _premise_ksup(prob: KatoProblem, traj: KatoTrajectory, n_dense: int = 4000) -> float:
    """Largest ``K`` with ``G >= K t**a`` on the simulated part of ``[T0, T)``."""
    T_end = traj.blowup_time if math.isfinite(traj.blowup_time) else traj.t[-1]
    if prob.T0 >= T_end:
        # The lemma needs T0 inside the existence interval; report no support.
        return -math.inf
    ts = np.union1d(traj.t[traj.t >= prob.T0], np.linspace(prob.T0, T_end, n_dense))
    G = traj.sol(ts)[0]
    return float(np.min(G / ts ** prob.a))


def kato_lemma_check(prob: KatoProblem, t_max: float | None = None,
                     blowup_threshold: float = 1e12) -> KatoReport:
    """Simulate and compare the blow-up time with ``2 T1``.

    ``status`` is ``"inapplicable"`` when the trajectory does not support the
    lower bound with the given ``K``, ``"below_k0"`` when ``K < K0`` (the
    lemma makes no claim), and otherwise ``"verified"`` or ``"violated"``.
    """
    th = kato_thresholds(prob)
    if t_max is None:
        t_max = 4.0 * th.T1 + 10.0
    traj = kato_simulate(prob, t_max, blowup_threshold)
    ksup = _premise_ksup(prob, traj)
    premise = prob.K <= ksup * (1 + PREMISE_TOL) + PREMISE_TOL
    T = traj.blowup_time
    within = T <= 2.0 * th.T1 * (1 + 1e-9)
    if not premise:
        return KatoReport(th, False, ksup, T, None, "inapplicable")
    if prob.K < th.K0:
        return KatoReport(th, True, ksup, T, within, "below_k0")
    return KatoReport(th, True, ksup, T, within, "verified" if within else "violated")


def euler_homogeneous(mu: float, nu2: float, y1: float, y1p: float, t):
    """Solution of ``y'' + mu/t y' + nu2/t**2 y = 0`` with ``y(1) = y1``, ``y'(1) = y1p``."""
    t = np.asarray(t, dtype=float)
    r1, r2 = characteristic_roots(mu, nu2)
    if r1 == r2:
        lt = np.log(t)
        return t ** (-r1) * (1 + r1 * lt) * y1 + t ** (-r1) * lt * y1p
    d = r1 - r2
    return (r1 * t ** (-r2) - r2 * t ** (-r1)) / d * y1 + (t ** (-r2) - t ** (-r1)) / d * y1p


def g_lin(prob: KatoProblem, t):
    """Solution of the homogeneous equation with the same initial data."""
    return euler_homogeneous(prob.mu, prob.nu2, prob.G1, prob.G1p, t)


def _d1(f, h):
    """Fourth-order first derivative on a uniform grid; drops two points per end."""
    return (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)


def _d2(f, h):
    return (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * h * h)


def factorization_identity_check(mu: float, nu2: float, trajectory, t_range=None, n: int = 2001) -> float:
    """Compare the factored operator with the damped operator on ``G``.

    ``trajectory`` is a :class:`KatoTrajectory` or a callable ``G(t)``.  Both
    sides are built from fourth-order finite differences on a uniform grid;
    the return value is the max discrepancy relative to ``max(1, max|Lu|)``.
    """
    r1, r2 = characteristic_roots(mu, nu2)
    if isinstance(trajectory, KatoTrajectory):
        G_of = lambda s: trajectory.sol(s)[0]
        if t_range is None:
            T_end = trajectory.blowup_time if math.isfinite(trajectory.blowup_time) else trajectory.t[-1]
            t_range = (1.0, 1.0 + 0.5 * (T_end - 1.0))
    else:
        G_of = trajectory
        if t_range is None:
            t_range = (1.0, 3.0)
    t = np.linspace(*t_range, n)
    h = t[1] - t[0]
    G = G_of(t)
    F = t**r1 * G
    inner = t[2:-2] ** (r2 + 1 - r1) * _d1(F, h)
    lhs = t[4:-4] ** (-(r2 + 1)) * _d1(inner, h)
    rhs = (_d2(G, h) + mu / t[2:-2] * _d1(G, h) + nu2 / t[2:-2] ** 2 * G[2:-2])[2:-2]
    return float(np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(rhs))))


def sample_problem(rng: np.random.Generator) -> KatoProblem:
    """Draw an admissible problem with ``K = K0``.

    The exponent ``a`` is ``-r1`` (one draw in five) or above it; ``T0`` is 1
    half of the time and otherwise uniform on ``[1, 1.5]``; ``G(1)`` ranges
    from well below to a few times ``K0``, so some draws fail the lower-bound
    premise and are reported as inapplicable.
    """
    while True:
        mu = float(rng.uniform(0, 4))
        nu2 = float(rng.uniform(0, 1)) * (mu - 1) ** 2 / 4
        p = float(rng.uniform(1.5, 4))
        r1, _ = characteristic_roots(mu, nu2)
        a = -r1 + float(rng.uniform(0, 1)) * (rng.uniform() < 0.8)
        q = a * (p - 1) + 2
        if q < 0:
            continue
        B = float(10 ** rng.uniform(-1, 1))
        T0 = 1.0 if rng.uniform() < 0.5 else float(rng.uniform(1, 1.5))
        base = KatoProblem(mu, nu2, p, q, a, B, 1.0, T0, 1.0, 1.0)
        K0 = kato_thresholds(base).K0
        G1 = K0 * float(10 ** rng.uniform(-1.0, 0.5))
        G1p = float(rng.uniform(0.0, 2.0)) * G1 + max(0.0, -r1 * G1) + 1e-3
        return base.with_(K=K0, G1=G1, G1p=G1p)


def _mc_one(args):
    seed, draw = args
    rng = np.random.default_rng([seed, draw])
    prob = sample_problem(rng)
    rep = kato_lemma_check(prob)
    return draw, prob, rep


def monte_carlo(n_draws: int, seed: int = 0, jobs: int = 1):
    """Run :func:`kato_lemma_check` on ``n_draws`` independent samples.

    Each draw uses its own generator seeded by ``(seed, draw)``, so results do
    not depend on ``jobs``.
    """
    work = [(seed, i) for i in range(n_draws)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_mc_one, work))
    return [_mc_one(w) for w in work]


def write_monte_carlo_csv(path, results):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["draw", "K0", "T0_tilde", "T1", "blowup_time", "bound_satisfied", "status"])
        for draw, _, rep in results:
            th = rep.thresholds
            w.writerow([draw, repr(th.K0), repr(th.T0_tilde), repr(th.T1), repr(rep.blowup_time),
                        rep.bound_satisfied, rep.status])
