"""Sequences and lower-bound functionals of the iteration argument.

Everything that grows doubly exponentially in ``j`` (``B_j`` and ``K_j``) is
carried as a natural logarithm.  The multiplicative constants ``D``, ``B0``,
``M`` and ``Q`` are configured inputs; ``E0``, ``E1``, ``E2`` and ``N`` are
derived from them so that the product and exponential forms of ``K_j`` agree.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .errors import DomainError, ValidationError
from .model import ModelParams, amplitude_inv, characteristic_roots, phi_ell, strauss_exponent_shifted

__all__ = [
    "IterationConfig",
    "IterationState",
    "initial_state",
    "sequence_step",
    "states",
    "a_closed",
    "alpha_closed",
    "recurse_log_B",
    "log_B_closed_form",
    "beta",
    "beta_tilde",
    "beta_from_cone",
    "sigma_terms",
    "sigma_j",
    "L_value",
    "K_j_log",
    "K_j_log_product",
    "T0",
    "lifespan_bound",
    "find_j0",
    "find_J",
    "first_lower_bound",
    "write_sequence_csv",
    "write_lifespan_csv",
]


@dataclass(frozen=True)
class IterationConfig:
    """Parameters of the iteration; ``p`` defaults to the shifted Strauss exponent."""

    params: ModelParams
    theta: float = 0.75
    a0: float = 2.0
    alpha0: float = 4.0
    D: float = 1.0
    B0: float = 1.0
    M: float = 1.0
    Q: float = 1.0
    T2: float = 2.5
    p: float | None = None

    def __post_init__(self):
        self.params.require_admissible()
        if not 0.5 < self.theta < 1:
            raise ValidationError(f"theta must lie in (1/2, 1), got {self.theta}")
        if self.a0 < max(2.0, 1.0 / (2 * self.theta - 1)):
            raise ValidationError("need a0 >= max(2, 1/(2 theta - 1))")
        if not self.alpha0 > 2 * (self.T2 ** (self.params.ell + 1) - 1):
            raise ValidationError("need alpha0 > 2 (T2**(ell+1) - 1)")
        if min(self.D, self.B0, self.M, self.Q) <= 0:
            raise ValidationError("D, B0, M, Q must be positive")
        if self.p is None:
            object.__setattr__(self, "p", strauss_exponent_shifted(self.params))
        if not (self.p > 1 and math.isfinite(self.p)):
            raise ValidationError(f"need a finite p > 1, got {self.p}")

    @property
    def ratio(self) -> float:
        return 4.0 / (1.0 - self.theta)

    @property
    def log_E0(self) -> float:
        p = self.p
        return math.log(self.B0) - p / (p - 1) ** 2 * math.log(p) + math.log(self.D) / (p - 1)

    @property
    def log_E1(self) -> float:
        return math.log(self.Q) + self.log_E0 / self.p

    @property
    def E1(self) -> float:
        return math.exp(self.log_E1)

    @property
    def E2(self) -> float:
        return math.exp((self.p - 1) * (1.0 - self.log_E1))

    @property
    def log_N(self) -> float:
        p = self.p
        return math.log(self.M) + math.log(p) / (p - 1) ** 2 - math.log(self.D) / (p - 1)


@dataclass(frozen=True)
class IterationState:
    j: int
    a_j: float
    alpha_j: float
    log_B_j: float


def initial_state(cfg: IterationConfig) -> IterationState:
    return IterationState(0, cfg.a0, cfg.alpha0, math.log(cfg.B0))


def _step(j, a, alpha, logB, theta, p, logD):
    return (j + 1,
            1.0 + 4.0 * (a - 1.0) / (1.0 - theta),
            -2.0 + 4.0 * (alpha + 2.0) / (1.0 - theta),
            p * logB - (j + 1) * math.log(p) + logD)


def sequence_step(state: IterationState, cfg: IterationConfig) -> IterationState:
    """Advance ``(a_j, alpha_j, ln B_j)`` by one index using the recursions."""
    return IterationState(*_step(state.j, state.a_j, state.alpha_j, state.log_B_j,
                                 cfg.theta, cfg.p, math.log(cfg.D)))


def recurse_log_B(j: int, p: float, log_B0: float, log_D: float) -> float:
    """``ln B_j`` by iterating the recursion from an arbitrary start (no config checks)."""
    v = log_B0
    for k in range(j):
        v = p * v - (k + 1) * math.log(p) + log_D
    return v


def states(cfg: IterationConfig, j_max: int) -> list[IterationState]:
    out = [initial_state(cfg)]
    for _ in range(j_max):
        out.append(sequence_step(out[-1], cfg))
    return out


def a_closed(j: int, cfg: IterationConfig) -> float:
    return (cfg.a0 - 1.0) * cfg.ratio**j + 1.0


def alpha_closed(j: int, cfg: IterationConfig) -> float:
    return (cfg.alpha0 + 2.0) * cfg.ratio**j - 2.0


def log_B_closed_form(j: int, cfg: IterationConfig) -> float:
    if j < 0:
        raise DomainError("j must be nonnegative")
    if j == 0:
        return math.log(cfg.B0)
    p = cfg.p
    lp = math.log(p)
    return p**j * cfg.log_E0 + (j + 1) * lp / (p - 1) + lp / (p - 1) ** 2 - math.log(cfg.D) / (p - 1)


def _phi1(cfg):
    return phi_ell(1.0, cfg.params.ell)


def beta(j: int, cfg: IterationConfig) -> float:
    ell, n, R = cfg.params.ell, cfg.params.n, cfg.params.R
    _, r2 = characteristic_roots(cfg.params.mu, cfg.params.nu2)
    f1 = _phi1(cfg)
    base = 0.5 * (1.0 + f1 / (4 * a_closed(j, cfg) * R + (4 * alpha_closed(j, cfg) + 3) * f1))
    return 1.0 - base ** ((r2 + 2) / (ell + 1) + n - 1)


def beta_from_cone(j: int, cfg: IterationConfig) -> float:
    """``beta_j`` from its defining form through the inverse cone amplitude."""
    ell, n, R = cfg.params.ell, cfg.params.n, cfg.params.R
    _, r2 = characteristic_roots(cfg.params.mu, cfg.params.nu2)
    s = amplitude_inv(4 * a_closed(j, cfg) * R + 2 * (2 * alpha_closed(j, cfg) + 1) * _phi1(cfg), ell)
    return 1.0 - ((1.0 + s ** (-(ell + 1))) / 2.0) ** ((r2 + 2) / (ell + 1) + n - 1)


def beta_tilde(j: int, cfg: IterationConfig) -> float:
    ell, n, R = cfg.params.ell, cfg.params.n, cfg.params.R
    r1, _ = characteristic_roots(cfg.params.mu, cfg.params.nu2)
    f1 = _phi1(cfg)
    base = 0.5 * (1.0 + f1 / (8 * a_closed(j, cfg) * R + (8 * alpha_closed(j, cfg) + 5) * f1))
    return 1.0 - base ** ((r1 + 2) / (ell + 1) + n - 1)


def _log_sigma_quadratic(j: int, cfg: IterationConfig) -> float:
    """``ln`` of the quadratic candidate of ``sigma_j``, overflow-free.

    Uses ``(a_j - 1) R + (alpha_j + 2) phi(1) = ratio**j ((a0 - 1) R + (alpha0 + 2) phi(1))``.
    """
    ell, R = cfg.params.ell, cfg.params.R
    base = (cfg.a0 - 1) * R + (cfg.alpha0 + 2) * _phi1(cfg)
    log_x = math.log(16.0) - 2 * math.log(1 - cfg.theta) + 2 * (j * math.log(cfg.ratio) + math.log(base))
    # ln A^{-1}(x) = ln((ell+1) x + 1) / (ell+1)
    u = math.log(ell + 1) + log_x
    return (u + math.log1p(math.exp(-u))) / (ell + 1)


def _log_sigma_linear(j: int, cfg: IterationConfig) -> float:
    ell, R = cfg.params.ell, cfg.params.R
    f1 = _phi1(cfg)
    # 8 a_j R + 4 (2 alpha_j + 1) phi(1) = ratio**j (8 (a0-1) R + 8 (alpha0+2) phi(1)) + 8 R - 12 phi(1)
    big = 8 * (cfg.a0 - 1) * R + 8 * (cfg.alpha0 + 2) * f1
    u = math.log(ell + 1) + j * math.log(cfg.ratio) + math.log(big)
    rest = (ell + 1) * (8 * R - 12 * f1) + 1
    return (u + math.log1p(rest * math.exp(-u))) / (ell + 1)


def sigma_terms(j: int, cfg: IterationConfig) -> tuple[float, float, float, float]:
    """The four candidates whose maximum is ``sigma_j`` (``inf`` past float range)."""
    ell = cfg.params.ell
    big = lambda v: math.exp(v) if v < 709.0 else math.inf
    return (big(_log_sigma_linear(j, cfg)), big(_log_sigma_quadratic(j, cfg)),
            2.0 ** (1 / (ell + 1)), (2.0 * (ell + 1)) ** (1 / (ell + 1)))


def sigma_j(j: int, cfg: IterationConfig) -> float:
    return max(sigma_terms(j, cfg))


def _check_t(t):
    if not t > 1:
        raise DomainError(f"need t > 1, got {t}")


def L_value(t: float, eps: float, cfg: IterationConfig) -> float:
    """``ln(E1 eps**p (ln t)**(1/(p-1)))``."""
    _check_t(t)
    return cfg.log_E1 + cfg.p * math.log(eps) + math.log(math.log(t)) / (cfg.p - 1)


def K_j_log(j: int, t: float, eps: float, cfg: IterationConfig) -> float:
    """``ln K_j(t, eps)`` in the exponential form built on ``L``."""
    _check_t(t)
    p = cfg.p
    return (p ** (j + 1) * L_value(t, eps, cfg) + cfg.log_N
            + math.log(beta(j, cfg) * beta_tilde(j, cfg))
            + (j + 1) * math.log(p) / (p - 1) - math.log(math.log(t)) / (p - 1))


def K_j_log_product(j: int, t: float, eps: float, cfg: IterationConfig, log_B_j: float | None = None) -> float:
    """``ln K_j(t, eps)`` from the product of its factors."""
    _check_t(t)
    p = cfg.p
    if log_B_j is None:
        log_B_j = recurse_log_B(j, p, math.log(cfg.B0), math.log(cfg.D))
    return (math.log(cfg.M) + math.log(beta(j, cfg) * beta_tilde(j, cfg)) + p ** (j + 1) * math.log(cfg.Q)
            + log_B_j + p ** (j + 2) * math.log(eps)
            + (p ** (j + 1) - 1) / (p - 1) * math.log(math.log(t)))


def T0(eps: float, cfg: IterationConfig) -> float:
    """Time after which ``L(t, eps) >= 1``: ``exp(E2 eps**(-p(p-1)))``."""
    x = cfg.E2 * eps ** (-cfg.p * (cfg.p - 1))
    return math.exp(x) if x < 709.0 else math.inf


def lifespan_bound(eps: float, cfg: IterationConfig) -> float:
    """``exp(E eps**(-p(p-1)))`` with ``E = 2 E1``; ``inf`` on overflow."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    x = 2.0 * cfg.E1 * eps ** (-cfg.p * (cfg.p - 1))
    return math.exp(x) if x < 709.0 else math.inf


def find_j0(cfg: IterationConfig, j_max: int = 200) -> int:
    """First ``j`` from which the quadratic term of ``sigma_j`` is the maximum.

    Relative to the configured constants; checked up to ``j_max``.
    """
    j0 = None
    ell = cfg.params.ell
    const = max(math.log(2.0), math.log(2.0 * (ell + 1))) / (ell + 1)
    for j in range(j_max + 1):
        q = _log_sigma_quadratic(j, cfg)
        if q >= max(_log_sigma_linear(j, cfg), const):
            if j0 is None:
                j0 = j
        else:
            j0 = None
    if j0 is None:
        raise DomainError(f"quadratic term never dominates up to j = {j_max}")
    return j0


def _jump_exponent(j: int, cfg: IterationConfig) -> float:
    p = cfg.p
    log_s_next = _log_sigma_quadratic(j + 1, cfg)
    return (p ** (j + 1) + cfg.log_N + math.log(beta(j, cfg) * beta_tilde(j, cfg))
            + (j + 1) * math.log(p) / (p - 1) - math.log(log_s_next) / (p - 1))


def find_J(cfg: IterationConfig, log_K0: float = 0.0, j_max: int = 60) -> int:
    """Smallest ``J >= j0`` with the ``L >= 1`` lower bound of ``ln K_j`` above ``log_K0`` for all ``J <= j <= j_max``."""
    j0 = find_j0(cfg)
    J = None
    for j in range(j0, j_max + 1):
        if _jump_exponent(j, cfg) >= log_K0:
            if J is None:
                J = j
        else:
            J = None
    if J is None:
        raise DomainError(f"no J found up to j = {j_max}")
    return J


def first_lower_bound(t: float, eps: float, C_tilde: float, params: ModelParams, p: float) -> float:
    """``C_tilde eps**p t**(-((n-1)(ell+1)/2 + (ell+mu)/2) p + (n-1)(ell+1))``."""
    ell, mu, n = params.ell, params.mu, params.n
    e = -((n - 1) * (ell + 1) / 2 + (ell + mu) / 2) * p + (n - 1) * (ell + 1)
    return C_tilde * eps**p * t**e


def write_sequence_csv(path, cfg: IterationConfig, j_max: int):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["j", "a_j", "alpha_j", "log_B_j", "beta_j", "beta_tilde_j", "sigma_j"])
        for st in states(cfg, j_max):
            j = st.j
            w.writerow([j, repr(st.a_j), repr(st.alpha_j), repr(st.log_B_j), repr(beta(j, cfg)),
                        repr(beta_tilde(j, cfg)), repr(sigma_j(j, cfg))])


def write_lifespan_csv(path, cfg: IterationConfig, eps_values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["eps", "lifespan_bound", "T0"])
        for e in eps_values:
            w.writerow([repr(float(e)), repr(lifespan_bound(e, cfg)), repr(T0(e, cfg))])
