"""Model parameters, spectral constants and critical exponents.

Every quantity here is a pure function of ``(ell, mu, nu2, n)``; nothing is
cached.  Extended reals are plain floats, with ``math.inf`` standing for
"no finite exponent".
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NegativeDelta, NonpositiveDimension, ValidationError

__all__ = [
    "ModelParams",
    "SpectralConstants",
    "delta",
    "characteristic_roots",
    "strauss_exponent",
    "strauss_exponent_shifted",
    "shifted_quadratic_coefficients",
    "shifted_quadratic_residual",
    "fujita_exponent",
    "blowup_range_sup",
    "phi_ell",
    "amplitude",
    "amplitude_inv",
    "delta_invariance_check",
    "kernel_gamma",
    "kernel_constant",
    "spectral_constants",
    "exponent_collapse_residual",
]


@dataclass(frozen=True)
class ModelParams:
    """The quadruple ``(ell, mu, nu2, n)`` plus the data support radius ``R``."""

    ell: float = 0.0
    mu: float = 0.0
    nu2: float = 0.0
    n: int = 1
    R: float = 1.0

    def __post_init__(self):
        if not self.ell > -1:
            raise ValidationError(f"ell must be > -1, got {self.ell}")
        if self.mu < 0 or self.nu2 < 0:
            raise ValidationError("mu and nu2 must be nonnegative")
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n}")
        if not self.R > 0:
            raise ValidationError(f"R must be positive, got {self.R}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def delta(self) -> float:
        return delta(self.mu, self.nu2)

    def require_admissible(self) -> "ModelParams":
        """Raise :class:`NegativeDelta` unless ``delta >= 0``."""
        if self.delta < 0:
            raise NegativeDelta(f"delta = {self.delta} < 0 for mu={self.mu}, nu2={self.nu2}")
        return self

    def with_(self, **changes) -> "ModelParams":
        fields = dict(ell=self.ell, mu=self.mu, nu2=self.nu2, n=self.n, R=self.R)
        fields.update(changes)
        return ModelParams(**fields)


@dataclass(frozen=True)
class SpectralConstants:
    delta: float
    r1: float
    r2: float
    gamma: float
    c: float
    p_strauss_shifted: float
    p_fujita_shifted: float
    p_blowup_sup: float


def delta(mu: float, nu2: float) -> float:
    """Damping/mass discriminant ``(mu - 1)**2 - 4 nu2`` (may be negative)."""
    return (mu - 1.0) ** 2 - 4.0 * nu2


def _sqrt_delta(mu, nu2):
    d = delta(mu, nu2)
    if d < 0:
        raise NegativeDelta(f"delta = {d} < 0 for mu={mu}, nu2={nu2}")
    return math.sqrt(d)


def characteristic_roots(mu: float, nu2: float) -> tuple[float, float]:
    """Roots ``r1 >= r2`` of ``r**2 - (mu - 1) r + nu2 = 0``."""
    sd = _sqrt_delta(mu, nu2)
    s = mu - 1.0
    # Stable pairing: compute the large-magnitude root first, get the other from r1*r2 = nu2.
    if s >= 0:
        r1 = 0.5 * (s + sd)
        r2 = nu2 / r1 if r1 != 0 else 0.5 * (s - sd)
    else:
        r2 = 0.5 * (s - sd)
        r1 = nu2 / r2 if r2 != 0 else 0.5 * (s + sd)
    return r1 + 0.0, r2 + 0.0


def _larger_root(A: float, B: float, C: float) -> float:
    """Larger root of ``A p**2 - B p + C = 0`` with ``A > 0`` and ``C < 0``."""
    disc = math.sqrt(B * B - 4.0 * A * C)
    if B >= 0:
        return (B + disc) / (2.0 * A)
    return 2.0 * C / (B - disc)


def strauss_exponent(n_eff: float, ell: float) -> float:
    """Generalized Strauss exponent ``p_Str(n_eff, ell)``.

    Returns ``math.inf`` when the leading coefficient of the defining quadratic
    is not positive.
    """
    if not ell > -1:
        raise DomainError(f"ell must be > -1, got {ell}")
    if not n_eff > 0:
        raise NonpositiveDimension(f"n_eff must be positive, got {n_eff}")
    k = ell / (2.0 * (ell + 1.0))
    A = (n_eff - 1.0) / 2.0 + k
    B = (n_eff + 1.0) / 2.0 - 3.0 * k
    if A <= 0:
        return math.inf
    return _larger_root(A, B, -1.0)


def shifted_quadratic_coefficients(params: ModelParams) -> tuple[float, float, float]:
    """Coefficients ``(A, B, C)`` of ``A p**2 - B p - C = 0`` for the shifted exponent."""
    ell, mu, n = params.ell, params.mu, params.n
    A = (n - 1) * (ell + 1) / 2.0 + (ell + mu) / 2.0
    B = (n + 1) * (ell + 1) / 2.0 + (mu - 3.0 * ell) / 2.0
    C = ell + 1.0
    return A, B, C


def strauss_exponent_shifted(params: ModelParams) -> float:
    """Critical power ``p_Str(n + mu/(ell+1), ell)`` from its own quadratic."""
    A, B, C = shifted_quadratic_coefficients(params)
    if A <= 0:
        return math.inf
    return _larger_root(A, B, -C)


def shifted_quadratic_residual(params: ModelParams, p: float) -> float:
    A, B, C = shifted_quadratic_coefficients(params)
    return A * p * p - B * p - C


def fujita_exponent(d: float) -> float:
    if not d > 0:
        raise NonpositiveDimension(f"Fujita exponent needs d > 0, got {d}")
    return 1.0 + 2.0 / d


def _fujita_shifted(params: ModelParams) -> float:
    sd = _sqrt_delta(params.mu, params.nu2)
    d = (params.ell + 1) * params.n + (params.mu - 1.0 - sd) / 2.0
    # Nonpositive effective dimension: every p > 1 is below the threshold.
    return fujita_exponent(d) if d > 0 else math.inf


def blowup_range_sup(params: ModelParams) -> float:
    """Upper end of the known blow-up range for the power ``p``."""
    return max(strauss_exponent_shifted(params), _fujita_shifted(params))


def phi_ell(t, ell: float):
    """Primitive ``t**(ell+1)/(ell+1)`` of the propagation speed."""
    return np.power(t, ell + 1.0) / (ell + 1.0)


def amplitude(t, ell: float):
    """Light-cone radius ``A_ell(t) = phi_ell(t) - phi_ell(1)`` for ``t >= 1``."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 1.0):
        raise DomainError("amplitude is defined for t >= 1 only")
    out = np.expm1((ell + 1.0) * np.log(ta)) / (ell + 1.0)
    return float(out) if out.ndim == 0 else out


def amplitude_inv(sigma, ell: float):
    """Inverse of :func:`amplitude`: ``((ell+1) sigma + 1)**(1/(ell+1))``."""
    sa = np.asarray(sigma, dtype=float)
    if np.any(sa < 0):
        raise DomainError("amplitude_inv needs sigma >= 0")
    out = np.exp(np.log1p((ell + 1.0) * sa) / (ell + 1.0))
    return float(out) if out.ndim == 0 else out


def delta_invariance_check(mu: float, nu2: float, theta: float) -> tuple[float, float, float]:
    """Coefficients after ``psi = t**theta * phi`` and the discriminant they give.

    Returns ``(mu', nu2', delta')``; ``nu2'`` may be negative.
    """
    mu_t = mu - 2.0 * theta
    nu2_t = theta * theta - (mu - 1.0) * theta + nu2
    d_t = (mu_t - 1.0) ** 2 - 4.0 * nu2_t
    return mu_t, nu2_t, d_t


def kernel_gamma(params: ModelParams) -> float:
    sd = _sqrt_delta(params.mu, params.nu2)
    return 0.5 - sd / (2.0 * (params.ell + 1.0))


def kernel_constant(params: ModelParams) -> float:
    sd = _sqrt_delta(params.mu, params.nu2)
    e = sd / (1.0 + params.ell)
    return 2.0 ** (-e) * (1.0 + params.ell) ** (-1.0 + e)


def spectral_constants(params: ModelParams) -> SpectralConstants:
    params.require_admissible()
    r1, r2 = characteristic_roots(params.mu, params.nu2)
    return SpectralConstants(
        delta=params.delta,
        r1=r1,
        r2=r2,
        gamma=kernel_gamma(params),
        c=kernel_constant(params),
        p_strauss_shifted=strauss_exponent_shifted(params),
        p_fujita_shifted=_fujita_shifted(params),
        p_blowup_sup=blowup_range_sup(params),
    )


def exponent_collapse_residual(params: ModelParams, p: float | None = None) -> float:
    """Residual of the exponent identity that makes the iteration integrand ``1/x``.

    At the critical power the combination below equals ``-1``; the return value
    is ``lhs + 1``.
    """
    sc = spectral_constants(params)
    if p is None:
        p = sc.p_strauss_shifted
    ell, mu, n = params.ell, params.mu, params.n
    lead = (n - 1) / 2.0 + (ell + mu) / (2.0 * (ell + 1.0))
    lin = (sc.r2 + 2.0) / (ell + 1.0) + (n - 1) / 2.0 - sc.gamma
    return -lead * p * p + lin * p + 1.0
