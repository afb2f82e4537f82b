"""Misspecification/variability indices and the criteria built on them."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, LagTooLargeError, SingularCovarianceError
from .estimation import OlsFit, SampleSet

__all__ = [
    "IndexMatrices",
    "CriterionValue",
    "PenaltySpec",
    "estimate_mi",
    "estimate_cross_cov",
    "estimate_vi",
    "estimate_indices",
    "spectral_norm",
    "penalty_weight",
    "vmric",
    "mric_univariate",
    "aic_bic",
]


@dataclass(frozen=True)
class IndexMatrices:
    mi: np.ndarray
    cross_cov: list[np.ndarray]
    vi: np.ndarray


@dataclass(frozen=True)
class CriterionValue:
    """Criterion score with its two components kept apart.

    ``total == mi_norm + penalty_weight * vi_norm``.
    """

    mi_norm: float
    vi_norm: float
    penalty_weight: float
    total: float

    def to_dict(self) -> dict:
        return {
            "mi_norm": self.mi_norm,
            "vi_norm": self.vi_norm,
            "penalty_weight": self.penalty_weight,
            "total": self.total,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CriterionValue":
        return cls(float(d["mi_norm"]), float(d["vi_norm"]), float(d["penalty_weight"]), float(d["total"]))


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty sequence ``alpha_n = n ** alpha_exponent``.

    The exponent must lie strictly inside (0, 1) so that ``alpha_n / sqrt(n)``
    diverges while ``alpha_n / n`` vanishes.
    """

    alpha_exponent: float = 0.85

    def __post_init__(self):
        a = float(self.alpha_exponent)
        if not 0.0 < a < 1.0:
            raise ConfigError(f"penalty exponent must lie in (0, 1), got {self.alpha_exponent}")
        object.__setattr__(self, "alpha_exponent", a)


def estimate_mi(residuals) -> np.ndarray:
    """Average outer product of the residual rows."""
    e = np.atleast_2d(np.asarray(residuals, dtype=float))
    mi = e.T @ e / e.shape[0]
    return 0.5 * (mi + mi.T)


def estimate_cross_cov(x, residuals, s: int) -> np.ndarray:
    """Lag-``s`` cross moment of the predictor-scaled residuals.

    ``(N - s)^-1 * sum_t x[t] x[t+s] e[t] e[t+s]^T`` over ``t < N - s``.
    Only the first ``N`` values of ``x`` are used.
    """
    e = np.atleast_2d(np.asarray(residuals, dtype=float))
    N = e.shape[0]
    if s < 0:
        raise LagTooLargeError(f"lag must be nonnegative, got {s}")
    if s >= N:
        raise LagTooLargeError(f"lag {s} needs more than N={N} residual rows")
    x = np.asarray(x, dtype=float)[:N]
    c = kernels.lagged_cross_moment(x, e, s)
    if s == 0:
        c = 0.5 * (c + c.T)
    return c


def estimate_vi(r_hat: float, cross_cov, h: int) -> np.ndarray:
    if len(cross_cov) != h:
        raise ConfigError(f"expected {h} cross-covariance matrices (lags 0..{h - 1}), got {len(cross_cov)}")
    if not r_hat > 0:
        raise ConfigError(f"r_hat must be positive, got {r_hat}")
    total = np.array(cross_cov[0], dtype=float, copy=True)
    for c in cross_cov[1:]:
        total += c + c.T
    vi = total / r_hat
    return 0.5 * (vi + vi.T)


def estimate_indices(sample: SampleSet, fit: OlsFit) -> IndexMatrices:
    """Method-of-moments estimates of MI, the lag cross moments and VI."""
    mi = estimate_mi(fit.residuals)
    cross = [estimate_cross_cov(sample.x_train, fit.residuals, s) for s in range(sample.h)]
    vi = estimate_vi(fit.r_hat, cross, sample.h)
    return IndexMatrices(mi=mi, cross_cov=cross, vi=vi)


def spectral_norm(m) -> float:
    """Largest singular value; closed forms for 1x1 and 2x2 inputs."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.shape == (1, 1):
        return abs(float(m[0, 0]))
    if m.shape == (2, 2):
        a, b, c, d = (float(v) for v in m.ravel())
        if b == c:
            return abs(0.5 * (a + d)) + math.hypot(0.5 * (a - d), b)
        return 0.5 * (math.hypot(a + d, b - c) + math.hypot(a - d, b + c))
    return float(np.linalg.norm(m, 2))


def penalty_weight(spec: PenaltySpec, n: int) -> float:
    """``alpha_n / n = n ** (alpha - 1)``."""
    if n < 1:
        raise ConfigError(f"sample size must be positive, got {n}")
    return float(n) ** (spec.alpha_exponent - 1.0)


def vmric(mi, vi, spec: PenaltySpec, n: int) -> CriterionValue:
    mi = np.atleast_2d(np.asarray(mi, dtype=float))
    vi = np.atleast_2d(np.asarray(vi, dtype=float))
    if mi.shape != vi.shape or mi.shape[0] != mi.shape[1]:
        raise ConfigError(f"MI {mi.shape} and VI {vi.shape} must be equal square shapes")
    pw = penalty_weight(spec, n)
    mi_norm = spectral_norm(mi)
    vi_norm = spectral_norm(vi)
    return CriterionValue(mi_norm=mi_norm, vi_norm=vi_norm, penalty_weight=pw, total=mi_norm + pw * vi_norm)


def mric_univariate(x, residuals, r_hat: float, h: int, spec: PenaltySpec, n: int) -> CriterionValue:
    """Univariate MRIC, ``MI + (alpha_n / n) * VI`` with the trace form of VI.

    With one response and one predictor the traces are scalars. ``vi_norm``
    holds the signed VI estimate here (it can dip below zero in small
    samples), so ``total`` follows the scalar criterion exactly.
    """
    e = np.asarray(residuals, dtype=float).reshape(-1)
    N = e.shape[0]
    x = np.asarray(x, dtype=float)[:N]
    mi = float(e @ e) / N
    u = x * e
    vi = float(u @ u) / N / r_hat
    for s in range(1, h):
        vi += 2.0 * float(u[: N - s] @ u[s:]) / (N - s) / r_hat
    pw = penalty_weight(spec, n)
    return CriterionValue(mi_norm=mi, vi_norm=vi, penalty_weight=pw, total=mi + pw * vi)


def aic_bic(residuals, k: int) -> tuple[float, float]:
    """Gaussian-likelihood AIC and BIC of a multivariate regression.

    ``N log det S + 2k`` and ``N log det S + k log N`` where ``S`` is the
    residual covariance with divisor ``N``.
    """
    e = np.atleast_2d(np.asarray(residuals, dtype=float))
    N = e.shape[0]
    if k < 1:
        raise ConfigError(f"parameter count must be positive, got {k}")
    sign, logdet = np.linalg.slogdet(estimate_mi(e))
    if sign <= 0 or not np.isfinite(logdet):
        raise SingularCovarianceError("residual covariance is singular")
    fit_term = N * logdet
    return fit_term + 2.0 * k, fit_term + k * math.log(N)
