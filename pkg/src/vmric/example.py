"""Bivariate two-step example: an AR(2) driver and an independent AR(1) distractor.

Data generating process (0-based, ``t = 0 .. n-1``)::

    w[t] = phi1 w[t-1] + phi2 w[t-2] + delta[t],   Var(w) = 1
    z[t] = psi1 z[t-1] + upsilon[t],               Var(z) = 1
    y[t] = a w[t-1] + eps[t],                      Cov(eps) = sigma_eps

Two misspecified 2-step forecasting models compete: model 1 regresses
``y[t+2]`` on ``w[t]`` (it omits ``w[t-1]``), model 2 regresses it on the
uninformative ``z[t]``. All innovations are Gaussian.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .criteria import CriterionValue, PenaltySpec, vmric
from .errors import ConfigError, NonstationaryError
from .estimation import Records
from .selection import CandidateModel

__all__ = [
    "ExampleConfig",
    "TheoreticalIndices",
    "TABLE1",
    "MODEL1",
    "MODEL2",
    "HORIZON",
    "WARMUP",
    "STREAMS",
    "substream",
    "ar2_autocovariance",
    "delta_variance",
    "simulate_ar",
    "simulate_example",
    "gaussian_product_moments",
    "theoretical_indices",
    "model1_forecast_error_theory",
    "load_example_config",
]

HORIZON = 2
WARMUP = 1000
SIGMA_EPS = ((1.0, 0.5), (0.5, 1.0))

MODEL1 = CandidateModel(id=1, series="w")
MODEL2 = CandidateModel(id=2, series="z")

# substream labels; never renumber, recorded runs depend on them
STREAMS = {"delta": 0, "upsilon": 1, "eps": 2}


def substream(seed: int, *path: int) -> np.random.Generator:
    """Generator for the substream at ``path`` under the master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path)))


def _check_ar2(phi1: float, phi2: float) -> None:
    if not (-1.0 < phi2 < 1.0 and phi1 + phi2 < 1.0 and phi2 - phi1 < 1.0):
        raise NonstationaryError(f"AR(2) coefficients ({phi1}, {phi2}) are not stationary")


def delta_variance(phi1: float, phi2: float) -> float:
    """Innovation variance that gives the AR(2) process unit variance."""
    v = 1.0 - phi2**2 - phi1**2 * (1.0 + phi2) / (1.0 - phi2)
    if not v > 0.0:
        raise NonstationaryError(f"AR(2) coefficients ({phi1}, {phi2}) give innovation variance {v} <= 0")
    return v


def ar2_autocovariance(phi1: float, phi2: float, j: int) -> float:
    """Autocovariance at lag ``j`` of the unit-variance AR(2) process."""
    _check_ar2(phi1, phi2)
    j = abs(int(j))
    g_prev, g = 1.0, phi1 / (1.0 - phi2)
    if j == 0:
        return g_prev
    for _ in range(j - 1):
        g_prev, g = g, phi1 * g + phi2 * g_prev
    return g


def simulate_ar(phi, innovation_variance: float, n: int, warmup: int, rng: np.random.Generator) -> np.ndarray:
    """Simulate a Gaussian AR(p) from zero initial state, dropping ``warmup`` draws."""
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if not innovation_variance > 0:
        raise ConfigError(f"innovation variance must be positive, got {innovation_variance}")
    roots = np.roots(np.concatenate(([1.0], -phi))) if phi.size and phi.any() else np.array([])
    if roots.size and np.max(np.abs(roots)) >= 1.0:
        raise NonstationaryError(f"AR coefficients {phi.tolist()} are not stationary")
    innov = rng.standard_normal(n + warmup) * np.sqrt(innovation_variance)
    return kernels.ar_recursion(innov, phi)[warmup:]


@dataclass(frozen=True)
class ExampleConfig:
    phi1: float
    phi2: float
    a: tuple[float, float]
    psi1: float
    sigma_eps: tuple[tuple[float, float], tuple[float, float]] = SIGMA_EPS
    alpha_exponent: float = 0.85
    n: int = 1_000_000

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "sigma_eps", tuple(tuple(float(v) for v in row) for row in self.sigma_eps))
        if len(self.a) != 2:
            raise ConfigError("loading a must have two entries")
        if self.phi1 * self.phi2 == 0.0:
            raise ConfigError("phi1 * phi2 must be nonzero")
        _check_ar2(self.phi1, self.phi2)
        delta_variance(self.phi1, self.phi2)
        if not -1.0 < self.psi1 < 1.0:
            raise NonstationaryError(f"psi1 must lie in (-1, 1), got {self.psi1}")
        if not any(self.a):
            raise ConfigError("loading a must be nonzero")
        s = np.array(self.sigma_eps)
        if s.shape != (2, 2) or not np.allclose(s, s.T):
            raise ConfigError("sigma_eps must be a symmetric 2x2 matrix")
        if np.linalg.eigvalsh(s).min() <= 0:
            raise ConfigError("sigma_eps must be positive definite")
        PenaltySpec(self.alpha_exponent)
        if int(self.n) < HORIZON + 2:
            raise ConfigError(f"n must be at least {HORIZON + 2}, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def penalty(self) -> PenaltySpec:
        return PenaltySpec(self.alpha_exponent)

    @property
    def a_vec(self) -> np.ndarray:
        return np.array(self.a)

    @property
    def sigma_eps_matrix(self) -> np.ndarray:
        return np.array(self.sigma_eps)

    def replace(self, **changes) -> "ExampleConfig":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(changes)
        return ExampleConfig(**d)

    _JSON_KEYS = frozenset({"phi1", "phi2", "a1", "a2", "psi1", "alpha", "n", "sigma_eps", "case"})

    @classmethod
    def from_dict(cls, d: dict) -> "ExampleConfig":
        """Build from JSON keys ``phi1 phi2 a1 a2 psi1 alpha n sigma_eps``.

        ``case`` selects a Table 1 preset that the other keys then override.
        """
        unknown = set(d) - cls._JSON_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "case" in d:
            base = TABLE1.get(d["case"]) if isinstance(d["case"], int) else None
            if base is None:
                raise ConfigError(f"case must be one of {sorted(TABLE1)}, got {d['case']!r}")
            fields = {"phi1": base.phi1, "phi2": base.phi2, "a1": base.a[0], "a2": base.a[1], "psi1": base.psi1}
        else:
            fields = {}
        fields.update({k: v for k, v in d.items() if k != "case"})
        missing = {"phi1", "phi2", "a1", "a2", "psi1"} - set(fields)
        if missing:
            raise ConfigError(f"config is missing keys: {sorted(missing)}")
        try:
            return cls(
                phi1=float(fields["phi1"]),
                phi2=float(fields["phi2"]),
                a=(float(fields["a1"]), float(fields["a2"])),
                psi1=float(fields["psi1"]),
                sigma_eps=fields.get("sigma_eps", SIGMA_EPS),
                alpha_exponent=float(fields.get("alpha", 0.85)),
                n=int(fields.get("n", 1_000_000)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad config value: {exc}") from None

    def to_dict(self) -> dict:
        return {
            "phi1": self.phi1,
            "phi2": self.phi2,
            "a1": self.a[0],
            "a2": self.a[1],
            "psi1": self.psi1,
            "alpha": self.alpha_exponent,
            "n": self.n,
            "sigma_eps": [list(r) for r in self.sigma_eps],
        }


TABLE1 = {
    1: ExampleConfig(phi1=0.4, phi2=-0.75, a=(1.50, -2.00), psi1=0.80),
    2: ExampleConfig(phi1=-0.4, phi2=-0.45, a=(-0.75, 1.25), psi1=-0.65),
    3: ExampleConfig(phi1=0.3, phi2=-0.80, a=(1.00, 0.50), psi1=-0.75),
}


def load_example_config(path) -> tuple[ExampleConfig, int | None]:
    """Read an ``ExampleConfig`` (and optional ``seed``) from a JSON file."""
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    seed = d.pop("seed", None)
    return ExampleConfig.from_dict(d), (None if seed is None else int(seed))


def simulate_example(config: ExampleConfig, seed: int, path: tuple[int, ...] = (), n: int | None = None) -> Records:
    """Draw one realization of length ``n`` (default ``config.n``).

    Each innovation family has its own substream under ``(seed, *path)``,
    so a replication can be regenerated from its path alone.
    """
    n = config.n if n is None else int(n)
    sd = delta_variance(config.phi1, config.phi2)
    # one leading w value so y[0] = a w[-1] + eps[0] is defined
    w = simulate_ar((config.phi1, config.phi2), sd, n + 1, WARMUP, substream(seed, *path, STREAMS["delta"]))
    z = simulate_ar((config.psi1,), 1.0 - config.psi1**2, n, WARMUP, substream(seed, *path, STREAMS["upsilon"]))
    chol = np.linalg.cholesky(config.sigma_eps_matrix)
    eps = substream(seed, *path, STREAMS["eps"]).standard_normal((n, 2)) @ chol.T
    y = np.outer(w[:-1], config.a_vec) + eps
    return Records(series={"w": w[1:], "z": z}, y=y)


_PATTERNS = {(4, 0), (3, 1), (1, 3), (2, 2)}


def gaussian_product_moments(gamma, pattern: tuple[int, int], lag: int) -> float:
    """``E[w_t^p w_{t-lag}^q]`` for a zero-mean stationary Gaussian process.

    ``gamma`` maps a lag to the autocovariance; ``pattern`` is ``(p, q)``
    with ``p + q = 4``.
    """
    pattern = tuple(pattern)
    if pattern not in _PATTERNS:
        raise ConfigError(f"unsupported moment pattern {pattern}; use one of {sorted(_PATTERNS)}")
    g0 = gamma(0)
    gs = gamma(lag)
    if pattern == (4, 0):
        return 3.0 * g0**2
    if pattern in ((3, 1), (1, 3)):
        return 3.0 * g0 * gs
    return g0**2 + 2.0 * gs**2


@dataclass(frozen=True)
class TheoreticalIndices:
    mi_m1: np.ndarray
    vi_m1: np.ndarray
    c20_m1: np.ndarray
    c21_m1: np.ndarray
    mi_m2: np.ndarray
    vi_m2: np.ndarray
    gamma_w1: float
    sigma_delta2: float
    vmric_m1: CriterionValue
    vmric_m2: CriterionValue

    def to_dict(self) -> dict:
        return {
            "gamma_w1": self.gamma_w1,
            "sigma_delta2": self.sigma_delta2,
            "model1": {
                "mi": self.mi_m1.tolist(),
                "vi": self.vi_m1.tolist(),
                "c20": self.c20_m1.tolist(),
                "c21": self.c21_m1.tolist(),
                "vmric": self.vmric_m1.to_dict(),
            },
            "model2": {
                "mi": self.mi_m2.tolist(),
                "vi": self.vi_m2.tolist(),
                "vmric": self.vmric_m2.to_dict(),
            },
        }


def theoretical_indices(config: ExampleConfig, n: int | None = None) -> TheoreticalIndices:
    """Closed-form MI, VI and VMRIC of both models at sample size ``n``."""
    n = config.n if n is None else int(n)
    p1, p2 = config.phi1, config.phi2
    sigma = config.sigma_eps_matrix
    aa = np.outer(config.a_vec, config.a_vec)

    def gamma(j):
        return ar2_autocovariance(p1, p2, j)

    g1 = gamma(1)
    if g1 == 0.0:
        raise ConfigError("lag-1 autocovariance is zero; the model-1 VI formula is undefined")
    sd2 = delta_variance(p1, p2)
    m40 = gaussian_product_moments(gamma, (4, 0), 0)
    m31 = gaussian_product_moments(gamma, (3, 1), 1)
    m13 = gaussian_product_moments(gamma, (1, 3), 1)
    m22 = gaussian_product_moments(gamma, (2, 2), 1)

    mi1 = sigma + aa * (sd2 + p2**2 * (1.0 - g1**2))
    c20 = sigma + aa * (sd2 + p2**2 * (g1**2 * m40 - 2.0 * g1 * m31 + m22))
    b1 = 2.0 * p1 * p2 * g1 - p2
    b2 = -(p2**2)
    b3 = p2 * (p2 * g1 - 2.0 * p1 + 1.0 / g1)
    c21 = aa * g1 * (b1 * m31 + b2 * m13 + b3 * m22)
    # R = E[w^2] = 1
    vi1 = c20 + c21 + c21.T

    mi2 = sigma + aa
    vi2 = sigma + aa * (1.0 + 2.0 * config.psi1 * g1)

    spec = config.penalty
    return TheoreticalIndices(
        mi_m1=mi1,
        vi_m1=vi1,
        c20_m1=c20,
        c21_m1=c21,
        mi_m2=mi2,
        vi_m2=vi2,
        gamma_w1=g1,
        sigma_delta2=sd2,
        vmric_m1=vmric(mi1, vi1, spec, n),
        vmric_m2=vmric(mi2, vi2, spec, n),
    )


def model1_forecast_error_theory(config: ExampleConfig, j: int) -> np.ndarray:
    """``E[e_t w_{t-j}]`` for model 1's two-step forecast error."""
    j = int(j)
    if j == 0:
        return np.zeros(2)
    p1, p2 = config.phi1, config.phi2
    diff = ar2_autocovariance(p1, p2, j + 1) - ar2_autocovariance(p1, p2, j - 1)
    return -config.a_vec * p2 / (1.0 - p2) * diff


def model1_beta(config: ExampleConfig) -> np.ndarray:
    """Population coefficient of model 1, ``a (phi1 + phi1 phi2 / (1 - phi2))``."""
    return config.a_vec * (config.phi1 + config.phi1 * config.phi2 / (1.0 - config.phi2))
