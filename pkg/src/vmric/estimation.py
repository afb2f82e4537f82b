"""Samples and OLS fitting for the scalar-predictor forecasting model.

The model regresses the ``w`` responses ``h`` steps ahead on a single
predictor observed today::

    y[t + h] = b * x[t] + e[t],   t = 0 .. N - 1,   N = n - h

All arrays are 0-based; ``x[t]`` pairs with ``Y[t + h]``.
"""
from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DegeneratePredictorError

__all__ = [
    "SampleSet",
    "OlsFit",
    "Records",
    "sample_second_moment",
    "fit_ols",
    "forecast",
    "read_records_csv",
    "write_records_csv",
]

_RESPONSE_COLUMN = re.compile(r"^y(\d+)$")


@dataclass(frozen=True)
class SampleSet:
    """A predictor series, a response matrix and a forecast horizon.

    Attributes
    ----------
    x : ndarray, shape (n,)
        Scalar predictor, assumed zero mean.
    y : ndarray, shape (n, w)
        Responses.
    h : int
        Forecast horizon. The training window is the first ``N = n - h``
        predictor values.
    """

    x: np.ndarray
    y: np.ndarray
    h: int

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if y.ndim == 1:
            y = y[:, None]
        if x.ndim != 1 or y.ndim != 2:
            raise ConfigError("x must be 1-D and y must be 1-D or 2-D")
        if x.shape[0] != y.shape[0]:
            raise ConfigError(f"x has {x.shape[0]} rows but y has {y.shape[0]}")
        if y.shape[1] < 1:
            raise ConfigError("y needs at least one response column")
        h = int(self.h)
        if h < 1:
            raise ConfigError(f"horizon must be positive, got {self.h}")
        if x.shape[0] < h + 2:
            raise ConfigError(f"need n >= h + 2 observations, got n={x.shape[0]}, h={h}")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ConfigError("sample contains non-finite values")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "h", h)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def w(self) -> int:
        return self.y.shape[1]

    @property
    def N(self) -> int:
        return self.n - self.h

    @property
    def x_train(self) -> np.ndarray:
        return self.x[: self.N]

    @property
    def y_target(self) -> np.ndarray:
        """Responses aligned with ``x_train``: rows ``h .. n - 1``."""
        return self.y[self.h :]

    def centered(self) -> "SampleSet":
        """Copy with the full-sample means of ``x`` and ``y`` removed."""
        return SampleSet(self.x - self.x.mean(), self.y - self.y.mean(axis=0), self.h)


@dataclass(frozen=True)
class OlsFit:
    b_hat: np.ndarray
    r_hat: float
    residuals: np.ndarray

    @property
    def w(self) -> int:
        return self.b_hat.shape[0]

    def to_dict(self) -> dict:
        return {
            "b_hat": self.b_hat.tolist(),
            "r_hat": self.r_hat,
            "n_train": int(self.residuals.shape[0]),
            "residual_norm": float(np.linalg.norm(self.residuals)),
        }


def sample_second_moment(x, N: int) -> float:
    """Mean of ``x[t]**2`` over the first ``N`` values."""
    x = np.asarray(x, dtype=float)
    if not 1 <= N <= x.shape[0]:
        raise ConfigError(f"window length N={N} outside [1, {x.shape[0]}]")
    window = x[:N]
    r = float(window @ window) / N
    if not r > 0.0:
        raise DegeneratePredictorError("predictor is identically zero over the training window")
    return r


def fit_ols(sample: SampleSet) -> OlsFit:
    N = sample.N
    x = sample.x_train
    y = sample.y_target
    r_hat = sample_second_moment(sample.x, N)
    b_hat = (x @ y) / N / r_hat
    residuals = y - np.outer(x, b_hat)
    return OlsFit(b_hat=b_hat, r_hat=r_hat, residuals=residuals)


def forecast(fit: OlsFit, xn: float) -> np.ndarray:
    """Point forecast ``b_hat * xn`` of the response ``h`` steps ahead."""
    return fit.b_hat * float(xn)


@dataclass(frozen=True)
class Records:
    """Raw multivariate record: named predictor series plus a response matrix."""

    series: dict[str, np.ndarray] = field(default_factory=dict)
    y: np.ndarray = field(default_factory=lambda: np.empty((0, 1)))

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.ndim == 1:
            y = y[:, None]
        series = {k: np.asarray(v, dtype=float) for k, v in self.series.items()}
        for name, values in series.items():
            if values.shape != (y.shape[0],):
                raise ConfigError(f"series {name!r} has shape {values.shape}, expected ({y.shape[0]},)")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "series", series)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    def sample(self, series: str, h: int, lag: int = 0) -> SampleSet:
        """Build the sample that forecasts ``y`` from ``series`` lagged by ``lag``."""
        if series not in self.series:
            raise ConfigError(f"unknown predictor series {series!r}; have {sorted(self.series)}")
        if lag < 0:
            raise ConfigError(f"lag must be nonnegative, got {lag}")
        x = self.series[series]
        if lag:
            x, y = x[: self.n - lag], self.y[lag:]
        else:
            y = self.y
        return SampleSet(x, y, h)


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"line {line}: column {column!r} is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"line {line}: column {column!r} is not finite: {text!r}")
    return value


def read_records_csv(source) -> Records:
    """Parse a CSV with predictor columns and responses ``y1 .. yw``.

    Every field must be a finite number; blank, ``nan`` and ``inf`` values
    are rejected.
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ConfigError("empty CSV") from None
    if len(set(header)) != len(header):
        raise ConfigError(f"duplicate column names in header {header}")
    responses = sorted(
        (int(m.group(1)), i) for i, name in enumerate(header) if (m := _RESPONSE_COLUMN.match(name))
    )
    if not responses:
        raise ConfigError("CSV has no response columns (expected y1, y2, ...)")
    if [k for k, _ in responses] != list(range(1, len(responses) + 1)):
        raise ConfigError("response columns must be y1 .. yw without gaps")
    rows = []
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ConfigError(f"line {line}: expected {len(header)} fields, got {len(row)}")
        rows.append([_parse_float(v, line, header[i]) for i, v in enumerate(row)])
    if not rows:
        raise ConfigError("CSV has a header but no data rows")
    data = np.array(rows)
    response_idx = [i for _, i in responses]
    series = {name: data[:, i] for i, name in enumerate(header) if i not in response_idx}
    return Records(series=series, y=data[:, response_idx])


def write_records_csv(records: Records, target) -> None:
    header = list(records.series) + [f"y{j + 1}" for j in range(records.y.shape[1])]
    columns = np.column_stack([*records.series.values(), records.y])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in columns:
        writer.writerow([repr(float(v)) for v in row])
    if isinstance(target, (str, Path)):
        Path(target).write_text(buf.getvalue(), encoding="utf-8")
    else:
        target.write(buf.getvalue())
