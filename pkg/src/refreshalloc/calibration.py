"""Fit the exponential BER law to measured (interval, BER) pairs.

The fit is ordinary least squares on ``log(ber) = log(alpha) + beta * t``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List

import numpy as np

from .errors import DomainError, InsufficientDataError, NonPhysicalFitError
from .metrics import DEFAULT_ALPHA, DEFAULT_BETA, BerModel

CSV_HEADER = ("interval_s", "ber")


@dataclass(frozen=True)
class RetentionMeasurement:
    interval: float
    ber: float

    def __post_init__(self):
        if not (self.interval > 0 and math.isfinite(self.interval)):
            raise DomainError(f"measurement interval must be > 0, got {self.interval!r}")
        if not (0.0 < self.ber < 1.0):
            raise DomainError(f"measured BER must lie in (0, 1), got {self.ber!r}")


@dataclass(frozen=True)
class FitResult:
    model: BerModel
    r_squared: float
    residuals: np.ndarray  # log(ber) - fitted log(ber), per measurement


def default_paper_model() -> BerModel:
    """The 80 C fit: alpha = 2.7737e-7, beta = 1.9508 per second."""
    return BerModel(DEFAULT_ALPHA, DEFAULT_BETA)


def fit_ber_model(measurements: Iterable[RetentionMeasurement]) -> FitResult:
    ms = list(measurements)
    if len(ms) < 2:
        raise InsufficientDataError(f"need at least 2 measurements, got {len(ms)}")
    t = np.array([m.interval for m in ms], dtype=float)
    y = np.log(np.array([m.ber for m in ms], dtype=float))
    tc = t - t.mean()
    sxx = float(np.dot(tc, tc))
    if sxx == 0.0:
        raise InsufficientDataError("all measurements share one interval")
    slope = float(np.dot(tc, y - y.mean())) / sxx
    intercept = float(y.mean()) - slope * float(t.mean())
    if not slope > 0:
        raise NonPhysicalFitError(f"fitted beta={slope:.6g} <= 0; BER must grow with the interval")
    resid = y - (intercept + slope * t)
    sst = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / sst if sst > 0 else 1.0
    return FitResult(BerModel(math.exp(intercept), slope), min(1.0, max(0.0, r2)), resid)


def read_measurements_csv(path) -> List[RetentionMeasurement]:
    """Read a ``interval_s,ber`` CSV; BER values of zero are rejected."""
    with open(Path(path), newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise DomainError(f"measurement CSV header must be {','.join(CSV_HEADER)}, got {reader.fieldnames}")
        out = []
        for lineno, row in enumerate(reader, start=2):
            try:
                out.append(RetentionMeasurement(float(row["interval_s"]), float(row["ber"])))
            except (TypeError, ValueError) as exc:
                raise DomainError(f"{path}:{lineno}: {exc}") from exc
    return out


def write_measurements_csv(path, measurements: Iterable[RetentionMeasurement]) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for m in measurements:
            # float() first: repr of a numpy scalar is not parseable
            w.writerow([repr(float(m.interval)), repr(float(m.ber))])
