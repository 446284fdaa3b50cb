"""Model parameters plus the power and fidelity metrics of an interval plan.

Conventions: intervals are in seconds, index 0 is the LSB, and power is the
normalized refresh power ``sum(1/t_b)`` (switching capacitance set to 1).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ModelValidityWarning

DEFAULT_ALPHA = 2.7737e-7
DEFAULT_BETA = 1.9508
DEFAULT_DELTA = 0.064
DEFAULT_BITS = 8


@dataclass(frozen=True)
class BerModel:
    """Exponential retention BER law ``p(t) = alpha * exp(beta * t)``."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and > 0, got {v!r}")


@dataclass(frozen=True)
class DeviceParams:
    bits: int = DEFAULT_BITS
    delta: float = DEFAULT_DELTA
    gamma: int = 1

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 1:
            raise DomainError(f"bits must be an integer >= 1, got {self.bits!r}")
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise DomainError(f"delta must be finite and > 0, got {self.delta!r}")
        if int(self.gamma) != self.gamma or self.gamma < 1:
            raise DomainError(f"gamma must be an integer >= 1, got {self.gamma!r}")

    @property
    def step(self) -> float:
        """Discrete interval step ``gamma * delta``."""
        return self.gamma * self.delta

    def weights(self) -> np.ndarray:
        """Bit significance weights ``4**b``."""
        return 4.0 ** np.arange(self.bits)


@dataclass(frozen=True, eq=False)
class RefreshPlan:
    intervals: np.ndarray

    def __post_init__(self):
        t = np.array(self.intervals, dtype=float).ravel()
        t.setflags(write=False)
        object.__setattr__(self, "intervals", t)

    def __len__(self):
        return len(self.intervals)

    def __eq__(self, other):
        if not isinstance(other, RefreshPlan):
            return NotImplemented
        return np.array_equal(self.intervals, other.intervals)

    @classmethod
    def uniform(cls, bits: int, t: float) -> "RefreshPlan":
        return cls(np.full(bits, float(t)))

    def validate(self, params: DeviceParams, rtol: float = 0.0) -> None:
        if len(self) != params.bits:
            raise DomainError(f"plan has {len(self)} intervals, expected {params.bits}")
        if np.any(self.intervals < params.delta * (1.0 - rtol)):
            raise DomainError(f"every interval must be >= delta={params.delta}")


def bit_error_rate(model: BerModel, t: float) -> float:
    """BER of one bit refreshed every ``t`` seconds.

    Values above 0.5 are returned unclamped with a ``ModelValidityWarning``.
    """
    if not t > 0:
        raise DomainError(f"refresh interval must be > 0, got {t!r}")
    p = model.alpha * math.exp(model.beta * t)
    if p > 0.5:
        warnings.warn(
            f"BER {p:.3g} at t={t} s is outside the fitted model's validity",
            ModelValidityWarning,
            stacklevel=2,
        )
    return p


def refresh_power(plan: RefreshPlan) -> float:
    t = plan.intervals
    if np.any(~(t > 0)):
        raise DomainError("refresh power needs every interval > 0")
    return float(np.sum(1.0 / t))


def word_mse(model: BerModel, plan: RefreshPlan) -> float:
    """Expected squared error ``sum_b 4**b * BER(t_b)``.

    Treats bit errors as independent single flips; cross-bit terms are dropped.
    """
    t = plan.intervals
    w = 4.0 ** np.arange(len(t))
    return float(np.sum(w * model.alpha * np.exp(model.beta * t)))


def min_mse(model: BerModel, params: DeviceParams) -> float:
    """MSE of the all-``delta`` plan, via the geometric-series closed form."""
    return (4.0**params.bits - 1.0) / 3.0 * model.alpha * math.exp(model.beta * params.delta)


def max_power(params: DeviceParams) -> float:
    return params.bits / params.delta


def psnr(mse: float, bits: int) -> float:
    """Peak SNR in dB; ``mse == 0`` maps to ``inf``."""
    if mse == 0:
        return math.inf
    if not mse > 0:
        raise DomainError(f"PSNR needs mse >= 0, got {mse!r}")
    return 10.0 * math.log10((2.0**bits - 1.0) ** 2 / mse)


def mse_for_psnr(psnr_db: float, bits: int) -> float:
    """Inverse of :func:`psnr` at fixed word width."""
    return (2.0**bits - 1.0) ** 2 / 10.0 ** (psnr_db / 10.0)
