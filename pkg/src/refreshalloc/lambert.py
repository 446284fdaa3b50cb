"""Principal branch of the Lambert W function on the nonnegative reals.

Only ``x >= 0`` is supported, which is all the refresh solver ever needs:
its argument is a product of positive factors.  Both entry points run
Halley's method from ``w0 = log1p(x)``.  The iteration is written in terms
of ``r = w - x*exp(-w)`` (the residual divided by ``exp(w)``) so that very
large arguments do not overflow ``exp(w)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError

STEP_TOL = 1e-14
MAX_ITER = 50


@dataclass(frozen=True)
class LambertResult:
    value: float
    iterations: int
    residual: float  # |w*exp(w) - x|


def _halley(x):
    w = math.log1p(x)
    for it in range(1, MAX_ITER + 1):
        r = w - x * math.exp(-w)
        step = r / ((w + 1.0) - (w + 2.0) * r / (2.0 * w + 2.0))
        w -= step
        if abs(step) <= STEP_TOL * (1.0 + abs(w)):
            return w, it
    raise NumericError(f"Lambert W did not converge for x={x!r} in {MAX_ITER} iterations")


def lambert_w0(x: float) -> LambertResult:
    """Return ``w >= 0`` with ``w * exp(w) == x``.

    >>> round(lambert_w0(math.e).value, 15)
    1.0
    """
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"lambert_w0 needs a finite x >= 0, got {x!r}")
    if x == 0.0:
        return LambertResult(0.0, 0, 0.0)
    w, it = _halley(x)
    if w < 700.0:
        residual = abs(w * math.exp(w) - x)
    else:
        # w*exp(w) overflows; measure relative to x then rescale
        residual = abs(w * math.exp(w - math.log(x)) - 1.0) * x
    return LambertResult(w, it, residual)


def w0(x: float) -> float:
    """Scalar fast path used inside the solvers' inner loops."""
    if x == 0.0:
        return 0.0
    if not x > 0.0 or x == math.inf:
        raise DomainError(f"lambert_w0 needs a finite x >= 0, got {x!r}")
    return _halley(x)[0]


def lambert_w0_array(x) -> np.ndarray:
    """Vectorized W0 for arrays of nonnegative arguments."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x < 0.0):
        raise DomainError("lambert_w0_array needs finite arguments >= 0")
    w = np.log1p(x)
    done = np.zeros(x.shape, dtype=bool)
    for _ in range(MAX_ITER):
        r = w - x * np.exp(-w)
        step = r / ((w + 1.0) - (w + 2.0) * r / (2.0 * w + 2.0))
        step = np.where(done, 0.0, step)
        w = w - step
        done |= np.abs(step) <= STEP_TOL * (1.0 + np.abs(w))
        if done.all():
            return w
    raise NumericError("Lambert W did not converge for some array entries")
