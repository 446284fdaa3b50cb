"""
Fitting the BER model to retention measurements
===============================================

Generate noisy retention measurements from a known exponential law, write
them in the ``interval_s,ber`` CSV format, read them back and fit.
"""

import math
import tempfile
from pathlib import Path

import numpy as np

from refreshalloc import RetentionMeasurement, fit_ber_model
from refreshalloc.calibration import read_measurements_csv, write_measurements_csv

rng = np.random.default_rng(0)
alpha, beta = 2.7737e-7, 1.9508
intervals = np.linspace(0.5, 4.0, 12)
ms = [RetentionMeasurement(t, alpha * math.exp(beta * t + rng.normal(0, 0.15))) for t in intervals]

path = Path(tempfile.mkdtemp()) / "retention.csv"
write_measurements_csv(path, ms)
print(path.read_text().splitlines()[:3])

fit = fit_ber_model(read_measurements_csv(path))
print(f"alpha={fit.model.alpha:.4e} (true {alpha:.4e})  beta={fit.model.beta:.4f} (true {beta})")
print(f"r^2 in log space: {fit.r_squared:.4f}")
