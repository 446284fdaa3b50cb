"""Optimal per-bit refresh intervals for memories under a refresh power budget.

Bit ``b`` of a ``B``-bit word is refreshed every ``t_b`` seconds.  Its
retention BER follows ``alpha * exp(beta * t_b)``, the word MSE weights bit
``b`` by ``4**b``, and refresh power is ``sum(1/t_b)``.  The package finds
the MSE-minimizing intervals for a power budget, both for real-valued
intervals (closed form via the Lambert W function) and for integer multiples
of a step (branch-and-bound), fits ``alpha``/``beta`` from measurements and
compares optimal against uniform refresh across budgets.
"""
from .calibration import FitResult, RetentionMeasurement, default_paper_model, fit_ber_model
from .continuous import KktReport, SolveReport, intervals_for_dual, solve, solve_boxed, verify_kkt
from .discrete import (
    DiscretePlan,
    DiscreteSolveReport,
    brute_force_discrete,
    default_z_cap,
    root_relaxation,
    solve_discrete,
)
from .errors import (
    DomainError,
    InfeasibleError,
    InsufficientDataError,
    ModelValidityWarning,
    NonPhysicalFitError,
    NumericError,
    RefreshAllocError,
    SizeError,
    UnreachableFidelityError,
)
from .lambert import LambertResult, lambert_w0, lambert_w0_array
from .metrics import (
    BerModel,
    DeviceParams,
    RefreshPlan,
    bit_error_rate,
    max_power,
    min_mse,
    mse_for_psnr,
    psnr,
    refresh_power,
    word_mse,
)
from .sweep import (
    SweepRow,
    min_power_for_mse,
    power_savings,
    power_savings_at_psnr,
    run_sweep,
    uniform_plan_for_budget,
)

__version__ = "0.1.0"
