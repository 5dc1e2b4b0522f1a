"""Economy-environment-society (EVS) Lotka-Volterra sustainability engine."""
from .equilibria import (
    FixedPointRecord,
    classify,
    interior_fixed_point,
    origin_fixed_point,
    subsystem_fixed_point,
)
from .errors import ConfigError, ContractViolation, NoInteriorFixedPoint, NumericalBlowup
from .integrate import IntegratorConfig, Trajectory, ev_first_integral, simulate, step
from .model import ModelSpec3, jacobian, per_capita_growth, validate_template, vector_field
from .ndim import NDimSpec, aggregate, extract_subsystem, random_ensemble, simulate_n, vector_field_n
from .sustainability import (
    SustainabilityReport,
    classify_scenario,
    persistence_check,
    proposition1_bounds,
    recovery_sign,
)
from .sweep import SweepPlan, SweepResult, run_sweep, shape_test

__version__ = "0.1.0"
