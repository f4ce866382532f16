"""Stationary parallel laminar Navier-Stokes flows on the round sphere and the
hyperbolic plane: closed-form operators, profile ODE solvers, non-existence
certificates for Poiseuille profiles and pressure reconstruction."""

from .analysis import (
    CaseLabel,
    Certificate,
    FlatLimitReport,
    PressureResult,
    RegionSpec,
    ResidualReport,
    Verdict,
    certify_nonexistence,
    flat_limit_consistency,
    reconstruct_pressure,
    solve_flow,
    stokes_discrepancy,
)
from .calculus import (
    FlowParameters,
    OneFormRadial,
    QuadraticProfile,
    convection_oneform,
    divergence,
    hodge_laplacian_oneform,
    momentum_oneform,
    rotation_oneform,
    velocity_oneform,
    viscous_oneform,
    vorticity_defect,
    zero_profile,
)
from .errors import (
    ChartMismatchError,
    DomainError,
    FlowError,
    NonConvergence,
    PreconditionError,
    SingularApproachError,
    SingularChartError,
)
from .geometry import (
    Chart,
    ChartKind,
    ChartPoint,
    FramePair,
    cartesian_chart,
    chart_metric,
    embed,
    exp_map,
    frame_at,
    poincare_project,
)
from .ode import DefectFunction, OdeSystem, build_case3_ode, build_ode, flat_limit_ode, quadratic_defect
from .solver import InitialData, ProfileSolution, solve_rk, solve_taylor

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
