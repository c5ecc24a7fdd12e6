from .common import (
    # Logging-related
    setup_logging,
    # S3-related
    get_s3_client,
    get_transport_params,
    parse_s3_path,
    # File handling
    open_path,
    format_float,
    # Utility functions
    get_timestamp,
)
from .errors import (
    BPSWorkbenchError,
    DomainError,
    GridError,
    IntegrationError,
    NonFiniteEnergyError,
    PathError,
    SingularityError,
    SnapshotFormatError,
    UnknownFamilyError,
)
from .fields import (
    FieldState,
    Grid2D,
    ModelParams,
    PointJet,
    field_jet,
    gauge_transform,
    lift_radial,
)
from .potentials import (
    GProfile,
    PotentialSpec,
    builtin_g,
    check_condition,
    parse_g_spec,
    potential_from_g,
    potential_from_table,
)
from .energy import energy_density, energy_gradient, total_energy
from .residuals import (
    ResidualReport,
    bogomolny_residual,
    dual_tautology_check,
    el_residual,
)
from .radial import (
    RadialProfile,
    SolverOptions,
    Termination,
    radial_energy,
    solve_radial,
)
from .topology import bound_report, degree, invariant_density
from .flow import FlowConfig, FlowRecord, flow, run_flow

__all__ = [
    # Logging-related
    "setup_logging",
    # S3-related
    "get_s3_client",
    "get_transport_params",
    "parse_s3_path",
    # File handling
    "open_path",
    "format_float",
    # Utility functions
    "get_timestamp",
    # Errors
    "BPSWorkbenchError",
    "DomainError",
    "GridError",
    "IntegrationError",
    "NonFiniteEnergyError",
    "PathError",
    "SingularityError",
    "SnapshotFormatError",
    "UnknownFamilyError",
    # Fields
    "FieldState",
    "Grid2D",
    "ModelParams",
    "PointJet",
    "field_jet",
    "gauge_transform",
    "lift_radial",
    # Potentials
    "GProfile",
    "PotentialSpec",
    "builtin_g",
    "check_condition",
    "parse_g_spec",
    "potential_from_g",
    "potential_from_table",
    # Energy and residuals
    "energy_density",
    "energy_gradient",
    "total_energy",
    "ResidualReport",
    "bogomolny_residual",
    "dual_tautology_check",
    "el_residual",
    # Radial solver
    "RadialProfile",
    "SolverOptions",
    "Termination",
    "radial_energy",
    "solve_radial",
    # Topology
    "bound_report",
    "degree",
    "invariant_density",
    # Gradient flow
    "FlowConfig",
    "FlowRecord",
    "flow",
    "run_flow",
]
