"""beamlab: Euler-Bernoulli beam statics, modal analysis and time integration."""

__version__ = "0.1.0"

from .model import (
    BeamlabError,
    BeamSpec,
    BoundarySpec,
    DegenerateModeError,
    EndCondition,
    HarmonicPointLoad,
    InsufficientRootsError,
    IterationError,
    MovingPointLoad,
    NonConvergenceError,
    PointLoad,
    RankDeficiencyError,
    SectionProperties,
    SolverError,
    SpatialGrid,
    StaticProfile,
    TimeGrid,
    TimeSeriesResult,
    UdlLoad,
    ValidationError,
    derive_section,
)
from .output import write_result
from .scenario import (
    PRESET_NAMES,
    ResultSet,
    Scenario,
    parse_scenario,
    preset,
    run_scenario,
    scenario_to_dict,
    scenario_to_json,
)

__all__ = [
    "PRESET_NAMES",
    "ResultSet",
    "Scenario",
    "parse_scenario",
    "preset",
    "run_scenario",
    "scenario_to_dict",
    "scenario_to_json",
    "write_result",
    "BeamlabError",
    "BeamSpec",
    "BoundarySpec",
    "DegenerateModeError",
    "EndCondition",
    "HarmonicPointLoad",
    "InsufficientRootsError",
    "IterationError",
    "MovingPointLoad",
    "NonConvergenceError",
    "PointLoad",
    "RankDeficiencyError",
    "SectionProperties",
    "SolverError",
    "SpatialGrid",
    "StaticProfile",
    "TimeGrid",
    "TimeSeriesResult",
    "UdlLoad",
    "ValidationError",
    "derive_section",
    "__version__",
]
