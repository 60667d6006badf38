"""Core stability analysis: schemes, criteria, stability matrices and the simulator"""

from .errors import MsStabError, NumericalFailure
from .scalar import classify
from .schemes import ScalarTestEq, SchemeName, SystemTestEq, catalog
from .simulate import MsTrace, SimConfig, simulate
from .system import classify_system
from .verdict import StabilityVerdict, VerdictStatus

__all__ = [
    "MsStabError",
    "NumericalFailure",
    "classify",
    "ScalarTestEq",
    "SchemeName",
    "SystemTestEq",
    "catalog",
    "MsTrace",
    "SimConfig",
    "simulate",
    "classify_system",
    "StabilityVerdict",
    "VerdictStatus",
]
