"""Transport-current simulator and closed-form oracles for a double-dot
interferometer coupled through a Majorana island or stabilizer plaquette."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .analytic import (
    averaged_current,
    current_closed_form,
    current_coherent,
    gamma_star,
    gamma_zero,
    visibility_closed_form,
    visibility_turnover,
)
from .model import (
    ModelKind,
    ModelParams,
    build_effective_model,
    build_full_model,
    effective_coupling,
    stabilizer_effective_coupling,
)
from .redfield import LeadSpec, build_liouvillian, current, evolve, solve, steady_state

__all__ = [
    "LeadSpec",
    "ModelKind",
    "ModelParams",
    "averaged_current",
    "build_effective_model",
    "build_full_model",
    "build_liouvillian",
    "current",
    "current_closed_form",
    "current_coherent",
    "effective_coupling",
    "evolve",
    "gamma_star",
    "gamma_zero",
    "solve",
    "stabilizer_effective_coupling",
    "steady_state",
    "visibility_closed_form",
    "visibility_turnover",
]
