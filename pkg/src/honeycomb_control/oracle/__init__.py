"""Exact small-system reference calculations in the spin picture."""

from .bound import BoundReport, min_phase_distance, verify_bound
from .dynamics import (
    StateProblem,
    adiabatic_state,
    optimize_state,
    spin_propagate,
    state_fidelity,
    state_problem,
)
from .orbits import GaugeOrbitReport, gauge_orbits
from .spin import (
    DegenerateStateError,
    ResourceGuardError,
    SpinHamiltonian,
    ground_sector,
    plaquette_operator,
    resolved_sectors,
    sector_spectrum,
    spin_hamiltonian,
)

__all__ = [
    "BoundReport",
    "DegenerateStateError",
    "GaugeOrbitReport",
    "ResourceGuardError",
    "SpinHamiltonian",
    "StateProblem",
    "adiabatic_state",
    "gauge_orbits",
    "ground_sector",
    "min_phase_distance",
    "optimize_state",
    "plaquette_operator",
    "resolved_sectors",
    "sector_spectrum",
    "spin_hamiltonian",
    "spin_propagate",
    "state_fidelity",
    "state_problem",
    "verify_bound",
]
