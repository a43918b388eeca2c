"""Emitter between two atomic Bragg mirrors in a waveguide: delay dynamics, spectra and poles."""
from .dde import AmplitudeTrajectory, integrate_collective
from .errors import AtomCavError, NumericalError, ValidationError
from .experiments import (extract_phase_beats, frequency_pulling, sweep_delta, sweep_deltac,
                          sweep_eta_density)
from .intensity import directional_split, intensity_map
from .model import SystemParams, derive, make_placement, placed, validate
from .oracle import collective_project, integrate_fullarray
from .residue import plateau_from_pole, reconstruct
from .singlemode import avoided_crossing, laplace_roots, rabi_c0, rabi_mirror
from .spectral import (characteristic_frequencies, cleared_forms, closed_form_splitting,
                       coupling_saturation_scan, denominator_d0, poles_muller, response_f0,
                       taylor_denominator)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeTrajectory", "AtomCavError", "NumericalError", "SystemParams", "ValidationError",
    "avoided_crossing", "characteristic_frequencies", "cleared_forms", "closed_form_splitting",
    "collective_project", "coupling_saturation_scan", "denominator_d0", "derive",
    "directional_split", "extract_phase_beats", "frequency_pulling", "integrate_collective",
    "integrate_fullarray", "intensity_map", "laplace_roots", "make_placement", "placed",
    "plateau_from_pole", "poles_muller", "rabi_c0", "rabi_mirror", "reconstruct", "response_f0",
    "sweep_delta", "sweep_deltac", "sweep_eta_density", "taylor_denominator", "validate",
]
