"""System parameters and derived quantities.

Units: gamma = 1 and v = 1, so times are in 1/gamma, frequencies in gamma and
positions in v/gamma. All frequencies live in the rotating frame of the emitter
(``omega`` means ``omega - omega_0``).
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .errors import NegativeEta, NonFiniteField, NonPositiveN, ValidationError

TWO_PI = 2.0 * math.pi

PLACEMENT_PHASE = {"node": math.pi, "antinode": math.pi / 2}


@dataclass(frozen=True)
class SystemParams:
    """Physical knobs of the emitter + two-mirror system.

    Attributes:
        n_atoms: Atoms per mirror array (N).
        eta: Dimensionless emitter-mirror delay, gamma * d / v.
        delta: Emitter-mirror detuning omega_0 - omega_M.
        phi0: Propagation phase omega_0 d / v, modulo 2 pi.
        delta_c: Detuning from the nearest node-type cavity resonance. Only
            bookkeeping; :func:`make_placement` folds it into ``phi0``.
        fringe_count: Integer K used by the intensity module to rebuild the
            carrier phase as ``phi0 + 2 pi K``.
    """

    n_atoms: int
    eta: float
    delta: float = 0.0
    phi0: float = math.pi / 2
    delta_c: float = 0.0
    fringe_count: int = 20


@dataclass(frozen=True)
class DerivedQuantities:
    phi_m: float
    fsr_full: float
    fsr_half: float
    collective_rate: float
    markov_index: float


def _wrap_phase(phi: float) -> float:
    wrapped = math.fmod(phi, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2 pi
    if wrapped >= TWO_PI:
        wrapped = 0.0
    return wrapped


def validate(params: SystemParams) -> SystemParams:
    """Check a raw parameter set and return it with ``phi0`` wrapped to [0, 2 pi)."""
    for name in ("eta", "delta", "phi0", "delta_c"):
        value = getattr(params, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise NonFiniteField(f"{name} must be a finite real number, got {value!r}")
    if isinstance(params.n_atoms, bool) or int(params.n_atoms) != params.n_atoms:
        raise ValidationError(f"n_atoms must be an integer, got {params.n_atoms!r}")
    if params.n_atoms < 0:
        raise NonPositiveN(f"n_atoms must be >= 0, got {params.n_atoms}")
    if params.eta < 0:
        raise NegativeEta(f"eta must be >= 0, got {params.eta}")
    if int(params.fringe_count) != params.fringe_count or params.fringe_count < 0:
        raise ValidationError(f"fringe_count must be a nonnegative integer, got {params.fringe_count!r}")
    return dataclasses.replace(
        params,
        n_atoms=int(params.n_atoms),
        eta=float(params.eta),
        delta=float(params.delta),
        phi0=_wrap_phase(float(params.phi0)),
        delta_c=float(params.delta_c),
        fringe_count=int(params.fringe_count),
    )


def derive(params: SystemParams) -> DerivedQuantities:
    p = validate(params)
    if p.eta > 0:
        fsr_full = math.pi / (2.0 * p.eta)
        fsr_half = math.pi / p.eta
    else:
        fsr_full = fsr_half = math.inf
    return DerivedQuantities(
        phi_m=p.phi0 - p.delta * p.eta,
        fsr_full=fsr_full,
        fsr_half=fsr_half,
        collective_rate=float(p.n_atoms),
        markov_index=p.n_atoms * p.eta,
    )


def make_placement(kind: str, params: SystemParams) -> SystemParams:
    """Put the emitter at a cavity node or antinode, shifted by ``delta_c * eta``."""
    try:
        base = PLACEMENT_PHASE[kind]
    except KeyError:
        raise ValidationError(f"placement must be 'node' or 'antinode', got {kind!r}") from None
    p = validate(params)
    return validate(dataclasses.replace(p, phi0=base + p.delta_c * p.eta))


def placed(kind: str, n_atoms: int, eta: float, delta: float = 0.0,
           delta_c: float = 0.0, fringe_count: int = 20) -> SystemParams:
    """Shorthand for ``make_placement(kind, SystemParams(...))``."""
    return make_placement(kind, SystemParams(n_atoms=n_atoms, eta=eta, delta=delta,
                                             delta_c=delta_c, fringe_count=fringe_count))
