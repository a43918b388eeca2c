"""Per-atom brute-force integrator used to check the collective reduction.

Each of the 2N + 1 atoms is driven by every atom through the waveguide::

    c_n' = -1/2 sum_m P_nm e^{i (w_n - w_m) t} c_m(t - tau_nm)

where ``tau_nm`` is the emitter/mirror delay class (0, eta or 2 eta; spacing
inside an array carries no retardation) and ``P_nm`` the propagation phase
e^{i phi_source * class} times the lattice sign (-1)^(site distance).

This module deliberately uses a plain step-by-step Heun loop with explicit
stage evaluations, independent of the block recurrence in :mod:`atomcav.dde`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dde import _check_inputs
from .errors import OracleTooLarge, ValidationError
from .model import SystemParams, derive

MAX_ORACLE_ATOMS = 8


@dataclass(frozen=True)
class FullArrayTrajectory:
    """Per-atom amplitudes; column order follows ``sites`` = -N..-1, 0, 1..N."""

    times: np.ndarray
    sites: np.ndarray
    positions: np.ndarray
    amplitudes: np.ndarray
    params: SystemParams

    def site(self, j: int) -> np.ndarray:
        return self.amplitudes[:, j + self.params.n_atoms]


def atom_positions(params: SystemParams) -> np.ndarray:
    """Positions -N..N: x_0 = 0 and x_{+-j} = +-(d + (j-1) lambda_0/2)."""
    n = params.n_atoms
    omega0 = (params.phi0 + 2 * math.pi * params.fringe_count) / params.eta
    half_wavelength = math.pi / omega0
    j = np.arange(1, n + 1)
    right = params.eta + (j - 1) * half_wavelength
    return np.concatenate([-right[::-1], [0.0], right])


def _coupling(params: SystemParams):
    """Delay class, constant phase and detuning sign for every ordered pair."""
    n = params.n_atoms
    sites = np.arange(-n, n + 1)
    x = atom_positions(params)
    spacing = math.pi * params.eta / (params.phi0 + 2 * math.pi * params.fringe_count)
    phi_m = derive(params).phi_m
    size = sites.size
    lag = np.zeros((size, size), dtype=int)
    phase = np.zeros((size, size), dtype=complex)
    detune = np.zeros((size, size))          # multiplies delta in e^{i delta t}
    for a, sa in enumerate(sites):
        for b, sb in enumerate(sites):
            # lattice index inside an array: 0 for the atom facing the emitter
            la = abs(sa) - 1 if sa else 0
            lb = abs(sb) - 1 if sb else 0
            if sa == 0 and sb == 0:
                cls, apart, src = 0, 0, 0.0
            elif sa == 0 or sb == 0:
                cls, apart = 1, la + lb
                src = params.phi0 if sb == 0 else phi_m
            elif np.sign(sa) == np.sign(sb):
                cls, apart, src = 0, abs(la - lb), 0.0
            else:
                cls, apart, src = 2, la + lb, phi_m
            residual = abs(x[a] - x[b]) - cls * params.eta - apart * spacing
            if abs(residual) > 1e-9 * max(1.0, params.eta):
                raise ValidationError(
                    f"pair ({sa}, {sb}) has delay {abs(x[a] - x[b])} outside classes 0/eta/2eta")
            sign = -1.0 if apart % 2 else 1.0
            lag[a, b] = cls
            phase[a, b] = sign * np.exp(1j * cls * src) if cls else sign
            # e^{i(w_n - w_m)t} in the emitter frame: +delta for emitter <- mirror
            if sa == 0 and sb != 0:
                detune[a, b] = 1.0
            elif sa != 0 and sb == 0:
                detune[a, b] = -1.0
    return sites, x, lag, phase, detune


def integrate_fullarray(params: SystemParams, t_max: float, steps_per_delay: int = 200,
                        method: str = "heun", max_atoms: int = MAX_ORACLE_ATOMS) -> FullArrayTrajectory:
    """Integrate all 2N + 1 amplitudes from the emitter-excited state."""
    p, dt = _check_inputs(params, t_max, steps_per_delay, method)
    if p.n_atoms > max_atoms:
        raise OracleTooLarge(f"oracle limited to N <= {max_atoms}, got {p.n_atoms}")
    if p.eta <= 0:
        raise ValidationError("the full-array oracle needs eta > 0")
    sites, x, lag_cls, phase, detune = _coupling(p)
    lag = int(steps_per_delay)
    n_steps = int(math.ceil(t_max / dt - 1e-9))
    size = sites.size
    emitter = p.n_atoms

    y = np.zeros((n_steps + 1, size), dtype=complex)
    y[0, emitter] = 1.0
    masks = [lag_cls == c for c in range(3)]
    mats = [np.where(mk, phase, 0.0) for mk in masks]

    def rhs(k, state, tau, first=0):
        """Derivative at step index ``k``; delayed samples before ``first`` read as zero.

        The corrector passes ``first=1``: the initial state switches on at t = 0,
        so a step ending exactly at a delay onset sees its left limit.
        """
        rot = np.exp(1j * p.delta * tau * detune)
        out = (mats[0] * rot) @ state
        for cls in (1, 2):
            j = k - cls * lag
            if j >= first:
                out = out + (mats[cls] * rot) @ y[j]
        return -0.5 * out

    for k in range(n_steps):
        if method == "heun":
            tau = (k + 0.5) * dt
            k1 = rhs(k, y[k], tau)
            k2 = rhs(k + 1, y[k] + dt * k1, tau, first=1)
            y[k + 1] = y[k] + 0.5 * dt * (k1 + k2)
        else:
            y[k + 1] = y[k] + dt * rhs(k, y[k], k * dt)
    return FullArrayTrajectory(times=np.arange(n_steps + 1) * dt, sites=sites, positions=x,
                               amplitudes=y, params=p)


def collective_project(trajectory: FullArrayTrajectory, n_atoms: int | None = None):
    """Collective mirror amplitudes from per-atom ones.

    ``c_lm = sum_j c_{-j} (-1)^(j-1) / sqrt(N)`` and likewise on the right,
    i.e. the phases e^{(j+1) i pi} and e^{(j-1) i pi} of the site labels.
    """
    n = trajectory.params.n_atoms if n_atoms is None else n_atoms
    if n == 0:
        zero = np.zeros(trajectory.amplitudes.shape[0], dtype=complex)
        return zero, zero.copy()
    j = np.arange(1, n + 1)
    signs = (-1.0) ** (j - 1)
    amps = trajectory.amplitudes
    left = amps[:, n - j]          # sites -1..-N
    right = amps[:, n + j]         # sites 1..N
    c_lm = left @ signs / math.sqrt(n)
    c_rm = right @ signs / math.sqrt(n)
    return c_lm, c_rm
