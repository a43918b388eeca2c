"""Normalized field intensity I(x, t) / I0 radiated by the emitter and both mirrors.

Each source s at position x_s (emitter at 0, left mirror at -d, right mirror
at +d) contributes a right-moving and a left-moving wave::

    A_s c_s(t - (x - x_s)) e^{-i w_s (t - (x - x_s))} {Theta(t - (x - x_s)) - Theta(-(x - x_s))}
    A_s c_s(t + (x - x_s)) e^{-i w_s (t + (x - x_s))} {Theta(t + (x - x_s)) - Theta(x - x_s)}

with A = 1 for the emitter and sqrt(N) for each mirror, w_s = w0 for the
emitter and w_M = w0 - delta for the mirrors. The optical carrier is rebuilt
from ``w0 d = phi0 + 2 pi K``. The common factor e^{-i w0 t} drops out of |.|^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dde import AmplitudeTrajectory
from .errors import TrajectoryTooShort, ValidationError


@dataclass(frozen=True)
class IntensityMap:
    """``intensity[i, j]`` is I/I0 at ``t[i]``, ``x[j]``."""

    x: np.ndarray
    t: np.ndarray
    intensity: np.ndarray
    phi0: float
    fringe_count: int
    delta: float


def carrier_frequency(phi0: float, eta: float, fringe_count: int) -> float:
    """Optical frequency w0 in units of gamma implied by ``w0 eta = phi0 + 2 pi K``."""
    return (phi0 + 2 * math.pi * fringe_count) / eta


def _theta(u):
    return (u >= 0).astype(float)


def _sample(times: np.ndarray, values: np.ndarray, tau: np.ndarray) -> np.ndarray:
    # retarded arguments outside [0, t_end] are always masked by their Theta bracket
    tau = np.clip(tau, times[0], times[-1])
    return np.interp(tau, times, values.real) + 1j * np.interp(tau, times, values.imag)


def directional_split(trajectory: AmplitudeTrajectory, x, t, fringe_count: int | None = None):
    """Right- and left-moving field envelopes on the ``(t, x)`` mesh.

    Returns:
        ``(right, left)`` complex arrays of shape ``(len(t), len(x))``, with the
        global e^{-i w0 t} removed. ``|right + left|^2`` is the intensity.
    """
    p = trajectory.params
    if p.eta <= 0:
        raise ValidationError("intensity needs eta > 0 to place the mirrors")
    k = p.fringe_count if fringe_count is None else int(fringe_count)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if t.size and t.max() > trajectory.times[-1] + 1e-12:
        raise TrajectoryTooShort(
            f"trajectory ends at t = {trajectory.times[-1]:.6g}, map needs {t.max():.6g}")
    w0 = carrier_frequency(p.phi0, p.eta, k)
    wm = w0 - p.delta
    tt, xx = np.meshgrid(t, x, indexing="ij")
    amp_m = math.sqrt(p.n_atoms)
    right = np.zeros(tt.shape, dtype=complex)
    left = np.zeros(tt.shape, dtype=complex)
    # mirror carriers carry e^{i delta t} relative to the emitter's
    mirror_shift = np.exp(1j * p.delta * tt)
    sources = (
        (trajectory.c0, 0.0, 1.0, w0, 1.0),
        (trajectory.c_lm, -p.eta, amp_m, wm, mirror_shift),
        (trajectory.c_rm, p.eta, amp_m, wm, mirror_shift),
    )
    for values, xs, amp, w, shift in sources:
        if amp == 0.0:
            continue
        u = xx - xs
        gate_r = _theta(tt - u) - _theta(-u)
        gate_l = _theta(tt + u) - _theta(u)
        right += amp * shift * np.exp(1j * w * u) * gate_r * _sample(trajectory.times, values, tt - u)
        left += amp * shift * np.exp(-1j * w * u) * gate_l * _sample(trajectory.times, values, tt + u)
    return right, left


def intensity_map(trajectory: AmplitudeTrajectory, x, t, fringe_count: int | None = None) -> IntensityMap:
    """|E|^2 of the six-wave sum on the mesh ``t x x``.

    Args:
        trajectory: Collective amplitudes covering at least ``max(t)``.
        x: Positions (v/gamma units), emitter at 0 and mirrors at +-eta.
        t: Times.
        fringe_count: Integer K in ``w0 eta = phi0 + 2 pi K``; defaults to the
            trajectory's ``params.fringe_count``.
    """
    right, left = directional_split(trajectory, x, t, fringe_count)
    p = trajectory.params
    k = p.fringe_count if fringe_count is None else int(fringe_count)
    return IntensityMap(x=np.asarray(x, dtype=float), t=np.asarray(t, dtype=float),
                        intensity=np.abs(right + left) ** 2, phi0=p.phi0,
                        fringe_count=k, delta=p.delta)
