"""Closed forms for the single-mode (short-cavity) antinode regime.

Valid for d/v << 1/delta << 1/N (gamma = 1). Outside that window the
functions still evaluate but emit a :class:`RegimeWarning`.
"""
from __future__ import annotations

import math
import warnings

import numpy as np


class RegimeWarning(UserWarning):
    """Closed form used outside its single-mode validity window."""


def rabi_frequency(n_atoms: int, delta: float = 0.0) -> float:
    return math.sqrt(2.0 * n_atoms + delta * delta)


def _upsilon_prime(delta: float) -> complex:
    return -1j * delta + 0.5


def _check_regime(n_atoms: int, delta: float, eta: float | None = None) -> None:
    if n_atoms < 1:
        warnings.warn("single-mode forms assume N >= 1", RegimeWarning, stacklevel=3)
    if eta is not None and n_atoms * eta >= 0.1:
        warnings.warn(f"N eta = {n_atoms * eta:.3g} is not small", RegimeWarning, stacklevel=3)
    if abs(delta) > n_atoms:
        warnings.warn("|delta| exceeds the collective rate N", RegimeWarning, stacklevel=3)


def rabi_c0(t, n_atoms: int, delta: float = 0.0):
    """Damped Rabi oscillation of the emitter amplitude.

    ``e^{-U t/2} [cos(W t/2) + (-i delta - 1/2)/W sin(W t/2)]`` with
    ``U = 1/2 - i delta`` and ``W = sqrt(2N + delta^2)``.
    """
    _check_regime(n_atoms, delta)
    t = np.asarray(t, dtype=float)
    w = rabi_frequency(n_atoms, delta)
    env = np.exp(-_upsilon_prime(delta) * t / 2)
    return env * (np.cos(w * t / 2) + (-1j * delta - 0.5) / w * np.sin(w * t / 2))


def rabi_mirror(t, n_atoms: int, delta: float = 0.0, phi_m: float = math.pi / 2,
                corrected: bool = False):
    """Collective mirror amplitude, identical for both arrays.

    The published prefactor ``-(i delta + 1/2)^2 / (2W) - W/2`` has the opposite
    overall sign to the delay equations (feed c0 = cos(W t/2) into the emitter
    equation to see it); ``corrected=True`` flips it.
    """
    _check_regime(n_atoms, delta)
    t = np.asarray(t, dtype=float)
    w = rabi_frequency(n_atoms, delta)
    pref = -(1j * delta + 0.5) ** 2 / (2 * w) - w / 2
    if corrected:
        pref = -pref
    env = np.exp(-_upsilon_prime(delta) * t / 2) * np.exp(-1j * delta * t) * np.exp(-1j * phi_m)
    return pref * env / math.sqrt(n_atoms) * np.sin(w * t / 2)


def avoided_crossing(n_atoms: int, delta):
    """Dressed-state branches ``(+W, -W)`` with ``W = sqrt(2N + delta^2)``."""
    w = np.sqrt(2.0 * n_atoms + np.asarray(delta, dtype=float) ** 2)
    return w, -w


def laplace_roots(n_atoms: int, delta: float, eta: float):
    """Quadratic-denominator roots of the antinode emitter's Laplace transform.

    Returns:
        ``(s_plus, s_minus, upsilon, zeta)`` with
        ``upsilon = -i delta + 1/2 + i N sin(delta eta) e^{-i delta eta}``,
        ``zeta = i N/2 sin(delta eta) e^{-i delta eta} - i delta/2 + N/2 e^{-i delta eta}``
        and ``s = (-upsilon +- sqrt(upsilon^2 - 4 zeta)) / 2``.
    """
    _check_regime(n_atoms, delta, eta)
    n = n_atoms
    ph = np.exp(-1j * delta * eta)
    sn = math.sin(delta * eta)
    upsilon = -1j * delta + 0.5 + 1j * n * sn * ph
    zeta = 0.5j * n * sn * ph - 0.5j * delta + 0.5 * n * ph
    root = np.sqrt(complex(upsilon * upsilon - 4 * zeta))
    return 0.5 * (-upsilon + root), 0.5 * (-upsilon - root), complex(upsilon), complex(zeta)


def laplace_c0(t, n_atoms: int, delta: float, eta: float):
    """Heaviside inversion ``sum_s (i N sin(delta eta) e^{-i delta eta} - i delta + s) / (2s + U) e^{s t}``."""
    s_plus, s_minus, upsilon, _ = laplace_roots(n_atoms, delta, eta)
    t = np.asarray(t, dtype=float)
    num0 = 1j * n_atoms * math.sin(delta * eta) * np.exp(-1j * delta * eta) - 1j * delta
    out = np.zeros(t.shape, dtype=complex)
    for s in (s_plus, s_minus):
        out += (num0 + s) / (2 * s + upsilon) * np.exp(s * t)
    return out
