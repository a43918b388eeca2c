"""Truncated pole expansion of the emitter amplitude.

Closing the inverse-Fourier contour in the lower half-plane gives, for t > 0::

    c0(t) = -i sum_p e^{-i w_p t} / D0'(w_p)

so a single Lorentzian pole at -i/2 (D0' = -i) returns exactly e^{-t/2}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyPoleSet, NoBoundState
from .spectral import DEDUP_TOL, POLE_IMAG_TOL, PoleSet


@dataclass(frozen=True)
class Reconstruction:
    """Pole-sum amplitude on a time grid, with errors when a reference was given."""

    times: np.ndarray
    c0: np.ndarray
    poles: np.ndarray
    weights: np.ndarray
    reference: np.ndarray | None = None
    max_error: float | None = None
    l2_error: float | None = None

    @property
    def p0(self) -> np.ndarray:
        return np.abs(self.c0) ** 2

    @property
    def abs_error(self) -> np.ndarray | None:
        if self.reference is None:
            return None
        return np.abs(self.c0 - self.reference)


def select_poles(poles: PoleSet, per_side: int, central_tol: float = DEDUP_TOL):
    """Indices of the central poles plus the ``per_side`` nearest on each side."""
    re = poles.poles.real
    central = np.flatnonzero(np.abs(re) < central_tol)
    right = np.flatnonzero(re >= central_tol)
    left = np.flatnonzero(re <= -central_tol)
    right = right[np.argsort(re[right], kind="stable")][:per_side]
    left = left[np.argsort(-re[left], kind="stable")][:per_side]
    return np.sort(np.concatenate([central, left, right]))


def pole_sum(t, poles: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Evaluate ``-i sum_p w_p e^{-i pole_p t}``."""
    t = np.asarray(t, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(t, poles))
    return -1j * phases @ weights


def reconstruct(poles: PoleSet, t, per_side: int, reference=None) -> Reconstruction:
    """Approximate c0(t) from the poles nearest to the emitter resonance.

    Args:
        poles: Output of :func:`atomcav.spectral.poles_muller`.
        t: Time grid.
        per_side: Number of poles kept on each side of w = 0; central poles
            (|Re| below the dedup tolerance) are always kept.
        reference: Optional exact c0 on the same grid, e.g. from the DDE.

    Returns:
        The reconstruction, with max and RMS errors if ``reference`` is given.
    """
    if len(poles) == 0:
        raise EmptyPoleSet("no poles to expand over")
    idx = select_poles(poles, int(per_side))
    if idx.size == 0:
        raise EmptyPoleSet("pole selection is empty")
    t = np.asarray(t, dtype=float)
    c0 = pole_sum(t, poles.poles[idx], poles.weights[idx])
    max_err = l2_err = None
    if reference is not None:
        reference = np.asarray(reference, dtype=complex)
        if reference.shape != c0.shape:
            raise ValueError("reference must match the time grid")
        diff = np.abs(c0 - reference)
        max_err = float(diff.max())
        l2_err = float(np.sqrt(np.mean(diff ** 2)))
    return Reconstruction(times=t, c0=c0, poles=poles.poles[idx], weights=poles.weights[idx],
                          reference=reference, max_error=max_err, l2_error=l2_err)


def sum_rule(poles: PoleSet, per_side: int) -> complex:
    """The t = 0 value of the truncated sum; tends to 1 as ``per_side`` grows."""
    idx = select_poles(poles, int(per_side))
    return complex(-1j * poles.weights[idx].sum())


def plateau_from_pole(poles: PoleSet, imag_tol: float = POLE_IMAG_TOL) -> float:
    """Long-time excitation probability carried by real (bound-state) poles."""
    real = poles.real_poles(imag_tol)
    if real.size == 0:
        raise NoBoundState("no pole on the real axis")
    return float(np.sum(np.abs(poles.weights[real]) ** 2))
