"""Parameter sweeps of the spectral density and observables derived from them."""
from __future__ import annotations

import dataclasses
import datetime
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .dde import AmplitudeTrajectory
from .errors import NoMinimaFound, PhaseUndefined, ValidationError
from .model import SystemParams, make_placement, validate
from .spectral import DEDUP_TOL, Q_TOL, ROOT_TOL, characteristic_frequencies, response_f0

PROMINENCE_REL = 1e-3
PHASE_FLOOR = 1e-6
VERSION = "0.1.0"


def resolve_jobs(jobs: int | None = None) -> int:
    """Worker count: explicit value, else ``ATOMCAV_JOBS``, else the core count."""
    if jobs is None:
        env = os.environ.get("ATOMCAV_JOBS")
        jobs = int(env) if env else (os.cpu_count() or 1)
    if jobs < 1:
        raise ValidationError(f"jobs must be >= 1, got {jobs}")
    return int(jobs)


def find_density_peaks(omega, density, prominence_rel: float = PROMINENCE_REL) -> np.ndarray:
    """Peak positions of a sampled density, refined by a parabola through three samples.

    Non-finite samples (a pole exactly on the grid) count as peaks at that grid
    point. Peaks need a prominence of ``prominence_rel`` times the finite row maximum.
    """
    omega = np.asarray(omega, dtype=float)
    y = np.asarray(density, dtype=float)
    finite = np.isfinite(y)
    if not finite.any():
        return omega.copy()
    top = y[finite].max()
    work = np.where(finite, y, 2 * top + 1.0)
    idx, _ = find_peaks(work, prominence=prominence_rel * top)
    out = []
    for i in idx:
        if not finite[i] or i == 0 or i == y.size - 1 or not (finite[i - 1] and finite[i + 1]):
            out.append(omega[i])
            continue
        ym, y0, yp = y[i - 1], y[i], y[i + 1]
        curv = ym - 2 * y0 + yp
        shift = 0.5 * (ym - yp) / curv if curv != 0 else 0.0
        h = 0.5 * (omega[i + 1] - omega[i - 1])
        out.append(omega[i] + float(np.clip(shift, -1, 1)) * h)
    return np.array(out)


@dataclass(frozen=True)
class SweepResult:
    """Density rows over one swept parameter.

    ``density[i]`` is |F0|^2 on ``omega`` for ``axis_values[i]``; ``peaks[i]``
    are its extracted peak positions and ``minima[i]`` the refined
    characteristic frequencies inside the omega range.
    """

    axis_name: str
    axis_values: np.ndarray
    omega: np.ndarray
    density: np.ndarray
    peaks: list
    minima: list
    params: SystemParams
    provenance: dict = field(default_factory=dict)

    def ridges(self, count: int = 2) -> np.ndarray:
        """The ``count`` strongest peaks per row, sorted by frequency (NaN if fewer)."""
        out = np.full((len(self.axis_values), count), np.nan)
        for i, pk in enumerate(self.peaks):
            if pk.size == 0:
                continue
            heights = np.interp(pk, self.omega, np.nan_to_num(self.density[i], posinf=np.inf))
            heights = np.where(np.isfinite(heights), heights, np.inf)
            best = np.sort(pk[np.argsort(-heights, kind="stable")[:count]])
            out[i, :best.size] = best
        return out


def _row(args):
    p, omega = args
    density = response_f0(omega, p).density
    try:
        minima = characteristic_frequencies(p, window=(omega[0], omega[-1]))
    except NoMinimaFound:
        minima = np.zeros(0)
    return density, find_density_peaks(omega, density), minima


def _run_rows(rows, omega, jobs):
    tasks = [(p, omega) for p in rows]
    jobs = min(resolve_jobs(jobs), len(tasks))
    if jobs <= 1:
        return [_row(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map yields in submission order whatever the completion order
        return list(pool.map(_row, tasks))


def _sweep(name, values, rows, base, omega, jobs) -> SweepResult:
    omega = np.asarray(omega, dtype=float)
    if omega.ndim != 1 or omega.size < 3 or np.any(np.diff(omega) <= 0):
        raise ValidationError("omega grid must be strictly increasing with at least 3 points")
    results = _run_rows(rows, omega, jobs)
    provenance = {
        "params": dataclasses.asdict(base),
        "axis": name,
        "tolerances": {"root_tol": ROOT_TOL, "dedup_tol": DEDUP_TOL, "q_tol": Q_TOL,
                       "prominence_rel": PROMINENCE_REL},
        "version": VERSION,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    return SweepResult(axis_name=name, axis_values=np.asarray(values, dtype=float), omega=omega,
                       density=np.array([r[0] for r in results]),
                       peaks=[r[1] for r in results], minima=[r[2] for r in results],
                       params=base, provenance=provenance)


def sweep_eta_density(params: SystemParams, eta_values, omega, jobs: int | None = None) -> SweepResult:
    """Density rows versus eta at fixed phi0 (fixed node/antinode placement)."""
    p = validate(params)
    rows = [validate(dataclasses.replace(p, eta=float(e))) for e in eta_values]
    return _sweep("eta", eta_values, rows, p, omega, jobs)


def sweep_deltac(params: SystemParams, deltac_values, omega, jobs: int | None = None) -> SweepResult:
    """Density rows versus cavity detuning, phi0 = pi + delta_c * eta."""
    p = validate(params)
    rows = [make_placement("node", dataclasses.replace(p, delta_c=float(dc))) for dc in deltac_values]
    return _sweep("delta_c", deltac_values, rows, p, omega, jobs)


def sweep_delta(params: SystemParams, delta_values, omega, jobs: int | None = None) -> SweepResult:
    """Density rows versus emitter-mirror detuning at fixed phi0."""
    p = validate(params)
    rows = [validate(dataclasses.replace(p, delta=float(d))) for d in delta_values]
    return _sweep("delta", delta_values, rows, p, omega, jobs)


@dataclass(frozen=True)
class PulledResonance:
    """Pulled emitter line, or a symmetric doublet when no single line survives."""

    omega: float | None
    doublet: tuple | None = None

    @property
    def is_doublet(self) -> bool:
        return self.doublet is not None


def frequency_pulling(params: SystemParams, window=None, symmetry_tol: float = 1e-6) -> PulledResonance:
    """Real characteristic frequency nearest the bare emitter line.

    When the two nearest minima are mirror images of each other (the emitter sits
    at an antinode) a doublet is returned instead.
    """
    p = validate(params)
    freqs = characteristic_frequencies(p, window=window)
    order = np.argsort(np.abs(freqs), kind="stable")
    nearest = float(freqs[order[0]])
    if abs(nearest) > DEDUP_TOL and freqs.size > 1:
        second = float(freqs[order[1]])
        if abs(nearest + second) <= symmetry_tol * max(1.0, abs(nearest)):
            return PulledResonance(omega=None, doublet=(min(nearest, second), max(nearest, second)))
    return PulledResonance(omega=nearest)


@dataclass(frozen=True)
class PhaseBeats:
    """Dynamical phase of c0 and the beat periods read off it.

    ``period`` comes from the mean winding rate of the unwrapped phase after
    ``t_start``; ``intensity_period`` is the mean spacing of |c0|^2 maxima.
    """

    times: np.ndarray
    phase: np.ndarray
    winding_rate: float
    period: float
    intensity_period: float


def extract_phase_beats(trajectory: AmplitudeTrajectory, t_start: float = 0.0,
                        floor: float = PHASE_FLOOR) -> PhaseBeats:
    """Unwrap the phase of c0 = A e^{i Phi} and measure its beat period.

    Samples with |c0| below ``floor`` are dropped before unwrapping (their phase
    is reported as NaN).

    Raises:
        PhaseUndefined: if no sample after ``t_start`` clears the floor.
    """
    t = trajectory.times
    c0 = trajectory.c0
    ok = np.abs(c0) >= floor
    window = ok & (t >= t_start)
    if window.sum() < 2:
        raise PhaseUndefined(f"|c0| < {floor} on the whole analysis window")
    phase = np.full(t.shape, np.nan)
    phase[ok] = np.unwrap(np.angle(c0[ok]))
    slope = float(np.polyfit(t[window], phase[window], 1)[0])
    period = 2 * math.pi / abs(slope) if slope != 0 else math.inf
    p0 = np.abs(c0[t >= t_start]) ** 2
    peaks, _ = find_peaks(p0)
    tp = t[t >= t_start][peaks]
    intensity_period = float(np.mean(np.diff(tp))) if tp.size > 1 else math.inf
    return PhaseBeats(times=t, phase=phase, winding_rate=slope, period=period,
                      intensity_period=intensity_period)
