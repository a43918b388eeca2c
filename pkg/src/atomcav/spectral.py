"""Emitter response function, spectral density, characteristic frequencies and poles.

With gamma = 1 and frequencies in the emitter's rotating frame::

    Q(w)      = N e^{2 i phi0} + e^{-2 i w eta} (N - 2 i w - 2 i delta)
    D0(w)     = 1/2 - i w - N e^{2 i phi0} / Q(w)
    D_full(w) = (1/2 - i w) Q(w) - N e^{2 i phi0}        (so D0 = D_full / Q)
    F0(w)     = 1 / (2 pi i D0(w)) = Q / (2 pi i D_full)

All root finding works on ``D_full``, which stays finite where ``Q`` vanishes.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InnerDenominatorZero, NoConvergence, NoMinimaFound, ValidationError
from .model import SystemParams, placed, validate
from .muller import muller

ROOT_TOL = 1e-10
DEDUP_TOL = 1e-6
Q_TOL = 1e-9
POLE_IMAG_TOL = 1e-8
GRID_SPACING = 0.005
SEED_OFFSET = -0.1j


def _phase2(p: SystemParams) -> complex:
    return np.exp(2j * p.phi0)


def inner_q(omega, params: SystemParams):
    p = params
    w = np.asarray(omega, dtype=complex)
    return p.n_atoms * _phase2(p) + np.exp(-2j * w * p.eta) * (p.n_atoms - 2j * w - 2j * p.delta)


def inner_q_prime(omega, params: SystemParams):
    p = params
    w = np.asarray(omega, dtype=complex)
    return np.exp(-2j * w * p.eta) * (-2j * p.eta * (p.n_atoms - 2j * w - 2j * p.delta) - 2j)


def cleared_forms(omega, params: SystemParams):
    """Return ``(Q(w), D_full(w))``; defined everywhere."""
    p = validate(params)
    w = np.asarray(omega, dtype=complex)
    q = inner_q(w, p)
    return q, (0.5 - 1j * w) * q - p.n_atoms * _phase2(p)


def d_full_prime(omega, params: SystemParams):
    p = validate(params)
    w = np.asarray(omega, dtype=complex)
    return -1j * inner_q(w, p) + (0.5 - 1j * w) * inner_q_prime(w, p)


def denominator_d0(omega, params: SystemParams, q_tol: float = Q_TOL):
    """D0 as a single fraction; refuses points where the inner denominator vanishes."""
    p = validate(params)
    w = np.asarray(omega, dtype=complex)
    q = inner_q(w, p)
    if np.any(np.abs(q) < q_tol):
        raise InnerDenominatorZero(f"|Q| < {q_tol} on the requested frequencies; use cleared_forms")
    return 0.5 - 1j * w - p.n_atoms * _phase2(p) / q


def d0_prime(omega, params: SystemParams):
    """Analytic dD0/dw from the cleared quotient D_full / Q."""
    q, d = cleared_forms(omega, params)
    return (d_full_prime(omega, params) * q - d * inner_q_prime(omega, params)) / q ** 2


def _abs_d0(omega, p: SystemParams):
    q, d = cleared_forms(omega, p)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(q == 0, np.inf, np.abs(d) / np.abs(q))


@dataclass(frozen=True)
class SpectralResponse:
    omega: np.ndarray
    f0: np.ndarray
    density: np.ndarray
    params: SystemParams


def response_f0(omega, params: SystemParams) -> SpectralResponse:
    """F0 and |F0|^2 on a real, strictly increasing grid."""
    p = validate(params)
    w = np.asarray(omega, dtype=float)
    if w.ndim != 1 or (w.size > 1 and np.any(np.diff(w) <= 0)):
        raise ValidationError("omega grid must be one-dimensional and strictly increasing")
    q, d = cleared_forms(w, p)
    with np.errstate(divide="ignore", invalid="ignore"):
        f0 = q / (2j * math.pi * d)
    # Q and D_full share a simple zero only for N = 0 at omega = -delta; the
    # limit there is Q'/D_full'
    both = (np.abs(q) < Q_TOL) & (np.abs(d) < Q_TOL)
    if np.any(both):
        f0[both] = inner_q_prime(w[both], p) / (2j * math.pi * d_full_prime(w[both], p))
    density = np.abs(f0) ** 2
    return SpectralResponse(omega=w, f0=f0, density=density, params=p)


def default_window(params: SystemParams) -> float:
    """Half-width covering the Rabi doublet and a few half-cavity FSRs."""
    p = validate(params)
    doublet = 3.0 * math.sqrt(2.0 * p.n_atoms)
    fsr = 4.0 * math.pi / p.eta if p.eta > 0 else math.inf
    return max(doublet, 5.0, min(fsr, 60.0))


def characteristic_frequencies(params: SystemParams, window=None, grid_points: int | None = None):
    """Real local minima of |D0|, sorted ascending.

    Args:
        params: System parameters.
        window: Half-width ``W`` (search ``[-W, W]``) or an explicit ``(lo, hi)``.
        grid_points: Coarse grid size; defaults to a spacing of 0.005 gamma.
    """
    p = validate(params)
    if window is None:
        window = default_window(p)
    lo, hi = (-float(window), float(window)) if np.isscalar(window) else map(float, window)
    if grid_points is None:
        grid_points = int(math.ceil((hi - lo) / GRID_SPACING)) + 1
    w = np.linspace(lo, hi, int(grid_points))
    mag = _abs_d0(w, p)
    inner = (mag[1:-1] <= mag[:-2]) & (mag[1:-1] < mag[2:])
    idx = np.flatnonzero(inner) + 1
    if idx.size == 0:
        raise NoMinimaFound(f"|D0| has no local minimum in [{lo}, {hi}]")
    found = []
    for i in idx:
        res = minimize_scalar(lambda x: float(_abs_d0(x, p)), bounds=(w[i - 1], w[i + 1]),
                              method="bounded", options={"xatol": 1e-10})
        found.append(res.x if res.fun <= mag[i] else w[i])
    return np.array(sorted(found))


@dataclass(frozen=True)
class PoleSet:
    """Complex poles of F0 with their weights ``1 / D0'(pole)``."""

    poles: np.ndarray
    weights: np.ndarray
    iterations: np.ndarray
    residuals: np.ndarray
    params: SystemParams
    failures: list = field(default_factory=list)

    def __len__(self):
        return self.poles.size

    def real_poles(self, tol: float = POLE_IMAG_TOL) -> np.ndarray:
        return np.flatnonzero(np.abs(self.poles.imag) <= tol)

    def nearest(self, target: complex = 0.0) -> complex:
        return complex(self.poles[np.argmin(np.abs(self.poles - target))])


def poles_muller(params: SystemParams, seeds=None, root_tol: float = ROOT_TOL, max_iter: int = 100,
                 dedup_tol: float = DEDUP_TOL, q_tol: float = Q_TOL,
                 imag_tol: float = POLE_IMAG_TOL) -> PoleSet:
    """Refine seeds into poles of F0 with Muller's method on ``D_full``.

    Roots where ``Q`` also vanishes cancel against the numerator and are not
    poles; when one is hit the search is repeated on ``D_full`` deflated by
    that root. Seeds that fail are listed in ``failures`` as ``(seed, reason)``.
    """
    p = validate(params)
    if seeds is None:
        seeds = characteristic_frequencies(p) + SEED_OFFSET
    seeds = np.atleast_1d(np.asarray(seeds, dtype=complex))

    def dfull(x):
        return complex(cleared_forms(x, p)[1])

    roots, its, resid, failures = [], [], [], []
    for seed in seeds:
        h = 0.05
        spurious = []

        def target(x, spurious=spurious):
            val = dfull(x)
            for s in spurious:
                val /= (x - s)
            return val

        result = None
        for _ in range(4):
            try:
                r = muller(target, seed - h, seed + h, seed, ftol=root_tol, max_iter=max_iter)
            except NoConvergence:
                failures.append((complex(seed), "no convergence"))
                break
            if abs(complex(inner_q(r.root, p))) < q_tol:
                spurious.append(r.root)
                continue
            result = r
            break
        else:
            failures.append((complex(seed), "only pole-zero cancellations found"))
        if result is None:
            continue
        residual = abs(dfull(result.root))
        if residual > root_tol:
            failures.append((complex(seed), f"residual {residual:.3g} above tolerance"))
            continue
        if result.root.imag > imag_tol:
            failures.append((complex(seed), f"root {result.root} in the upper half-plane"))
            continue
        if any(abs(result.root - x) <= dedup_tol for x in roots):
            continue
        roots.append(result.root)
        its.append(result.iterations)
        resid.append(residual)

    order = np.argsort([z.real for z in roots], kind="stable")
    poles = np.array(roots, dtype=complex)[order] if roots else np.zeros(0, dtype=complex)
    weights = inner_q(poles, p) / d_full_prime(poles, p) if roots else np.zeros(0, dtype=complex)
    return PoleSet(poles=poles, weights=np.asarray(weights, dtype=complex),
                   iterations=np.array(its, dtype=int)[order] if roots else np.zeros(0, dtype=int),
                   residuals=np.array(resid)[order] if roots else np.zeros(0),
                   params=p, failures=failures)


def closed_form_splitting(params: SystemParams, form: str = "series"):
    """Predicted doublet (w_minus, w_plus) for an antinode emitter with delta = 0.

    ``form="series"`` is the third-order expansion in N eta,
    ``sqrt(N) [1/sqrt2 - N eta / (2 sqrt2) + 3/4 (N eta)^2]``; ``form="resummed"``
    uses half of ``sqrt(2N / (1 + 2 N eta))``.
    """
    p = validate(params)
    if p.delta != 0 or abs(p.phi0 - math.pi / 2) > 1e-12:
        warnings.warn("closed-form splitting assumes an antinode emitter with delta = 0", stacklevel=2)
    n, x = p.n_atoms, p.n_atoms * p.eta
    if form == "series":
        w = math.sqrt(n) * (1 / math.sqrt(2) - x / (2 * math.sqrt(2)) + 0.75 * x * x)
    elif form == "resummed":
        w = 0.5 * math.sqrt(2 * n / (1 + 2 * x))
    else:
        raise ValidationError(f"form must be 'series' or 'resummed', got {form!r}")
    return -w, w


def _placement_of(p: SystemParams) -> str:
    s = math.sin(p.phi0)
    if abs(abs(s) - 1) < 1e-9:
        return "antinode"
    if abs(s) < 1e-9:
        return "node"
    raise ValidationError("phi0 is neither a node nor an antinode; pass placement explicitly")


def taylor_denominator(omega, params: SystemParams, placement: str | None = None,
                       corrected: bool = False):
    """Small-eta polynomial for |D_full(w)|^2 up to eta^3, for real w.

    By default the coefficients are the published ones. For the node placement
    those contain three misprints (an extra factor 4 on the eta^0 square,
    ``N w^2`` for ``N^2 w^2`` at eta^2 and ``w^4`` for ``w^3`` at eta^3);
    ``corrected=True`` swaps in the exact series coefficients.
    """
    p = validate(params)
    placement = placement or _placement_of(p)
    w = np.asarray(omega, dtype=float)
    n, d, e = p.n_atoms, p.delta, p.eta
    lin = n * d * w + n * w ** 2 + 2 * n ** 2 * w ** 2 - 4 * n * d * w ** 3 - 4 * n * w ** 4
    cubic = n * d + n * w + 2 * n ** 2 * w - 4 * n * d * w ** 2 - 4 * n * w ** 3
    if placement == "antinode":
        return ((d + w) ** 2 + (-n + 2 * w * (d + w)) ** 2
                - 2 * e * lin
                + e ** 2 * (-n ** 2 * w ** 2 + 8 * n * d * w ** 3 + 8 * n * w ** 4 + 4 * n ** 2 * w ** 4)
                + (4 / 3) * e ** 3 * w ** 3 * cubic)
    if placement == "node":
        if corrected:
            return (4 * w ** 2 * (d + w) ** 2 + (d + w + 2 * n * w) ** 2
                    + 2 * e * lin
                    + e ** 2 * w ** 2 * (n ** 2 - 8 * n * d * w - 8 * n * w ** 2 - 4 * n ** 2 * w ** 2)
                    - (4 / 3) * e ** 3 * w ** 3 * cubic)
        printed_cubic = n * d + n * w + 2 * n ** 2 * w - 4 * n * d * w ** 2 - 4 * n * w ** 4
        return (4 * w ** 2 * (d + w) ** 2 + 4 * (d + w + 2 * n * w) ** 2
                + 2 * e * lin
                + e ** 2 * w ** 2 * (n ** 2 - 8 * n * d * w - 8 * n * w ** 2 - 4 * n * w ** 2)
                - (4 / 3) * e ** 3 * w ** 3 * printed_cubic)
    raise ValidationError(f"placement must be 'node' or 'antinode', got {placement!r}")


def taylor_discrepancy(omega, params: SystemParams, placement: str | None = None,
                       corrected: bool = False):
    """Polynomial minus the exact |D_full|^2 at the same real frequencies."""
    _, d = cleared_forms(np.asarray(omega, dtype=float), params)
    return taylor_denominator(omega, params, placement, corrected) - np.abs(d) ** 2


def coupling_saturation_scan(n_values, eta_values) -> np.ndarray:
    """|w_p| of the first density peak right of w = 0 (antinode, delta = 0).

    Returns an array of shape ``(len(n_values), len(eta_values))``.
    """
    table = np.empty((len(n_values), len(eta_values)))
    for i, n in enumerate(n_values):
        for j, eta in enumerate(eta_values):
            p = placed("antinode", int(n), float(eta))
            freqs = characteristic_frequencies(p)
            positive = freqs[freqs > DEDUP_TOL]
            if positive.size == 0:
                raise NoMinimaFound(f"no positive characteristic frequency for N={n}, eta={eta}")
            table[i, j] = positive[0]
    return table
