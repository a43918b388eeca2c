"""Collective delay-differential equations for the emitter and both mirrors.

The three amplitudes obey (gamma = v = 1, d/v = eta)::

    c0'  = -1/2 [c0 + sqrt(N) (cl(t-eta) + cr(t-eta)) e^{i phi_M} e^{i delta t}]
    cl'  = -1/2 [sqrt(N) c0(t-eta) e^{-i delta t} e^{i phi_0} + N cl + N cr(t-2 eta) e^{2 i phi_M}]
    cr'  = (same with cl <-> cr)

with every delayed term switched on by Theta(t - lag), Theta(0) = 1. The
initial c0 = 1 is a jump from the zero history, so the Heun step that ends
exactly at t = eta uses the left limit (zero) of the delayed c0 sample; the
term is active for every step from t = eta on. Without this the jump costs one
O(dt) error and the scheme drops to first order.

The step is dt = eta / steps_per_delay so both lags are whole numbers of steps.
Within a block of ``steps_per_delay`` steps all delayed inputs are already in the
history, which leaves one scalar linear recurrence per amplitude; each block is
solved with :func:`scipy.signal.lfilter`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import NonFiniteAmplitude, StepTooCoarse, ValidationError
from .model import SystemParams, derive, validate

DEFAULT_STEPS_PER_DELAY = 2000
MARKOV_DT_SCALE = 1e-3
MAX_STABLE_STEP = 0.1


@dataclass(frozen=True)
class AmplitudeTrajectory:
    """Uniformly sampled amplitudes.

    ``dt`` is the spacing of the stored samples; ``step`` the integrator step
    (they differ only when ``record_every > 1``).
    """

    dt: float
    times: np.ndarray
    c0: np.ndarray
    c_lm: np.ndarray
    c_rm: np.ndarray
    params: SystemParams
    step: float
    method: str = "heun"

    @property
    def p0(self) -> np.ndarray:
        return np.abs(self.c0) ** 2

    @property
    def p_lm(self) -> np.ndarray:
        return np.abs(self.c_lm) ** 2

    @property
    def p_rm(self) -> np.ndarray:
        return np.abs(self.c_rm) ** 2


class HistoryBuffer:
    """Ring storage of the most recent ``2 * lag + 1`` samples of each amplitude.

    Indices are absolute step numbers; reads before step 0 return zeros, which
    is how the Theta factors enter.
    """

    def __init__(self, lag: int, n_amplitudes: int = 3):
        if lag < 1:
            raise ValueError("lag must be at least one step")
        self.lag = lag
        self.size = 2 * lag + 1
        self._data = np.zeros((n_amplitudes, self.size), dtype=complex)
        self.count = 0

    def push(self, values: np.ndarray) -> None:
        values = np.atleast_2d(values)
        m = values.shape[1]
        if m > self.size:
            values = values[:, -self.size:]
            self.count += m - self.size
            m = self.size
        idx = (self.count + np.arange(m)) % self.size
        self._data[:, idx] = values
        self.count += m

    def read(self, start: int, stop: int) -> np.ndarray:
        """Samples for absolute indices ``start <= k < stop``."""
        if stop > self.count or start < self.count - self.size:
            raise IndexError(f"[{start}, {stop}) outside stored window")
        out = np.zeros((self._data.shape[0], stop - start), dtype=complex)
        k = np.arange(start, stop)
        live = k >= 0
        out[:, live] = self._data[:, k[live] % self.size]
        return out


def free_decay_reference(t):
    """Amplitude e^{-t/2} of an emitter decaying into the bare waveguide."""
    return np.exp(-0.5 * np.asarray(t, dtype=float)).astype(complex)


def step_size(params: SystemParams, steps_per_delay: int) -> float:
    p = validate(params)
    if p.eta > 0:
        return p.eta / steps_per_delay
    return MARKOV_DT_SCALE / max(1, p.n_atoms)


def _check_inputs(params: SystemParams, t_max: float, steps_per_delay: int, method: str):
    p = validate(params)
    if not (t_max > 0 and math.isfinite(t_max)):
        raise ValidationError(f"t_max must be positive and finite, got {t_max}")
    if int(steps_per_delay) != steps_per_delay or steps_per_delay < 1:
        raise ValidationError(f"steps_per_delay must be a positive integer, got {steps_per_delay}")
    if method not in ("euler", "heun"):
        raise ValidationError(f"method must be 'euler' or 'heun', got {method!r}")
    dt = step_size(p, int(steps_per_delay))
    if dt * max(1.0, p.n_atoms / 2) > MAX_STABLE_STEP:
        raise StepTooCoarse(
            f"dt*max(1, N/2) = {dt * max(1.0, p.n_atoms / 2):.3g} exceeds {MAX_STABLE_STEP}; "
            "increase steps_per_delay")
    return p, dt


def integrate_collective(params: SystemParams, t_max: float,
                         steps_per_delay: int = DEFAULT_STEPS_PER_DELAY,
                         method: str = "heun", record_every: int = 1) -> AmplitudeTrajectory:
    """Integrate the collective DDEs from c0 = 1, cl = cr = 0.

    Args:
        params: System parameters.
        t_max: Final time; the grid is extended to the next whole step.
        steps_per_delay: Steps per emitter-mirror delay eta. Ignored when
            eta = 0, where dt = 1e-3 / max(1, N).
        method: ``"euler"`` or ``"heun"`` (trapezoidal predictor-corrector, with
            the e^{+-i delta t} phases taken at the half step).
        record_every: Keep every n-th sample only; the full history is still
            used internally.

    Returns:
        The sampled trajectory.
    """
    p, dt = _check_inputs(params, t_max, steps_per_delay, method)
    if int(record_every) != record_every or record_every < 1:
        raise ValidationError("record_every must be a positive integer")
    record_every = int(record_every)
    n_steps = int(math.ceil(t_max / dt - 1e-9))
    if p.eta > 0:
        y = _integrate_delayed(p, dt, int(steps_per_delay), n_steps, method, record_every)
    else:
        y = _integrate_markov(p, dt, n_steps, method, record_every)
    if not np.all(np.isfinite(y)):
        raise NonFiniteAmplitude("amplitude overflowed during integration")
    times = np.arange(y.shape[1]) * (dt * record_every)
    return AmplitudeTrajectory(dt=dt * record_every, times=times, c0=y[0], c_lm=y[1], c_rm=y[2],
                               params=p, step=dt, method=method)


def _integrate_delayed(p: SystemParams, dt: float, lag: int, n_steps: int,
                       method: str, record_every: int) -> np.ndarray:
    n = p.n_atoms
    sqrt_n = math.sqrt(n)
    phi_m = derive(p).phi_m
    e_m = np.exp(1j * phi_m)
    e_0 = np.exp(1j * p.phi0)
    e_2m = np.exp(2j * phi_m)
    heun = method == "heun"
    rates = np.array([0.5, n / 2, n / 2])
    x = rates * dt
    if heun:
        alpha = 1.0 - x + 0.5 * x * x
    else:
        alpha = 1.0 - x

    out = np.zeros((3, n_steps // record_every + 1), dtype=complex)
    state = np.array([1.0 + 0j, 0j, 0j])
    out[:, 0] = state
    hist = HistoryBuffer(lag)
    hist.push(state[:, None])

    k0 = 0
    while k0 < n_steps:
        m = min(lag, n_steps - k0)
        k = k0 + np.arange(m)
        tau = (k + 0.5) * dt if heun else k * dt
        rot = np.exp(1j * p.delta * tau)
        d1 = hist.read(k0 - lag, k0 - lag + m + 1)          # lag eta
        d2 = hist.read(k0 - 2 * lag, k0 - 2 * lag + m + 1)  # lag 2 eta

        # delayed inputs at both ends of each step (m + 1 samples); only the
        # emitter <-> mirror terms carry e^{+-i delta t}
        h0 = -0.5 * sqrt_n * e_m * (d1[1] + d1[2])
        h_src = -0.5 * sqrt_n * e_0 * d1[0]
        hl = -0.5 * n * e_2m * d2[2]
        hr = -0.5 * n * e_2m * d2[1]

        def forcing(edge):
            return (rot * h0[edge],
                    np.conj(rot) * h_src[edge] + hl[edge],
                    np.conj(rot) * h_src[edge] + hr[edge])

        left = forcing(slice(0, m))
        right = None
        if heun:
            # c0 jumps from 0 to 1 at t = 0, so the step ending at the onset
            # t = eta sees the left limit (zero) of that delayed sample
            onset = lag - k0 - 1
            if 0 <= onset < m:
                h_src = h_src.copy()
                h_src[onset + 1] = 0.0
            right = forcing(slice(1, m + 1))

        block = np.empty((3, m), dtype=complex)
        for i in range(3):
            if heun:
                # y+ = alpha y + dt/2 [(1 - rate dt) g_left + g_right]
                s = 0.5 * dt * ((1.0 - x[i]) * left[i] + right[i])
            else:
                s = dt * left[i]
            block[i] = lfilter([1.0], [1.0, -alpha[i]], s, zi=[alpha[i] * state[i]])[0]

        if not np.all(np.isfinite(block)):
            raise NonFiniteAmplitude(f"amplitude overflowed near t = {k0 * dt:.6g}")
        hist.push(block)
        state = block[:, -1]
        idx = k0 + 1 + np.arange(m)
        keep = idx % record_every == 0
        out[:, idx[keep] // record_every] = block[:, keep]
        k0 += m
    return out


def _integrate_markov(p: SystemParams, dt: float, n_steps: int,
                      method: str, record_every: int) -> np.ndarray:
    # eta = 0: in the frame b = c_M e^{i delta t} the system is autonomous
    n = p.n_atoms
    s = 0.5 * math.sqrt(n) * np.exp(1j * p.phi0)
    e2 = np.exp(2j * p.phi0)
    a = np.array([
        [-0.5, -s, -s],
        [-s, 1j * p.delta - n / 2, -0.5 * n * e2],
        [-s, -0.5 * n * e2, 1j * p.delta - n / 2],
    ])
    ad = a * dt
    step = np.eye(3) + ad + (0.5 * ad @ ad if method == "heun" else 0.0)
    stride = np.linalg.matrix_power(step, record_every)

    n_out = n_steps // record_every + 1
    block = 1024
    powers = np.empty((block, 3, 3), dtype=complex)
    powers[0] = np.eye(3)
    for j in range(1, block):
        powers[j] = stride @ powers[j - 1]
    jump = stride @ powers[-1]

    out = np.zeros((3, n_out), dtype=complex)
    y = np.array([1.0 + 0j, 0j, 0j])
    for start in range(0, n_out, block):
        stop = min(start + block, n_out)
        out[:, start:stop] = np.einsum("kij,j->ik", powers[:stop - start], y)
        y = jump @ y
    t = np.arange(n_out) * dt * record_every
    unrot = np.exp(-1j * p.delta * t)
    out[1] *= unrot
    out[2] *= unrot
    return out


def richardson_check(params: SystemParams, t_max: float,
                     steps_per_delay: int = DEFAULT_STEPS_PER_DELAY,
                     method: str = "heun") -> float:
    """Max pointwise change of |c0| between step dt and dt/2 on the shared grid."""
    coarse = integrate_collective(params, t_max, steps_per_delay, method)
    fine = integrate_collective(params, t_max, 2 * steps_per_delay, method)
    shared = fine.c0[::2][: coarse.c0.size]
    m = min(shared.size, coarse.c0.size)
    return float(np.max(np.abs(np.abs(coarse.c0[:m]) - np.abs(shared[:m]))))
