import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from atomcav.dde import (HistoryBuffer, free_decay_reference, integrate_collective,
                         richardson_check)
from atomcav.errors import StepTooCoarse, ValidationError
from atomcav.model import SystemParams, placed


def test_free_decay_reference_values():
    assert free_decay_reference(0.0) == 1
    assert abs(free_decay_reference(2 * math.log(2))) == pytest.approx(0.5)


@pytest.mark.parametrize("eta", [0.0, 0.3, 1.0])
def test_no_mirrors_is_free_decay(eta):
    tr = integrate_collective(SystemParams(n_atoms=0, eta=eta), 5.0, steps_per_delay=10_000)
    assert np.max(np.abs(tr.c0 - free_decay_reference(tr.times))) <= 1e-6
    assert np.all(tr.c_lm == 0)


def test_initial_state_and_grid():
    tr = integrate_collective(placed("antinode", 10, 0.5), 2.0, steps_per_delay=100)
    assert tr.c0[0] == 1 and tr.c_lm[0] == 0 and tr.c_rm[0] == 0
    assert tr.dt == pytest.approx(0.005)
    assert np.allclose(np.diff(tr.times), tr.dt)
    assert tr.times[-1] == pytest.approx(2.0)


def test_antinode_decays_and_deviates_after_round_trip():
    p = placed("antinode", 100, 1.0)
    tr = integrate_collective(p, 4.0)
    ref = np.abs(free_decay_reference(tr.times))
    before = tr.times < 1.0
    assert np.max(np.abs(np.abs(tr.c0[before]) - ref[before])) < 1e-6
    after = tr.times > 2.2
    assert np.max(np.abs(np.abs(tr.c0[after]) - ref[after])) > 1e-2


def test_node_forms_a_plateau():
    tr = integrate_collective(placed("node", 100, 1.0), 200.0, record_every=100)
    assert np.mean(tr.p0[-50:]) > 0.1


def test_mirrors_stay_symmetric():
    tr = integrate_collective(placed("antinode", 7, 0.4, delta=2.5), 5.0, steps_per_delay=400)
    assert np.array_equal(tr.c_lm, tr.c_rm)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 60), st.floats(0.05, 1.5), st.floats(-5, 5),
       st.sampled_from(["node", "antinode"]))
def test_atomic_population_never_exceeds_one(n, eta, delta, kind):
    spd = max(400, math.ceil(10 * n * eta))
    tr = integrate_collective(placed(kind, n, eta, delta=delta), 6.0, steps_per_delay=spd)
    total = tr.p0 + tr.p_lm + tr.p_rm
    assert np.max(total) <= 1 + 1e-6


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 100), st.floats(-5, 5), st.floats(0, 2 * math.pi))
def test_causality_before_round_trip(n, delta, phi0):
    eta = 0.5
    base = integrate_collective(SystemParams(n_atoms=0, eta=eta), 2.0, steps_per_delay=400)
    other = integrate_collective(SystemParams(n_atoms=n, eta=eta, delta=delta, phi0=phi0), 2.0,
                                 steps_per_delay=400)
    early = base.times < 2 * eta - 1e-12
    assert np.array_equal(base.c0[early], other.c0[early])
    assert np.all(other.c_lm[other.times < eta - 1e-12] == 0)


def test_heun_is_second_order_and_euler_first():
    p = placed("antinode", 20, 0.5, delta=1.0)
    fine = integrate_collective(p, 3.0, steps_per_delay=3200)

    def err(method, spd):
        tr = integrate_collective(p, 3.0, steps_per_delay=spd, method=method)
        stride = 3200 // spd
        return np.max(np.abs(tr.c0 - fine.c0[::stride]))

    heun = [err("heun", s) for s in (100, 200)]
    euler = [err("euler", s) for s in (100, 200)]
    assert math.log2(heun[0] / heun[1]) == pytest.approx(2, abs=0.3)
    assert math.log2(euler[0] / euler[1]) == pytest.approx(1, abs=0.3)
    assert heun[0] < euler[0] / 10


def test_richardson_error_decreases():
    p = placed("antinode", 100, 1.0)
    errs = [richardson_check(p, 5.0, spd) for spd in (500, 1000, 2000)]
    assert errs[0] > errs[1] > errs[2]


def test_markov_limit_matches_small_delay():
    p0 = placed("antinode", 50, 0.0, delta=2.0)
    p1 = placed("antinode", 50, 1e-5, delta=2.0)
    a = integrate_collective(p0, 1.0)
    b = integrate_collective(p1, 1.0, steps_per_delay=5)
    common = np.interp(a.times, b.times, np.abs(b.c0))
    assert np.max(np.abs(np.abs(a.c0) - common)) < 5e-3


def test_record_every_decimates_without_changing_values():
    p = placed("node", 30, 0.5, delta=1.0)
    full = integrate_collective(p, 3.0, steps_per_delay=200)
    thin = integrate_collective(p, 3.0, steps_per_delay=200, record_every=7)
    assert np.array_equal(thin.c0, full.c0[::7])
    assert thin.dt == pytest.approx(7 * full.dt)


def test_bitwise_reproducible():
    p = placed("antinode", 40, 0.7, delta=-1.5)
    a = integrate_collective(p, 3.0, steps_per_delay=300)
    b = integrate_collective(p, 3.0, steps_per_delay=300)
    assert np.array_equal(a.c0, b.c0) and np.array_equal(a.c_lm, b.c_lm)


def test_step_guard_and_input_errors():
    with pytest.raises(StepTooCoarse):
        integrate_collective(placed("antinode", 100, 1.0), 1.0, steps_per_delay=10)
    with pytest.raises(ValidationError):
        integrate_collective(placed("antinode", 1, 1.0), -1.0)
    with pytest.raises(ValidationError):
        integrate_collective(placed("antinode", 1, 1.0), 1.0, method="rk4")
    with pytest.raises(ValidationError):
        integrate_collective(placed("antinode", 1, 1.0), 1.0, steps_per_delay=0)


def test_history_reads_zero_before_start():
    buf = HistoryBuffer(3, n_amplitudes=1)
    buf.push(np.array([[1.0, 2.0]]))
    assert np.array_equal(buf.read(-2, 2)[0], [0, 0, 1, 2])


@given(st.integers(1, 6), st.lists(st.integers(1, 9), min_size=1, max_size=12))
def test_history_matches_a_plain_list(lag, chunks):
    buf = HistoryBuffer(lag, n_amplitudes=1)
    seen = []
    for size in chunks:
        block = np.arange(len(seen), len(seen) + size, dtype=float)
        buf.push(block[None, :])
        seen.extend(block)
        lo = max(0, len(seen) - buf.size)
        assert np.array_equal(buf.read(lo, len(seen))[0], seen[lo:])
    with pytest.raises(IndexError):
        buf.read(len(seen) - buf.size - 1, len(seen))
