import dataclasses
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from atomcav import io
from atomcav.dde import integrate_collective
from atomcav.errors import ParseError, UnknownKey, ValidationError
from atomcav.experiments import sweep_delta
from atomcav.intensity import intensity_map
from atomcav.model import placed
from atomcav.residue import reconstruct
from atomcav.spectral import poles_muller, response_f0

P = placed("antinode", 3, 0.5, delta=1.25)


def test_trajectory_round_trip(tmp_path):
    tr = integrate_collective(P, 2.0, steps_per_delay=100)
    back = io.read_trajectory_csv(io.write_trajectory_csv(tmp_path / "t.csv", tr), P)
    for name in ("times", "c0", "c_lm", "c_rm"):
        assert np.array_equal(getattr(back, name), getattr(tr, name))


def test_spectrum_and_poles_round_trip(tmp_path):
    resp = response_f0(np.linspace(-5, 5, 101), P)
    back = io.read_spectrum_csv(io.write_spectrum_csv(tmp_path / "s.csv", resp), P)
    assert np.array_equal(back.f0, resp.f0) and np.array_equal(back.density, resp.density)
    ps = poles_muller(P)
    back = io.read_poles_csv(io.write_poles_csv(tmp_path / "p.csv", ps), P)
    assert np.array_equal(back.poles, ps.poles) and np.array_equal(back.weights, ps.weights)


def test_reconstruction_round_trip(tmp_path):
    tr = integrate_collective(P, 2.0, steps_per_delay=100)
    rec = reconstruct(poles_muller(P), tr.times, 2, reference=tr.c0)
    back = io.read_reconstruction_csv(io.write_reconstruction_csv(tmp_path / "r.csv", rec))
    assert np.array_equal(back["c0_approx"], rec.c0)
    assert np.array_equal(back["abs_error"], rec.abs_error)
    bare = reconstruct(poles_muller(P), tr.times, 2)
    assert np.isnan(io.read_reconstruction_csv(io.write_reconstruction_csv(tmp_path / "b.csv", bare))["p0_exact"]).all()


def test_intensity_round_trip_is_t_major(tmp_path):
    tr = integrate_collective(P, 2.0, steps_per_delay=100)
    imap = intensity_map(tr, np.linspace(-2, 2, 7), np.linspace(0, 2, 5))
    path = io.write_intensity_csv(tmp_path / "i.csv", imap)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,t,intensity"
    assert [float(v) for v in lines[2].split(",")[:2]] == [imap.x[1], imap.t[0]]
    back = io.read_intensity_csv(path, phi0=imap.phi0)
    assert np.array_equal(back.intensity, imap.intensity)
    assert np.array_equal(back.x, imap.x) and np.array_equal(back.t, imap.t)


def test_sweep_round_trip_with_sidecar(tmp_path):
    res = sweep_delta(placed("antinode", 10, 0.5), [0.0, 1.0], np.linspace(-5, 5, 51), jobs=1)
    csv_path, json_path = io.write_sweep(tmp_path / "sw.csv", res)
    axis, omega, density = io.read_sweep_csv(csv_path, "delta")
    assert np.array_equal(axis, res.axis_values) and np.array_equal(omega, res.omega)
    assert np.array_equal(density, res.density)
    side = json.loads(json_path.read_text())
    assert side["axis"] == "delta" and side["omega"]["points"] == 51
    assert {"params", "tolerances", "created", "peaks"} <= set(side)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(allow_nan=False, allow_infinity=False, width=64)))
def test_binary_matrix_round_trip(tmp_path_factory, m):
    path = tmp_path_factory.mktemp("bin") / "m.bin"
    back = io.read_matrix_bin(io.write_matrix_bin(path, m))
    assert back.shape == m.shape and np.array_equal(back, m)
    assert path.stat().st_size == 16 + 8 * m.size


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1, max_size=20))
def test_seventeen_digits_are_lossless(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("csv") / "x.csv"
    data = np.array(values).reshape(-1, 1).repeat(4, axis=1)
    back = io._read_table(io._write_table(path, io.SPECTRUM_COLUMNS, data), io.SPECTRUM_COLUMNS)
    assert np.array_equal(back, data)


def test_corrupt_files(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("omega,re_f0\n1,2\n")
    with pytest.raises(ParseError):
        io.read_spectrum_csv(bad, P)
    bad.write_text(",".join(io.SPECTRUM_COLUMNS) + "\n1,2,x,4\n")
    with pytest.raises(ParseError):
        io.read_spectrum_csv(bad, P)
    (tmp_path / "short.bin").write_bytes(b"\x01\x00")
    with pytest.raises(ParseError):
        io.read_matrix_bin(tmp_path / "short.bin")


def test_minimal_config_fills_defaults(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"n": 100, "eta": 1.0, "placement": "node"}))
    cfg = io.load_config(path)
    assert cfg.t_max == 10.0 and cfg.per_side == 3 and cfg.out == "out"
    assert cfg.params().phi0 == pytest.approx(math.pi)


def test_unknown_key(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"n": 100, "eta": 1.0, "gamma_units": 1}))
    with pytest.raises(UnknownKey):
        io.load_config(path)


def test_flags_override_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"n": 100, "eta": 1.0}))
    assert io.load_config(path, {"eta": 2.0, "n": None}).eta == 2.0


@pytest.mark.parametrize("text", ["{not json", "[1, 2]"])
def test_unparsable_config(tmp_path, text):
    path = tmp_path / "c.json"
    path.write_text(text)
    with pytest.raises(ParseError):
        io.load_config(path)


@pytest.mark.parametrize("data", [{"eta": -1.0}, {"placement": "middle"}, {"format": "xml"},
                                  {"t_max": 0.0}, {"placement": None}, {"n": 1, "x_points": 0}])
def test_invalid_config_values(data):
    with pytest.raises(ValidationError):
        io.config_from_dict(data)


def test_manifest_reproduces_the_run(tmp_path):
    cfg = io.config_from_dict({"n": 4, "eta": 0.5, "placement": "node", "delta_c": 0.3, "t_max": 2.0,
                               "steps_per_delay": 100})
    path = io.write_manifest(tmp_path / "m.json", cfg, ["a.csv"])
    again = io.config_from_manifest(path)
    assert again == cfg
    a = integrate_collective(cfg.params(), cfg.t_max, cfg.steps_per_delay)
    b = integrate_collective(again.params(), again.t_max, again.steps_per_delay)
    assert np.array_equal(a.c0, b.c0)
    assert dataclasses.asdict(again) == json.loads(path.read_text())["config"]
