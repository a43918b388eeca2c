"""CSV/JSON/binary emitters and readers, plus run configuration.

Every float is written with 17 significant digits so files read back bit-exact.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dde import AmplitudeTrajectory
from .errors import ParseError, UnknownKey, ValidationError
from .experiments import SweepResult
from .intensity import IntensityMap
from .model import PLACEMENT_PHASE, SystemParams, make_placement, validate
from .residue import Reconstruction
from .spectral import PoleSet, SpectralResponse

FLOAT_FMT = "%.17g"

TRAJECTORY_COLUMNS = ["t", "re_c0", "im_c0", "p0", "re_clm", "im_clm", "plm", "re_crm", "im_crm", "prm"]
SPECTRUM_COLUMNS = ["omega", "re_f0", "im_f0", "density"]
POLES_COLUMNS = ["re_omega", "im_omega", "re_weight", "im_weight", "residual"]
RECONSTRUCTION_COLUMNS = ["t", "re_c0_approx", "im_c0_approx", "p0_approx", "p0_exact", "abs_error"]
INTENSITY_COLUMNS = ["x", "t", "intensity"]


def _write_table(path, columns, data: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        if data.size:
            np.savetxt(fh, data, delimiter=",", fmt=FLOAT_FMT)
    return path


def _read_table(path, columns) -> np.ndarray:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if header != list(columns):
            raise ParseError(f"{path}: expected columns {columns}, found {header}")
        try:
            rows = [[float(v) for v in row] for row in reader if row]
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}") from None
    return np.array(rows, dtype=float).reshape(-1, len(columns))


def write_trajectory_csv(path, traj: AmplitudeTrajectory) -> Path:
    data = np.column_stack([traj.times, traj.c0.real, traj.c0.imag, traj.p0,
                            traj.c_lm.real, traj.c_lm.imag, traj.p_lm,
                            traj.c_rm.real, traj.c_rm.imag, traj.p_rm])
    return _write_table(path, TRAJECTORY_COLUMNS, data)


def read_trajectory_csv(path, params: SystemParams, method: str = "heun") -> AmplitudeTrajectory:
    d = _read_table(path, TRAJECTORY_COLUMNS)
    t = d[:, 0]
    dt = float(t[1] - t[0]) if t.size > 1 else 0.0
    return AmplitudeTrajectory(dt=dt, times=t, c0=d[:, 1] + 1j * d[:, 2], c_lm=d[:, 4] + 1j * d[:, 5],
                               c_rm=d[:, 7] + 1j * d[:, 8], params=validate(params), step=dt,
                               method=method)


def write_spectrum_csv(path, resp: SpectralResponse) -> Path:
    data = np.column_stack([resp.omega, resp.f0.real, resp.f0.imag, resp.density])
    return _write_table(path, SPECTRUM_COLUMNS, data)


def read_spectrum_csv(path, params: SystemParams) -> SpectralResponse:
    d = _read_table(path, SPECTRUM_COLUMNS)
    return SpectralResponse(omega=d[:, 0], f0=d[:, 1] + 1j * d[:, 2], density=d[:, 3],
                            params=validate(params))


def write_poles_csv(path, poles: PoleSet) -> Path:
    data = np.column_stack([poles.poles.real, poles.poles.imag, poles.weights.real,
                            poles.weights.imag, poles.residuals])
    return _write_table(path, POLES_COLUMNS, data)


def read_poles_csv(path, params: SystemParams) -> PoleSet:
    """Iteration counts are not stored and come back as zeros."""
    d = _read_table(path, POLES_COLUMNS)
    return PoleSet(poles=d[:, 0] + 1j * d[:, 1], weights=d[:, 2] + 1j * d[:, 3],
                   iterations=np.zeros(d.shape[0], dtype=int), residuals=d[:, 4],
                   params=validate(params))


def write_reconstruction_csv(path, rec: Reconstruction) -> Path:
    nan = np.full(rec.times.shape, np.nan)
    exact = nan if rec.reference is None else np.abs(rec.reference) ** 2
    err = nan if rec.reference is None else rec.abs_error
    data = np.column_stack([rec.times, rec.c0.real, rec.c0.imag, rec.p0, exact, err])
    return _write_table(path, RECONSTRUCTION_COLUMNS, data)


def read_reconstruction_csv(path) -> dict:
    d = _read_table(path, RECONSTRUCTION_COLUMNS)
    return {"t": d[:, 0], "c0_approx": d[:, 1] + 1j * d[:, 2], "p0_approx": d[:, 3],
            "p0_exact": d[:, 4], "abs_error": d[:, 5]}


def write_intensity_csv(path, imap: IntensityMap) -> Path:
    """Long form, all x for the first t, then the next t."""
    tt, xx = np.meshgrid(imap.t, imap.x, indexing="ij")
    data = np.column_stack([xx.ravel(), tt.ravel(), imap.intensity.ravel()])
    return _write_table(path, INTENSITY_COLUMNS, data)


def read_intensity_csv(path, phi0: float = math.pi / 2, fringe_count: int = 20,
                       delta: float = 0.0) -> IntensityMap:
    d = _read_table(path, INTENSITY_COLUMNS)
    x = np.unique(d[:, 0])
    t = np.unique(d[:, 1])
    if x.size * t.size != d.shape[0]:
        raise ParseError(f"{path}: rows do not form a full x-t grid")
    return IntensityMap(x=d[: x.size, 0].copy(), t=d[:: x.size, 1].copy(),
                        intensity=d[:, 2].reshape(t.size, x.size), phi0=phi0,
                        fringe_count=fringe_count, delta=delta)


def write_matrix_bin(path, matrix) -> Path:
    """Two little-endian uint64 dims, then row-major little-endian float64."""
    m = np.ascontiguousarray(matrix, dtype="<f8")
    if m.ndim != 2:
        raise ValidationError("matrix dump needs a 2-d array")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(np.array(m.shape, dtype="<u8").tobytes())
        fh.write(m.tobytes())
    return path


def read_matrix_bin(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 16:
        raise ParseError(f"{path}: truncated header")
    rows, cols = np.frombuffer(raw[:16], dtype="<u8")
    body = np.frombuffer(raw[16:], dtype="<f8")
    if body.size != rows * cols:
        raise ParseError(f"{path}: expected {rows}x{cols} values, found {body.size}")
    return body.reshape(int(rows), int(cols)).copy()


def write_sweep(path, sweep: SweepResult) -> tuple[Path, Path]:
    """Long-form CSV ``<axis>,omega,density`` plus a ``.json`` sidecar."""
    path = Path(path)
    rows = len(sweep.axis_values)
    data = np.column_stack([np.repeat(sweep.axis_values, sweep.omega.size),
                            np.tile(sweep.omega, rows), sweep.density.ravel()])
    csv_path = _write_table(path, [sweep.axis_name, "omega", "density"], data)
    sidecar = dict(sweep.provenance)
    sidecar.update({
        "axis_values": [float(v) for v in sweep.axis_values],
        "omega": {"start": float(sweep.omega[0]), "stop": float(sweep.omega[-1]),
                  "points": int(sweep.omega.size)},
        "peaks": [[float(v) for v in pk] for pk in sweep.peaks],
        "characteristic_frequencies": [[float(v) for v in mk] for mk in sweep.minima],
    })
    json_path = path.with_suffix(".json")
    json_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return csv_path, json_path


def read_sweep_csv(path, axis_name: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(axis_values, omega, density)`` with density shaped rows x omega."""
    d = _read_table(path, [axis_name, "omega", "density"])
    axis = np.unique(d[:, 0])
    n_omega = d.shape[0] // max(axis.size, 1)
    if axis.size * n_omega != d.shape[0]:
        raise ParseError(f"{path}: rows do not form a full grid")
    return d[::n_omega, 0].copy(), d[:n_omega, 1].copy(), d[:, 2].reshape(-1, n_omega)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings of one CLI run.

    ``placement`` (node/antinode) wins over ``phi0``; with a placement,
    phi0 = base + delta_c * eta.
    """

    n: int = 100
    eta: float = 1.0
    delta: float = 0.0
    placement: str | None = "antinode"
    phi0: float | None = None
    delta_c: float = 0.0
    fringe_count: int = 20
    t_max: float = 10.0
    steps_per_delay: int = 2000
    method: str = "heun"
    record_every: int = 1
    omega_window: float | None = None
    omega_points: int = 4001
    x_min: float | None = None
    x_max: float | None = None
    x_points: int = 1000
    t_points: int = 1000
    per_side: int = 3
    sweep_axis: str = "eta"
    sweep_start: float = 1e-4
    sweep_stop: float = 2.0
    sweep_points: int = 50
    jobs: int | None = None
    out: str = "out"
    format: str = "csv"

    def params(self) -> SystemParams:
        base = SystemParams(n_atoms=self.n, eta=self.eta, delta=self.delta,
                            phi0=self.phi0 if self.phi0 is not None else math.pi / 2,
                            delta_c=self.delta_c, fringe_count=self.fringe_count)
        if self.placement is not None:
            return make_placement(self.placement, base)
        return validate(base)


CONFIG_KEYS = tuple(f.name for f in dataclasses.fields(RunConfig))


def validate_config(cfg: RunConfig) -> RunConfig:
    if cfg.placement is not None and cfg.placement not in PLACEMENT_PHASE:
        raise ValidationError(f"placement must be 'node' or 'antinode', got {cfg.placement!r}")
    if cfg.placement is None and cfg.phi0 is None:
        raise ValidationError("give either a placement or phi0")
    if cfg.format not in ("csv", "bin"):
        raise ValidationError(f"format must be 'csv' or 'bin', got {cfg.format!r}")
    if cfg.sweep_axis not in ("eta", "delta", "delta_c"):
        raise ValidationError(f"sweep axis must be eta, delta or delta_c, got {cfg.sweep_axis!r}")
    for name in ("omega_points", "x_points", "t_points", "sweep_points", "steps_per_delay",
                 "record_every"):
        if getattr(cfg, name) < 1:
            raise ValidationError(f"{name} must be positive")
    if cfg.per_side < 0:
        raise ValidationError("per_side must be >= 0")
    if not (cfg.t_max > 0 and math.isfinite(cfg.t_max)):
        raise ValidationError("t_max must be positive and finite")
    cfg.params()
    return cfg


def config_from_dict(data: dict, overrides: dict | None = None) -> RunConfig:
    """Build a config from file values, then apply non-None ``overrides``."""
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise UnknownKey(f"unknown config key(s): {', '.join(unknown)}")
    merged = dict(data)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    try:
        cfg = RunConfig(**merged)
    except TypeError as exc:
        raise ValidationError(str(exc)) from None
    return validate_config(cfg)


def load_config(path, overrides: dict | None = None) -> RunConfig:
    """Read a JSON config; flags in ``overrides`` win over file values."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    return config_from_dict(data, overrides)


def write_manifest(path, cfg: RunConfig, outputs=(), extra: dict | None = None) -> Path:
    doc = {"config": dataclasses.asdict(cfg), "params": dataclasses.asdict(cfg.params()),
           "outputs": [str(o) for o in outputs]}
    if extra:
        doc.update(extra)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def config_from_manifest(path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    return config_from_dict(doc["config"])
