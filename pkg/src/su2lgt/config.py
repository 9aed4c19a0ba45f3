"""Declarative experiment configuration (YAML, schema version 1)."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .lattice import LatticeSpec
from .simulator import NoiseModel
from . import golden

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "DEFAULT_CONFIG"]

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


DEFAULT_CONFIG: dict[str, Any] = {
    "version": SCHEMA_VERSION,
    "lattice": {"num_plaquettes": 2, "truncation": "1/2", "periodic": True, "identify_top_bottom": True},
    "g_squared": golden.G_SQUARED,
    "time_grid": list(golden.TIME_GRID),
    "n_trot_values": [1, 2],
    "r_values": [1, 2],
    "noise": {"cnot_depolarizing": 0.02, "readout_flip": [0.02, 0.02], "method": "density"},
    "shots": 8192,
    "calibration_shots": 8192,
    "bootstrap": 200,
    "extrapolation": "probabilities",
    "seed": 20190828,
    "workers": 1,
    "spectrum": {"g_squared_sweep": []},
    "outputs": {"directory": "out", "format": "csv", "manifest": True},
}

_TOP_KEYS = set(DEFAULT_CONFIG)


@dataclass
class ExperimentConfig:
    lattice: LatticeSpec
    g_squared: float
    time_grid: list[float]
    n_trot_values: list[int]
    r_values: list[int]
    noise: NoiseModel
    shots: int
    calibration_shots: int
    bootstrap: int
    extrapolation: str
    seed: int
    workers: int = 1
    g_squared_sweep: list[float] = field(default_factory=list)
    output_directory: str = "out"
    output_format: str = "csv"
    manifest: bool = True

    def to_dict(self) -> dict:
        return {
            "version": SCHEMA_VERSION,
            "lattice": self.lattice.to_dict(),
            "g_squared": self.g_squared,
            "time_grid": list(self.time_grid),
            "n_trot_values": list(self.n_trot_values),
            "r_values": list(self.r_values),
            "noise": self.noise.to_dict(),
            "shots": self.shots,
            "calibration_shots": self.calibration_shots,
            "bootstrap": self.bootstrap,
            "extrapolation": self.extrapolation,
            "seed": self.seed,
            "workers": self.workers,
            "spectrum": {"g_squared_sweep": list(self.g_squared_sweep)},
            "outputs": {"directory": self.output_directory, "format": self.output_format, "manifest": self.manifest},
        }

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    @classmethod
    def from_dict(cls, data: dict, marks: dict | None = None) -> "ExperimentConfig":
        return _build(data, marks or {})

    @classmethod
    def from_yaml(cls, text: str, source: str = "<config>") -> "ExperimentConfig":
        try:
            node = yaml.compose(text)
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{source}: {exc}") from exc
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError(f"{source}: line 1: top level must be a mapping")
        marks = {}
        if node is not None:
            _collect_marks(node, (), marks)
        try:
            return _build(data, marks)
        except ConfigError as exc:
            raise ConfigError(f"{source}: {exc}") from None


def _collect_marks(node, path, marks):
    marks[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            _collect_marks(v, path + (k.value,), marks)
            marks.setdefault(path + (k.value, "__key__"), k.start_mark.line + 1)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _collect_marks(v, path + (i,), marks)


def _err(marks, path, msg):
    line = None
    for k in range(len(path), -1, -1):
        if path[:k] in marks:
            line = marks[path[:k]]
            break
    where = f"line {line}: " if line is not None else ""
    name = ".".join(str(k) for k in path if k != "__key__") or "<root>"
    return ConfigError(f"{where}{name}: {msg}")


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _number(data, marks, path, kind=float, lo=None, hi=None):
    v = data
    for k in path:
        v = v[k]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise _err(marks, path, f"expected a number, got {v!r}")
    if kind is int and int(v) != v:
        raise _err(marks, path, f"expected an integer, got {v!r}")
    v = kind(v)
    if lo is not None and v < lo:
        raise _err(marks, path, f"must be >= {lo}")
    if hi is not None and v > hi:
        raise _err(marks, path, f"must be <= {hi}")
    return v


def _time_grid(raw, marks):
    path = ("time_grid",)
    if isinstance(raw, dict):
        try:
            start, stop, step = float(raw["start"]), float(raw["stop"]), float(raw["step"])
        except (KeyError, TypeError, ValueError):
            raise _err(marks, path, "grid mapping needs numeric start, stop and step") from None
        if step <= 0:
            raise _err(marks, path + ("step",), "step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + k * step, 12) for k in range(n)]
    if not isinstance(raw, list) or not raw:
        raise _err(marks, path, "expected a non-empty list or a start/stop/step mapping")
    out = []
    for i, t in enumerate(raw):
        if isinstance(t, bool) or not isinstance(t, (int, float)):
            raise _err(marks, path + (i,), f"expected a number, got {t!r}")
        out.append(float(t))
    return out


def _int_list(data, marks, key, allowed=None, lo=None):
    raw = data[key]
    if not isinstance(raw, list) or not raw:
        raise _err(marks, (key,), "expected a non-empty list")
    out = []
    for i, v in enumerate(raw):
        if isinstance(v, bool) or not isinstance(v, int):
            raise _err(marks, (key, i), f"expected an integer, got {v!r}")
        if allowed is not None and v not in allowed:
            raise _err(marks, (key, i), f"must be one of {sorted(allowed)}")
        if lo is not None and v < lo:
            raise _err(marks, (key, i), f"must be >= {lo}")
        out.append(v)
    return out


def _build(user: dict, marks: dict) -> ExperimentConfig:
    unknown = set(user) - _TOP_KEYS
    if unknown:
        k = sorted(unknown)[0]
        raise _err(marks, (k, "__key__"), "unknown key")
    version = user.get("version", None)
    if version is None:
        raise _err(marks, (), "missing 'version'")
    if version != SCHEMA_VERSION:
        raise _err(marks, ("version",), f"unsupported schema version {version!r}")
    data = _merge(DEFAULT_CONFIG, user)
    for section in ("lattice", "noise", "outputs", "spectrum"):
        if not isinstance(data[section], dict):
            raise _err(marks, (section,), "expected a mapping")
    try:
        lattice = LatticeSpec.from_dict(data["lattice"])
    except (ValueError, TypeError, KeyError) as exc:
        raise _err(marks, ("lattice",), str(exc)) from None
    nz = data["noise"]
    known_noise = {"cnot_depolarizing", "readout_flip", "readout_matrix", "method", "trajectories"}
    if set(nz) - known_noise:
        k = sorted(set(nz) - known_noise)[0]
        raise _err(marks, ("noise", k, "__key__"), "unknown key")
    eps = _number(data, marks, ("noise", "cnot_depolarizing"), float, 0.0, 1.0)
    try:
        noise = NoiseModel(
            cnot_depolarizing=eps,
            readout_flip=nz.get("readout_flip"),
            readout_matrix=nz.get("readout_matrix"),
            method=nz.get("method", "density"),
            trajectories=int(nz.get("trajectories", 256)),
        )
    except (ValueError, TypeError) as exc:
        raise _err(marks, ("noise",), str(exc)) from None
    if "seed" not in data or data["seed"] is None:
        raise _err(marks, ("seed",), "a seed is required")
    extrap = data["extrapolation"]
    if extrap not in ("probabilities", "observable"):
        raise _err(marks, ("extrapolation",), "must be 'probabilities' or 'observable'")
    fmt = data["outputs"].get("format", "csv")
    if fmt not in ("csv", "tsv"):
        raise _err(marks, ("outputs", "format"), "must be 'csv' or 'tsv'")
    sweep = data["spectrum"].get("g_squared_sweep") or []
    if not isinstance(sweep, list):
        raise _err(marks, ("spectrum", "g_squared_sweep"), "expected a list")
    for i, g in enumerate(sweep):
        if isinstance(g, bool) or not isinstance(g, (int, float)) or g <= 0:
            raise _err(marks, ("spectrum", "g_squared_sweep", i), "expected a positive number")
    r_values = _int_list(data, marks, "r_values", allowed={1, 2})
    if 1 not in r_values:
        raise _err(marks, ("r_values",), "r = 1 is required")
    return ExperimentConfig(
        lattice=lattice,
        g_squared=_number(data, marks, ("g_squared",), float, 1e-12),
        time_grid=_time_grid(data["time_grid"], marks),
        n_trot_values=_int_list(data, marks, "n_trot_values", lo=1),
        r_values=sorted(set(r_values)),
        noise=noise,
        shots=_number(data, marks, ("shots",), int, 1),
        calibration_shots=_number(data, marks, ("calibration_shots",), int, 1),
        bootstrap=_number(data, marks, ("bootstrap",), int, 0),
        extrapolation=extrap,
        seed=_number(data, marks, ("seed",), int, 0),
        workers=_number(data, marks, ("workers",), int, 1),
        g_squared_sweep=[float(g) for g in sweep],
        output_directory=str(data["outputs"].get("directory", "out")),
        output_format=fmt,
        manifest=bool(data["outputs"].get("manifest", True)),
    )


def load_config(path: str | Path | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig.from_dict(DEFAULT_CONFIG)
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"{p}: {exc.strerror}") from None
    return ExperimentConfig.from_yaml(text, source=str(p))
