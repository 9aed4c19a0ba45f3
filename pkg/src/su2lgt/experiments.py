"""Experiment runners behind the command-line interface."""

from __future__ import annotations

import hashlib
import json
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, golden
from .circuit import build_trotter_circuit, insert_cnot_pairs
from .config import ExperimentConfig
from .exact import diagonalize, evolve_exact, evolve_trotter_matrix, expectation_value, vacuum_state
from .lattice import physical_indices
from .mitigation import build_calibration, mitigate, rows_to_text, _fmt
from .operators import build_full_hamiltonian, electric_observable_plaquette1, hamiltonian_parts
from .simulator import basis_state, expectation, run_noiseless, run_noisy

__all__ = ["SpectrumReport", "run_spectrum", "run_evolution", "run_calibration", "write_table"]

_CALIBRATION_STREAM = 2**31 - 1


def _delimiter(fmt: str) -> str:
    return "\t" if fmt == "tsv" else ","


def write_table(path: Path, header, rows, fmt: str) -> None:
    d = _delimiter(fmt)
    lines = [d.join(header)]
    lines += [d.join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out: Path, cfg: ExperimentConfig, command: str, files, extra=None):
    manifest = {
        "command": command,
        "package_version": __version__,
        "numpy_version": np.__version__,
        "python_version": platform.python_version(),
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "files": {f.name: _sha256(f) for f in files},
    }
    if extra:
        manifest.update(extra)
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


@dataclass
class SpectrumReport:
    energy_density: float
    gap: float
    amplitudes: dict[int, float]
    checks: dict[str, bool]
    sweep: list[tuple[float, float, float]]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def lines(self) -> list[str]:
        out = [
            f"energy density per plaquette {self.energy_density:.6f}",
            f"gap {self.gap:.6f}",
        ]
        out += [f"amplitude[{k}] {v:.6f}" for k, v in sorted(self.amplitudes.items())]
        out += [f"{'PASS' if ok else 'FAIL'} {name}" for name, ok in self.checks.items()]
        return out


def _is_reference_setup(cfg: ExperimentConfig) -> bool:
    lat = cfg.lattice
    return (
        lat.num_plaquettes == 2
        and lat.truncation.twice_value == 1
        and lat.identify_top_bottom
        and abs(cfg.g_squared - golden.G_SQUARED) < 1e-15
    )


def run_spectrum(cfg: ExperimentConfig, out: Path | None = None) -> SpectrumReport:
    """Exact diagonalization; golden checks apply to the reference setup."""
    H = build_full_hamiltonian(cfg.lattice, cfg.g_squared)
    res = diagonalize(H)
    amps = {int(k): float(abs(res.ground_state[k])) for k in physical_indices(cfg.lattice)}
    checks = {}
    if _is_reference_setup(cfg):
        checks["energy density"] = abs(res.energy_density_per_plaquette - golden.ENERGY_DENSITY) <= 5e-4
        checks["gap"] = abs(res.gap - golden.GAP) <= 5e-4
        checks["ground-state amplitudes"] = all(
            abs(amps[k] - v) <= 1e-3 for k, v in golden.GROUND_STATE_AMPLITUDES.items()
        )
    sweep = []
    for g2 in cfg.g_squared_sweep:
        r = diagonalize(build_full_hamiltonian(cfg.lattice, g2))
        sweep.append((g2, r.energy_density_per_plaquette, r.gap))
    report = SpectrumReport(res.energy_density_per_plaquette, res.gap, amps, checks, sweep)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        ext = cfg.output_format
        files = [out / f"spectrum.{ext}", out / f"ground_state.{ext}"]
        rows = [("energy_density", res.energy_density_per_plaquette), ("gap", res.gap)]
        rows += [(f"eigenvalue_{k}", e) for k, e in enumerate(res.eigenvalues)]
        write_table(files[0], ("quantity", "value"), rows, ext)
        write_table(files[1], ("index", "amplitude"), sorted(amps.items()), ext)
        if sweep:
            files.append(out / f"sweep.{ext}")
            write_table(files[-1], ("g_squared", "energy_density", "gap"), sweep, ext)
        if cfg.manifest:
            _write_manifest(out, cfg, "spectrum", files, {"checks": checks})
    return report


def _cell_seeds(seed: int, index: int) -> list[int]:
    ss = np.random.SeedSequence([seed, index])
    return [int(s.generate_state(1)[0]) for s in ss.spawn(4)]


def _evolve_cell(args):
    cfg, cal, index, t, n_trot = args
    spec = cfg.lattice
    E = electric_observable_plaquette1(spec, cfg.g_squared)
    weights = E.diagonal()
    phys = physical_indices(spec)
    fold_seed, count_seed, boot_seed, _ = _cell_seeds(cfg.seed, index)
    try:
        circ = build_trotter_circuit(spec, cfg.g_squared, t, n_trot)
        psi0 = basis_state(circ.width)
        noiseless, _ = expectation(run_noiseless(circ, psi0), E)
        counts = {}
        for r in cfg.r_values:
            scaled = insert_cnot_pairs(circ, r, [fold_seed, r])
            counts[r] = run_noisy(scaled, psi0, cfg.noise, cfg.shots, [count_seed, r])
        rec = mitigate(
            counts, cal, phys, weights, t=t, n_trot=n_trot,
            n_bootstrap=cfg.bootstrap, rng_seed=boot_seed, mode=cfg.extrapolation,
        )
        return rec.rows(noiseless=noiseless), None
    except Exception as exc:  # surfaced per cell, grid continues
        return [], f"t={t!r} n_trot={n_trot}: {type(exc).__name__}: {exc}"


def run_evolution(cfg: ExperimentConfig, out: Path) -> dict:
    """Noiseless, noisy and mitigated electric energy on the (t, N_Trot) grid."""
    out.mkdir(parents=True, exist_ok=True)
    spec = cfg.lattice
    fmt = cfg.output_format
    cal = build_calibration(cfg.noise, cfg.calibration_shots, [cfg.seed, _CALIBRATION_STREAM], spec.num_qubits)
    cells = [(n, t) for n in cfg.n_trot_values for t in cfg.time_grid]
    jobs = [(cfg, cal, k, t, n) for k, (n, t) in enumerate(cells)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_evolve_cell, jobs))
    else:
        results = [_evolve_cell(j) for j in jobs]
    rows, errors = [], []
    for cell_rows, err in results:
        rows += cell_rows
        if err:
            errors.append(err)

    table = out / f"evolution.{fmt}"
    table.write_text(rows_to_text(rows, _delimiter(fmt)))

    # reference curves: exact and matrix-product Trotter
    H = build_full_hamiltonian(spec, cfg.g_squared)
    E = electric_observable_plaquette1(spec, cfg.g_squared)
    parts = hamiltonian_parts(spec, cfg.g_squared)
    psi0 = vacuum_state(spec.dimension)
    curve_rows = []
    for t in cfg.time_grid:
        row = [t, expectation_value(E, evolve_exact(H, psi0, t))]
        row += [expectation_value(E, evolve_trotter_matrix(parts, psi0, t, n)) for n in cfg.n_trot_values]
        curve_rows.append(row)
    curves = out / f"curves.{fmt}"
    write_table(curves, ["t", "exact"] + [f"trotter_{n}" for n in cfg.n_trot_values], curve_rows, fmt)

    summary_rows = []
    for n in cfg.n_trot_values:
        sel = [r for r in rows if r["n_trot"] == n]
        raw = [abs(r["electric_energy"] - r["noiseless"]) for r in sel if r["stage"] == "raw" and r["r"] == 1]
        mit = [abs(r["electric_energy"] - r["noiseless"]) for r in sel if r["stage"] == "post_selected"]
        if raw and mit:
            summary_rows.append((n, float(np.mean(raw)), float(np.mean(mit)), float(np.mean(mit) / np.mean(raw))))
    summary = out / f"summary.{fmt}"
    write_table(summary, ("n_trot", "mean_abs_error_raw", "mean_abs_error_mitigated", "ratio"), summary_rows, fmt)

    files = [table, curves, summary]
    if errors:
        err_path = out / "errors.txt"
        err_path.write_text("\n".join(errors) + "\n")
        files.append(err_path)
    if cfg.manifest:
        _write_manifest(out, cfg, "evolve", files, {"errors": len(errors)})
    return {"rows": rows, "errors": errors, "summary": summary_rows, "files": files}


def run_calibration(cfg: ExperimentConfig, out: Path | None = None):
    """Sampled calibration matrix and its deviation from the model confusion."""
    width = cfg.lattice.num_qubits
    cal = build_calibration(cfg.noise, cfg.calibration_shots, [cfg.seed, _CALIBRATION_STREAM], width)
    deviation = float(np.max(np.abs(cal.matrix - cfg.noise.confusion_matrix(width))))
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        fmt = cfg.output_format
        path = out / f"calibration.{fmt}"
        header = ["observed"] + [format(j, f"0{width}b") for j in range(2**width)]
        rows = [[format(i, f"0{width}b")] + list(cal.matrix[i]) for i in range(2**width)]
        write_table(path, header, rows, fmt)
        if cfg.manifest:
            _write_manifest(out, cfg, "calibrate", [path], {"max_deviation": deviation})
    return cal, deviation
