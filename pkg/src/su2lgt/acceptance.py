"""Acceptance criteria, shared by the test suite and ``su2lgt verify``."""

from __future__ import annotations

import itertools
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.linalg import expm

from . import golden
from .angular import HalfInt, _cached_6j, triangle_ok
from .circuit import build_plaquette_circuit_2p, build_plaquette_circuit_5q, build_trotter_circuit, insert_cnot_pairs
from .config import DEFAULT_CONFIG, ExperimentConfig
from .exact import diagonalize, evolve_exact, evolve_trotter_matrix, vacuum_state
from .lattice import LatticeSpec, physical_indices, physical_projector
from .links import local_plaquette_element, patch_configurations
from .mitigation import build_calibration, mitigate, post_select
from .operators import (
    REDUCED_SECTOR_MATRIX,
    SECTOR_MATRIX,
    build_full_hamiltonian,
    electric_observable_plaquette1,
    gvc_pauli_decomposition,
    hamiltonian_parts,
    pauli_terms_to_matrix,
    plaquette_beta,
    plaquette_matrix_element,
    sector_values,
)
from .simulator import NoiseModel, basis_state, expectation, run_noiseless, run_noisy

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_all", "format_result"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float


def _two_plaquettes() -> LatticeSpec:
    return LatticeSpec(2)


def criterion_1():
    """Plaquette table from the 6-j formula; every other physical pair vanishes."""
    _cached_6j.cache_clear()
    t0 = time.perf_counter()
    expected = {}
    for f, i, v in golden.PLAQUETTE_TABLE:
        expected[(f, i)] = float(v)
        expected[(i, f)] = float(v)
    states = [
        s for s in itertools.product((0, 1), repeat=5)
        if triangle_ok(HalfInt(s[0]), HalfInt(s[2]), HalfInt(s[1])) and triangle_ok(HalfInt(s[2]), HalfInt(s[4]), HalfInt(s[3]))
    ]
    worst = 0.0
    nonzero = 0
    for f, i in itertools.product(states, repeat=2):
        if f[0] != i[0] or f[4] != i[4]:
            val = 0.0
        else:
            h = HalfInt
            val = plaquette_matrix_element(
                h(i[0]), h(i[0]), h(i[4]), h(i[4]), h(i[2]), h(f[2]), h(i[2]), h(f[2]), h(i[1]), h(f[1]), h(i[3]), h(f[3])
            )
        nonzero += val != 0.0
        worst = max(worst, abs(val - expected.get((f, i), 0.0)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and nonzero == 8 and elapsed < 1.0
    return ok, f"max deviation {worst:.2e}, {nonzero} nonzero of {len(states) ** 2} pairs, {elapsed:.3f} s"


def criterion_2():
    """Link-operator composition equals the 6-j formula, truncations 1/2 and 1."""
    t0 = time.perf_counter()
    worst, pairs = 0.0, 0
    for lam in (HalfInt(1), HalfInt(2)):
        by_outer: dict = {}
        for c in patch_configurations(lam):
            by_outer.setdefault(c[:4], []).append(c)
        for group in by_outer.values():
            for f, i in itertools.product(group, repeat=2):
                if any(abs(a - b) != 1 for a, b in zip(f[4:], i[4:])):
                    continue
                h = HalfInt
                ref = plaquette_matrix_element(*(h(x) for x in (
                    i[0], i[1], i[2], i[3], i[4], f[4], i[5], f[5], i[6], f[6], i[7], f[7]
                )))
                worst = max(worst, abs(local_plaquette_element(f, i) - ref))
                pairs += 1
    elapsed = time.perf_counter() - t0
    return worst <= 1e-10 and elapsed < 60.0, f"{pairs} pairs, max deviation {worst:.2e}, {elapsed:.1f} s"


def criterion_3():
    """Assembled Hamiltonian equals the reference 16x16 matrix."""
    spec = _two_plaquettes()
    devs = []
    for g2 in (golden.G_SQUARED, 1.0):
        devs.append(float(np.max(np.abs(build_full_hamiltonian(spec, g2).matrix - golden.reference_hamiltonian(g2)))))
    return max(devs) <= 1e-12, f"max deviation g2=0.2: {devs[0]:.1e}, g2=1: {devs[1]:.1e}"


def criterion_4():
    """Ground-state energy density, physical gap and amplitudes at g2 = 0.2."""
    res = diagonalize(build_full_hamiltonian(_two_plaquettes(), golden.G_SQUARED))
    amps = {k: abs(res.ground_state[k]) for k in golden.GROUND_STATE_AMPLITUDES}
    ok = (
        abs(res.energy_density_per_plaquette - golden.ENERGY_DENSITY) <= 5e-4
        and abs(res.gap - golden.GAP) <= 5e-4
        and all(abs(amps[k] - v) <= 1e-3 for k, v in golden.GROUND_STATE_AMPLITUDES.items())
    )
    amp_txt = ", ".join(f"{amps[k]:.4f}" for k in (0, 10, 7))
    return ok, f"density {res.energy_density_per_plaquette:.5f}, gap {res.gap:.5f}, amplitudes ({amp_txt})"


def criterion_5():
    """Plaquette circuits reproduce their generators; beta round trips."""
    rng = np.random.default_rng(5)
    s4, s2 = LatticeSpec(4), _two_plaquettes()
    beta, beta_t = plaquette_beta(s4, 1), plaquette_beta(s2, 1)
    op5 = pauli_terms_to_matrix(gvc_pauli_decomposition(s4, 1, local=True), 5)
    op4 = pauli_terms_to_matrix(gvc_pauli_decomposition(s2, 1, local=True), 4)
    worst = 0.0
    for t in rng.uniform(0.0, np.pi, 20):
        worst = max(worst, np.max(np.abs(build_plaquette_circuit_5q(beta, t).unitary() - expm(-1j * op5 * t))))
        worst = max(worst, np.max(np.abs(build_plaquette_circuit_2p(beta_t, t).unitary() - expm(-1j * op4 * t))))
    v4 = sector_values(s4, 1)
    v = np.array([v4[(0, 0)], v4[(0, 1)], v4[(1, 0)], v4[(1, 1)]])
    v2 = sector_values(s2, 1)
    round_trip = max(
        np.max(np.abs(SECTOR_MATRIX @ beta - v)),
        np.max(np.abs(REDUCED_SECTOR_MATRIX @ beta_t - [v2[(0, 0)], v2[(1, 1)]])),
    )
    beta_ok = np.allclose(beta, [3 / 16, 1 / 16, 3 / 16, 9 / 16], atol=1e-14) and np.allclose(beta_t, [3 / 8, 5 / 8], atol=1e-14)
    ok = worst <= 1e-10 and round_trip <= 1e-14 and beta_ok
    return ok, f"unitary deviation {worst:.1e}, beta {np.round(beta, 6).tolist()}, beta~ {np.round(beta_t, 6).tolist()}"


def criterion_6():
    """First-order Trotter error falls as 1/n at t = 0.37."""
    spec = _two_plaquettes()
    H = build_full_hamiltonian(spec, golden.G_SQUARED)
    parts = hamiltonian_parts(spec, golden.G_SQUARED)
    psi0 = vacuum_state(16)
    exact = evolve_exact(H, psi0, 0.37)
    ns = np.arange(1, 65)
    errs = np.array([np.linalg.norm(evolve_trotter_matrix(parts, psi0, 0.37, int(n)) - exact) for n in ns])
    slope = np.polyfit(np.log(ns), np.log(errs), 1)[0]
    return 0.9 <= -slope <= 1.1, f"fitted exponent {-slope:.4f}"


def criterion_7():
    """Noiseless Trotter circuits stay physical; [H, P] = 0."""
    spec = _two_plaquettes()
    phys = physical_indices(spec)
    worst = 0.0
    for n in (1, 2, 3):
        for t in golden.TIME_GRID:
            psi = run_noiseless(build_trotter_circuit(spec, golden.G_SQUARED, t, n), basis_state(4))
            worst = max(worst, 1.0 - float(psi.probabilities()[phys].sum()))
    comm = build_full_hamiltonian(spec, golden.G_SQUARED).commutator_norm(physical_projector(spec))
    return worst <= 1e-10 and comm <= 1e-12, f"max survival loss {worst:.1e}, ||[H,P]|| {comm:.1e}"


def criterion_8():
    """Calibrate, extrapolate and post-select halve the electric-energy error."""
    t0 = time.perf_counter()
    spec = _two_plaquettes()
    E = electric_observable_plaquette1(spec, golden.G_SQUARED)
    w, phys = E.diagonal(), physical_indices(spec)
    ratios = []
    for k_eps, eps in enumerate((0.01, 0.03)):
        noise = NoiseModel.symmetric(eps, 0.02)
        cal = build_calibration(noise, 8192, [8, k_eps])
        raw_err, mit_err = [], []
        for k, t in enumerate(golden.TIME_GRID):
            circ = build_trotter_circuit(spec, golden.G_SQUARED, t, 1)
            truth = expectation(run_noiseless(circ, basis_state(4)), E)[0]
            counts = {
                r: run_noisy(insert_cnot_pairs(circ, r, [k_eps, k]), basis_state(4), noise, 8192, [k_eps, k, r])
                for r in (1, 2)
            }
            rec = mitigate(counts, cal, phys, w, t, 1, n_bootstrap=200, rng_seed=[k_eps, k])
            raw_err.append(abs(rec.values[("raw", 1)].electric_energy - truth))
            mit_err.append(abs(rec.mitigated_energy - truth))
        ratios.append(float(np.mean(mit_err) / np.mean(raw_err)))
    elapsed = time.perf_counter() - t0
    ok = all(r <= 0.5 for r in ratios) and elapsed < 300.0
    return ok, f"mitigated/raw error eps=0.01: {ratios[0]:.3f}, eps=0.03: {ratios[1]:.3f}, {elapsed:.1f} s"


def criterion_9():
    """Uniform distribution survives at 1/4; deep noisy circuits decay to it."""
    spec = _two_plaquettes()
    phys = physical_indices(spec)
    _, s_uniform = post_select(np.full(16, 1 / 16), phys)
    circ = build_trotter_circuit(spec, golden.G_SQUARED, 2.0, 20)
    counts = run_noisy(circ, basis_state(4), NoiseModel.symmetric(0.03, 0.02), 8192, 9)
    s_deep = float(counts.probabilities()[phys].sum())
    ok = s_uniform == 0.25 and abs(s_deep - 0.25) <= 0.03
    return ok, f"uniform survival {s_uniform!r}, deep-circuit survival {s_deep:.4f} ({circ.count('CNOT')} CNOTs)"


def criterion_10():
    """Two ``evolve`` runs with the same config and seed are byte identical."""
    from .experiments import run_evolution

    data = dict(DEFAULT_CONFIG)
    data.update({"time_grid": [0.02, 0.17, 0.37], "n_trot_values": [1], "shots": 2048, "bootstrap": 20, "seed": 10})
    cfg = ExperimentConfig.from_dict(data)
    with tempfile.TemporaryDirectory() as tmp:
        outs = []
        for k in range(2):
            d = Path(tmp) / f"run{k}"
            run_evolution(cfg, d)
            outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    same = outs[0] == outs[1]
    return same, f"{len(outs[0])} files compared, identical={same}"


CRITERIA: dict[int, tuple[str, Callable]] = {
    1: ("plaquette element table", criterion_1),
    2: ("oracle equivalence", criterion_2),
    3: ("reference Hamiltonian", criterion_3),
    4: ("spectrum", criterion_4),
    5: ("circuit fidelity", criterion_5),
    6: ("Trotter convergence", criterion_6),
    7: ("gauge invariance", criterion_7),
    8: ("mitigation efficacy", criterion_8),
    9: ("decorrelation floor", criterion_9),
    10: ("determinism", criterion_10),
}


def run_criterion(number: int) -> CriterionResult:
    title, fn = CRITERIA[number]
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CriterionResult(number, title, bool(ok), detail, time.perf_counter() - t0)


def run_all(numbers=None) -> list[CriterionResult]:
    return [run_criterion(n) for n in (numbers or sorted(CRITERIA))]


def format_result(res: CriterionResult) -> str:
    return f"{'PASS' if res.passed else 'FAIL'} [{res.number:2d}] {res.title}: {res.detail} ({res.seconds:.2f} s)"
