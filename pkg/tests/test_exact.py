import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from su2lgt import golden
from su2lgt.exact import (
    diagonalize,
    evolve_exact,
    evolve_trotter_matrix,
    expectation_value,
    vacuum_state,
)
from su2lgt.lattice import LatticeSpec, physical_indices, physical_projector
from su2lgt.operators import (
    OperatorMatrix,
    build_full_hamiltonian,
    electric_observable_plaquette1,
    hamiltonian_parts,
)

G2 = golden.G_SQUARED

# mitigated N_Trot = 1 hardware values and uncertainties for the first plaquette
HARDWARE_N1 = (0.009, 0.052, 0.127, 0.201, 0.261, 0.282, 0.278, 0.254)
HARDWARE_N1_ERR = (0.009, 0.006, 0.007, 0.012, 0.010, 0.007, 0.008, 0.006)


@pytest.fixture(scope="module")
def system():
    spec = LatticeSpec(2)
    return spec, build_full_hamiltonian(spec, G2), electric_observable_plaquette1(spec, G2), hamiltonian_parts(spec, G2)


def test_spectrum_golden(system):
    _, H, _, _ = system
    res = diagonalize(H)
    assert res.energy_density_per_plaquette == pytest.approx(golden.ENERGY_DENSITY, abs=5e-4)
    assert res.gap == pytest.approx(golden.GAP, abs=5e-4)
    for k, v in golden.GROUND_STATE_AMPLITUDES.items():
        assert abs(res.ground_state[k]) == pytest.approx(v, abs=1e-3)
    assert res.ground_state[0] > 0


def test_physical_block_spectrum(system):
    spec, H, _, _ = system
    phys = physical_indices(spec)
    res = diagonalize(H)
    block = np.linalg.eigvalsh(H.matrix[np.ix_(phys, phys)])
    assert np.allclose(res.physical_eigenvalues, block, atol=1e-12)
    # every physical eigenvalue also appears in the full spectrum
    for e in block:
        assert np.min(np.abs(res.eigenvalues - e)) < 1e-10


def test_reconstruction(system):
    _, H, _, _ = system
    w, v = np.linalg.eigh(H.matrix)
    assert np.max(np.abs(H.matrix - (v * w) @ v.T)) < 1e-10


def test_strong_coupling_limit():
    res = diagonalize(build_full_hamiltonian(LatticeSpec(2), 1e3))
    assert abs(res.ground_state[0]) > 0.999
    assert abs(res.energy_density_per_plaquette) < 1e-2


def test_rejects_non_hermitian():
    with pytest.raises(ValueError):
        diagonalize(OperatorMatrix(np.array([[0.0, 1.0], [0.0, 0.0]])))


def test_exact_curve_golden(system):
    _, H, E, _ = system
    psi0 = vacuum_state(16)
    for t, ref in zip(golden.TIME_GRID, golden.EXACT_CURVE):
        # scipy's Pade exponential is the independent route
        via_expm = expectation_value(E, expm(-1j * H.matrix * t) @ psi0)
        assert expectation_value(E, evolve_exact(H, psi0, t)) == pytest.approx(via_expm, abs=1e-12)
        assert via_expm == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_trotter_curves_golden(system, n):
    _, _, E, parts = system
    psi0 = vacuum_state(16)
    for t, ref in zip(golden.TIME_GRID, golden.TROTTER_CURVES[n]):
        step = np.eye(16, dtype=complex)
        for h in parts:
            step = expm(-1j * h.matrix * t / n) @ step
        via_expm = expectation_value(E, np.linalg.matrix_power(step, n) @ psi0)
        assert expectation_value(E, evolve_trotter_matrix(parts, psi0, t, n)) == pytest.approx(via_expm, abs=1e-12)
        assert via_expm == pytest.approx(ref, abs=1e-9)


def test_single_step_curve_within_hardware_errors(system):
    got = golden.TROTTER_CURVES[1]
    for v, hw, err in zip(got, HARDWARE_N1, HARDWARE_N1_ERR):
        assert abs(v - hw) <= 2 * err


def test_t_zero_identity(system):
    _, H, _, parts = system
    psi0 = vacuum_state(16)
    assert np.allclose(evolve_exact(H, psi0, 0.0), psi0)
    assert np.allclose(evolve_trotter_matrix(parts, psi0, 0.0, 3), psi0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 5), st.integers(0, 15))
def test_energy_and_norm_conserved(t, k):
    spec = LatticeSpec(2)
    H = build_full_hamiltonian(spec, G2)
    psi0 = np.zeros(16, dtype=complex)
    psi0[k] = 1.0
    psi = evolve_exact(H, psi0, t)
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)
    assert expectation_value(H, psi) == pytest.approx(expectation_value(H, psi0), abs=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 2), st.integers(1, 6))
def test_physical_subspace_preserved(t, n):
    spec = LatticeSpec(2)
    P = physical_projector(spec).matrix
    parts = hamiltonian_parts(spec, G2)
    H = build_full_hamiltonian(spec, G2)
    psi0 = vacuum_state(16)
    for psi in (evolve_exact(H, psi0, t), evolve_trotter_matrix(parts, psi0, t, n)):
        assert np.real(np.vdot(psi, P @ psi)) == pytest.approx(1.0, abs=1e-12)


def test_trotter_error_scales_inversely(system):
    _, H, _, parts = system
    psi0 = vacuum_state(16)
    exact = evolve_exact(H, psi0, 0.37)
    ns = np.array([4, 8, 16, 32, 64])
    errs = np.array([np.linalg.norm(evolve_trotter_matrix(parts, psi0, 0.37, n) - exact) for n in ns])
    slope = -np.polyfit(np.log(ns), np.log(errs), 1)[0]
    assert 0.95 < slope < 1.05


def test_trotter_part_mismatch_warns(system):
    _, H, _, parts = system
    with pytest.warns(RuntimeWarning):
        evolve_trotter_matrix(parts[:1], vacuum_state(16), 0.1, 1, H_total=H)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        evolve_trotter_matrix(parts, vacuum_state(16), 0.1, 1, H_total=H)


def test_trotter_rejects_zero_steps(system):
    with pytest.raises(ValueError):
        evolve_trotter_matrix(system[3], vacuum_state(16), 0.1, 0)
