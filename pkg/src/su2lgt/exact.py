"""Dense reference dynamics: spectra, exact and Trotterized evolution."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from .lattice import physical_indices
from .operators import OperatorMatrix

__all__ = [
    "SpectrumResult",
    "diagonalize",
    "evolve_exact",
    "evolve_trotter_matrix",
    "expectation_value",
    "vacuum_state",
]


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    physical_eigenvalues: np.ndarray
    ground_state: np.ndarray
    energy_density_per_plaquette: float
    gap: float

    @property
    def ground_energy(self) -> float:
        return float(self.physical_eigenvalues[0])


def _as_matrix(H) -> np.ndarray:
    return H.matrix if isinstance(H, OperatorMatrix) else np.asarray(H)


def diagonalize(H: OperatorMatrix, tol: float = 1e-12) -> SpectrumResult:
    """Full spectrum plus ground state and gap of the physical sector.

    The ground state is the lowest eigenvector of ``H`` restricted to the
    gauge-invariant states, embedded back in the full basis with a positive
    largest-magnitude amplitude.
    """
    m = _as_matrix(H)
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol:
        raise ValueError("Hamiltonian is not hermitian")
    evals = linalg.eigvalsh(m)
    spec = getattr(H, "spec", None)
    if spec is None:
        phys = np.arange(m.shape[0])
        n_plaq = 1
    else:
        phys = physical_indices(spec)
        n_plaq = spec.num_plaquettes
    block = m[np.ix_(phys, phys)]
    pvals, pvecs = linalg.eigh(block)
    gs = np.zeros(m.shape[0], dtype=pvecs.dtype)
    gs[phys] = pvecs[:, 0]
    k = np.argmax(np.abs(gs))
    gs = gs * (np.abs(gs[k]) / gs[k])
    gap = float(pvals[1] - pvals[0]) if len(pvals) > 1 else float("nan")
    return SpectrumResult(
        eigenvalues=evals,
        physical_eigenvalues=pvals,
        ground_state=gs,
        energy_density_per_plaquette=float(pvals[0] / n_plaq),
        gap=gap,
    )


def _spectral_propagator(m: np.ndarray, t: float) -> np.ndarray:
    w, v = linalg.eigh(m)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def evolve_exact(H, initial, t: float) -> np.ndarray:
    """``exp(-iHt) initial`` by spectral reconstruction."""
    m = _as_matrix(H)
    w, v = linalg.eigh(m)
    psi = np.asarray(initial, dtype=complex)
    return v @ (np.exp(-1j * w * t) * (v.conj().T @ psi))


def evolve_trotter_matrix(
    H_parts: Sequence, initial, t: float, n_steps: int, H_total=None
) -> np.ndarray:
    """First-order product formula ``[prod_k exp(-i H_k t/n)]^n initial``.

    Parts are applied in the given order (the first part acts first).
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    mats = [_as_matrix(h) for h in H_parts]
    if H_total is not None:
        if np.max(np.abs(sum(mats) - _as_matrix(H_total))) > 1e-12:
            warnings.warn("Trotter parts do not sum to the Hamiltonian", RuntimeWarning)
    dt = t / n_steps
    step = np.eye(mats[0].shape[0], dtype=complex)
    for m in mats:
        step = _spectral_propagator(m, dt) @ step
    psi = np.asarray(initial, dtype=complex)
    for _ in range(n_steps):
        psi = step @ psi
    return psi


def expectation_value(op, psi) -> float:
    m = _as_matrix(op)
    return float(np.real(np.vdot(psi, m @ psi)))


def vacuum_state(dimension: int) -> np.ndarray:
    psi = np.zeros(dimension, dtype=complex)
    psi[0] = 1.0
    return psi
