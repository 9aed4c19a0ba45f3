"""SU(2) plaquette strings on qubit registers.

Exact angular-momentum algebra, plaquette and electric operators for
arbitrary link truncation, circuits for truncation 1/2, noisy simulation
and error mitigation.
"""

__version__ = "0.1.0"

from .angular import HalfInt, clebsch_gordan, dim, half, triangle_ok, wigner_6j
from .lattice import LatticeSpec, enumerate_basis, is_physical, physical_indices, physical_projector
from .operators import (
    OperatorMatrix,
    PauliTerm,
    build_electric_hamiltonian,
    build_full_hamiltonian,
    build_plaquette_operator,
    electric_observable_plaquette1,
    gvc_pauli_decomposition,
    plaquette_matrix_element,
    solve_beta,
)

__all__ = [
    "HalfInt",
    "half",
    "dim",
    "triangle_ok",
    "clebsch_gordan",
    "wigner_6j",
    "LatticeSpec",
    "enumerate_basis",
    "is_physical",
    "physical_indices",
    "physical_projector",
    "OperatorMatrix",
    "PauliTerm",
    "plaquette_matrix_element",
    "build_plaquette_operator",
    "gvc_pauli_decomposition",
    "solve_beta",
    "build_electric_hamiltonian",
    "build_full_hamiltonian",
    "electric_observable_plaquette1",
]
