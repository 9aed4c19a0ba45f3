"""
Plaquette circuits and Trotter steps
====================================

The controlled XXX rotations, their CNOT cost, and a comparison of the
Trotterized electric energy against exact evolution.
"""

import numpy as np
from scipy.linalg import expm

from su2lgt import LatticeSpec
from su2lgt.circuit import build_plaquette_circuit_2p, build_trotter_circuit, insert_cnot_pairs
from su2lgt.exact import evolve_exact, expectation_value, vacuum_state
from su2lgt.operators import (
    build_full_hamiltonian,
    build_plaquette_operator,
    electric_observable_plaquette1,
    plaquette_beta,
)

spec = LatticeSpec(2)
beta = plaquette_beta(spec, 1)
print("rotation coefficients:", beta)

# 6 CNOTs implement exp(-i box t) exactly
circ = build_plaquette_circuit_2p(beta, 0.8)
box = build_plaquette_operator(spec, 1).matrix
print("unitary error:", np.abs(circ.unitary() - expm(-0.8j * box)).max())
print(circ.to_text())

# folding adds a CNOT pair next to one gate of every mirrored pair
step = build_trotter_circuit(spec, 0.2, 0.37, 1)
print("CNOTs r=1:", step.count("CNOT"), " r=2:", insert_cnot_pairs(step, 2, rng_seed=0).count("CNOT"))

H = build_full_hamiltonian(spec, 0.2)
E = electric_observable_plaquette1(spec, 0.2)
psi0 = vacuum_state(16)
print("   t    exact   N=1     N=2     N=3")
for t in np.arange(0.02, 0.4, 0.05):
    row = [expectation_value(E, evolve_exact(H, psi0, t))]
    for n in (1, 2, 3):
        row.append(expectation_value(E, build_trotter_circuit(spec, 0.2, t, n).unitary()[:, 0]))
    print(f"{t:5.2f} " + " ".join(f"{v:.4f}" for v in row))
