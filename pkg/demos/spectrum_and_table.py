"""
Two plaquettes at truncation 1/2
================================

Builds the 16-state register Hamiltonian, checks a few plaquette matrix
elements and diagonalizes inside the gauge-invariant block.
"""

import numpy as np

from su2lgt import HalfInt, LatticeSpec
from su2lgt.exact import diagonalize
from su2lgt.lattice import physical_indices
from su2lgt.operators import build_full_hamiltonian, plaquette_matrix_element

h = HalfInt(1)

# an empty plaquette raised to all-1/2 active links
print("vacuum -> excited:", plaquette_matrix_element(0, 0, 0, 0, 0, h, 0, h, 0, h, 0, h))
# both controls excited
print("controls at 1/2:  ", plaquette_matrix_element(h, h, h, h, h, 0, h, 0, 0, h, 0, h))

spec = LatticeSpec(2)
print("physical states:", physical_indices(spec).tolist())

H = build_full_hamiltonian(spec, g_squared=0.2)
res = diagonalize(H)
print(f"energy density {res.energy_density_per_plaquette:.4f}, gap {res.gap:.4f}")

np.set_printoptions(precision=4, suppress=True)
print("ground state on physical states:", res.ground_state[physical_indices(spec)].real)

# weak coupling pushes the density down, strong coupling drives it to zero
for g2 in (0.1, 0.2, 0.5, 1.0, 10.0):
    print(g2, round(diagonalize(build_full_hamiltonian(spec, g2)).energy_density_per_plaquette, 4))
