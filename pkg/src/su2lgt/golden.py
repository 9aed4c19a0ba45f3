"""Reference values for the two-plaquette, truncation-1/2 system.

``REFERENCE_OFF_DIAGONAL`` and ``REFERENCE_DIAGONAL_G4`` transcribe the
reference 16x16 Hamiltonian ``(1/2g^2) M``: ``M`` has ``3g^4/4``-scaled
entries on the diagonal (listed as multiples of ``g^4``) and constant
entries off it. ``H`` stands for ``-1/2``.
"""

from __future__ import annotations

from fractions import Fraction as F

import numpy as np

H = F(-1, 2)

REFERENCE_DIAGONAL_G4 = (
    F(0), F(3, 4), F(3, 2), F(9, 4), F(3, 4), F(3, 2), F(9, 4), F(3),
    F(3, 2), F(9, 4), F(3), F(15, 4), F(9, 4), F(3), F(15, 4), F(9, 2),
)

# diagonal entries are zero here; they live in REFERENCE_DIAGONAL_G4
REFERENCE_OFF_DIAGONAL = (
    (0, 0, 0, 0, 0, 0, 0, -2, 0, 0, 0, 0, 0, -2, 0, 0),
    (0, 0, 0, 0, 0, 0, -2, 0, 0, 0, 0, 0, -2, 0, 0, 0),
    (0, 0, 0, 0, 0, -2, 0, 0, 0, 0, 0, 0, 0, 0, 0, H),
    (0, 0, 0, 0, -2, 0, 0, 0, 0, 0, 0, 0, 0, 0, H, 0),
    (0, 0, 0, -2, 0, 0, 0, 0, 0, -2, 0, 0, 0, 0, 0, 0),
    (0, 0, -2, 0, 0, 0, 0, 0, -2, 0, 0, 0, 0, 0, 0, 0),
    (0, -2, 0, 0, 0, 0, 0, 0, 0, 0, 0, H, 0, 0, 0, 0),
    (-2, 0, 0, 0, 0, 0, 0, 0, 0, 0, H, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, -2, 0, 0, 0, 0, 0, 0, 0, 0, 0, H),
    (0, 0, 0, 0, -2, 0, 0, 0, 0, 0, 0, 0, 0, 0, H, 0),
    (0, 0, 0, 0, 0, 0, 0, H, 0, 0, 0, 0, 0, H, 0, 0),
    (0, 0, 0, 0, 0, 0, H, 0, 0, 0, 0, 0, H, 0, 0, 0),
    (0, -2, 0, 0, 0, 0, 0, 0, 0, 0, 0, H, 0, 0, 0, 0),
    (-2, 0, 0, 0, 0, 0, 0, 0, 0, 0, H, 0, 0, 0, 0, 0),
    (0, 0, 0, H, 0, 0, 0, 0, 0, H, 0, 0, 0, 0, 0, 0),
    (0, 0, H, 0, 0, 0, 0, 0, H, 0, 0, 0, 0, 0, 0, 0),
)

# highlighted physical rows/columns of the reference matrix
PHYSICAL_INDICES = (0, 7, 10, 13)

# single-plaquette electric diagonal in units of g^2/2
PLAQUETTE1_ELECTRIC_DIAGONAL = (
    F(0), F(3, 4), F(0), F(3, 4), F(3, 4), F(3, 2), F(3, 4), F(3, 2),
    F(3, 2), F(9, 4), F(3, 2), F(9, 4), F(9, 4), F(3), F(9, 4), F(3),
)

G_SQUARED = 0.2
ENERGY_DENSITY = -3.5658
GAP = 7.4139
# vacuum, all-excited, the two singly excited plaquettes
GROUND_STATE_AMPLITUDES = {0: 0.6943, 10: 0.1666, 7: 0.4951, 13: 0.4951}

# plaquette table: <final| box |initial> on (j_l q_l j_a q_r j_r), doubled codes
PLAQUETTE_TABLE = (
    ((0, 0, 0, 0, 0), (0, 1, 1, 1, 0), F(1)),
    ((0, 0, 0, 1, 1), (0, 1, 1, 0, 1), F(1, 2)),
    ((1, 1, 0, 0, 0), (1, 0, 1, 1, 0), F(1, 2)),
    ((1, 0, 1, 0, 1), (1, 1, 0, 1, 1), F(1, 4)),
)

TIME_GRID = (0.02, 0.07, 0.12, 0.17, 0.22, 0.27, 0.32, 0.37)

# <E^2_box1>(t) from the vacuum at g^2 = 0.2; frozen from the spectral
# propagator and cross-checked against scipy.linalg.expm
EXACT_CURVE = (
    0.0044691359, 0.050637533, 0.1257354858, 0.1930350885,
    0.2202999782, 0.1959130103, 0.1344866498, 0.0691428616,
)
TROTTER_CURVES = {
    1: (0.0044691855, 0.0507021002, 0.1271544937, 0.2024382614,
        0.2540027228, 0.2768022129, 0.2771443967, 0.260147886),
    2: (0.0044708984, 0.0509035588, 0.1280357263, 0.2020942308,
        0.2440661783, 0.2432141787, 0.2097708096, 0.1665093777),
    3: (0.0044706966, 0.0508659519, 0.1275999444, 0.1998605102,
        0.2368501304, 0.2263459216, 0.1792195038, 0.1221940405),
}


def reference_hamiltonian(g_squared: float) -> np.ndarray:
    """The reference matrix evaluated at coupling ``g_squared``."""
    g4 = g_squared**2
    m = np.array([[float(x) for x in row] for row in REFERENCE_OFF_DIAGONAL])
    m[np.diag_indices(16)] = [float(d) * g4 for d in REFERENCE_DIAGONAL_G4]
    return m / (2.0 * g_squared)
