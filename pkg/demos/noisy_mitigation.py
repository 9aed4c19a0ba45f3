"""
Noise, calibration and post-selection
=====================================

Simulates one Trotter step under depolarizing CNOT noise and readout
flips, then follows the electric energy through each mitigation stage.
"""

from su2lgt import LatticeSpec
from su2lgt.circuit import build_trotter_circuit, insert_cnot_pairs
from su2lgt.lattice import physical_indices
from su2lgt.mitigation import build_calibration, mitigate
from su2lgt.operators import electric_observable_plaquette1
from su2lgt.simulator import NoiseModel, basis_state, expectation, run_noiseless, run_noisy

spec = LatticeSpec(2)
weights = electric_observable_plaquette1(spec, 0.2).diagonal()
phys = physical_indices(spec)
noise = NoiseModel.symmetric(0.02, flip=0.02)
cal = build_calibration(noise, 8192, rng_seed=1)

for t in (0.12, 0.27, 0.37):
    circ = build_trotter_circuit(spec, 0.2, t, 1)
    truth = expectation(run_noiseless(circ, basis_state(4)), weights)[0]
    counts = {r: run_noisy(insert_cnot_pairs(circ, r, 7), basis_state(4), noise, 8192, [3, r]) for r in (1, 2)}
    rec = mitigate(counts, cal, phys, weights, t=t, rng_seed=5)
    print(f"t={t}  noiseless {truth:.4f}")
    for row in rec.rows():
        print(f"   {row['stage']:<14} r={row['r']}  {row['electric_energy']:.4f} +- {row['stderr']:.4f}"
              f"  survival {row['survival']:.3f}")

# the same study over the full grid, from the command line:
#   su2lgt evolve --config demos/grid.yaml --out out/
