"""
Checking the bound through simulated tomography
===============================================

Circuits A and B prepare the same state from |0>.  For each noise level we
draw 80 noise vectors, prepare the noisy state and estimate its fidelity
from 3 x 20,000 simulated Pauli measurements.
"""
import numpy as np

from robq.bounds import fidelity_lower_bound, lipschitz_norm
from robq.presets import validation_a, validation_b
from robq.tomography import validation_sweep

circuits = {"A": validation_a(), "B": validation_b()}
for cid, c in circuits.items():
    print(cid, "L =", round(lipschitz_norm(c), 6), "=", round(lipschitz_norm(c) / np.pi * 8), "pi/8")

res = validation_sweep(circuits, levels=16, samples=80, shots=20000, threads=4)
a, b = res.curve("A"), res.curve("B")
bound = [fidelity_lower_bound(lipschitz_norm(circuits["A"]), e) for e in res.levels]

print(f"{'eps':>5} {'min A':>7} {'bound A':>8} {'min B':>7}")
for e, fa, fb, lo in zip(res.levels, a, b, bound):
    print(f"{e:5.2f} {fa:7.4f} {lo:8.4f} {fb:7.4f}")

# res.to_csv() holds every (circuit, level, sample) row
