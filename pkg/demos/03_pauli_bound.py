"""Uncertainty bound of the three qubit Pauli measurements.

The optimizer's vector is compared with the closed form, then used to test
two-qubit Werner states with sigma_i (x) sigma_i product measurements.

Run: python demos/03_pauli_bound.py
"""

import math

import numpy as np

from majorization import bounds, detectors, quantum

res = bounds.sup_all_states(bounds.pauli_measurements())
print("optimized:  ", np.round(res.bound.entries, 6))
print("closed form:", np.round(bounds.pauli_bound_closed_form().entries, 6))
print("converged:", all(res.converged))

pairs = [(quantum.Observable(p), quantum.Observable(p)) for p in (quantum.PAULI_X, quantum.PAULI_Y, quantum.PAULI_Z)]
for q in (0.55, 1 / math.sqrt(3), 0.6):
    v = detectors.theorem2_detect(quantum.werner(2, q), pairs, res.bound, tol_detect=1e-4)
    print(f"q={q:.4f}: {v.status.value}")
