"""Werner states seen through the generalized Bell measurement.

Separable states can never put more than 1/d of their weight on a single
Bell outcome, so a Werner state is flagged as soon as q > 1/(1+d).

Run: python demos/02_werner_bell.py
"""

import numpy as np

from majorization import bounds, detectors, quantum

for d in (2, 3, 4):
    povm = quantum.rank_one_povm(quantum.bell_basis(d), label="bell")
    sep = bounds.bell_separable_bound(d)
    qc = 1 / (1 + d)
    for q in (qc - 0.02, qc + 0.02):
        rho = quantum.werner(d, q)
        v = detectors.theorem1_detect(rho, povm, sep)
        top = quantum.born_probs(povm, rho).entries.max()
        print(f"d={d} q={q:.4f} -> {v.status.value:12s} largest outcome {top:.4f} vs 1/d = {1 / d:.4f}")

# the separable bound itself can be recovered numerically
res = bounds.sup_separable(quantum.rank_one_povm(quantum.bell_basis(3)), (3, 3))
print("optimized separable bound, d=3:", np.round(res.bound.entries, 6))
