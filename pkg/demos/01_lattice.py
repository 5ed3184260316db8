"""Majorization lattice: comparing, meeting and joining probability vectors.

Run: python demos/01_lattice.py
"""

import numpy as np

from majorization.probvec import ProbVec, compare, infimum, partial_sums, supremum

a = ProbVec([0.45, 0.2, 0.2, 0.15])
b = ProbVec([0.4, 0.3, 0.3, 0.0])

# neither vector is more ordered than the other
print("a vs b:", compare(a, b).name)
print("partial sums a:", partial_sums(a.entries))
print("partial sums b:", partial_sums(b.padded(4)))

# the meet is the pointwise minimum of partial sums, always a valid vector
inf = infimum([a, b])
print("inf:", np.round(inf.padded(4), 6))

# the pointwise maximum (0.45, 0.75, 0.95, 1) is not concave, so the join
# flattens the middle two entries
sup = supremum([a, b])
print("sup:", np.round(sup.padded(4), 6))
