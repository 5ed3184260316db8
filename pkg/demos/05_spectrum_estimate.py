"""A density matrix's spectrum is the most ordered outcome vector any rank-1
projective measurement can produce. Here it is recovered from measurement
statistics alone and checked against the eigensolver.

Run: python demos/05_spectrum_estimate.py
"""

import numpy as np

from majorization import detectors, quantum

rng = np.random.default_rng(3)
rho = quantum.random_density((4,), rng)

est, samples = detectors.estimate_spectrum(rho, return_samples=True)
w, _ = quantum.eig_hermitian(rho.matrix)
print("from measurements:", np.round(est.entries, 8))
print("eigenvalues:      ", np.round(w, 8))
print(f"{len(samples)} outcome vectors seen, max error {np.abs(est.entries - w).max():.1e}")
