"""
Biphoton states and positivity
==============================

A symmetric two-photon polarization state is fixed, up to rotation, by the
three eigenvalues of its correlation tensor. This script builds a few such
states and checks which spectra describe physical density matrices.
"""
import numpy as np

from biphoton.symstate import (
    assemble_state,
    positivity_criteria,
    random_spectrum,
    singlet_overlap,
    tensor_from_spectrum,
    validate_positivity,
)
from biphoton.oracle import sample_rotation

# The isotropic spectrum (1/3, 1/3, 1/3) is the equal mixture of the three triplets.
rho = assemble_state(np.zeros(3), np.eye(3) / 3)
print("isotropic eigenvalues:", np.round(np.linalg.eigvalsh(rho), 12))

# (1, 1, -1) is the pure state (|HV> + |VH>)/sqrt(2).
bell = assemble_state(np.zeros(3), np.diag([1.0, 1.0, -1.0]))
print("purity of (1, 1, -1):", np.trace(bell @ bell).real)
print("singlet weight:", singlet_overlap(bell))

# The four positivity criteria are 4x the eigenvalues of the state.
for lam in [(1, 1, -1), (0.6, 0.3, 0.1), (1.2, 0.4, -0.6)]:
    crit = positivity_criteria(lam)
    print(f"{lam}: criteria {np.round(crit, 6)}, physical={validate_positivity(lam)}")

# A random rotation changes the tensor but not the spectrum, and the state stays physical.
rng = np.random.default_rng(1)
lam = random_spectrum(rng)
t = tensor_from_spectrum(lam, sample_rotation(rng))
print("random spectrum:", np.round(lam, 6))
print("rotated tensor eigenvalues:", np.round(np.linalg.eigvalsh(t)[::-1], 6))
print("min eigenvalue of rotated state:", np.linalg.eigvalsh(assemble_state(np.zeros(3), t)).min())
