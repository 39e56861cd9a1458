"""Independent reference computations used to freeze expected values."""

import numpy as np


def closed_form_qubit_spectrum(m):
    """Eigenvalues of a 2x2 Hermitian matrix from its characteristic polynomial."""
    tr = (m[0, 0] + m[1, 1]).real
    det = (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]).real
    disc = np.sqrt(tr * tr / 4 - det)
    return np.array([tr / 2 + disc, tr / 2 - disc])


def h2(p):
    """Binary entropy in bits, written out independently of the library."""
    if p in (0.0, 1.0):
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))
