"""Hand-built reference objects shared by the tests."""

import numpy as np


def phi_plus():
    return np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def werner_by_hand(nu):
    """nu |Phi+><Phi+| + (1 - nu) I/4, written out entry by entry."""
    a = nu / 2 + (1 - nu) / 4
    c = nu / 2
    d = (1 - nu) / 4
    return np.array([[a, 0, 0, c], [0, d, 0, 0], [0, 0, d, 0], [c, 0, 0, a]], dtype=complex)


# acceptance outcomes, filled by test_acceptance and printed by conftest
ACCEPTANCE = {}
