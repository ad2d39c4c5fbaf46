"""Depolarised source and lossy two-outcome measurements on Alice's side."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quantum import I2, I4, observable, projector
from .steering import BELL_STATES


@dataclass(frozen=True)
class BinaryPovm:
    """Two-outcome POVM ``(E_+1, E_-1)`` on a qubit."""

    e_plus: np.ndarray
    e_minus: np.ndarray

    def __post_init__(self):
        ep = np.array(self.e_plus, dtype=complex)
        em = np.array(self.e_minus, dtype=complex)
        for e in (ep, em):
            if e.shape != (2, 2) or np.max(np.abs(e - e.conj().T)) > 1e-12:
                raise ValueError("POVM elements must be Hermitian 2x2 matrices")
            if np.linalg.eigvalsh(e)[0] < -1e-10:
                raise ValueError("POVM element is not positive semidefinite")
        if np.max(np.abs(ep + em - I2)) > 1e-12:
            raise ValueError("POVM elements do not sum to the identity")
        object.__setattr__(self, "e_plus", ep)
        object.__setattr__(self, "e_minus", em)

    @property
    def observable(self) -> np.ndarray:
        """Effective +-1 observable ``E_+ - E_-``."""
        return self.e_plus - self.e_minus


def projective_povm(obs) -> BinaryPovm:
    """Spectral projectors ``(I + A)/2, (I - A)/2`` of a dichotomic qubit observable."""
    a = observable(obs)
    if a.shape != (2, 2):
        raise ValueError("expected a qubit observable")
    return BinaryPovm((I2 + a) / 2, (I2 - a) / 2)


def werner(nu: float) -> np.ndarray:
    """``nu |Phi+><Phi+| + (1 - nu) I/4``."""
    nu = float(nu)
    if not 0.0 <= nu <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {nu}")
    return nu * projector(BELL_STATES["phi+"]) + (1 - nu) * I4 / 4


def lossy_povm(ideal: BinaryPovm, eta: float) -> BinaryPovm:
    """Detector with efficiency ``eta``; a no-click is reported as -1."""
    if not isinstance(ideal, BinaryPovm):
        raise TypeError("ideal must be a BinaryPovm")
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"efficiency must lie in [0, 1], got {eta}")
    return BinaryPovm(eta * ideal.e_plus, eta * ideal.e_minus + (1 - eta) * I2)
