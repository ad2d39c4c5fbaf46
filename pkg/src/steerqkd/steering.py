"""CJWR steering functional, correlation matrices and Bell-diagonal states.

Bell basis order throughout is (Phi+, Psi-, Phi-, Psi+), so ``lam[0]`` is the
weight on Phi+ and so on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .quantum import (
    AXES,
    I2,
    density_matrix,
    expectation,
    observable,
    pauli,
    projector,
    tensor,
)

SQRT3 = np.sqrt(3.0)

_s = 1 / np.sqrt(2)
BELL_STATES = {
    "phi+": np.array([_s, 0, 0, _s], dtype=complex),
    "psi-": np.array([0, _s, -_s, 0], dtype=complex),
    "phi-": np.array([_s, 0, 0, -_s], dtype=complex),
    "psi+": np.array([0, _s, _s, 0], dtype=complex),
}
BELL_ORDER = ("phi+", "psi-", "phi-", "psi+")
BELL_BASIS = np.column_stack([BELL_STATES[k] for k in BELL_ORDER])

_YY = np.kron(pauli("y"), pauli("y"))


@dataclass(frozen=True)
class BellDiagonalState:
    """Weights of a Bell-diagonal state in the order (Phi+, Psi-, Phi-, Psi+)."""

    lam: tuple[float, float, float, float]

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lam)
        if len(lam) != 4:
            raise ValueError("a Bell-diagonal state has exactly four weights")
        if min(lam) < -1e-12 or abs(sum(lam) - 1.0) > 1e-12:
            raise ValueError(f"Bell weights {lam} are not a probability vector")
        object.__setattr__(self, "lam", lam)

    def __iter__(self):
        return iter(self.lam)

    @property
    def is_canonical(self) -> bool:
        l1, l2, l3, l4 = self.lam
        return l1 >= l2 - 1e-12 and l3 >= l4 - 1e-12


@dataclass(frozen=True)
class MeasurementSettings:
    """Alice directions ``u`` (unit vectors) and Bob directions ``v`` (orthonormal).

    Both are stored as ``(n, 3)`` arrays with ``n`` in {2, 3}.
    """

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.atleast_2d(np.asarray(self.u, dtype=float))
        v = np.atleast_2d(np.asarray(self.v, dtype=float))
        if u.shape != v.shape or u.shape[1] != 3 or u.shape[0] not in (2, 3):
            raise ValueError("settings need matching (n, 3) arrays with n in {2, 3}")
        if np.max(np.abs(np.linalg.norm(u, axis=1) - 1.0)) > 1e-12:
            raise ValueError("Alice's directions must be unit vectors")
        if np.max(np.abs(v @ v.T - np.eye(len(v)))) > 1e-12:
            raise ValueError("Bob's directions must be orthonormal")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return len(self.u)

    def alice_observables(self) -> list[np.ndarray]:
        return [direction_observable(d) for d in self.u]

    def bob_observables(self) -> list[np.ndarray]:
        return [direction_observable(d) for d in self.v]


def direction_observable(direction) -> np.ndarray:
    """``n . sigma`` for a real 3-vector ``n``."""
    return sum(c * pauli(a) for c, a in zip(direction, AXES))


def protocol_settings() -> MeasurementSettings:
    """Alice (sx, -sy, sz) against Bob (sx, sy, sz)."""
    return MeasurementSettings(u=np.diag([1.0, -1.0, 1.0]), v=np.eye(3))


def correlation_matrix(rho: np.ndarray) -> np.ndarray:
    """``t[i, j] = Tr[(sigma_i (x) sigma_j) rho]`` with Alice's index first."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise ValueError(f"correlation_matrix needs a two-qubit state, got shape {rho.shape}")
    return np.array([[expectation(rho, tensor(pauli(i), pauli(j))) for j in AXES] for i in AXES])


def local_vectors(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bloch vectors of Alice's and Bob's marginals."""
    a = np.array([expectation(rho, tensor(pauli(i), I2)) for i in AXES])
    b = np.array([expectation(rho, tensor(I2, pauli(i))) for i in AXES])
    return a, b


def cjwr_value(rho: np.ndarray, settings: MeasurementSettings | None = None) -> float:
    """CJWR value ``|sum_i <A_i (x) B_i>| / sqrt(n)`` for explicit settings."""
    if settings is None:
        settings = protocol_settings()
    elif not isinstance(settings, MeasurementSettings):
        raise TypeError("settings must be a MeasurementSettings instance")
    rho = np.asarray(rho)
    total = sum(
        expectation(rho, tensor(a, b))
        for a, b in zip(settings.alice_observables(), settings.bob_observables())
    )
    return abs(total) / np.sqrt(settings.n)


def cjwr_f3_optimal(rho: np.ndarray) -> float:
    """Three-setting CJWR value optimised over settings: root of sum of squared singular values."""
    s = np.linalg.svd(correlation_matrix(rho), compute_uv=False)
    return float(np.sqrt(np.sum(s**2)))


def cjwr_operator(observables: Sequence[np.ndarray]) -> np.ndarray:
    """``sum_l A_l (x) sigma_l`` for three dichotomic observables ``A_l``.

    Observables proportional to the identity are rejected: they carry no
    measurement and make the functional trivial.
    """
    if len(observables) != 3:
        raise ValueError("the CJWR operator takes exactly three observables")
    obs = [observable(a) for a in observables]
    d = obs[0].shape[0]
    if any(a.shape != (d, d) for a in obs):
        raise ValueError("observables must share a common dimension")
    for a in obs:
        if abs(abs(np.trace(a).real) - d) < 1e-9:
            raise ValueError("observable is proportional to the identity")
    return sum(tensor(a, pauli(ax)) for a, ax in zip(obs, AXES))


def bell_diagonal_to_density(lam) -> np.ndarray:
    lam = lam if isinstance(lam, BellDiagonalState) else BellDiagonalState(tuple(lam))
    return sum(w * projector(BELL_STATES[k]) for w, k in zip(lam.lam, BELL_ORDER))


def bell_diagonal_correlators(lam) -> tuple[float, float, float]:
    """Diagonal of the correlation matrix of a Bell-diagonal state."""
    l1, l2, l3, l4 = lam.lam if isinstance(lam, BellDiagonalState) else BellDiagonalState(tuple(lam)).lam
    return (l1 - l2 - l3 + l4, -l1 - l2 + l3 + l4, l1 - l2 + l3 - l4)


def bell_weights_from_correlators(t11: float, t22: float, t33: float) -> tuple[float, float, float, float]:
    """Inverse of :func:`bell_diagonal_correlators`."""
    return (
        (1 + t11 - t22 + t33) / 4,
        (1 - t11 - t22 - t33) / 4,
        (1 - t11 + t22 + t33) / 4,
        (1 + t11 + t22 - t33) / 4,
    )


def bell_weights(rho: np.ndarray) -> np.ndarray:
    """Diagonal of ``rho`` in the Bell basis (real part)."""
    return np.real(np.einsum("ik,ij,jk->k", BELL_BASIS.conj(), np.asarray(rho), BELL_BASIS))


def symmetrize(rho: np.ndarray) -> np.ndarray:
    """Average with the ``sy (x) sy`` conjugate, then take the real part.

    Both steps leave every matched correlator ``<sigma_i (x) sigma_i>``
    unchanged.
    """
    rho = density_matrix(rho)
    if rho.shape != (4, 4):
        raise ValueError("symmetrize needs a two-qubit state")
    bar = 0.5 * (rho + _YY @ rho @ _YY)
    return 0.5 * (bar + bar.conj())


def y_rotation(phi: float) -> np.ndarray:
    """``exp(-i phi sy / 2)``; maps (t_x, t_z) by ``[[cos, sin], [-sin, cos]]``."""
    return np.cos(phi / 2) * I2 - 1j * np.sin(phi / 2) * pauli("y")


def _angle(rot: np.ndarray) -> float:
    return float(np.arctan2(rot[0, 1], rot[0, 0]))


_SWAP = np.array([[0.0, 1.0], [-1.0, 0.0]])  # quarter turn: diag(a, b) -> diag(b, a)


def _xz_alignment(block: np.ndarray, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Proper rotations ``(Ra, Rb)`` with ``Ra @ block @ Rb.T = diag(dx, dz)``, ``dz >= |dx|``."""
    if abs(block[0, 1]) <= tol and abs(block[1, 0]) <= tol and block[1, 1] >= abs(block[0, 0]) - tol:
        return np.eye(2), np.eye(2)
    u, s, vt = np.linalg.svd(block)
    v = vt.T
    s = s.astype(float).copy()
    # make both frames proper rotations; a column flip moves the sign into s
    if np.linalg.det(u) < 0:
        u[:, 1] *= -1
        s[1] *= -1
    if np.linalg.det(v) < 0:
        v[:, 1] *= -1
        s[1] *= -1
    ra, rb = u.T, v.T
    dx, dz = s
    if abs(dx) > abs(dz):
        ra, rb = _SWAP @ ra, _SWAP @ rb
        dx, dz = dz, dx
    if dz < 0:
        ra = -ra
    return ra, rb


def symmetrize_to_bell_diagonal(rho: np.ndarray) -> tuple[BellDiagonalState, np.ndarray]:
    """Reduce a two-qubit state to canonical Bell-diagonal form.

    Returns the weights and the density matrix. The pipeline is
    :func:`symmetrize` followed by local rotations about y that diagonalise
    the residual {xx, xz, zx, zz} block, ordered so that ``t_zz >= |t_xx|``
    (which is ``lam[0] >= lam[1]`` and ``lam[2] >= lam[3]``).
    """
    sym = symmetrize(rho)
    t = correlation_matrix(sym)
    block = t[np.ix_([0, 2], [0, 2])]
    ra, rb = _xz_alignment(block)
    u = tensor(y_rotation(_angle(ra)), y_rotation(_angle(rb)))
    out = u @ sym @ u.conj().T
    out = 0.5 * (out + out.conj().T)
    tr = correlation_matrix(out)
    lam = np.clip(bell_weights_from_correlators(tr[0, 0], tr[1, 1], tr[2, 2]), 0.0, None)
    lam = BellDiagonalState(tuple(lam / lam.sum()))
    return lam, bell_diagonal_to_density(lam)
