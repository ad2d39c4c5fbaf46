"""Small dense linear algebra for qubit and two-qubit systems.

Matrices are plain ``numpy`` complex arrays. The validators in this module
(:func:`density_matrix`, :func:`observable`, :func:`pure_state`) check the
physical invariants and return a clean array, so the rest of the package can
pass arrays around without wrapper classes.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
DICHOTOMIC_TOL = 1e-10
IMAG_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
AXES = ("x", "y", "z")


def pauli(axis: str) -> np.ndarray:
    """Return the 2x2 Pauli matrix for ``axis`` in {'x', 'y', 'z'}."""
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}; expected one of x, y, z") from None


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two square matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    for m in (a, b):
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return np.kron(a, b)


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= tol


def density_matrix(m, tol: float = PSD_TOL) -> np.ndarray:
    """Validate ``m`` as a density matrix and return it as a complex array.

    Raises ``ValueError`` if ``m`` is not Hermitian, not unit trace or has an
    eigenvalue below ``-tol``.
    """
    rho = np.array(m, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if not is_hermitian(rho):
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace is {np.trace(rho).real!r}, expected 1")
    if np.linalg.eigvalsh(rho)[0] < -tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def observable(m) -> np.ndarray:
    """Validate a dichotomic observable: Hermitian with ``m @ m == I``."""
    a = np.array(m, dtype=complex)
    if not is_hermitian(a, tol=DICHOTOMIC_TOL):
        raise ValueError("observable is not Hermitian")
    if np.max(np.abs(a @ a - np.eye(a.shape[0]))) > DICHOTOMIC_TOL:
        raise ValueError("observable does not square to the identity")
    return a


def pure_state(amplitudes) -> np.ndarray:
    psi = np.array(amplitudes, dtype=complex).ravel()
    if abs(np.vdot(psi, psi).real - 1.0) > TRACE_TOL:
        raise ValueError("state vector is not normalised")
    return psi


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def expectation(rho: np.ndarray, obs: np.ndarray) -> float:
    """Return ``Tr(rho @ obs)`` as a real number.

    The imaginary part must be below 1e-10; a larger residue means ``obs`` (or
    ``rho``) is not Hermitian and raises ``ValueError``.
    """
    rho = np.asarray(rho)
    obs = np.asarray(obs)
    if rho.shape != obs.shape:
        raise ValueError(f"dimension mismatch: state {rho.shape} vs observable {obs.shape}")
    val = np.einsum("ij,ji->", rho, obs)
    if abs(val.imag) > IMAG_TOL:
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}; observable not Hermitian?")
    return float(val.real)


def eigenvalues(m: np.ndarray) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, sorted in descending order."""
    m = np.asarray(m)
    if not is_hermitian(m, tol=1e-10):
        raise ValueError("eigenvalues() requires a Hermitian matrix")
    return np.linalg.eigvalsh(m)[::-1]


def shannon_entropy(p) -> float:
    """Shannon entropy in bits with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    lam = np.clip(np.linalg.eigvalsh(np.asarray(rho)), 0.0, None)
    return max(shannon_entropy(lam), 0.0)


def partial_trace(rho: np.ndarray, trace_out, dims: Sequence[int]) -> np.ndarray:
    """Trace out the subsystem(s) ``trace_out`` of ``rho``.

    ``dims`` lists the local dimensions in tensor order; ``trace_out`` is an
    index or a collection of indices into ``dims``. The remaining subsystems
    keep their original order.
    """
    rho = np.asarray(rho)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"dims {dims} inconsistent with matrix of shape {rho.shape}")
    out = {trace_out} if np.isscalar(trace_out) else set(trace_out)
    if not out <= set(range(len(dims))):
        raise ValueError(f"subsystem index out of range for dims {dims}")
    n = len(dims)
    keep = [k for k in range(n) if k not in out]
    t = rho.reshape(dims + dims)
    # contract each traced axis with its partner, highest index first so
    # the remaining axis numbers stay valid
    for k in sorted(out, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + m)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def purify(rho: np.ndarray) -> np.ndarray:
    """Spectral purification of ``rho`` into ``system (x) ancilla``.

    Eigenvalues are taken in descending order so that a pure input comes back
    as ``psi (x) |0>``. Tracing out the ancilla (the second factor) recovers
    ``rho``.
    """
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    lam, vec = np.linalg.eigh(rho)
    lam, vec = lam[::-1], vec[:, ::-1]
    amp = np.sqrt(np.clip(lam, 0.0, None))
    psi = np.zeros(d * d, dtype=complex)
    for k in range(d):
        if amp[k] > 0:
            psi += amp[k] * np.kron(vec[:, k], np.eye(d)[k])
    return psi / np.linalg.norm(psi)


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return z / np.linalg.norm(z)


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Full-rank random state ``G G^dag / Tr`` from a complex Gaussian ``G``."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))
