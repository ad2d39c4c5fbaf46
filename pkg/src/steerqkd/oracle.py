"""Brute-force checks of the analytic security bounds.

Each check samples or enumerates inputs, recomputes the quantity of interest
from scratch (eigendecompositions, explicit purifications, grid search) and
compares it against exactly one function from the rest of the package.

Reports carry ``max_violation`` and the ``tolerance`` it is judged against.
Checks with several criteria of different size express the violation in
units of each criterion's own tolerance and use ``tolerance = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json
import math
from typing import Sequence

import numpy as np

from . import keyrates, steering
from .quantum import pauli

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class OracleReport:
    name: str
    trials: int
    max_violation: float
    tolerance: float
    worst_case: str
    passed: bool
    details: dict = field(default_factory=dict, compare=False)


def _report(name, trials, violation, tolerance, worst, details=None) -> OracleReport:
    violation = float(violation)
    return OracleReport(name, int(trials), violation, tolerance, json.dumps(worst),
                        violation <= tolerance, details or {})


def _entropy_bits(p: np.ndarray) -> np.ndarray:
    """Shannon entropy along the last axis, ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float)
    safe = np.where(p > 0, p, 1.0)
    return -np.sum(np.where(p > 0, p * np.log2(safe), 0.0), axis=-1)


def _spectral_entropy(rho: np.ndarray) -> float:
    lam = np.clip(np.linalg.eigvalsh(rho), 0.0, None)
    return float(_entropy_bits(lam / lam.sum()))


def simplex_grid(step: float) -> np.ndarray:
    """All probability 4-vectors whose entries are multiples of ``step``."""
    n = int(round(1 / step))
    if abs(n * step - 1) > 1e-9:
        raise ValueError("grid step must divide 1")
    i, j, k = np.meshgrid(np.arange(n + 1), np.arange(n + 1), np.arange(n + 1), indexing="ij")
    mask = i + j + k <= n
    pts = np.stack([i[mask], j[mask], k[mask], n - (i + j + k)[mask]], axis=1)
    return pts / n


# ---------------------------------------------------------------- CJWR norm bound


def random_dichotomic(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random +-1 observable: a GUE matrix with its spectrum replaced by signs."""
    while True:
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        lam, vec = np.linalg.eigh(g + g.conj().T)
        signs = np.sign(lam)
        if abs(signs.sum()) < d:  # skip +-I, which carry no measurement
            a = (vec * signs) @ vec.conj().T
            return 0.5 * (a + a.conj().T)


def verify_cjwr_norm_bound(d: int = 2, trials: int = 1000, seed: int = 0) -> OracleReport:
    """Spectral norm of ``sum_l A_l (x) sigma_l`` never exceeds 3.

    Also checks that Pauli triples (repeated along the diagonal to reach
    dimension ``d``) attain 3.
    """
    if d < 2 or d % 2 or d > 8:
        raise ValueError("d must be even and at most 8")
    rng = np.random.default_rng(seed)
    worst, worst_norm = None, -np.inf
    for t in range(trials):
        obs = [random_dichotomic(d, rng) for _ in range(3)]
        norm = float(np.max(np.abs(np.linalg.eigvalsh(steering.cjwr_operator(obs)))))
        if norm > worst_norm:
            worst, worst_norm = t, norm
    tight = [np.kron(np.eye(d // 2), pauli(a)) for a in "xyz"]
    tight_norm = float(np.max(np.abs(np.linalg.eigvalsh(steering.cjwr_operator(tight)))))
    excess = worst_norm - 3.0
    gap = abs(tight_norm - 3.0)
    violation = max(excess / 1e-9, gap / 1e-9)
    return _report(
        f"cjwr_norm_bound[d={d}]", trials, violation, 1.0,
        {"trial": worst, "seed": seed, "norm": worst_norm},
        {"max_random_norm": worst_norm, "anticommuting_norm": tight_norm},
    )


# ---------------------------------------------------------------- Holevo


def holevo_exact(lam) -> float:
    """Eve's Holevo information about Bob's sigma_z outcome, by purification.

    The Bell-diagonal state is purified as ``sum_k sqrt(lam_k) |Bell_k>|k>_E``;
    Bob's projective sigma_z measurement conditions Eve's reduced state.
    """
    lam = np.asarray(steering.BellDiagonalState(tuple(lam)).lam if not isinstance(
        lam, steering.BellDiagonalState) else lam.lam)
    # psi[a, b, e]
    psi = np.einsum("k,abk->abk", np.sqrt(lam), steering.BELL_BASIS.reshape(2, 2, 4))
    rho_e = np.einsum("abe,abf->ef", psi, psi.conj())
    chi = _spectral_entropy(rho_e)
    for b in (0, 1):
        branch = psi[:, b, :]  # unnormalised A-E state after Bob sees outcome b
        rho_eb = np.einsum("ae,af->ef", branch, branch.conj())
        p = float(np.trace(rho_eb).real)
        if p > 1e-15:
            chi -= p * _spectral_entropy(rho_eb / p)
    return chi


def verify_holevo_exact(lam) -> OracleReport:
    """Exact Holevo quantity never exceeds the closed-form upper bound."""
    lam = lam if isinstance(lam, steering.BellDiagonalState) else steering.BellDiagonalState(tuple(lam))
    exact = holevo_exact(lam)
    bound = keyrates.holevo_bell_diagonal_upper(lam)
    return _report("holevo_exact", 1, exact - bound, 1e-9, list(lam.lam),
                   {"exact": exact, "bound": bound, "gap": bound - exact})


def verify_holevo_grid(step: float = 0.05) -> OracleReport:
    pts = simplex_grid(step)
    diffs = []
    for p in pts:
        lam = steering.BellDiagonalState(tuple(p))
        diffs.append(holevo_exact(lam) - keyrates.holevo_bell_diagonal_upper(lam))
    diffs = np.array(diffs)
    i = int(np.argmax(diffs))
    return _report("holevo_exact_grid", len(pts), diffs[i], 1e-9, pts[i].tolist(),
                   {"max_gap": float(-diffs.min()), "max_excess": float(diffs[i])})


# ---------------------------------------------------------------- entropic inequality


def _s_lambda(pts: np.ndarray) -> np.ndarray:
    """``H(lam) - h(lam1 + lam3)`` row by row."""
    s13 = pts[:, 0] + pts[:, 2]
    return _entropy_bits(pts) - _entropy_bits(np.stack([s13, 1 - s13], axis=1))


def _r2(pts: np.ndarray) -> np.ndarray:
    return (pts[:, 0] - pts[:, 1]) ** 2 + (pts[:, 2] - pts[:, 3]) ** 2


def verify_entropic_inequality(grid_step: float = 0.02) -> OracleReport:
    """Grid check of ``S(lam) <= bound(R^2)`` with equality on the two edge families."""
    if not 0 < grid_step <= 0.1:
        raise ValueError("grid_step must lie in (0, 0.1]")
    pts = simplex_grid(grid_step)
    s = _s_lambda(pts)
    bound = np.array([keyrates.s_lambda_bound(min(r, 1.0)) for r in _r2(pts)])
    excess = s - bound
    on_edge = (np.abs(pts[:, 1]) + np.abs(pts[:, 3]) < 1e-12) | (np.abs(pts[:, 0]) + np.abs(pts[:, 2]) < 1e-12)
    edge_gap = np.abs(excess[on_edge])
    i = int(np.argmax(excess))
    j = int(np.argmax(edge_gap))
    violation = max(excess[i] / 1e-9, edge_gap[j] / 1e-6)
    worst = pts[i] if excess[i] / 1e-9 >= edge_gap[j] / 1e-6 else pts[on_edge][j]
    return _report("entropic_inequality", len(pts), violation, 1.0, worst.tolist(),
                   {"max_excess": float(excess[i]), "max_edge_gap": float(edge_gap[j]),
                    "edge_points": int(on_edge.sum())})


# ---------------------------------------------------------------- Eve closed form


def _bell_f3(pts: np.ndarray) -> np.ndarray:
    l1, l2, l3, l4 = pts.T
    t11 = l1 - l2 - l3 + l4
    t22 = -l1 - l2 + l3 + l4
    t33 = l1 - l2 + l3 - l4
    return np.sqrt(t11**2 + t22**2 + t33**2)


def _best_feasible(pts: np.ndarray, f3_min: float):
    feasible = _bell_f3(pts) >= f3_min
    if not feasible.any():
        return None, -np.inf
    s = np.where(feasible, _s_lambda(pts), -np.inf)
    i = int(np.argmax(s))
    return pts[i], float(s[i])


def _local_grid(center: np.ndarray, h: float, half_width: int = 4) -> np.ndarray:
    offs = np.arange(-half_width, half_width + 1) * h
    a, b, c = np.meshgrid(offs, offs, offs, indexing="ij")
    first = center[:3] + np.stack([a.ravel(), b.ravel(), c.ravel()], axis=1)
    pts = np.column_stack([first, 1 - first.sum(axis=1)])
    return pts[(pts >= 0).all(axis=1)]


def max_eve_info_grid(f3_min: float, step: float = 0.005, levels: int = 40):
    """Maximise ``S(lam)`` over Bell-diagonal states with F3 >= ``f3_min``.

    Coarse simplex grid at ``step``, then repeated zooms (step halved each
    level) around the incumbent. Returns ``(max, argmax)``.
    """
    if f3_min > SQRT3 + 1e-9:
        raise ValueError(f"no Bell-diagonal state has F3 = {f3_min} > sqrt(3)")
    best, val = _best_feasible(simplex_grid(step), f3_min)
    h = step
    for _ in range(levels):
        h /= 2
        cand, cval = _best_feasible(np.vstack([best, _local_grid(best, h)]), f3_min)
        if cval >= val:
            best, val = cand, cval
    return max(val, 0.0), best


def _family(p: np.ndarray, tol: float = 1e-9) -> str:
    if p[1] + p[3] <= tol:
        return "lam2=lam4=0"
    if p[0] + p[2] <= tol:
        return "lam1=lam3=0"
    return "interior"


def verify_eve_closed_form(f3_grid: Sequence[float] = (1.05, 1.2, 1.4334, 1.6, 1.7),
                           step: float = 0.005) -> OracleReport:
    """Grid-searched worst case agrees with the closed-form Eve term.

    For each target the search maximum must not exceed the closed form by
    more than 1e-9 and must come within 1e-3 of it.
    """
    details, worst, violation = {}, None, -np.inf
    for f3 in f3_grid:
        if not 1.0 < f3 <= SQRT3 + 1e-12:
            raise ValueError(f"F3 targets must lie in (1, sqrt(3)], got {f3}")
        found, arg = max_eve_info_grid(float(f3), step)
        closed = keyrates.eve_info_from_f3(min(f3, SQRT3))
        t22 = -arg[0] - arg[1] + arg[2] + arg[3]
        r2 = (arg[0] - arg[1]) ** 2 + (arg[2] - arg[3]) ** 2
        v = max((found - closed) / 1e-9, (closed - found) / 1e-3)
        details[f"{f3:g}"] = {
            "search_max": found, "closed_form": closed, "argmax": arg.tolist(),
            "family": _family(arg), "t22_sq_minus_2r2_plus_1": t22**2 - (2 * r2 - 1),
        }
        if v > violation:
            violation, worst = v, {"f3": f3, "argmax": arg.tolist()}
    return _report("eve_closed_form", len(f3_grid), violation, 1.0, worst, details)


# ---------------------------------------------------------------- Bell-diagonal reduction


def verify_reduction_invariance(trials: int = 1000, seed: int = 0) -> OracleReport:
    """Symmetrisation keeps matched correlators; canonicalisation keeps F3."""
    from .quantum import random_density_matrix

    rng = np.random.default_rng(seed)
    worst, worst_v = None, -np.inf
    max_corr, max_f3 = 0.0, 0.0
    for t in range(trials):
        rho = random_density_matrix(4, rng)
        before = np.diag(steering.correlation_matrix(rho))
        sym = steering.symmetrize(rho)
        dc = float(np.max(np.abs(np.diag(steering.correlation_matrix(sym)) - before)))
        _, bell = steering.symmetrize_to_bell_diagonal(rho)
        df = abs(steering.cjwr_f3_optimal(bell) - steering.cjwr_f3_optimal(sym))
        max_corr, max_f3 = max(max_corr, dc), max(max_f3, df)
        v = max(dc / 1e-12, df / 1e-9)
        if v > worst_v:
            worst, worst_v = {"trial": t, "seed": seed}, v
    return _report("reduction_invariance", trials, worst_v, 1.0, worst,
                   {"max_correlator_change": max_corr, "max_f3_change": max_f3})


def run_all(quick: bool = False) -> list[OracleReport]:
    """Every check at acceptance size (``quick`` shrinks trial counts and grids)."""
    trials = 100 if quick else 1000
    reports = [verify_cjwr_norm_bound(d, trials) for d in (2, 4, 8)]
    reports.append(verify_holevo_grid(0.1 if quick else 0.05))
    reports.append(verify_entropic_inequality(0.05 if quick else 0.02))
    reports.append(verify_eve_closed_form((1.2, 1.6) if quick else (1.05, 1.2, 1.4334, 1.6, 1.7),
                                          step=0.01 if quick else 0.005))
    reports.append(verify_reduction_invariance(trials))
    return reports
