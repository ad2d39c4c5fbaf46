"""Closed-form entropies and asymptotic key rates.

Rates are in bits per key round (both parties measured sigma_z). Variants:

``1sdi``        steering-certified rate from an observed (Q, F3)
``1sdi_nonps``  lossy Alice, nulls mapped to -1 in the QBER
``1sdi_ps``     lossy Alice, QBER post-selected on Alice clicks
``di_chsh``     CHSH-certified device-independent comparison
``dd``          device-dependent BB84/BBM92 comparison
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .steering import BellDiagonalState

SQRT3 = math.sqrt(3.0)
TSIRELSON = 2.0 * math.sqrt(2.0)
BOUND_TOL = 1e-9

VARIANTS = ("1sdi", "1sdi_ps", "1sdi_nonps", "di_chsh", "dd")


@dataclass(frozen=True)
class NoiseParams:
    """Source visibility ``nu`` and Alice's detection efficiency ``eta_a``."""

    nu: float = 1.0
    eta_a: float = 1.0

    def __post_init__(self):
        for name in ("nu", "eta_a"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")


@dataclass(frozen=True)
class RateReport:
    q: float
    f3: float
    i_ab: float
    chi_e: float
    rate: float
    variant: str
    eta_a: float = 1.0
    chsh: float | None = None


def _check_prob(x: float, name: str = "x", hi: float = 1.0) -> float:
    x = float(x)
    if not 0.0 <= x <= hi:
        raise ValueError(f"{name} must lie in [0, {hi}], got {x}")
    return x


def _h(x):
    """Vectorised binary entropy with endpoints mapped to 0."""
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x < 1)
    xs = np.where(inside, x, 0.5)
    return np.where(inside, -xs * np.log2(xs) - (1 - xs) * np.log2(1 - xs), 0.0)


def binary_entropy(x: float) -> float:
    return float(_h(_check_prob(x)))


def _check_bell(lam) -> tuple[float, float, float, float]:
    return (lam if isinstance(lam, BellDiagonalState) else BellDiagonalState(tuple(lam))).lam


def holevo_bell_diagonal_upper(lam) -> float:
    """Upper bound on Eve's Holevo information about Bob's sigma_z outcome.

    ``H(lam) - h(lam1 + lam3)`` for a Bell-diagonal state, clamped at 0.
    """
    l = np.array(_check_bell(lam))
    pos = l[l > 0]
    shannon = float(-np.sum(pos * np.log2(pos)))
    return max(shannon - binary_entropy(min(max(l[0] + l[2], 0.0), 1.0)), 0.0)


def r_squared(lam) -> float:
    l1, l2, l3, l4 = _check_bell(lam)
    return (l1 - l2) ** 2 + (l3 - l4) ** 2


def s_lambda_bound(r2: float) -> float:
    r2 = _check_prob(r2, "r2")
    if r2 <= 0.5:
        return 1.0
    return binary_entropy((1 + math.sqrt(2 * r2 - 1)) / 2)


def eve_info_from_f3(f3: float) -> float:
    """Bound on Eve's information given the observed three-setting CJWR value.

    Returns 1 (no certified secrecy) when ``f3 <= 1``.
    """
    f3 = float(f3)
    if f3 < 0 or f3 > SQRT3 + BOUND_TOL:
        raise ValueError(f"F3 must lie in [0, sqrt(3)], got {f3}")
    if f3 <= 1.0:
        return 1.0
    f3 = min(f3, SQRT3)
    return binary_entropy((1 + math.sqrt((f3 * f3 - 1) / 2)) / 2)


def eve_info_from_chsh(b: float) -> float:
    b = float(b)
    if b < 0 or b > TSIRELSON + BOUND_TOL:
        raise ValueError(f"CHSH value must lie in [0, 2*sqrt(2)], got {b}")
    if b <= 2.0:
        return 1.0
    b = min(b, TSIRELSON)
    return binary_entropy((1 + math.sqrt((b / 2) ** 2 - 1)) / 2)


def rate_1sdi(q: float, f3: float) -> RateReport:
    """``1 - h(Q) - h((1 + sqrt((F3^2 - 1)/2)) / 2)``."""
    q = _check_prob(q, "QBER", 0.5)
    i_ab = 1.0 - binary_entropy(q)
    chi = eve_info_from_f3(f3)
    return RateReport(q=q, f3=float(f3), i_ab=i_ab, chi_e=chi, rate=i_ab - chi, variant="1sdi")


def rate_di_chsh(q: float, b: float) -> RateReport:
    q = _check_prob(q, "QBER", 0.5)
    i_ab = 1.0 - binary_entropy(q)
    chi = eve_info_from_chsh(b)
    return RateReport(
        q=q, f3=math.nan, i_ab=i_ab, chi_e=chi, rate=i_ab - chi, variant="di_chsh", chsh=float(b)
    )


def rate_dd(q: float) -> RateReport:
    """Device-dependent rate ``1 - 2 h(Q)``; Eve's share is ``h(Q)``."""
    q = _check_prob(q, "QBER", 0.5)
    hq = binary_entropy(q)
    return RateReport(q=q, f3=math.nan, i_ab=1.0 - hq, chi_e=hq, rate=1.0 - 2.0 * hq, variant="dd")


def observables_from_werner(noise: NoiseParams) -> tuple[float, float, float]:
    """``(Q without post-selection, Q with post-selection, F3)`` for a Werner source."""
    nu, eta = noise.nu, noise.eta_a
    return (1.0 - nu * eta) / 2.0, (1.0 - nu) / 2.0, eta * nu * SQRT3


def rate_1sdi_nonps(noise: NoiseParams) -> RateReport:
    q, _, f3 = observables_from_werner(noise)
    rep = rate_1sdi(q, f3)
    return RateReport(q=rep.q, f3=rep.f3, i_ab=rep.i_ab, chi_e=rep.chi_e, rate=rep.rate,
                      variant="1sdi_nonps", eta_a=noise.eta_a)


def rate_1sdi_postselected(q_ps: float, f3: float, eta_a: float) -> RateReport:
    """``eta (1 - h(Q_ps)) - chi(F3)``; ``f3`` must come from all rounds, nulls included."""
    q_ps = _check_prob(q_ps, "QBER", 0.5)
    eta_a = _check_prob(eta_a, "eta_a")
    i_ab = 1.0 - binary_entropy(q_ps)
    chi = eve_info_from_f3(f3)
    return RateReport(q=q_ps, f3=float(f3), i_ab=i_ab, chi_e=chi, rate=eta_a * i_ab - chi,
                      variant="1sdi_ps", eta_a=eta_a)


def rate_1sdi_ps(noise: NoiseParams) -> RateReport:
    _, q_ps, f3 = observables_from_werner(noise)
    return rate_1sdi_postselected(q_ps, f3, noise.eta_a)


def evaluate(variant: str, noise: NoiseParams) -> RateReport:
    """Rate of ``variant`` for a Werner source with the given noise.

    The DI and DD comparisons have no loss model here and need ``eta_a == 1``.
    """
    if variant == "1sdi":
        q, _, f3 = observables_from_werner(noise)
        return rate_1sdi(q, f3)
    if variant == "1sdi_nonps":
        return rate_1sdi_nonps(noise)
    if variant == "1sdi_ps":
        return rate_1sdi_ps(noise)
    if variant in ("di_chsh", "dd"):
        if noise.eta_a != 1.0:
            raise ValueError(f"variant {variant!r} is only defined for eta_a = 1")
        q = (1.0 - noise.nu) / 2.0
        return rate_dd(q) if variant == "dd" else rate_di_chsh(q, TSIRELSON * noise.nu)
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def werner_line_rate(variant: str, q: float) -> RateReport:
    """Rate along the depolarising line, parametrised by QBER."""
    q = _check_prob(q, "QBER", 0.5)
    if variant == "1sdi":
        return rate_1sdi(q, SQRT3 * (1 - 2 * q))
    if variant == "di_chsh":
        return rate_di_chsh(q, TSIRELSON * (1 - 2 * q))
    if variant == "dd":
        return rate_dd(q)
    raise ValueError(f"variant {variant!r} has no QBER-only Werner line")
