"""Critical noise and efficiency values by bisection, plus parameter sweeps."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
from typing import Callable, Sequence

import numpy as np

from . import keyrates
from .keyrates import NoiseParams, RateReport

MAX_GRID = 10**6


class ThresholdError(RuntimeError):
    """The rate has no sign change on the search bracket."""


class NoKeyPossible(ThresholdError):
    """The rate is non-positive on the whole efficiency bracket."""


@dataclass(frozen=True)
class ThresholdResult:
    variable: str
    critical: float
    bracket: tuple[float, float]
    iterations: int
    residual: float


def bisect(f: Callable[[float], float], lo: float, hi: float, *, xtol: float = 1e-8,
           ftol: float = 1e-9, max_iter: int = 100) -> tuple[float, float, float, int, float]:
    """Plain bisection for a root of ``f`` with ``f(lo) > 0 >= f(hi)`` or the reverse.

    Stops once the bracket is narrower than ``xtol`` and ``|f(mid)| <= ftol``.
    Returns ``(root, lo, hi, iterations, |f(root)|)``.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo, lo, lo, 0, 0.0
    if fhi == 0:
        return hi, hi, hi, 0, 0.0
    if np.sign(flo) == np.sign(fhi):
        raise ThresholdError(f"no sign change on [{lo}, {hi}]: f = {flo:.3e}, {fhi:.3e}")
    mid, fmid = 0.5 * (lo + hi), f(0.5 * (lo + hi))
    it = 0
    while it < max_iter and (hi - lo > xtol or abs(fmid) > ftol):
        it += 1
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0:
            break
    return mid, lo, hi, it, abs(fmid)


def critical_qber(variant: str = "1sdi") -> ThresholdResult:
    """QBER at which the Werner-line rate of ``variant`` reaches zero."""
    if variant not in ("1sdi", "di_chsh", "dd"):
        raise ValueError(f"critical_qber supports 1sdi, di_chsh and dd, not {variant!r}")

    def rate(q):
        return keyrates.werner_line_rate(variant, q).rate

    root, lo, hi, it, res = bisect(rate, 0.0, 0.5)
    check = np.linspace(0.0, lo, 201)[:-1]
    if not all(rate(q) > 0 for q in check):
        raise ThresholdError(f"{variant}: rate is not positive below the root {root}")
    return ThresholdResult("q", root, (lo, hi), it, res)


def critical_eta(nu: float = 1.0, strategy: str = "ps") -> ThresholdResult:
    """Smallest detection efficiency of Alice giving a positive 1sDI rate.

    ``strategy`` is ``"ps"`` (QBER post-selected on clicks) or ``"nonps"``.
    Raises :class:`NoKeyPossible` when even ``eta = 1`` gives no key.
    """
    if strategy not in ("ps", "nonps"):
        raise ValueError("strategy must be 'ps' or 'nonps'")
    if not 0.0 < nu <= 1.0:
        raise ValueError(f"visibility must lie in (0, 1], got {nu}")
    fn = keyrates.rate_1sdi_ps if strategy == "ps" else keyrates.rate_1sdi_nonps

    def rate(eta):
        return fn(NoiseParams(nu=nu, eta_a=eta)).rate

    lo = 1.0 / math.sqrt(3.0)
    if rate(1.0) <= 0:
        raise NoKeyPossible(f"no key possible at visibility {nu} ({strategy})")
    root, lo, hi, it, res = bisect(rate, lo, 1.0)
    return ThresholdResult("eta", root, (lo, hi), it, res)


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    step: float
    fixed: NoiseParams = field(default_factory=NoiseParams)
    variants: tuple[str, ...] = ("dd", "1sdi", "di_chsh")

    def __post_init__(self):
        if self.variable not in ("q", "nu", "eta"):
            raise ValueError(f"sweep variable must be q, nu or eta, not {self.variable!r}")
        if not self.start < self.stop:
            raise ValueError("sweep needs start < stop")
        if not self.step > 0:
            raise ValueError("sweep step must be positive")
        if (self.stop - self.start) / self.step + 1 > MAX_GRID:
            raise ValueError(f"sweep grid exceeds {MAX_GRID} points")
        bad = set(self.variants) - set(keyrates.VARIANTS)
        if bad or not self.variants:
            raise ValueError(f"unknown variants {sorted(bad)}")
        if self.variable == "q" and self.fixed.eta_a != 1.0:
            raise ValueError("QBER sweeps follow the lossless Werner line (eta_a = 1)")

    def grid(self) -> np.ndarray:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        # rounding keeps grid values stable across platforms (0.1 + 0.2 noise)
        return np.round(self.start + self.step * np.arange(n), 12)


def _point(spec: SweepSpec, x: float) -> list[RateReport]:
    if spec.variable == "q":
        return [keyrates.werner_line_rate(v, x) for v in spec.variants]
    if spec.variable == "nu":
        noise = NoiseParams(nu=x, eta_a=spec.fixed.eta_a)
    else:
        noise = NoiseParams(nu=spec.fixed.nu, eta_a=x)
    return [keyrates.evaluate(v, noise) for v in spec.variants]


def sweep(spec: SweepSpec, workers: int | None = None) -> list[tuple[float, RateReport]]:
    """Evaluate every variant at every grid point.

    Returns ``(x, report)`` pairs in grid order, variants in ``spec.variants``
    order within each point. ``workers > 1`` evaluates points in a thread pool;
    the row order is the same either way.
    """
    xs = spec.grid()
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_point = list(pool.map(lambda x: _point(spec, float(x)), xs))
    else:
        per_point = [_point(spec, float(x)) for x in xs]
    return [(float(x), rep) for x, reps in zip(xs, per_point) for rep in reps]


def eta_threshold_table(nus: Sequence[float]) -> list[tuple[float, float | None, float | None]]:
    """``(nu, eta_nonps, eta_ps)`` rows; ``None`` where no key is possible."""
    rows = []
    for nu in nus:
        vals = []
        for strategy in ("nonps", "ps"):
            try:
                vals.append(critical_eta(float(nu), strategy).critical)
            except NoKeyPossible:
                vals.append(None)
        rows.append((float(nu), *vals))
    return rows


def zero_crossings(xs: Sequence[float], rates: Sequence[float]) -> list[float]:
    """Grid points just after each sign change from positive to non-positive."""
    return [xs[i] for i in range(1, len(xs)) if rates[i - 1] > 0 >= rates[i]]
