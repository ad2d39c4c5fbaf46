"""Round-by-round Monte Carlo of the steering-based protocol.

Each round Alice and Bob pick inputs ``x, y`` in {1, 2, 3}, the source emits
a Werner state, Bob measures a Pauli observable and Alice's detector either
reports the ideal outcome or, with probability ``1 - eta``, a null. Rounds
with ``x = y = 3`` form the raw key; matched rounds ``x = y`` estimate F3.

Randomness is drawn per block of rounds from a Philox generator keyed by
``(seed, block index)``, so results do not depend on how blocks are spread
over workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import math
import warnings

import numpy as np

from . import keyrates
from .keyrates import NoiseParams, RateReport
from .noise import BinaryPovm, projective_povm, werner
from .quantum import expectation, pauli, tensor

BLOCK = 1 << 16
NULL = 0  # sentinel value of RoundRecord.a_raw

# outcome axes of the count array: a_raw index (+1, -1, null), b index (+1, -1)
A_VALUES = (1, -1, NULL)
B_VALUES = (1, -1)


def alice_povms() -> list[BinaryPovm]:
    """Alice's ideal protocol measurements (sx, -sy, sz)."""
    return [projective_povm(pauli("x")), projective_povm(-pauli("y")), projective_povm(pauli("z"))]


def bob_povms() -> list[BinaryPovm]:
    return [projective_povm(pauli(a)) for a in "xyz"]


@dataclass(frozen=True)
class ProtocolConfig:
    rounds: int
    noise: NoiseParams = field(default_factory=NoiseParams)
    setting_probs: tuple[tuple[float, float, float], tuple[float, float, float]] = (
        (1 / 3, 1 / 3, 1 / 3),
        (1 / 3, 1 / 3, 1 / 3),
    )
    postselect: bool = False
    seed: int = 42

    def __post_init__(self):
        if int(self.rounds) <= 0:
            raise ValueError("rounds must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        probs = np.asarray(self.setting_probs, dtype=float)
        if probs.shape != (2, 3) or (probs < 0).any() or np.max(np.abs(probs.sum(axis=1) - 1)) > 1e-12:
            raise ValueError("setting_probs must be two distributions over three inputs")


@dataclass(frozen=True)
class RoundRecord:
    x: int
    y: int
    a_raw: int  # +1, -1 or NULL (0)
    b: int

    @property
    def a_mapped(self) -> int:
        return -1 if self.a_raw == NULL else self.a_raw


@dataclass(frozen=True)
class SimStats:
    rounds: int
    n_key_rounds: int
    q_hat: float
    q_hat_stderr: float
    f3_hat: float
    f3_hat_stderr: float
    eta_hat: float
    rate_hat: float
    postselect: bool
    counts: np.ndarray = field(repr=False)  # int64, shape (3, 3, 3, 2): x, y, a_raw, b

    @property
    def key_fraction(self) -> float:
        return self.n_key_rounds / self.rounds


def born_table(rho: np.ndarray, alice: list[BinaryPovm], bob: list[BinaryPovm]) -> np.ndarray:
    """``P[x, y, a, b]`` for ideal outcomes, ``a, b`` indexed (+1, -1)."""
    table = np.empty((3, 3, 2, 2))
    for x, pa in enumerate(alice):
        for y, pb in enumerate(bob):
            for i, ea in enumerate((pa.e_plus, pa.e_minus)):
                for j, eb in enumerate((pb.e_plus, pb.e_minus)):
                    table[x, y, i, j] = expectation(rho, tensor(ea, eb))
    table = np.clip(table, 0.0, None)
    return table / table.sum(axis=(2, 3), keepdims=True)


def sample_round(rho: np.ndarray, x: int, y: int, rng: np.random.Generator, eta: float = 1.0,
                 alice: list[BinaryPovm] | None = None, bob: list[BinaryPovm] | None = None) -> RoundRecord:
    """Sample one round for inputs ``x, y`` in {1, 2, 3}.

    The ideal outcome pair is drawn from the Born rule, then Alice's result is
    erased to a null with probability ``1 - eta``.
    """
    pa = (alice or alice_povms())[x - 1]
    pb = (bob or bob_povms())[y - 1]
    table = np.array([expectation(rho, tensor(ea, eb))
                      for ea in (pa.e_plus, pa.e_minus) for eb in (pb.e_plus, pb.e_minus)])
    table = np.clip(table, 0.0, None)
    cell = int(rng.choice(4, p=table / table.sum()))
    a, b = (1, -1)[cell // 2], (1, -1)[cell % 2]
    if rng.random() >= eta:
        a = NULL
    return RoundRecord(x, y, a, b)


def _block_counts(seed: int, block: int, n: int, cum: np.ndarray, pa: np.ndarray,
                  pb: np.ndarray, eta: float) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(key=[seed, block]))
    x = rng.choice(3, size=n, p=pa)
    y = rng.choice(3, size=n, p=pb)
    u = rng.random(n)
    cell = (u[:, None] >= cum[x, y, :3]).sum(axis=1)
    a = cell // 2
    b = cell % 2
    a = np.where(rng.random(n) < eta, a, 2)
    flat = ((x * 3 + y) * 3 + a) * 2 + b
    return np.bincount(flat, minlength=54).astype(np.int64)


def simulate_counts(config: ProtocolConfig, workers: int | None = None) -> np.ndarray:
    """Outcome counts with shape (3, 3, 3, 2) indexed ``[x, y, a_raw, b]``."""
    table = born_table(werner(config.noise.nu), alice_povms(), bob_povms())
    cum = np.cumsum(table.reshape(3, 3, 4), axis=2)
    pa, pb = (np.asarray(p, dtype=float) for p in config.setting_probs)
    n_blocks = math.ceil(config.rounds / BLOCK)
    sizes = [min(BLOCK, config.rounds - k * BLOCK) for k in range(n_blocks)]
    args = [(int(config.seed), k, sizes[k], cum, pa, pb, config.noise.eta_a) for k in range(n_blocks)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _block_counts(*a), args))
    else:
        parts = [_block_counts(*a) for a in args]
    return np.sum(parts, axis=0).reshape(3, 3, 3, 2)


def _proportion(k: int, n: int) -> tuple[float, float]:
    """Point estimate ``k/n`` and a standard error that stays positive at 0 and 1."""
    p_reg = (k + 1) / (n + 2)
    return k / n, math.sqrt(p_reg * (1 - p_reg) / (n + 2))


def qber_from_counts(counts: np.ndarray, postselect: bool) -> tuple[float, float, int]:
    """QBER estimate, its standard error and the number of rounds it used."""
    key = counts[2, 2]  # a_raw x b
    if postselect:
        errors, n = key[0, 1] + key[1, 0], key[:2].sum()
    else:
        errors, n = key[0, 1] + key[1, 0] + key[2, 0], key.sum()
    if n < 2:
        raise ValueError("fewer than two usable key rounds; cannot estimate the QBER")
    q, se = _proportion(int(errors), int(n))
    return q, se, int(n)


def f3_from_counts(counts: np.ndarray) -> tuple[float, float]:
    """CJWR estimate from matched-input rounds, nulls counted as -1."""
    total, var = 0.0, 0.0
    for i in range(3):
        c = counts[i, i]
        n = int(c.sum())
        if n < 1:
            raise ValueError(f"no rounds with x = y = {i + 1}; cannot estimate F3")
        agree = int(c[0, 0] + c[1, 1] + c[2, 1])
        p_reg = (agree + 1) / (n + 2)
        total += 2 * agree / n - 1
        var += 4 * p_reg * (1 - p_reg) / (n + 2)
    return abs(total) / math.sqrt(3), math.sqrt(var / 3)


def _stats(counts: np.ndarray, rounds: int, postselect: bool) -> SimStats:
    n_key = int(counts[2, 2].sum())
    if n_key < 2:
        raise ValueError("fewer than two key rounds; cannot estimate the QBER")
    q, q_se, _ = qber_from_counts(counts, postselect)
    f3, f3_se = f3_from_counts(counts)
    eta_hat = float(counts[:, :, :2].sum() / counts.sum())
    stats = SimStats(rounds=rounds, n_key_rounds=n_key, q_hat=q, q_hat_stderr=q_se, f3_hat=f3,
                     f3_hat_stderr=f3_se, eta_hat=eta_hat, rate_hat=math.nan,
                     postselect=postselect, counts=counts)
    rate = empirical_rate(stats, "1sdi_ps" if postselect else "1sdi_nonps").rate
    return replace(stats, rate_hat=rate)


def run_protocol(config: ProtocolConfig, workers: int | None = None) -> SimStats:
    """Simulate ``config.rounds`` rounds and estimate Q, F3 and the key rate."""
    counts = simulate_counts(config, workers)
    return _stats(counts, int(config.rounds), config.postselect)


def empirical_rate(stats: SimStats, variant: str = "1sdi") -> RateReport:
    """Key rate from the estimates in ``stats``.

    ``1sdi`` uses ``stats.q_hat`` as estimated; ``1sdi_nonps`` and ``1sdi_ps``
    recompute the QBER from the counts under their own null convention.
    Estimates outside the physical range (F3 above sqrt(3), Q above 1/2) are
    clamped with a warning.
    """
    f3 = stats.f3_hat
    if f3 > keyrates.SQRT3 + keyrates.BOUND_TOL:
        warnings.warn(f"F3 estimate {f3:.6f} exceeds sqrt(3); clamping (statistical fluctuation)",
                      RuntimeWarning, stacklevel=2)
    f3 = min(f3, keyrates.SQRT3)
    if variant == "1sdi":
        q = stats.q_hat
    elif variant in ("1sdi_nonps", "1sdi_ps"):
        q = qber_from_counts(stats.counts, variant == "1sdi_ps")[0]
    else:
        raise ValueError(f"empirical rates exist for 1sdi variants only, not {variant!r}")
    if q > 0.5:
        warnings.warn(f"QBER estimate {q:.6f} exceeds 1/2; clamping", RuntimeWarning, stacklevel=2)
        q = 0.5
    if variant == "1sdi_ps":
        return keyrates.rate_1sdi_postselected(q, f3, stats.eta_hat)
    rep = keyrates.rate_1sdi(q, f3)
    return RateReport(q=rep.q, f3=rep.f3, i_ab=rep.i_ab, chi_e=rep.chi_e, rate=rep.rate, variant=variant)
