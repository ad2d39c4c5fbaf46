"""
Monte Carlo run of the protocol
===============================

Sample rounds from the Born rule, estimate Q and F3 from the counts, and
compare with the closed-form values.
"""

import numpy as np

from steerqkd import keyrates
from steerqkd.keyrates import NoiseParams
from steerqkd.simulator import ProtocolConfig, run_protocol

cfg = ProtocolConfig(rounds=10**6, noise=NoiseParams(nu=0.9, eta_a=1.0), seed=42)
s = run_protocol(cfg)

q_exact, _, f3_exact = keyrates.observables_from_werner(cfg.noise)
print(f"key rounds   {s.n_key_rounds} of {s.rounds} ({100 * s.key_fraction:.1f}%)")
print(f"Q   {s.q_hat:.5f} +- {s.q_hat_stderr:.5f}   (exact {q_exact:.5f})")
print(f"F3  {s.f3_hat:.5f} +- {s.f3_hat_stderr:.5f}   (exact {f3_exact:.5f})")
print(f"rate from estimates {s.rate_hat:.4f}, closed form {keyrates.rate_1sdi(q_exact, f3_exact).rate:.4f}")

# Loss: the raw counts are shared, only the QBER convention changes.
lossy = dict(rounds=10**6, noise=NoiseParams(nu=0.98, eta_a=0.85), seed=7)
kept = run_protocol(ProtocolConfig(**lossy))
dropped = run_protocol(ProtocolConfig(**lossy, postselect=True))
print(f"\nnull -> -1 : Q = {kept.q_hat:.4f}, F3 = {kept.f3_hat:.4f}, r = {kept.rate_hat:.4f}")
print(f"post-select: Q = {dropped.q_hat:.4f}, F3 = {dropped.f3_hat:.4f}, r = {dropped.rate_hat:.4f}")

# Counts array: [x, y, a (+1, -1, null), b (+1, -1)]
print("\nkey-basis counts (rows a = +1, -1, null; columns b = +1, -1):")
print(np.array2string(kept.counts[2, 2]))
