"""
Key rates along the depolarising line
=====================================

Three security models compared on the same noisy source: trusted devices
on both sides, only Bob trusted (steering certified), and no trusted
devices (CHSH certified).
"""

import numpy as np

from steerqkd import keyrates, thresholds

# A Werner source with visibility nu gives QBER (1 - nu)/2 in the key basis.
# Along that line the steering value is sqrt(3)(1 - 2Q) and CHSH is 2sqrt(2)(1 - 2Q).
qs = np.round(np.arange(0.0, 0.121, 0.01), 12)

print(f"{'Q':>6} {'dd':>9} {'1sdi':>9} {'di_chsh':>9}")
for q in qs:
    row = [keyrates.werner_line_rate(v, q).rate for v in ("dd", "1sdi", "di_chsh")]
    print(f"{q:6.3f} " + " ".join(f"{r:9.4f}" for r in row))

# Trusting fewer devices costs key: the rates are ordered at every Q.
# Where each one reaches zero:
for v in ("di_chsh", "1sdi", "dd"):
    res = thresholds.critical_qber(v)
    print(f"{v:>8}: critical QBER {100 * res.critical:.2f}%  ({res.iterations} bisection steps)")

# The steering-certified rate splits into Alice-Bob information and Eve's bound.
rep = keyrates.rate_1sdi(0.05, 1.5588)
print(f"\nQ = 0.05, F3 = 1.5588: I_AB = {rep.i_ab:.4f}, chi_E = {rep.chi_e:.4f}, r = {rep.rate:.4f}")

# Eve's bound depends only on the observed steering value and vanishes at sqrt(3).
for f3 in (1.0, 1.2, 1.5, 1.7, np.sqrt(3)):
    print(f"F3 = {f3:.4f}  ->  Eve bound {keyrates.eve_info_from_f3(f3):.4f}")
