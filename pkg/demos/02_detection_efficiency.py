"""
Lossy detectors on the untrusted side
=====================================

Alice's detector clicks with probability eta. A no-click can be reported
as -1 (kept in the key) or the round can be dropped from the key
(post-selection). Eve's bound always uses every round.
"""

import numpy as np

from steerqkd import thresholds
from steerqkd.keyrates import NoiseParams, rate_1sdi_nonps, rate_1sdi_ps

# With a perfect source, how good must the detector be?
for strategy in ("nonps", "ps"):
    res = thresholds.critical_eta(1.0, strategy)
    print(f"{strategy:>5}: eta must exceed {100 * res.critical:.2f}%")

# Rates just above threshold: post-selection keeps the QBER at zero,
# so it tolerates more loss.
print(f"\n{'eta':>6} {'nonps':>9} {'ps':>9}")
for eta in np.round(np.arange(0.72, 1.001, 0.02), 12):
    noise = NoiseParams(nu=1.0, eta_a=eta)
    print(f"{eta:6.2f} {rate_1sdi_nonps(noise).rate:9.4f} {rate_1sdi_ps(noise).rate:9.4f}")

# A noisier source needs a better detector; below some visibility no key exists at all.
print(f"\n{'nu':>6} {'eta_nonps':>10} {'eta_ps':>10}")
for nu, nonps, ps in thresholds.eta_threshold_table(np.round(np.arange(0.82, 1.001, 0.02), 12)):
    cell = lambda x: f"{x:10.4f}" if x is not None else f"{'none':>10}"
    print(f"{nu:6.2f} {cell(nonps)} {cell(ps)}")
