"""Power shaping for on-off random access.

Users that are decoded first see interference from everyone behind them, so
giving them more power equalizes the SINR along the detection order. This
script prints the three profiles and the minimum SINR each one achieves.
"""

import math

from onoff_mud import constant_profile, exponential_profile, min_sinr, robust_profile

n, lam, snr_db = 100, 0.1, 20.0
snr = 10 ** (snr_db / 10)

profiles = {
    "constant": constant_profile(n, lam, snr),
    "exponential": exponential_profile(n, lam, snr),
    "robust (theta=0.1)": robust_profile(n, lam, snr, 0.1),
}

base = min_sinr(profiles["constant"])
print(f"n={n}  lambda={lam}  SNR={snr_db:g} dB\n")
print(f"{'profile':<20}{'first':>10}{'last':>10}{'min SINR':>12}{'gain':>8}")
for name, prof in profiles.items():
    p = prof.powers
    g = min_sinr(prof)
    print(f"{name:<20}{p[0]:>10.2f}{p[-1]:>10.3f}{g:>12.4f}{g / base:>8.2f}")

# The large-n limit of the gain has a closed form.
print(f"\nlarge-n gain (1+S)ln(1+S)/S = {(1 + snr) * math.log1p(snr) / snr:.3f}")
for big in (1000, 10_000):
    ratio = min_sinr(exponential_profile(big, lam, snr)) / min_sinr(constant_profile(big, lam, snr))
    print(f"  exact gain at n={big}: {ratio:.4f}")
