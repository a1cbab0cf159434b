"""Calibrating the detection threshold.

An idle user's normalized correlation with the residual does not depend on
what the residual is, so its law is known exactly and the threshold can be
set for a target false-alarm rate before any data arrive.
"""

import numpy as np

from onoff_mud import Bernoulli, NullModel, constant_profile, draw_instance, generate_codebook, sud_detect
from onoff_mud.calibration import null_tail, threshold_from_pfa

m, n = 128, 100
print("threshold for pfa=1e-3 at m=128")
print("  exponential rule:", threshold_from_pfa(1e-3, m))
print("  exact Beta tail: ", threshold_from_pfa(1e-3, m, mode="exact"))

print("\n mu      exact tail   exp(-mu m)")
for mu in (0.01, 0.03, 0.05, 0.1):
    print(f"{mu:5.2f}  {null_tail(mu, m):11.3e}  {null_tail(mu, m, 'approx'):11.3e}")

# Empirical check: idle-user statistics against the model CDF.
prof = constant_profile(n, 0.1, 100.0)
rho = []
for seed in range(60):
    a = generate_codebook(m, n, seed)
    inst = draw_instance(a, Bernoulli(prof), True, 1000 + seed)
    idle = np.setdiff1d(np.arange(n), inst.true_active)
    rho.extend(sud_detect(inst.y, a, 1.0).statistics[idle])
rho = np.sort(rho)
model = NullModel(m)
ecdf = np.arange(1, rho.size + 1) / rho.size
worst = max(abs(model.cdf(r) - e) for r, e in zip(rho, ecdf))
print(f"\n{rho.size} idle samples, max |ECDF - CDF| = {worst:.4f}")
