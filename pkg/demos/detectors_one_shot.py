"""Run every detector on a single noisy channel use and compare supports."""

import numpy as np

from onoff_mud import (
    Bernoulli,
    draw_instance,
    generate_codebook,
    lasso_detect,
    ml_detect,
    omp_detect,
    robust_profile,
    seqomp_detect,
    sud_detect,
    threshold_from_pfa,
)

n, m, lam, snr = 100, 110, 0.1, 100.0
prof = robust_profile(n, lam, snr, 0.1)
a = generate_codebook(m, n, seed=4)
inst = draw_instance(a, Bernoulli(prof), noise_on=True, seed=5)
truth = set(inst.true_active.tolist())
mu = threshold_from_pfa(1e-3, m)

print(f"{len(truth)} active users out of {n}, m={m}, threshold mu={mu:.4f}")
print("true support:", sorted(truth))

runs = {
    "SUD": sud_detect(inst.y, a, mu),
    # users come in descending power, so natural order is already the best order
    "SeqOMP": seqomp_detect(inst.y, a, mu),
    "OMP": omp_detect(inst.y, a, threshold=mu),
    "lasso": lasso_detect(inst.y, a, 2 * np.sqrt(-np.log(1e-3) / m)),
}
for name, res in runs.items():
    found = res.active_set
    print(f"{name:>7}: missed {len(truth - found):2d}  false {len(found - truth):2d}")

# Exhaustive search is only feasible on tiny problems.
small = generate_codebook(6, 12, seed=1)
x = np.zeros(12, complex)
x[[3, 8]] = [1.5, -2j]
res = ml_detect(small @ x, small, 2)
print("\nML on a 12-user noiseless toy problem:", sorted(res.active_set))
