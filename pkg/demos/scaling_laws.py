"""How many measurements each detector needs, according to the scaling laws.

Also shows the sum-rate to capacity ratio as the number of users grows.
"""

from onoff_mud import bounds

snr = bounds.db_to_linear(20.0)
for n in (100, 1000, 10_000):
    print(f"n={n}, lambda=0.1, SNR=20 dB")
    for law, full, leading in bounds.table_rows(n, 0.1, snr):
        print(f"  {law:<15} {full:12.1f}   leading term {leading:12.1f}")

print("\nR/C with k=10 expected active users (m from shaped SeqOMP)")
for n in (1e3, 1e4, 1e5, 1e6):
    m = bounds.seqomp_shaped_m(n, 10 / n, snr)
    rate, cap, ratio = bounds.sum_rate_ratio(n, 10 / n, snr, m)
    print(f"  n={n:>9.0f}  m={m:8.1f}  R/C={ratio:.3f}")
