"""How fast does max(xi_1..xi_n) / sqrt(2 ln n) approach 1?

Slowly. The second-order centering b - (ln ln n + ln 4 pi) / (2 b) explains
most of the gap at every practical n.
"""

import numpy as np

from gaussian_hulls import gumbel_center, normalized_max_stat, normalizer_b

seeds = range(30)
print(f"{'n':>9} {'median':>8} {'centering':>10} {'q10':>7} {'q90':>7}")
for n in (10**2, 10**3, 10**4, 10**5, 10**6):
    stats = np.array([normalized_max_stat(n, s) for s in seeds])
    q10, med, q90 = np.percentile(stats, [10, 50, 90])
    print(f"{n:>9} {med:8.4f} {gumbel_center(n) / normalizer_b(n):10.4f} {q10:7.4f} {q90:7.4f}")

# the ratio b(n p) / b(n) is the price a class with density p pays
for p in (1 / 2, 1 / 8, 1 / 64):
    print(f"p = {p:.4f}: b(n p) / b(n) at n = 1e6 is {normalizer_b(1e6 * p) / normalizer_b(1e6):.4f}")
