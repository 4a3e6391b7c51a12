"""Tail bounds that make the Borel-Cantelli argument work, and the class schedule.

The bound C(gamma) n^(-2 gamma (1+eps)^2) is summable once
gamma (1+eps)^2 > 1/2. The exact tail is always smaller.
"""

import numpy as np

from gaussian_hulls import class_labels, max_discrepancy_trace
from gaussian_hulls.analysis import bound_tail_integral, summability_threshold, tail_partial_sums

for eps in (0.05, 0.1, 0.2):
    print(f"eps = {eps}: need gamma > {summability_threshold(eps):.4f}")
    for gamma in (0.45, 0.49):
        if gamma <= summability_threshold(eps):
            continue
        exact, bound = tail_partial_sums(10**5, eps, gamma)
        print(f"  gamma {gamma}: bound sum to 1e5 = {bound[-1]:.3f}, remainder <= "
              f"{bound_tail_integral(10**5, eps, gamma):.3f}; exact sum = {exact[-1]:.4f}")

# the largest-deficit schedule keeps every class within one sample of n p_k
p = np.array([0.5, 0.3, 0.2])
labels = class_labels(p, 20)
print("first twenty classes:", (labels + 1).tolist())
print("worst discrepancy up to 1e6:", max_discrepancy_trace(class_labels(p, 10**6), p).max())
