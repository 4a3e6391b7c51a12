"""Normalized hulls of i.i.d. N(0, sigma) samples approach the ellipsoid {x : x' sigma^-1 x <= 1}.

The support error is largest where the running maximum lags most, and it
shrinks like ln ln n / ln n.
"""

import numpy as np

from gaussian_hulls import Ellipsoid, ProbeSet, normalized_support, support_values
from gaussian_hulls.config import config_from_dict
from gaussian_hulls.runner import run_goodman

sigma = [[4.0, 1.0], [1.0, 1.0]]
cfg = config_from_dict({"mode": "goodman", "covariance": sigma, "seeds": list(range(8)),
                        "checkpoints": [10**3, 10**4, 10**5, 10**6]})
report = run_goodman(cfg, threads=4)

print("n, median sup error, median mean error")
for n in cfg.checkpoints:
    print(n, round(report.median("sup_error", n), 4), round(report.median("mean_abs_error", n), 4))

# per-probe view for one seed: the relative deficit varies by direction and can go negative
acc = report.accumulators[0]
h = support_values(Ellipsoid(sigma), ProbeSet.uniform(2, cfg.probes))
rel = 1 - normalized_support(acc) / h
print("relative deficit across probes: min %.4f  median %.4f  max %.4f" % (rel.min(), np.median(rel), rel.max()))
