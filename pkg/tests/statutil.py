"""Bootstrap statistics used by the acceptance checks."""

import numpy as np


def bootstrap_median_diff(a, b, n_boot=2000, seed=0):
    """Median(b) - median(a) with the 95% bootstrap half-width of that gap."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    rng = np.random.default_rng(seed)
    diffs = np.empty(n_boot)
    for i in range(n_boot):
        diffs[i] = np.median(rng.choice(b, b.size)) - np.median(rng.choice(a, a.size))
    lo, hi = np.percentile(diffs, [2.5, 97.5])
    return float(np.median(b) - np.median(a)), float((hi - lo) / 2.0)
