"""Confidence intervals and seed derivation."""

from __future__ import annotations

import numpy as np
from scipy import special, stats

CONFIDENCE = 0.99


def normal_ci(mean, se, confidence=CONFIDENCE):
    z = float(special.ndtri(0.5 + confidence / 2.0))
    return mean - z * se, mean + z * se


def mean_ci(values, confidence=CONFIDENCE):
    """Sample mean, its standard error and a normal-approximation interval."""
    values = np.asarray(values, dtype=float)
    n = len(values)
    if n == 0:
        raise ValueError("no samples")
    mean = float(values.mean())
    se = float(values.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    lo, hi = normal_ci(mean, se, confidence)
    return mean, se, lo, hi


def clopper_pearson(k, n, confidence=CONFIDENCE):
    """Exact binomial interval for ``k`` successes out of ``n`` (vectorised over ``k``)."""
    k = np.asarray(k)
    a = (1.0 - confidence) / 2.0
    lo = np.where(k > 0, stats.beta.ppf(a, k, n - k + 1), 0.0)
    hi = np.where(k < n, stats.beta.ppf(1.0 - a, k + 1, n - k), 1.0)
    return lo, hi


def mix_seed(*parts) -> int:
    """Deterministically combine integers into a 63-bit seed."""
    ss = np.random.SeedSequence([int(p) & 0xFFFFFFFF for p in parts])
    lo, hi = (int(v) for v in ss.generate_state(2, dtype=np.uint32))
    return ((hi << 32) | lo) >> 1
