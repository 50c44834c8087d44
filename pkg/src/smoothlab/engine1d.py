"""Exact one-dimensional engine for piecewise-constant functions.

A :class:`StepFunction` is zero outside ``[b_0, b_n]``; at a breakpoint it takes the larger
of the two adjacent values, so superlevel sets are closed.  Convolving a step function
with a 1D noise law gives a closed form built from the noise CDF; for uniform noise the
result is piecewise linear and its superlevel sets are found exactly, for Gaussian noise
they are bracketed on a fine grid and refined with Brent's method.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .noise import Family, NoiseModel

# Values within this distance of the threshold count as reaching it.
TIE_TOL = 1e-12
_MERGE_TOL = 1e-12
_GAUSS_GRID_PER_SCALE = 25


@dataclass(frozen=True, eq=False)
class IntervalSet:
    """A finite union of closed intervals, stored sorted and non-overlapping."""

    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def from_pairs(cls, pairs):
        pairs = sorted((float(a), float(b)) for a, b in pairs)
        merged = []
        for a, b in pairs:
            if b < a:
                raise ValueError(f"empty interval [{a}, {b}]")
            if merged and a <= merged[-1][1] + _MERGE_TOL:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        lo = np.array([m[0] for m in merged], dtype=float)
        hi = np.array([m[1] for m in merged], dtype=float)
        return cls(lo, hi)

    @classmethod
    def empty(cls):
        return cls(np.zeros(0), np.zeros(0))

    def __len__(self):
        return len(self.lo)

    def __iter__(self):
        return iter(zip(self.lo.tolist(), self.hi.tolist()))

    @property
    def measure(self):
        return float(np.sum(self.hi - self.lo))

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        if len(self) == 0:
            return np.zeros(x.shape, dtype=bool)
        k = np.searchsorted(self.lo, x, side="right") - 1
        kk = np.clip(k, 0, len(self) - 1)
        return (k >= 0) & (x <= self.hi[kk])

    def to_step(self):
        """Indicator of the set as a :class:`StepFunction`."""
        if len(self) == 0:
            return StepFunction(np.array([0.0, 1.0]), np.array([0.0]))
        bps, vals = [self.lo[0]], []
        for i in range(len(self)):
            if self.hi[i] > bps[-1]:
                bps.append(self.hi[i])
                vals.append(1.0)
            if i + 1 < len(self):
                bps.append(self.lo[i + 1])
                vals.append(0.0)
        if len(bps) == 1:  # a single degenerate point carries no mass
            return StepFunction(np.array([bps[0], bps[0] + 1.0]), np.array([0.0]))
        return StepFunction(np.array(bps), np.array(vals))

    def gaps(self):
        """Distances between consecutive intervals."""
        return self.lo[1:] - self.hi[:-1]

    def intersect_measure(self, lo, hi):
        return float(np.sum(np.clip(np.minimum(self.hi, hi) - np.maximum(self.lo, lo), 0.0, None)))


@dataclass(frozen=True, eq=False)
class StepFunction:
    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.ndim != 1 or v.ndim != 1 or len(b) != len(v) + 1 or len(v) == 0:
            raise ValueError("need n+1 breakpoints for n values")
        if np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        b, v = self.breakpoints, self.values
        padded = np.concatenate([[0.0], v, [0.0]])
        right = padded[np.searchsorted(b, x, side="right")]
        left = padded[np.searchsorted(b, x, side="left")]
        return np.maximum(left, right)

    @property
    def support(self):
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    def superlevel(self, level=0.5):
        """Closed set where the function is >= ``level`` (``level`` > 0)."""
        keep = self.values >= level - TIE_TOL
        pairs = [(self.breakpoints[i], self.breakpoints[i + 1]) for i in np.flatnonzero(keep)]
        return IntervalSet.from_pairs(pairs)

    def convolve(self, noise: NoiseModel):
        """Return an exact evaluator of (f * p_noise)(x)."""
        if noise.dim != 1:
            raise ValueError("1D engine needs one-dimensional noise")
        b, v = self.breakpoints, self.values
        cdf = _noise_cdf_1d(noise)

        def evaluate(x):
            x = np.asarray(x, dtype=float)
            u = x[..., None] - b
            F = cdf(u)
            return np.clip(np.sum(v * (F[..., :-1] - F[..., 1:]), axis=-1), 0.0, 1.0)

        return evaluate

    def smoothed_superlevel(self, noise: NoiseModel, level=0.5):
        """Closed set where (f * p_noise) >= ``level``."""
        g = self.convolve(noise)
        target = level - TIE_TOL
        th = noise.scale
        if noise.family is Family.UNIFORM:
            knots = np.unique(np.concatenate([self.breakpoints - th, self.breakpoints + th]))
            gk = g(knots)
            pairs = []
            for a, bb, ga, gb in zip(knots[:-1], knots[1:], gk[:-1], gk[1:]):
                if ga >= target and gb >= target:
                    pairs.append((a, bb))
                elif ga >= target:
                    pairs.append((a, a + (target - ga) / (gb - ga) * (bb - a)))
                elif gb >= target:
                    pairs.append((a + (target - ga) / (gb - ga) * (bb - a), bb))
            return IntervalSet.from_pairs(pairs)
        reach = noise.support_radius()
        lo, hi = self.support
        n = int(np.ceil((hi - lo + 2 * reach) / th * _GAUSS_GRID_PER_SCALE)) + 1
        grid = np.unique(np.concatenate([np.linspace(lo - reach, hi + reach, n), self.breakpoints]))
        above = g(grid) >= target
        f = lambda x: float(g(x)) - target  # noqa: E731
        pairs, start = [], None
        for i in range(len(grid)):
            if above[i] and start is None:
                start = grid[i] if i == 0 else optimize.brentq(f, grid[i - 1], grid[i], xtol=1e-14)
            if not above[i] and start is not None:
                pairs.append((start, optimize.brentq(f, grid[i - 1], grid[i], xtol=1e-14)))
                start = None
        if start is not None:
            pairs.append((start, grid[-1]))
        return IntervalSet.from_pairs(pairs)


def _noise_cdf_1d(noise):
    th = noise.scale
    if noise.family is Family.UNIFORM:
        return lambda u: np.clip((u + th) / (2.0 * th), 0.0, 1.0)
    return lambda u: special.ndtr(u / th)


def integrate_product(*fns: StepFunction):
    """Exact integral of a product of step functions over the real line."""
    bps = np.unique(np.concatenate([f.breakpoints for f in fns]))
    mids = 0.5 * (bps[:-1] + bps[1:])
    prod = np.ones_like(mids)
    for f in fns:
        prod = prod * _piece_values(f, mids)
    return float(np.sum(prod * np.diff(bps)))


def _piece_values(f, x):
    padded = np.concatenate([[0.0], f.values, [0.0]])
    return padded[np.searchsorted(f.breakpoints, x, side="right")]


def step_sum(fns, weights=None):
    """Pointwise weighted sum of step functions (evaluated on the merged breakpoint grid)."""
    weights = np.ones(len(fns)) if weights is None else np.asarray(weights, dtype=float)
    bps = np.unique(np.concatenate([f.breakpoints for f in fns]))
    mids = 0.5 * (bps[:-1] + bps[1:])
    vals = sum(w * _piece_values(f, mids) for f, w in zip(fns, weights))
    return StepFunction(bps, vals)


def one_minus(f: StepFunction, lo, hi):
    """1 - f restricted to [lo, hi] (zero outside), as a step function."""
    bps = np.unique(np.concatenate([[lo, hi], f.breakpoints[(f.breakpoints > lo) & (f.breakpoints < hi)]]))
    mids = 0.5 * (bps[:-1] + bps[1:])
    return StepFunction(bps, 1.0 - _piece_values(f, mids))
