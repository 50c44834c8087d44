"""Conditional class probabilities h(x) = P(Y=1 | X=x), hard classifiers and noise convolution."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial import distance

from .engine1d import TIE_TOL, IntervalSet, StepFunction
from .noise import NEGLIGIBLE_TAIL, NoiseModel, _squeeze, as_points

DISJOINT_SLACK = 1e-9


def psi(value):
    """Hard threshold at one half; ties go to the positive class."""
    v = np.asarray(value, dtype=float)
    out = (v >= 0.5).astype(int)
    return int(out) if out.ndim == 0 else out


def _threshold(values):
    # Numerical values that land within TIE_TOL below 0.5 are treated as ties.
    return (np.asarray(values) >= 0.5 - TIE_TOL).astype(int)


# ---------------------------------------------------------------------------
# conditionals


@dataclass(frozen=True, eq=False)
class BallUnionConditional:
    """h = 0.5 + tau on a union of disjoint closed balls, 0 elsewhere."""

    centers: np.ndarray
    radii: np.ndarray
    tau: float

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        r = np.atleast_1d(np.asarray(self.radii, dtype=float))
        if c.shape[0] != r.shape[0] or c.shape[0] == 0:
            raise ValueError("need one radius per centre and at least one ball")
        if np.any(r <= 0):
            raise ValueError("radii must be positive")
        if not 0 <= self.tau < 0.5:
            raise ValueError(f"tau must lie in [0, 0.5), got {self.tau}")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "tau", float(self.tau))
        if len(r) > 1 and np.min(self.pairwise_gaps()) < DISJOINT_SLACK:
            raise ValueError("balls must be pairwise disjoint")

    @property
    def dim(self):
        return self.centers.shape[1]

    @property
    def n_balls(self):
        return len(self.radii)

    @property
    def level(self):
        return 0.5 + self.tau

    def pairwise_gaps(self):
        """Gaps ||c_i - c_j|| - r_i - r_j for i < j."""
        i, j = np.triu_indices(self.n_balls, k=1)
        d = np.linalg.norm(self.centers[i] - self.centers[j], axis=1)
        return d - self.radii[i] - self.radii[j]

    def contains(self, x):
        pts, single = as_points(x, self.dim)
        inside = np.zeros(len(pts), dtype=bool)
        for c, r in zip(self.centers, self.radii):
            inside |= np.sum((pts - c) ** 2, axis=1) <= r * r
        return bool(inside[0]) if single else inside

    def __call__(self, x):
        inside = np.asarray(self.contains(x))
        vals = np.where(inside, self.level, 0.0)
        return float(vals) if vals.ndim == 0 else vals

    def to_piecewise(self, lo=None, hi=None):
        """The same conditional as a :class:`Piecewise1DConditional` (1D only)."""
        if self.dim != 1:
            raise ValueError("only one-dimensional ball unions are piecewise 1D")
        iv = IntervalSet.from_pairs((c - r, c + r) for c, r in zip(self.centers[:, 0], self.radii))
        step = iv.to_step()
        bps, vals = step.breakpoints, step.values * self.level
        lo = bps[0] if lo is None else min(lo, bps[0])
        hi = bps[-1] if hi is None else max(hi, bps[-1])
        if lo < bps[0]:
            bps, vals = np.concatenate([[lo], bps]), np.concatenate([[0.0], vals])
        if hi > bps[-1]:
            bps, vals = np.concatenate([bps, [hi]]), np.concatenate([vals, [0.0]])
        return Piecewise1DConditional(bps, vals)


def lower_interference_distance(c: BallUnionConditional):
    if c.n_balls < 2:
        raise ValueError("interference distance needs at least two partitions")
    return float(np.min(c.pairwise_gaps()))


def upper_interference_distance(c: BallUnionConditional):
    if c.n_balls < 2:
        raise ValueError("interference distance needs at least two partitions")
    return float(np.max(c.pairwise_gaps()))


@dataclass(frozen=True, eq=False)
class Piecewise1DConditional:
    """Piecewise-constant h on ``[b_0, b_n]``; values at breakpoints follow the larger neighbour."""

    breakpoints: np.ndarray
    values: np.ndarray
    step: StepFunction = field(init=False, repr=False)

    def __post_init__(self):
        step = StepFunction(self.breakpoints, self.values)
        if np.any(step.values < 0) or np.any(step.values > 1):
            raise ValueError("conditional values must lie in [0, 1]")
        object.__setattr__(self, "breakpoints", step.breakpoints)
        object.__setattr__(self, "values", step.values)
        object.__setattr__(self, "step", step)

    dim = 1

    @property
    def domain(self):
        return self.step.support

    def __call__(self, x):
        return self.step(x)

    def positive_set(self):
        return self.step.superlevel(0.5)

    def positive_gaps(self):
        return self.positive_set().gaps()


def piecewise_interference(h: Piecewise1DConditional):
    """(lower, upper) interference distances between positive intervals of psi(h)."""
    gaps = h.positive_gaps()
    if len(gaps) == 0:
        raise ValueError("interference distance needs at least two partitions")
    return float(gaps.min()), float(gaps.max())


# ---------------------------------------------------------------------------
# hard classifiers


class HardClassifier:
    """Deterministic map from points to labels in {0, 1}."""

    dim: int

    def predict(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        pts, single = as_points(x, self.dim)
        out = np.asarray(self.predict(pts), dtype=int)
        return int(out[0]) if single else out


@dataclass(frozen=True, eq=False)
class ConstantClassifier(HardClassifier):
    label: int
    dim: int = 1

    def predict(self, pts):
        return np.full(len(pts), int(self.label))


@dataclass(frozen=True, eq=False)
class BallUnionClassifier(HardClassifier):
    """Indicator of a union of disjoint closed balls; zero-radius entries mark vanished balls."""

    centers: np.ndarray
    radii: np.ndarray
    vanished: np.ndarray | None = None

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        r = np.atleast_1d(np.asarray(self.radii, dtype=float))
        v = np.zeros(len(r), dtype=bool) if self.vanished is None else np.asarray(self.vanished, bool)
        r = np.where(v, 0.0, r)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "vanished", v)

    @property
    def dim(self):
        return self.centers.shape[1]

    @property
    def active(self):
        return ~self.vanished

    def predict(self, pts):
        inside = np.zeros(len(pts), dtype=bool)
        for c, r in zip(self.centers[self.active], self.radii[self.active]):
            inside |= np.sum((pts - c) ** 2, axis=1) <= r * r
        return inside.astype(int)

    def to_intervals(self):
        if self.dim != 1:
            raise ValueError("only one-dimensional ball unions are interval sets")
        a = self.active
        return IntervalSet.from_pairs(
            (c - r, c + r) for c, r in zip(self.centers[a, 0], self.radii[a])
        )


@dataclass(frozen=True, eq=False)
class IntervalClassifier(HardClassifier):
    """Indicator of a finite union of closed intervals on the line."""

    intervals: IntervalSet
    dim: int = 1

    def predict(self, pts):
        return self.intervals.contains(pts[:, 0]).astype(int)


@dataclass(frozen=True, eq=False)
class ThresholdClassifier(HardClassifier):
    """psi applied to an arbitrary conditional evaluator."""

    conditional: Callable
    dim: int

    def predict(self, pts):
        x = pts[:, 0] if self.dim == 1 else pts
        return _threshold(self.conditional(x))


def hard(h) -> HardClassifier:
    """The base classifier psi(h) in its most structured available form."""
    if isinstance(h, BallUnionConditional):
        return BallUnionClassifier(h.centers, h.radii)
    if isinstance(h, Piecewise1DConditional):
        return IntervalClassifier(h.positive_set())
    return ThresholdClassifier(h, getattr(h, "dim", 1))


# ---------------------------------------------------------------------------
# perturbed conditionals


@dataclass(frozen=True, eq=False)
class PerturbedClassifier:
    """g = clip(base + eta * tanh(bump mixture), 0, 1), a seeded member of the eta-band around ``base``.

    ``domain`` is a pair ``(lo, hi)`` of corner points used to place the bumps.
    """

    base: Callable
    eta: float
    seed: int
    domain: tuple
    dim: int = 1
    n_bumps: int = 8

    def __post_init__(self):
        if not 0 <= self.eta < 0.5:
            raise ValueError("eta must lie in [0, 0.5)")
        rng = np.random.default_rng(self.seed)
        lo = np.broadcast_to(np.asarray(self.domain[0], dtype=float), (self.dim,))
        hi = np.broadcast_to(np.asarray(self.domain[1], dtype=float), (self.dim,))
        width = float(np.max(hi - lo))
        object.__setattr__(self, "_offset", rng.normal(0.0, 1.0))
        object.__setattr__(self, "_centres", lo + (hi - lo) * rng.random((self.n_bumps, self.dim)))
        object.__setattr__(self, "_amps", rng.normal(0.0, 2.0, self.n_bumps))
        object.__setattr__(self, "_widths", width * rng.uniform(0.02, 0.2, self.n_bumps))

    def perturbation(self, x):
        pts, single = as_points(x, self.dim)
        z = np.full(len(pts), self._offset)
        for c, a, s in zip(self._centres, self._amps, self._widths):
            z += a * np.exp(-np.sum((pts - c) ** 2, axis=1) / (2 * s * s))
        return _squeeze(self.eta * np.tanh(z), single)

    def __call__(self, x):
        pts, single = as_points(x, self.dim)
        base = np.asarray(self.base(pts[:, 0] if self.dim == 1 else pts), dtype=float)
        return _squeeze(np.clip(base + self.perturbation(pts), 0.0, 1.0), single)


# ---------------------------------------------------------------------------
# convolution with noise


@dataclass(frozen=True, eq=False)
class ConvolvedConditional:
    """Evaluator of (h * p)(x); ``exact`` tells whether values come from a closed form."""

    fn: Callable
    dim: int
    exact: bool

    def __call__(self, x):
        pts, single = as_points(x, self.dim)
        return _squeeze(np.clip(np.asarray(self.fn(pts), dtype=float), 0.0, 1.0), single)


def ball_union_convolution(h: BallUnionConditional, noise: NoiseModel):
    """Exact (h * p)(x) for a ball union: a sum of per-ball shifted CDFs, by linearity."""
    reach = noise.support_radius(NEGLIGIBLE_TAIL)
    profiles = [noise.radial_profile(r) for r in h.radii]

    def fn(pts):
        out = np.zeros(len(pts))
        dist = np.sqrt(distance.cdist(pts, h.centers, "sqeuclidean"))
        for j, prof in enumerate(profiles):
            near = dist[:, j] <= h.radii[j] + reach
            if np.any(near):
                out[near] += prof(dist[near, j])
        return h.level * out

    return fn


def soft_convolve(h, noise: NoiseModel | None, mc_samples=4096, seed=0):
    """Return an evaluator of (h * p_noise).

    Ball unions and piecewise-constant 1D conditionals are convolved exactly; any other
    callable conditional is averaged over ``mc_samples`` shared noise draws.
    """
    dim = getattr(h, "dim", 1)
    if noise is None:
        return ConvolvedConditional(lambda pts: h(pts[:, 0] if dim == 1 else pts), dim, True)
    if noise.dim != dim:
        raise ValueError(f"noise dimension {noise.dim} does not match conditional dimension {dim}")
    if isinstance(h, BallUnionConditional):
        return ConvolvedConditional(ball_union_convolution(h, noise), dim, True)
    if isinstance(h, Piecewise1DConditional):
        g = h.step.convolve(noise)
        return ConvolvedConditional(lambda pts: g(pts[:, 0]), 1, True)
    bank = noise.sample(seed, mc_samples)

    def fn(pts):
        out = np.empty(len(pts))
        for i, p in enumerate(pts):
            y = p + bank
            out[i] = np.mean(h(y[:, 0] if dim == 1 else y))
        return out

    return ConvolvedConditional(fn, dim, False)


__all__ = [
    "psi", "BallUnionConditional", "Piecewise1DConditional", "PerturbedClassifier",
    "HardClassifier", "ConstantClassifier", "BallUnionClassifier", "IntervalClassifier",
    "ThresholdClassifier", "ConvolvedConditional", "hard", "soft_convolve",
    "lower_interference_distance", "upper_interference_distance", "piecewise_interference",
]
