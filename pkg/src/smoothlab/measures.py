"""Marginal data distributions p_X and exact region masses."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _special
from .engine1d import IntervalSet, StepFunction
from .noise import MonteCarloFallbackWarning

_MC_MASS_SAMPLES = 1_000_000
_CONTAIN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, dtype=float)))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius < 0:
            raise ValueError("radius must be non-negative")

    @property
    def dim(self):
        return len(self.center)

    @property
    def volume(self):
        return _special.ball_volume(self.radius, self.dim)

    def contains(self, pts):
        return np.sum((pts - self.center) ** 2, axis=1) <= self.radius**2

    def sample(self, rng, n):
        z = rng.standard_normal((n, self.dim))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        return self.center + z * (self.radius * rng.random(n) ** (1.0 / self.dim))[:, None]


@dataclass(frozen=True, eq=False)
class Box:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape or np.any(hi <= lo):
            raise ValueError("box needs lo < hi in every coordinate")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return len(self.lo)

    @property
    def volume(self):
        return float(np.prod(self.hi - self.lo))

    def contains(self, pts):
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=1)

    def sample(self, rng, n):
        return self.lo + (self.hi - self.lo) * rng.random((n, self.dim))


def _as_interval(region):
    if isinstance(region, Box):
        return float(region.lo[0]), float(region.hi[0])
    return float(region.center[0] - region.radius), float(region.center[0] + region.radius)


def intersection_volume(a, b):
    """Exact volume of the intersection of two simple regions, or ``None`` if not closed-form."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    if a.dim == 1:
        (a0, a1), (b0, b1) = _as_interval(a), _as_interval(b)
        return max(0.0, min(a1, b1) - max(a0, b0))
    if isinstance(a, Box) and isinstance(b, Box):
        return float(np.prod(np.clip(np.minimum(a.hi, b.hi) - np.maximum(a.lo, b.lo), 0.0, None)))
    if isinstance(a, Ball) and isinstance(b, Ball):
        t = float(np.linalg.norm(a.center - b.center))
        if a.radius == 0 or b.radius == 0 or t >= a.radius + b.radius:
            return 0.0
        if a.dim == 2:
            frac = float(_special.lens_fraction(a.radius, b.radius, t))
        else:
            frac = float(_special.intersection_fraction(a.radius, b.radius, t, a.dim))
            if not np.isfinite(frac) or not -1e-12 <= frac <= 1 + 1e-12:
                return None
        return frac * a.volume
    ball, box = (a, b) if isinstance(a, Ball) else (b, a)
    if np.all(ball.center - ball.radius >= box.lo) and np.all(ball.center + ball.radius <= box.hi):
        return ball.volume
    nearest = np.clip(ball.center, box.lo, box.hi)
    if np.linalg.norm(ball.center - nearest) >= ball.radius:
        return 0.0
    return None


def _overlap(a, b):
    if a.dim == 1:
        (a0, a1), (b0, b1) = _as_interval(a), _as_interval(b)
        return min(a1, b1) - max(a0, b0) > _CONTAIN_TOL
    if isinstance(a, Ball) and isinstance(b, Ball):
        return np.linalg.norm(a.center - b.center) < a.radius + b.radius - _CONTAIN_TOL
    if isinstance(a, Box) and isinstance(b, Box):
        return bool(np.all(np.minimum(a.hi, b.hi) - np.maximum(a.lo, b.lo) > _CONTAIN_TOL))
    ball, box = (a, b) if isinstance(a, Ball) else (b, a)
    return np.linalg.norm(ball.center - np.clip(ball.center, box.lo, box.hi)) < ball.radius - _CONTAIN_TOL


def as_region_list(region):
    """Normalise a region argument to a list of disjoint :class:`Ball` / :class:`Box` pieces."""
    if isinstance(region, (Ball, Box)):
        return [region]
    if isinstance(region, IntervalSet):
        return [Box([a], [b]) for a, b in region if b > a]
    pieces = [p for r in region for p in as_region_list(r)]
    for a, b in itertools.combinations(pieces, 2):
        if _overlap(a, b):
            raise ValueError("regions must be pairwise disjoint")
    return pieces


class MeasureKind(str, Enum):
    UNIFORM_BOX = "uniform_box"
    UNIFORM_ON_REGIONS = "uniform_on_regions"
    MIXTURE = "mixture"


@dataclass(frozen=True, eq=False)
class DataMeasure:
    """p_X as a finite mixture of uniform distributions on balls and boxes."""

    kind: MeasureKind
    components: tuple
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "kind", MeasureKind(self.kind))
        w = np.asarray(self.weights, dtype=float)
        if len(w) != len(self.components) or len(w) == 0:
            raise ValueError("need one weight per component")
        if np.any(w < 0) or abs(w.sum() - 1) > 1e-9:
            raise ValueError("weights must be non-negative and sum to one")
        if len({c.dim for c in self.components}) != 1:
            raise ValueError("components must share a dimension")
        if any(c.volume <= 0 for c in self.components):
            raise ValueError("components must have positive volume")
        object.__setattr__(self, "weights", w / w.sum())
        if self.kind is MeasureKind.UNIFORM_ON_REGIONS:
            as_region_list(list(self.components))

    @classmethod
    def uniform_box(cls, lo, hi):
        return cls(MeasureKind.UNIFORM_BOX, (Box(lo, hi),), np.ones(1))

    @classmethod
    def uniform_on_regions(cls, regions, weights=None):
        """Uniform on each of disjoint regions; default weights make it uniform on their union."""
        regions = tuple(regions)
        if weights is None:
            vols = np.array([r.volume for r in regions])
            weights = vols / vols.sum()
        return cls(MeasureKind.UNIFORM_ON_REGIONS, regions, np.asarray(weights, dtype=float))

    @classmethod
    def mixture(cls, regions, weights):
        return cls(MeasureKind.MIXTURE, tuple(regions), np.asarray(weights, dtype=float))

    @property
    def dim(self):
        return self.components[0].dim

    def bounds(self):
        lo = np.min([c.lo if isinstance(c, Box) else c.center - c.radius for c in self.components], axis=0)
        hi = np.max([c.hi if isinstance(c, Box) else c.center + c.radius for c in self.components], axis=0)
        return lo, hi

    def sample(self, seed, n):
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        which = rng.choice(len(self.components), size=n, p=self.weights)
        out = np.empty((n, self.dim))
        for k, comp in enumerate(self.components):
            idx = np.flatnonzero(which == k)
            if len(idx):
                out[idx] = comp.sample(rng, len(idx))
        return out

    def density_step(self) -> StepFunction:
        """Density of a one-dimensional measure as a step function."""
        if self.dim != 1:
            raise ValueError("only one-dimensional measures have a step density here")
        pieces = [_as_interval(c) for c in self.components]
        bps = np.unique(np.array(pieces).ravel())
        mids = 0.5 * (bps[:-1] + bps[1:])
        dens = np.zeros(len(mids))
        for (a, b), w in zip(pieces, self.weights):
            dens += np.where((mids > a) & (mids < b), w / (b - a), 0.0)
        return StepFunction(bps, dens)

    def exact_mass(self, region):
        """Exact p_X(region), or ``None`` if some piece has no closed form."""
        total = 0.0
        for piece in as_region_list(region):
            if piece.dim != self.dim:
                raise ValueError("region dimension does not match the measure")
            for comp, w in zip(self.components, self.weights):
                v = intersection_volume(piece, comp)
                if v is None:
                    return None
                total += w * v / comp.volume
        return float(min(max(total, 0.0), 1.0))

    def mass(self, region, seed=0):
        """p_X(region), exact when possible and otherwise a flagged Monte-Carlo estimate."""
        v = self.exact_mass(region)
        if v is not None:
            return v
        warnings.warn("region mass has no closed form here; using a Monte-Carlo estimate",
                      MonteCarloFallbackWarning, stacklevel=2)
        pieces = as_region_list(region)
        pts = self.sample(seed, _MC_MASS_SAMPLES)
        inside = np.zeros(len(pts), dtype=bool)
        for p in pieces:
            inside |= p.contains(pts)
        return float(inside.mean())


def region_mass(px: DataMeasure, region, seed=0):
    return px.mass(region, seed)
