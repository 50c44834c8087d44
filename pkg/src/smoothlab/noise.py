"""Single-parameter spherically symmetric noise families and their CDF machinery.

Two families are supported: the uniform distribution on the closed l2 ball of radius
``scale`` and the isotropic Gaussian with standard deviation ``scale``.  Everything
downstream (shrinkage radii, smoothed votes, bounds) is phrased through

* ``shifted_cdf(r, x)``: noise mass inside the ball B(x, r),
* ``norm_inverse(r, c)``: the largest ||x|| at which that mass still reaches ``c``,
* ``sqnorm_cdf(t)``: the CDF of ||z||^2 for z drawn from the noise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from enum import Enum

import numpy as np
from scipy import interpolate, special

from . import _special

BISECTION_TOL = 1e-10
BISECTION_MAX_ITER = 200
# Tail mass treated as zero when a compact "effective support" is needed.
TAIL_EPS = 1e-12
# Beyond this many standard deviations the Gaussian shifted CDF is 0 or 1 to double precision.
_GAUSS_CUTOFF_SD = 40.0
# Knots per standard deviation for tabulated Gaussian radial profiles (interpolation error ~1e-12).
_PROFILE_KNOTS_PER_SD = 100
# Tail mass below double-precision resolution of a probability near one.
NEGLIGIBLE_TAIL = 1e-17


class Family(str, Enum):
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"


class PartitionVanished(ValueError):
    """Raised when no point reaches the requested shifted-CDF level."""


class MonteCarloFallbackWarning(RuntimeWarning):
    """An exact formula was numerically unusable and a Monte-Carlo estimate was returned."""


def as_points(x, dim):
    """Coerce ``x`` to an ``(n, dim)`` array; also report whether a single point was given."""
    a = np.asarray(x, dtype=float)
    if dim == 1 and a.ndim <= 1:
        single = a.ndim == 0
        return a.reshape(-1, 1), single
    if a.ndim == 1:
        if a.shape[0] != dim:
            raise ValueError(f"expected a point of dimension {dim}, got shape {a.shape}")
        return a.reshape(1, dim), True
    if a.ndim != 2 or a.shape[1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got shape {a.shape}")
    return a, False


def _squeeze(values, single):
    return float(values[0]) if single else values


@dataclass(frozen=True)
class NoiseModel:
    family: Family
    scale: float
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"noise scale must be positive, got {self.scale}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dim}")
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "dim", int(self.dim))

    @classmethod
    def uniform(cls, radius, dim):
        return cls(Family.UNIFORM, radius, dim)

    @classmethod
    def gaussian(cls, sigma, dim):
        return cls(Family.GAUSSIAN, sigma, dim)

    # -- density and sampling -------------------------------------------------

    def pdf(self, x):
        pts, single = as_points(x, self.dim)
        norms = np.linalg.norm(pts, axis=1)
        th, d = self.scale, self.dim
        if self.family is Family.UNIFORM:
            vals = np.where(norms <= th, 1.0 / _special.ball_volume(th, d), 0.0)
        else:
            vals = np.exp(-0.5 * (norms / th) ** 2) / (2.0 * np.pi * th**2) ** (d / 2.0)
        return _squeeze(vals, single)

    def sample(self, seed, n):
        """Draw ``n`` i.i.d. noise vectors, shape ``(n, dim)``.

        ``seed`` may be an integer, a ``SeedSequence`` or an existing ``Generator``.
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        z = rng.standard_normal((n, self.dim))
        if self.family is Family.GAUSSIAN:
            return self.scale * z
        direction = z / np.linalg.norm(z, axis=1, keepdims=True)
        radius = self.scale * rng.random(n) ** (1.0 / self.dim)
        return direction * radius[:, None]

    def support_radius(self, eps=TAIL_EPS):
        """Radius outside of which the noise carries at most ``eps`` mass (exactly 0 for uniform)."""
        if self.family is Family.UNIFORM:
            return self.scale
        return self.scale * math.sqrt(_special.chi2_isf(eps, self.dim))

    # -- shifted CDF ---------------------------------------------------------

    def radial_cdf(self, r, t):
        """Shifted CDF along a ray: mass of the noise inside B(t·e1, r), broadcasting ``r`` and ``t``."""
        r = np.asarray(r, dtype=float)
        t = np.abs(np.asarray(t, dtype=float))
        if np.any(r < 0):
            raise ValueError("radius must be non-negative")
        th, d = self.scale, self.dim
        if self.family is Family.UNIFORM:
            if d == 1:
                overlap = np.minimum(t + r, th) - np.maximum(t - r, -th)
                return np.clip(overlap / (2.0 * th), 0.0, 1.0)
            if d == 2:
                return _special.lens_fraction(th, r, t)
            vals = _special.intersection_fraction(th, r, t, d)
            bad = ~np.isfinite(vals) | (vals < -1e-12) | (vals > 1 + 1e-12)
            if np.any(bad):
                vals = np.array(vals, dtype=float)
                vals[bad] = self._mc_radial_cdf(np.broadcast_to(r, vals.shape)[bad],
                                                np.broadcast_to(t, vals.shape)[bad])
            return np.clip(vals, 0.0, 1.0)
        if d == 1:
            return np.clip(special.ndtr((t + r) / th) - special.ndtr((t - r) / th), 0.0, 1.0)
        r, t = np.broadcast_arrays(r, t)
        out = np.empty(r.shape)
        far = t - r >= _GAUSS_CUTOFF_SD * th
        deep = r - t >= _GAUSS_CUTOFF_SD * th
        out[far] = 0.0
        out[deep] = 1.0
        mid = ~(far | deep)
        out[mid] = _special.ncx2_cdf((r[mid] / th) ** 2, d, (t[mid] / th) ** 2)
        return out

    def _mc_radial_cdf(self, r, t, n=1_000_000, seed=0):
        warnings.warn("cap-intersection formula unstable; using a Monte-Carlo estimate",
                      MonteCarloFallbackWarning, stacklevel=3)
        z = self.sample(seed, n)
        out = np.empty(len(r))
        for i, (ri, ti) in enumerate(zip(r, t)):
            shifted = z.copy()
            shifted[:, 0] -= ti
            out[i] = np.mean(np.einsum("ij,ij->i", shifted, shifted) <= ri * ri)
        return out

    def radial_profile(self, r):
        """Fast evaluator of ``t -> radial_cdf(r, t)`` for a fixed radius.

        Closed forms are returned as-is; the Gaussian family in d >= 2 (a series per call)
        is tabulated once and interpolated with a cubic spline.
        """
        if self.family is Family.GAUSSIAN and self.dim >= 2:
            return _gaussian_profile(self, float(r))
        return lambda t: self.radial_cdf(r, t)

    def shifted_cdf(self, r, x):
        """Noise mass inside the closed ball B(x, r); ``x`` is one point or an ``(n, dim)`` array."""
        if np.any(np.asarray(r) < 0):
            raise ValueError("radius must be non-negative")
        pts, single = as_points(x, self.dim)
        vals = self.radial_cdf(r, np.linalg.norm(pts, axis=1))
        return _squeeze(np.asarray(vals), single)

    def norm_inverse(self, r, c):
        """Largest ||x|| with ``shifted_cdf(r, x) >= c`` (bisection on the norm).

        Raises :class:`PartitionVanished` when even x = 0 falls short of ``c``.
        """
        if r < 0:
            raise ValueError("radius must be non-negative")
        if not 0 < c <= 1:
            raise ValueError(f"level must lie in (0, 1], got {c}")
        f = lambda t: float(self.radial_cdf(r, t))  # noqa: E731
        if f(0.0) < c:
            raise PartitionVanished(f"shifted CDF at the centre is {f(0.0):.6g} < {c:.6g}")
        lo, hi = 0.0, r + self.scale
        while f(hi) >= c:
            lo, hi = hi, 2.0 * hi + self.scale
        for _ in range(BISECTION_MAX_ITER):
            if hi - lo <= BISECTION_TOL:
                break
            mid = 0.5 * (lo + hi)
            if f(mid) >= c:
                lo = mid
            else:
                hi = mid
        return lo

    # -- distribution of the squared norm ---------------------------------------

    def sqnorm_cdf(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("t must be non-negative")
        if self.family is Family.UNIFORM:
            return np.minimum(1.0, (np.sqrt(t) / self.scale) ** self.dim)
        return _special.chi2_cdf(t / self.scale**2, self.dim)

    def sqnorm_cdf_inv(self, c):
        c = np.asarray(c, dtype=float)
        if np.any((c < 0) | (c > 1)):
            raise ValueError("probability must lie in [0, 1]")
        if self.family is Family.UNIFORM:
            return self.scale**2 * c ** (2.0 / self.dim)
        return self.scale**2 * _special.chi2_ppf(c, self.dim)


@lru_cache(maxsize=256)
def _gaussian_profile(model, r):
    th = model.scale
    top = r + model.support_radius(NEGLIGIBLE_TAIL)
    knots = np.linspace(0.0, top, int(np.ceil(top / th * _PROFILE_KNOTS_PER_SD)) + 1)
    spline = interpolate.CubicSpline(knots, model.radial_cdf(r, knots), bc_type=((1, 0.0), "not-a-knot"))

    def profile(t):
        t = np.abs(np.asarray(t, dtype=float))
        out = np.zeros(t.shape)
        inside = t < top
        out[inside] = spline(t[inside])
        return np.clip(out, 0.0, 1.0)

    return profile


def make_noise(family, scale, dim):
    """Build a noise model, mapping a zero scale to ``None`` (no noise)."""
    if scale == 0:
        return None
    return NoiseModel(Family(family), scale, dim)
