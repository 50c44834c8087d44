"""Low-level special functions: ball volumes, ball intersections, noncentral chi-squared."""

import numpy as np
from scipy import special

# Number of Poisson weights kept on each side of the mode, in standard deviations.
_POISSON_HALF_WIDTH_SD = 10.0
_POISSON_HALF_WIDTH_MIN = 40
_MAX_CELLS = 4_000_000


def unit_ball_volume(d):
    return np.pi ** (d / 2.0) / special.gamma(d / 2.0 + 1.0)


def ball_volume(r, d):
    return unit_ball_volume(d) * np.asarray(r, dtype=float) ** d


def cap_fraction(R, a, d):
    """Fraction of a d-ball of radius ``R`` lying beyond the hyperplane at signed offset ``a``.

    ``a >= 0`` gives the minor cap, ``a < 0`` its complement.
    """
    R = np.asarray(R, dtype=float)
    a = np.asarray(a, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.clip(1.0 - (a / R) ** 2, 0.0, 1.0)
    minor = 0.5 * special.betainc((d + 1) / 2.0, 0.5, z)
    frac = np.where(a >= 0, minor, 1.0 - minor)
    return np.where(a >= R, 0.0, np.where(a <= -R, 1.0, frac))


def intersection_fraction(R, r, t, d):
    """vol(B(0, R) ∩ B(t·e1, r)) / vol(B(0, R)) via the two-cap decomposition.

    Valid in any dimension; broadcasts over ``R``, ``r`` and ``t``.
    """
    R, r, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (R, r, t)))
    out = np.zeros(R.shape)
    contained = t <= np.abs(R - r)
    out = np.where(contained, np.minimum(1.0, (np.minimum(R, r) / R) ** d), out)
    lens = (~contained) & (t < R + r)
    if np.any(lens):
        Rl, rl, tl = R[lens], r[lens], t[lens]
        a1 = (tl**2 + Rl**2 - rl**2) / (2.0 * tl)  # offset of the radical plane from 0
        a2 = tl - a1  # ... and from the second centre
        out[lens] = cap_fraction(Rl, a1, d) + cap_fraction(rl, a2, d) * (rl / Rl) ** d
    return out


def lens_fraction(R, r, t):
    """Planar analogue of :func:`intersection_fraction` using the circular-segment formula."""
    R, r, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (R, r, t)))
    out = np.zeros(R.shape)
    contained = t <= np.abs(R - r)
    out = np.where(contained, (np.minimum(R, r) / R) ** 2, out)
    lens = (~contained) & (t < R + r)
    if np.any(lens):
        Rl, rl, tl = R[lens], r[lens], t[lens]
        c1 = np.clip((tl**2 + Rl**2 - rl**2) / (2.0 * tl * Rl), -1.0, 1.0)
        c2 = np.clip((tl**2 + rl**2 - Rl**2) / (2.0 * tl * rl), -1.0, 1.0)
        k = (-tl + Rl + rl) * (tl + Rl - rl) * (tl - Rl + rl) * (tl + Rl + rl)
        area = Rl**2 * np.arccos(c1) + rl**2 * np.arccos(c2) - 0.5 * np.sqrt(np.maximum(k, 0.0))
        out[lens] = area / (np.pi * Rl**2)
    return np.clip(out, 0.0, 1.0)


def chi2_cdf(x, df):
    return special.gammainc(df / 2.0, np.maximum(np.asarray(x, dtype=float), 0.0) / 2.0)


def chi2_ppf(q, df):
    return 2.0 * special.gammaincinv(df / 2.0, q)


def chi2_isf(q, df):
    return 2.0 * special.gammainccinv(df / 2.0, q)


def ncx2_cdf(x, df, nc):
    """CDF of the noncentral chi-squared distribution by its Poisson-mixture series.

    F(x; k, λ) = Σ_j Pois(j; λ/2) · P(k/2 + j, x/2), summed over a window centred on the
    Poisson mode wide enough that the discarded weight is below double precision.
    """
    x, nc = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(nc, dtype=float))
    shape = x.shape
    x = np.maximum(x.ravel(), 0.0)
    nc = nc.ravel()
    out = np.empty(x.shape)

    central = ~(nc / 2.0 > 0)  # also catches denormals whose half underflows
    out[central] = chi2_cdf(x[central], df)
    idx = np.flatnonzero(~central)
    if idx.size:
        half = nc[idx] / 2.0
        mode = np.floor(half)
        width = np.ceil(_POISSON_HALF_WIDTH_SD * np.sqrt(half) + _POISSON_HALF_WIDTH_MIN).astype(int)
        order = np.argsort(width, kind="stable")
        for start in range(0, order.size, max(1, _MAX_CELLS // (2 * int(width.max()) + 1))):
            blk = order[start:start + max(1, _MAX_CELLS // (2 * int(width.max()) + 1))]
            w = int(width[blk].max())
            j = mode[blk, None] + np.arange(-w, w + 1)[None, :]
            valid = j >= 0
            jj = np.where(valid, j, 0.0)
            hb = half[blk, None]
            logw = jj * np.log(hb) - hb - special.gammaln(jj + 1.0)
            weights = np.where(valid, np.exp(logw), 0.0)
            terms = weights * special.gammainc(df / 2.0 + jj, x[idx[blk], None] / 2.0)
            out[idx[blk]] = terms.sum(axis=1)
    return np.clip(out, 0.0, 1.0).reshape(shape)
