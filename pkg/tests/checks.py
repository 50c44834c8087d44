"""Randomised property checks on the noise CDF machinery, shared by several test files.

Each check returns a list of failure descriptions (empty when everything holds).
"""

import numpy as np

from smoothlab.noise import Family, NoiseModel

DIMS = (1, 2, 3)
FAMILIES = (Family.UNIFORM, Family.GAUSSIAN)


def _scalar(v):
    return float(np.asarray(v).reshape(-1)[0])


def _model(rng, family=None, dim=None):
    family = family or FAMILIES[rng.integers(2)]
    dim = dim or DIMS[rng.integers(3)]
    return NoiseModel(family, float(rng.uniform(0.2, 3.0)), int(dim))


def check_monotonicity(n=1000, seed=0):
    """Phi(r, t) grows with r, shrinks with |t| and with the noise scale at t = 0."""
    rng = np.random.default_rng(seed)
    bad = []
    for i in range(n):
        m = _model(rng, dim=DIMS[i % 3])
        r, t = rng.uniform(0.0, 6.0, 2)
        dr, dt = rng.uniform(0.0, 2.0, 2)
        a, b = float(m.radial_cdf(r, t)), float(m.radial_cdf(r + dr, t))
        if b < a - 1e-12:
            bad.append(f"radius: {m} r={r} dr={dr}")
        c = float(m.radial_cdf(r, t + dt))
        if c > a + 1e-12:
            bad.append(f"shift: {m} r={r} t={t} dt={dt}")
        wider = NoiseModel(m.family, m.scale * (1 + dt), m.dim)
        if float(wider.radial_cdf(r, 0.0)) > float(m.radial_cdf(r, 0.0)) + 1e-12:
            bad.append(f"scale: {m} r={r}")
    return bad


def check_inverse_monotonicity(n=1000, seed=1):
    """A_r(c) shrinks as the level c grows and grows with r."""
    rng = np.random.default_rng(seed)
    bad = []
    for i in range(n):
        m = _model(rng, dim=DIMS[i % 3])
        r = float(rng.uniform(0.5, 6.0))
        c0 = float(m.radial_cdf(r, 0.0))
        c1, c2 = np.sort(rng.uniform(0.05, 1.0, 2) * c0)
        if m.norm_inverse(r, c2) > m.norm_inverse(r, c1) + 1e-9:
            bad.append(f"level: {m} r={r} c={c1},{c2}")
        if m.norm_inverse(r + float(rng.uniform(0, 1)), c1) < m.norm_inverse(r, c1) - 1e-9:
            bad.append(f"radius: {m} r={r} c={c1}")
    return bad


def _random_rotation(rng, d):
    q, rmat = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(rmat))


def check_symmetry(n=1000, seed=2):
    """Density and shifted CDF are invariant under x -> -x and under rotations."""
    rng = np.random.default_rng(seed)
    bad = []
    for i in range(n):
        m = _model(rng, dim=DIMS[i % 3])
        x = rng.standard_normal(m.dim) * rng.uniform(0.0, 2.0) * m.scale
        q = _random_rotation(rng, m.dim)
        r = float(rng.uniform(0.1, 4.0))
        p = _scalar(m.pdf(x[None, :]))
        for y in (-x, q @ x):
            if abs(_scalar(m.pdf(y[None, :])) - p) > 1e-12 * max(1.0, p):
                bad.append(f"pdf: {m} x={x}")
            if abs(_scalar(m.shifted_cdf(r, y[None, :])) - _scalar(m.shifted_cdf(r, x[None, :]))) > 1e-12:
                bad.append(f"cdf: {m} x={x}")
    return bad


def check_roundtrip(n=1000, seed=3, tol=1e-8):
    """t -> Phi(r, t) -> A_r recovers t where Phi is strictly decreasing; returns (failures, max error)."""
    rng = np.random.default_rng(seed)
    bad, worst = [], 0.0
    for i in range(n):
        m = _model(rng, dim=DIMS[i % 3])
        r = float(rng.uniform(0.5, 5.0))
        lo, hi = (abs(r - m.scale), r + m.scale) if m.family is Family.UNIFORM else (0.0, r + 3 * m.scale)
        t = float(rng.uniform(lo, hi))
        c = float(m.radial_cdf(r, t))
        if not 1e-6 < c < 1 - 1e-6:
            continue
        err = abs(m.norm_inverse(r, c) - t)
        worst = max(worst, err)
        if err > tol:
            bad.append(f"{m} r={r} t={t} err={err}")
    return bad, worst


def check_exact_vs_mc(family, n_cases=100, n_samples=20_000, seed=4, sigmas=4.0):
    """Closed-form shifted CDFs against direct sampling of the noise."""
    rng = np.random.default_rng(seed)
    bad = []
    for i in range(n_cases):
        m = _model(rng, family, DIMS[i % 3])
        r = float(rng.uniform(0.2, 2.0)) * m.scale
        x = rng.standard_normal(m.dim)
        x *= float(rng.uniform(0.0, 2.0)) * m.scale / np.linalg.norm(x)
        p = _scalar(m.shifted_cdf(r, x[None, :]))
        z = m.sample(int(rng.integers(2**31)), n_samples)
        hat = float(np.mean(np.sum((z - x) ** 2, axis=1) <= r * r))
        sd = np.sqrt(max(p * (1 - p), 1e-12) / n_samples)
        if abs(hat - p) > sigmas * sd + 1e-12:
            bad.append(f"{m} r={r} |x|={np.linalg.norm(x)} exact={p} mc={hat}")
    return bad
