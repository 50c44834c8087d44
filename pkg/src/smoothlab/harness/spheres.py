"""Random ball configurations with a prescribed interference distance."""

from __future__ import annotations

import json

import numpy as np

from ..classifiers import BallUnionConditional


def sample_sphere_config(domain=((0.0, 0.0), (100.0, 100.0)), zeta=0.0, r=10.0, attempts=500,
                         seed=0, tau=0.1) -> BallUnionConditional:
    """Rejection-sample ball centres; accept one iff it is farther than zeta + 2r from all accepted.

    Centres within ``r`` of the domain boundary are rejected as well, so every ball lies
    inside the box and its p_X-mass has a closed form.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    if attempts < 1:
        raise ValueError("attempts must be >= 1")
    lo, hi = (np.asarray(b, dtype=float) for b in domain)
    rng = np.random.default_rng(seed)
    centres = []
    for _ in range(attempts):
        c = lo + (hi - lo) * rng.random(len(lo))
        if np.any(c - r < lo) or np.any(c + r > hi):
            continue
        if all(np.linalg.norm(c - d) > zeta + 2 * r for d in centres):
            centres.append(c)
    if not centres:
        raise ValueError("no ball was accepted; enlarge the domain or the number of attempts")
    return BallUnionConditional(np.array(centres), np.full(len(centres), float(r)), tau)


def config_to_json(c: BallUnionConditional, **extra) -> str:
    doc = {"centers": c.centers.tolist(), "radii": c.radii.tolist(), "tau": c.tau, **extra}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def config_from_json(text: str) -> BallUnionConditional:
    doc = json.loads(text)
    return BallUnionConditional(np.asarray(doc["centers"]), np.asarray(doc["radii"]), doc["tau"])
