"""Verification of the one-dimensional construction where augmentation helps.

Construction parameters are given as interval widths: noise of width ``theta`` is uniform on
[-theta/2, theta/2], which is the library's uniform ball of radius theta/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..classifiers import IntervalClassifier, Piecewise1DConditional, piecewise_interference
from ..measures import DataMeasure
from ..noise import Family
from ..risk import exact_risk
from ..smoothing import SmoothingConfig, two_stage

HALF_WIDTH = 0.25


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ConstructionVerdict:
    omega: float
    alpha: float
    beta: float
    checks: list = field(default_factory=list)
    risk_unaugmented: float = float("nan")
    risk_augmented: float = float("nan")
    widened_gap: float = float("nan")
    widened_risk_unaugmented: float = float("nan")
    widened_risk_augmented: float = float("nan")

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def failed(self):
        return [c.name for c in self.checks if not c.passed]

    def lines(self):
        out = [f"omega={self.omega!r} alpha={self.alpha!r} beta={self.beta!r}"]
        out += [f"{'PASS' if c.passed else 'FAIL'} {c.name} {c.detail}".rstrip() for c in self.checks]
        out.append(f"risk unaugmented={self.risk_unaugmented!r} augmented={self.risk_augmented!r}")
        out.append(f"widened gap={self.widened_gap!r} risk unaugmented={self.widened_risk_unaugmented!r} "
                   f"augmented={self.widened_risk_augmented!r}")
        out.append("verdict: " + ("all conditions hold" if self.passed else "failed: " + ", ".join(self.failed)))
        return out


def construction_conditional(gap_lo, gap_hi) -> Piecewise1DConditional:
    """h equal to 1 on [-0.25, gap_lo] and [gap_hi, 0.25] and 0 in between."""
    return Piecewise1DConditional(np.array([-HALF_WIDTH, gap_lo, gap_hi, HALF_WIDTH]), np.array([1.0, 0.0, 1.0]))


def _pipeline(h, alpha, beta):
    cfg = SmoothingConfig(alpha=alpha / 2, beta=beta / 2, family=Family.UNIFORM)
    return two_stage(h, cfg)


def _covers(f: IntervalClassifier, lo, hi):
    return f.intervals.intersect_measure(lo, hi) >= (hi - lo) - 1e-12


def verify_1d_construction(omega, alpha, beta, widened_gap=None) -> ConstructionVerdict:
    """Check the explicit constraints and the exact behaviour of the 1D construction.

    ``widened_gap`` is the width of the zero region for the second variant; it must exceed
    alpha / 2 and defaults to alpha.
    """
    if not 0 < omega <= HALF_WIDTH:
        raise ValueError("omega must lie in (0, 0.25]")
    v = ConstructionVerdict(float(omega), float(alpha), float(beta))
    v.checks += [
        Check("beta >= 4*omega", beta >= 4 * omega, f"({beta!r} vs {4 * omega!r})"),
        Check("alpha >= 4*(0.25-omega)", alpha >= 4 * (HALF_WIDTH - omega), f"({alpha!r} vs {4 * (HALF_WIDTH - omega)!r})"),
        Check("alpha <= 2*omega", alpha <= 2 * omega, f"({alpha!r} vs {2 * omega!r})"),
        Check("beta <= 1", beta <= 1),
        Check("omega > 0.125", omega > 0.125),
    ]
    if alpha <= 0 or beta <= 0:
        v.checks.append(Check("positive noise widths", False))
        return v

    c1, c2, c3, c4 = -HALF_WIDTH, -HALF_WIDTH + omega, HALF_WIDTH - omega, HALF_WIDTH
    px = DataMeasure.uniform_box([c1], [c4])
    h = construction_conditional(c2, c3)
    plain = _pipeline(h, 0.0, beta)
    stage1 = _pipeline(h, alpha, 0.0)
    augmented = _pipeline(h, alpha, beta)
    v.checks += [
        Check("smoothing alone predicts 0 on the domain", plain.intervals.intersect_measure(c1, c4) <= 1e-12),
        Check("augmented base predicts 1 on [c1, c4]", _covers(stage1, c1, c4)),
        Check("augmented smoothed predicts 1 on [c1, c4]", _covers(augmented, c1, c4)),
    ]
    v.risk_unaugmented = exact_risk(plain, h, px)
    v.risk_augmented = exact_risk(augmented, h, px)
    v.checks.append(Check("augmentation lowers the risk", v.risk_augmented < v.risk_unaugmented,
                          f"({v.risk_augmented!r} < {v.risk_unaugmented!r})"))

    gap = alpha if widened_gap is None else float(widened_gap)
    v.widened_gap = gap
    wide = construction_conditional(-gap / 2, gap / 2)
    lower_zeta, _ = piecewise_interference(wide)
    v.checks.append(Check("widened gap exceeds alpha/2", lower_zeta > alpha / 2, f"({lower_zeta!r})"))
    v.widened_risk_unaugmented = exact_risk(_pipeline(wide, 0.0, beta), wide, px)
    v.widened_risk_augmented = exact_risk(_pipeline(wide, alpha, beta), wide, px)
    v.checks.append(Check("widened gap: augmentation does not help",
                          v.widened_risk_augmented >= v.widened_risk_unaugmented - 1e-12,
                          f"({v.widened_risk_augmented!r} >= {v.widened_risk_unaugmented!r})"))
    return v
