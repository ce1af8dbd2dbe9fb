"""Refinement traces and the power-law divergence rule.

Sampling can never prove unboundedness. A quantity estimated at a sequence
of resolutions ``h`` (smaller is finer) is called divergent when
``log(value)`` grows affinely in ``log(1/h)`` with slope above
``DIVERGENCE_SLOPE`` over at least ``MIN_LEVELS`` levels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

DIVERGENCE_SLOPE = 0.1
MIN_LEVELS = 3


class Verdict(str, Enum):
    BOUNDED = "bounded"
    DIVERGENCE_SUSPECTED = "divergence_suspected"
    INCONCLUSIVE = "inconclusive"


def fit_rate(scales, values) -> float:
    """Least-squares slope of ``log(value)`` against ``log(scale)``.

    Negative rates mean growth as the resolution scale shrinks; ``1/x``
    sampled at distance ``h`` from 0 gives rate -1.
    """
    h = np.asarray(scales, dtype=float)
    v = np.asarray(values, dtype=float)
    tiny = np.finfo(float).tiny
    lh, lv = np.log(np.maximum(h, tiny)), np.log(np.maximum(v, tiny))
    if np.ptp(lh) == 0:
        return 0.0 if np.ptp(lv) == 0 else -math.inf
    return float(np.polyfit(lh, lv, 1)[0])


def classify(scales, values, threshold: float = DIVERGENCE_SLOPE) -> tuple[Verdict, float]:
    """Return ``(verdict, rate)`` for a refinement trace."""
    if len(values) < MIN_LEVELS or not np.all(np.isfinite(values)):
        if len(values) and not np.all(np.isfinite(values)):
            return Verdict.DIVERGENCE_SUSPECTED, -math.inf
        return Verdict.INCONCLUSIVE, math.nan
    rate = fit_rate(scales, values)
    if -rate > threshold:
        return Verdict.DIVERGENCE_SUSPECTED, rate
    return Verdict.BOUNDED, rate


@dataclass
class LevelRecord:
    """One refinement level: resolution scale, estimate, and where it was attained."""

    scale: float
    value: float
    argmax: tuple | None = None
    resolution: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"scale": self.scale, "value": self.value,
                "argmax": None if self.argmax is None else list(self.argmax),
                "resolution": self.resolution}


@dataclass
class EssSupEstimate:
    """Sampled essential supremum of a criterion function with its verdict."""

    b_hat: float
    argmax: tuple | None
    verdict: Verdict
    rate: float
    trace: list[LevelRecord] = field(default_factory=list)
    samples: tuple | None = None  # (points, values) at the finest level

    @property
    def growth(self) -> float:
        return -self.rate

    @property
    def bounded(self) -> bool:
        return self.verdict is Verdict.BOUNDED

    def to_dict(self) -> dict:
        return {"b_hat": self.b_hat, "argmax": None if self.argmax is None else list(self.argmax),
                "verdict": self.verdict.value, "rate": self.rate,
                "trace": [lv.to_dict() for lv in self.trace],
                "note": "supremum sampled at resolution; a lower bound for the essential supremum"}


def running_max_trace(levels: list[LevelRecord]) -> list[LevelRecord]:
    """Make values nondecreasing: every level keeps the best sample seen so far."""
    out, best, arg = [], -math.inf, None
    for lv in levels:
        if lv.value >= best:
            best, arg = lv.value, lv.argmax
        out.append(LevelRecord(lv.scale, best, arg, lv.resolution))
    return out


def ess_sup_from_levels(levels: list[LevelRecord], samples=None) -> EssSupEstimate:
    trace = running_max_trace(levels)
    verdict, rate = classify([lv.scale for lv in trace], [lv.value for lv in trace])
    last = trace[-1]
    return EssSupEstimate(last.value, last.argmax, verdict, rate, trace, samples)
