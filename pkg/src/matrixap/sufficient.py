"""A checkable sufficient condition for matrix A_p, and an example showing it is not necessary.

For each coordinate ``k`` the condition asks that

  (i)  ``w_kk^{(2/p)} w_kk^{(-2/p)}`` is bounded, and
  (ii) the scalar weight ``(w_kk^{(2/p)})^{p/2}`` is a Muckenhoupt A_p weight,

where ``w_kk^{(s)}`` is the ``(k, k)`` entry of ``W^s``. Failure only means
the test is inconclusive; there is deliberately no "not in A_p" verdict.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .domain import Domain, SetFamily, enumerate_sets, holder_conjugate
from .grids import GridSpec, set_quadrature
from .metrics import Ladder, SetValue, a2_refinement, default_ladder
from .projection import (CoordinateTarget, coordinate_projection_bound, coordinate_target_weight,
                         projection_ladder)
from .verdicts import EssSupEstimate, LevelRecord, Verdict, classify
from .weights import A2_EXAMPLE_BOUND, MatrixWeight, ScalarWeight, catalog_weight

DEFAULT_SCALAR_SPEC = GridSpec(counts=(32,), grading=0.85, depth=1e-10)


class SufficiencyVerdict(str, Enum):
    HOLDS = "sufficient_conditions_hold"
    INDETERMINATE = "indeterminate"


@dataclass
class ScalarApEstimate:
    value: float
    argmax_set: dict
    per_set: list[SetValue]
    resolution: dict

    def to_dict(self):
        return {"value": self.value, "argmax_set": self.argmax_set,
                "per_set": [s.to_dict() for s in self.per_set], "resolution": self.resolution}


def scalar_muckenhoupt_constant(w: ScalarWeight, p: float, family: SetFamily,
                                spec: GridSpec | None = None) -> ScalarApEstimate:
    """``sup_E avg_E(w) * avg_E(w^{-q/p})^{p/q}``."""
    q = holder_conjugate(p)
    spec = (spec or DEFAULT_SCALAR_SPEC).with_singular(w.singular_points)
    per_set = []
    for E in enumerate_sets(family, w.domain):
        g = set_quadrature(E, w.domain, spec)
        vals = w.evaluate_many(g.points)
        if np.any(~(vals > 0)) or not np.all(np.isfinite(vals)):
            raise ValueError(f"scalar weight {w.name} is not positive and finite on {E.to_dict()}")
        a = g.integrate(vals) / E.volume
        b = g.integrate(vals ** (-q / p)) / E.volume
        per_set.append(SetValue(E.to_dict(), float(a * b ** (p / q))))
    best = max(per_set, key=lambda s: s.value)
    return ScalarApEstimate(best.value, best.set, per_set, spec.to_dict())


def scalar_refinement(w: ScalarWeight, p: float, family: SetFamily, specs=None) -> Ladder:
    """Scalar constant across a resolution ladder with a divergence verdict."""
    specs = list(specs or default_ladder(DEFAULT_SCALAR_SPEC))
    ests = [scalar_muckenhoupt_constant(w, p, family, s) for s in specs]
    scales = [s.depth if w.singular_points else 1.0 / max(s.counts) for s in specs]
    trace = [LevelRecord(h, e.value, None, s.to_dict()) for h, e, s in zip(scales, ests, specs)]
    verdict, rate = classify(scales, [e.value for e in ests])
    return Ladder(ests, trace, verdict, rate)


@dataclass
class SufficiencyReport:
    condition_i: list[EssSupEstimate]
    condition_ii: list[Ladder]
    verdict: SufficiencyVerdict
    failed: list[str] = field(default_factory=list)

    def to_dict(self):
        return {"verdict": self.verdict.value, "failed": self.failed,
                "condition_i": [e.to_dict() for e in self.condition_i],
                "condition_ii": [lad.to_dict() for lad in self.condition_ii],
                "note": "sufficient conditions only; failure does not exclude A_p membership, "
                        "see the roudenko analysis for a direct estimate"}


def sufficient_ap_check(W: MatrixWeight, p: float, family: SetFamily, criterion_specs=None,
                        scalar_specs=None) -> SufficiencyReport:
    """Run conditions (i) and (ii) for every coordinate (reported 0-based)."""
    target = CoordinateTarget.ENTRY_OF_POWER_TARGET
    cond_i, cond_ii, failed = [], [], []
    for k in range(W.N):
        est = coordinate_projection_bound(W, p, k, target, criterion_specs or projection_ladder(), squared=True)
        cond_i.append(est)
        if est.verdict is not Verdict.BOUNDED:
            failed.append(f"condition_i[k={k}]")
        lad = scalar_refinement(coordinate_target_weight(W, p, k, target), p, family, scalar_specs)
        cond_ii.append(lad)
        if lad.verdict is not Verdict.BOUNDED:
            failed.append(f"condition_ii[k={k}]")
    verdict = SufficiencyVerdict.INDETERMINATE if failed else SufficiencyVerdict.HOLDS
    return SufficiencyReport(cond_i, cond_ii, verdict, failed)


@dataclass
class NonNecessityReport:
    sufficiency: SufficiencyReport
    a2: Ladder
    bound: float = A2_EXAMPLE_BOUND

    @property
    def a2_value(self) -> float:
        return self.a2.values[-1]

    @property
    def demonstrates_non_necessity(self) -> bool:
        return (self.sufficiency.verdict is SufficiencyVerdict.INDETERMINATE
                and self.a2.verdict is Verdict.BOUNDED and self.a2_value <= self.bound + 1e-3)

    def to_dict(self):
        return {"sufficiency": self.sufficiency.to_dict(), "a2": self.a2.to_dict(),
                "a2_value": self.a2_value, "bound": self.bound,
                "demonstrates_non_necessity": self.demonstrates_non_necessity}


def example_families(r_min: float = 1e-3, n_radii: int = 6, center_counts: int = 4) -> list[SetFamily]:
    """Intervals in ``[0, 1]``: zero-anchored ones and an interior lattice."""
    dom = Domain.line(1, ((0.0, 1.0),))
    return [SetFamily.anchored_intervals(dom, r_min, 0.5, n_radii),
            SetFamily.lattice(dom, (center_counts,), r_min, 0.5 / center_counts, n_radii)]


def non_necessity_demo(families=None, criterion_specs=None, a2_specs=None) -> NonNecessityReport:
    """Sufficient condition vs direct A_2 constant on the 2x2 example weight (p = 2)."""
    W = catalog_weight("paper_example")
    if families is None:
        families = example_families()
    if isinstance(families, SetFamily):
        families = [families]
    suff = sufficient_ap_check(W, 2.0, families[0], criterion_specs, a2_specs)
    ladders = [a2_refinement(W, fam, a2_specs) for fam in families]
    # combine families: per level take the larger supremum
    best = max(ladders, key=lambda lad: lad.values[-1])
    values = [max(lad.values[i] for lad in ladders) for i in range(len(best.values))]
    trace = [LevelRecord(t.scale, v, None, t.resolution) for t, v in zip(best.trace, values)]
    verdict, rate = classify([t.scale for t in trace], values)
    ests = [e for lad in ladders for e in lad.estimates]
    return NonNecessityReport(suff, Ladder(ests, trace, verdict, rate))


__all__ = ["SufficiencyVerdict", "ScalarApEstimate", "scalar_muckenhoupt_constant", "scalar_refinement",
           "SufficiencyReport", "sufficient_ap_check", "NonNecessityReport", "non_necessity_demo",
           "example_families"]
