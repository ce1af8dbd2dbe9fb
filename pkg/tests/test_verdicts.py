import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from matrixap.verdicts import LevelRecord, Verdict, classify, ess_sup_from_levels, fit_rate, running_max_trace

scales = np.geomspace(1e-2, 1e-8, 4)


@given(st.floats(-3, 3), st.floats(0.1, 10))
def test_fit_rate_recovers_power(rate, c):
    assert fit_rate(scales, c * scales ** rate) == pytest.approx(rate, abs=1e-9)


def test_classify_thresholds():
    assert classify(scales, 1 / scales)[0] is Verdict.DIVERGENCE_SUSPECTED
    assert classify(scales, np.ones(4))[0] is Verdict.BOUNDED
    assert classify(scales[:2], np.ones(2))[0] is Verdict.INCONCLUSIVE
    assert classify(scales, [1, 2, math.inf, 3])[0] is Verdict.DIVERGENCE_SUSPECTED
    # slow logarithmic growth stays below the slope threshold
    assert classify(scales, np.log(1 / scales))[0] is Verdict.BOUNDED


@given(st.lists(st.floats(0, 100), min_size=3, max_size=8))
def test_running_max_is_monotone(values):
    levels = [LevelRecord(10.0 ** -i, v) for i, v in enumerate(values)]
    trace = running_max_trace(levels)
    vals = [t.value for t in trace]
    assert vals == sorted(vals) and vals[-1] == max(values)


def test_ess_sup_estimate():
    levels = [LevelRecord(s, 1 + 1 / s, (s,)) for s in scales]
    est = ess_sup_from_levels(levels)
    assert est.verdict is Verdict.DIVERGENCE_SUSPECTED
    assert est.growth == pytest.approx(1.0, abs=0.01)
    assert est.to_dict()["verdict"] == "divergence_suspected"
