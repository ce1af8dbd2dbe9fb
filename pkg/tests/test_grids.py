import numpy as np
import pytest
from hypothesis import given, strategies as st

from matrixap.domain import Ball, Domain
from matrixap.grids import (GridSpec, axis_breakpoints, build_grid, graded_gauss_rule, resolution_ladder,
                            set_quadrature)


@given(st.floats(0.0, 1.0), st.floats(0.3, 0.95), st.sampled_from([1e-3, 1e-8, 1e-12]))
def test_breakpoints_sorted_and_span_window(s, grading, depth):
    bp = axis_breakpoints(0.0, 1.0, 16, [s], grading, depth)
    assert bp[0] == 0.0 and bp[-1] == 1.0
    assert np.all(np.diff(bp) > 0)


def test_graded_grid_reaches_depth():
    g = build_grid(Domain.line(), GridSpec((8,), ((0.0,),), 0.5, 1e-9))
    assert g.points[:, 0].min() < 1e-9
    assert g.volume == pytest.approx(1.0)


@pytest.mark.parametrize("alpha", [-0.5, 0.5, 2.0])
def test_graded_midpoint_integrates_power(alpha):
    g = build_grid(Domain.line(), GridSpec((32,), ((0.0,),), 0.8, 1e-12))
    exact = 1.0 / (alpha + 1)
    assert g.integrate(g.points[:, 0] ** alpha) == pytest.approx(exact, rel=2e-2)


def test_gauss_rule_power_integrals():
    g = graded_gauss_rule(0.0, 1.0, [0.0])
    for alpha in [-0.5, 0.5, 1.5]:
        assert g.integrate(g.points[:, 0] ** alpha) == pytest.approx(1.0 / (alpha + 1), rel=1e-10)


def test_set_quadrature_volume_matches_ball():
    dom = Domain.line()
    E = Ball((0.3,), 0.1)
    g = set_quadrature(E, dom, GridSpec((16,)))
    assert g.volume == pytest.approx(E.volume)
    assert g.points.min() >= 0.2 - 1e-12 and g.points.max() <= 0.4 + 1e-12


def test_product_grid_is_tensor():
    g = build_grid(Domain.product(1, 1), GridSpec((4,)))
    assert g.points.shape == (16, 2)
    assert g.volume == pytest.approx(1.0)


def test_resolution_ladder_refines():
    specs = resolution_ladder(GridSpec((8,)), [1e-2, 1e-4, 1e-6])
    assert [s.counts for s in specs] == [(8,), (16,), (32,)]
    assert [s.depth for s in specs] == [1e-2, 1e-4, 1e-6]


def test_distance_to_singular():
    g = build_grid(Domain.line(), GridSpec((4,), ((0.0,),), 0.5, 1e-6))
    assert 0 < g.distance_to([(0.0,)]) < 1e-6
