import math

import pytest
from hypothesis import given, strategies as st

from matrixap.domain import Ball, Domain, ProductBall, SetFamily, enumerate_sets, holder_conjugate


@given(st.floats(1.01, 50.0))
def test_holder_conjugate_is_involution(p):
    q = holder_conjugate(p)
    assert 1 / p + 1 / q == pytest.approx(1.0)
    assert holder_conjugate(q) == pytest.approx(p, rel=1e-9)


@pytest.mark.parametrize("p", [1.0, 0.5, -2.0, math.inf])
def test_holder_conjugate_rejects_bad_exponents(p):
    with pytest.raises(ValueError):
        holder_conjugate(p)


def test_domain_kinds_and_factors():
    d = Domain.product(1, 2)
    assert d.is_product and not d.is_torus
    assert d.ndim == 3
    assert d.factor_axes(1) == (1, 2)
    assert d.factor(1).ndim == 2
    assert Domain.product_torus(1, 1).is_torus
    assert Domain.line().volume == pytest.approx(1.0)


def test_domain_dict_round_trip():
    for d in [Domain.line(1, ((0.0, 2.0),)), Domain.torus(2), Domain.product(1, 1), Domain.product_torus(1, 1)]:
        assert Domain.from_dict(d.to_dict()) == d


def test_lattice_family_sets_stay_in_window():
    dom = Domain.line()
    fam = SetFamily.lattice(dom, 5, 0.01, 0.5, 4)
    sets = enumerate_sets(fam, dom)
    assert len(sets) == 20
    for E in sets:
        assert isinstance(E, Ball)
        assert E.center[0] - E.radius >= -1e-12 and E.center[0] + E.radius <= 1 + 1e-12


def test_anchored_intervals_start_at_window_edge():
    dom = Domain.line()
    sets = enumerate_sets(SetFamily.anchored_intervals(dom, 1e-3, 0.5, 3), dom)
    assert [E.center[0] - E.radius for E in sets] == pytest.approx([0.0] * 3)
    with pytest.raises(ValueError):
        enumerate_sets(SetFamily.anchored_intervals(dom, 1e-3, 0.8, 3), dom)


def test_product_family_gives_product_balls():
    dom = Domain.product(1, 1)
    sets = enumerate_sets(SetFamily.lattice(dom, 2, 0.1, 0.25, 2), dom)
    assert all(isinstance(E, ProductBall) for E in sets)
    assert len(sets) == 2 * 2 * 2 * 2
    assert sets[0].volume == pytest.approx(sets[0].factors()[0][1] * 2 * sets[0].factors()[1][1] * 2)


def test_torus_radius_cap():
    dom = Domain.torus(1)
    with pytest.raises(ValueError):
        enumerate_sets(SetFamily.lattice(dom, 2, 0.1, 0.6, 2), dom)


def test_radius_too_large_for_window():
    dom = Domain.line()
    with pytest.raises(ValueError):
        enumerate_sets(SetFamily.lattice(dom, 2, 0.1, 0.75, 2), dom)
