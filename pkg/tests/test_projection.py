import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from matrixap.domain import Domain
from matrixap.grids import GridSpec, build_grid
from matrixap.linalg import random_hpd
from matrixap.projection import (CoordinateTarget, DirectionField, bump_grid, coordinate_criterion_values,
                                 coordinate_projection_bound, criterion_values, eigen_projection_check,
                                 generate_witness, measure_ratio, projection_bound, projection_ladder,
                                 triangular_bump, weighted_lp_norm)
from matrixap.verdicts import Verdict
from matrixap.weights import ClosedFormWeight, ScalarWeight, catalog_weight

LINE = Domain.line()


def diag_x2():
    return catalog_weight("diag_power", {"alpha": [0.0, 2.0]})


def test_direction_fields():
    e = DirectionField.basis(3, 1)
    assert np.allclose(e(np.zeros((2, 1))), [[0, 1, 0]] * 2)
    with pytest.raises(IndexError):
        DirectionField.basis(2, 2)
    v = DirectionField.constant([3.0, 4.0])
    assert np.allclose(np.linalg.norm(v(np.zeros((1, 1))), axis=1), 1.0)


def test_criterion_for_diag_weight():
    # g(t) = w^{1/2} |W^{-1/2} e_2| = 1/t for W = diag(1, t^2), w = 1
    pts = np.array([[0.1], [0.5]])
    vals = criterion_values(diag_x2(), ScalarWeight.constant(1.0, LINE), 2.0, DirectionField.basis(2, 1), pts)
    assert np.allclose(vals, [10.0, 2.0])


def test_example_entry_criterion_diverges_like_sqrt():
    est = coordinate_projection_bound(catalog_weight("paper_example"), 2.0, 0, "entry_of_w")
    assert est.verdict is Verdict.DIVERGENCE_SUSPECTED
    assert est.rate == pytest.approx(-0.5, abs=0.05)
    sq = coordinate_projection_bound(catalog_weight("paper_example"), 2.0, 0, "entry_of_w", squared=True)
    assert sq.rate == pytest.approx(-1.0, abs=0.05)


@given(st.floats(1e-6, 1.0))
def test_example_squared_criterion_closed_form(x):
    v = coordinate_criterion_values(catalog_weight("paper_example"), 2.0, 0, CoordinateTarget.ENTRY_OF_W, [[x]])
    assert v[0] ** 2 == pytest.approx(1 + 1 / x, rel=1e-10)


def test_bounded_on_diagonal_weight():
    W = catalog_weight("diag_power", {"alpha": [0.2, -0.2]})
    est = coordinate_projection_bound(W, 2.0, 0, "entry_of_power_target")
    assert est.verdict is Verdict.BOUNDED
    assert est.b_hat == pytest.approx(1.0)


def test_rotation_mixes_in_growth():
    # both w_11 and w_11^(-1) pick up the t^-0.2 eigenvalue, so g ~ t^-0.2
    W = catalog_weight("rotated_power", {"alpha": [0.2, -0.2]})
    est = coordinate_projection_bound(W, 2.0, 0, "entry_of_power_target")
    assert est.verdict is Verdict.DIVERGENCE_SUSPECTED
    assert est.rate == pytest.approx(-0.2, abs=0.03)


def test_bad_index():
    with pytest.raises(IndexError):
        coordinate_criterion_values(diag_x2(), 2.0, 5, "entry_of_w", [[0.5]])


def test_projection_ladder_depths():
    specs = projection_ladder()
    assert all(s.counts == specs[0].counts for s in specs)
    assert [s.depth for s in specs] == sorted([s.depth for s in specs], reverse=True)


@settings(max_examples=25)
@given(st.integers(0, 2**31 - 1), st.integers(2, 6), st.sampled_from([1.5, 2.0, 3.0]))
def test_eigen_identity_random_matrices(seed, n, p):
    M = random_hpd(np.random.default_rng(seed), n, 1e3)
    W = ClosedFormWeight("const", n, LINE, lambda pts: np.broadcast_to(M, (len(pts), n, n)).copy())
    for i in range(n):
        chk = eigen_projection_check(W, p, i, [[0.5]])
        assert chk.max_deviation <= 1e-9


def test_eigen_identity_degenerate_flagged():
    chk = eigen_projection_check(catalog_weight("identity"), 2.0, 0, build_grid(LINE, GridSpec((8,))))
    assert chk.checked == 0 and chk.flagged == 8


def test_bump_has_unit_mass():
    g = bump_grid([0.3], 0.05, 16)
    assert g.integrate(triangular_bump(g.points, [0.3], 0.05)) == pytest.approx(1.0, abs=1e-14)


def test_witness_ratio_tends_to_criterion():
    W = diag_x2()
    w = ScalarWeight.constant(1.0, LINE)
    fam = generate_witness(W, w, 2.0, DirectionField.basis(2, 1), [0.1], [0.05, 0.01, 0.001])
    r = fam.ratios()
    assert abs(r[-1] - 10) < abs(r[0] - 10)
    assert r[-1] == pytest.approx(10.0, rel=1e-3)
    assert np.allclose(fam.lp_norms(), 1.0)
    with pytest.raises(ValueError):
        generate_witness(W, w, 2.0, DirectionField.basis(2, 1), [0.01], [0.05])


def test_measure_ratio_bounded_by_ess_sup(rng):
    W = catalog_weight("rotated_power", {"alpha": [0.3, -0.3]})
    w = ScalarWeight.constant(1.0, LINE)
    r = DirectionField.basis(2, 0)
    est = projection_bound(W, w, 2.0, r)
    g = build_grid(LINE, GridSpec((64,), ((0.0,),), 0.7, 1e-4))
    for _ in range(10):
        f = rng.standard_normal((len(g), 2)) + 1j * rng.standard_normal((len(g), 2))
        assert measure_ratio(f, W, w, 2.0, g, r) <= 1.05 * est.b_hat
    assert weighted_lp_norm(np.ones((len(g), 2)), catalog_weight("identity"), 2.0, g) == pytest.approx(np.sqrt(2))
