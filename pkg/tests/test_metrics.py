import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from matrixap.domain import Domain, SetFamily, holder_conjugate
from matrixap.grids import GridSpec
from matrixap.linalg import random_hpd
from matrixap.metrics import (NotLocallyIntegrableError, a2_averaged_matrix_constant, ap_condition_check,
                              ap_refinement, default_ladder, duality_transform, local_integrability, rho,
                              rho_dual, roudenko_constant, roudenko_refinement, slice_weight, sphere_points,
                              uniform_slice_check)
from matrixap.verdicts import Verdict
from matrixap.weights import catalog_weight

LINE = Domain.line()
ANCHORED = SetFamily.anchored_intervals(LINE, 1e-3, 0.5, 3)
SPEC = GridSpec((32,), grading=0.85, depth=1e-10)


def scalar_ap(alpha, p):
    """Exact A_p constant of |x|^alpha on zero-anchored intervals (scale invariant)."""
    q = holder_conjugate(p)
    return (1 / (1 + alpha)) * (1 / (1 - alpha * q / p)) ** (p / q)


def test_pointwise_metrics_duality(rng):
    W = catalog_weight("rotated_power")
    x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    # rho_dual is the dual norm of rho: |<x, y>| <= rho(y) rho_dual(x)
    ys = rng.standard_normal((200, 2)) + 1j * rng.standard_normal((200, 2))
    ratios = [abs(np.vdot(y, x)) / rho(W, 2.0, 0.3, y) for y in ys]
    assert max(ratios) <= rho_dual(W, 2.0, 0.3, x) * (1 + 1e-12)


def test_sphere_points_unit_and_seeded():
    Y = sphere_points(3, 64, seed=5)
    assert np.allclose(np.linalg.norm(Y, axis=1), 1.0)
    assert np.array_equal(Y, sphere_points(3, 64, seed=5))


@pytest.mark.parametrize("N", [1, 2, 3])
def test_identity_constants(N):
    W = catalog_weight("identity", {"N": N})
    fam = SetFamily.lattice(LINE, 3, 0.05, 0.2, 2)
    assert ap_condition_check(W, 2.0, fam, sphere_count=max(64, 2 * N * N)).c_hat == pytest.approx(1.0, rel=2e-2)
    assert roudenko_constant(W, 2.0, fam).c_prime_hat == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=6)
@given(st.integers(0, 10_000), st.sampled_from([1.5, 2.0, 3.0]))
def test_constant_weight_constants_are_one(seed, p):
    M = random_hpd(np.random.default_rng(seed), 2, 20.0)
    W = catalog_weight("constant", {"matrix": np.stack([M.real, M.imag], -1).tolist()})
    fam = SetFamily.lattice(LINE, 2, 0.1, 0.2, 2)
    assert roudenko_constant(W, p, fam, GridSpec((4,))).c_prime_hat == pytest.approx(1.0, abs=1e-9)
    assert ap_condition_check(W, p, fam, 256, GridSpec((4,)), require_integrable=False).c_hat == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("alpha,p", [(0.5, 2.0), (-0.5, 2.0), (0.5, 3.0), (-0.3, 1.5)])
def test_scalar_power_matches_exact_constant(alpha, p):
    W = catalog_weight("scalar_power", {"alpha": alpha})
    exact = scalar_ap(alpha, p)
    assert roudenko_constant(W, p, ANCHORED, SPEC).c_prime_hat == pytest.approx(exact, rel=2e-2)
    # for N = 1 the norm constant is the p-th root of the scalar constant
    assert ap_condition_check(W, p, ANCHORED, 8, SPEC).c_hat == pytest.approx(exact ** (1 / p), rel=2e-2)


def test_frobenius_option_dominates_spectral():
    W = catalog_weight("rotated_power")
    fam = SetFamily.lattice(LINE, 2, 0.1, 0.25, 2)
    spec = roudenko_constant(W, 2.0, fam, GridSpec((16,), grading=0.8, depth=1e-6)).c_prime_hat
    frob = roudenko_constant(W, 2.0, fam, GridSpec((16,), grading=0.8, depth=1e-6), "frobenius").c_prime_hat
    assert frob >= spec
    with pytest.raises(ValueError):
        roudenko_constant(W, 2.0, fam, norm="nuclear")


def test_example_a2_constant_under_closed_form_bound():
    W = catalog_weight("paper_example")
    est = a2_averaged_matrix_constant(W, ANCHORED, SPEC)
    assert est.value <= np.sqrt(8 / 3) + 1e-3


def test_non_integrable_weight_flagged():
    W = catalog_weight("diag_power", {"alpha": [3.0, 0.0]})
    assert not local_integrability(W, 2.0).integrable
    with pytest.raises(NotLocallyIntegrableError):
        ap_condition_check(W, 2.0, ANCHORED)
    lad = ap_refinement(W, 2.0, ANCHORED, sphere_count=64)
    assert lad.verdict is Verdict.DIVERGENCE_SUSPECTED and lad.reason


def test_refinement_ladder_identity():
    lad = roudenko_refinement(catalog_weight("identity"), 2.0, SetFamily.lattice(LINE, 2, 0.1, 0.2, 2),
                              default_ladder(GridSpec((8,))))
    assert lad.verdict is Verdict.BOUNDED
    assert np.allclose(lad.values, 1.0)
    assert len(lad.to_dict()["trace"]) == 3


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_duality_transform_exponents(p):
    W = catalog_weight("rotated_power")
    V, q = duality_transform(W, p)
    assert 1 / p + 1 / q == pytest.approx(1)
    M, Mv = W.evaluate_many([0.4])[0], V.evaluate_many([0.4])[0]
    lam, lamv = np.linalg.eigvalsh(M), np.linalg.eigvalsh(Mv)
    assert np.allclose(np.sort(lam ** (-q / p)), lamv)


def test_duality_preserves_roudenko_for_scalar():
    W = catalog_weight("scalar_power", {"alpha": 0.4})
    V, q = duality_transform(W, 3.0)
    a = roudenko_constant(W, 3.0, ANCHORED, SPEC).c_prime_hat
    b = roudenko_constant(V, q, ANCHORED, SPEC).c_prime_hat
    # scalar A_p constant of w equals A_q constant of w^{-q/p} raised to p/q... both finite
    assert a ** (1 / 3.0) == pytest.approx(b ** (1 / q), rel=2e-2)


def test_slices_of_product_weight():
    W = catalog_weight("product_diag_power", {"alpha": [0.3], "beta": [-0.4]})
    S = slice_weight(W, "x", [0.7])
    assert np.allclose(S.evaluate_many([[0.2]])[0, 0, 0], 0.2 ** 0.3 * 0.7 ** -0.4)
    rep = uniform_slice_check(W, 2.0, "x", 3, ANCHORED, default_ladder(GridSpec((16,))))
    assert rep.spread < 1e-6  # a product power weight: every slice is a rescaled copy
    assert rep.supremum == pytest.approx(1 / (1 - 0.09), rel=2e-2)
    with pytest.raises(ValueError):
        uniform_slice_check(catalog_weight("identity"), 2.0, "x", 3, ANCHORED)


def test_example_ap_constant_matches_spectral_closed_form():
    # for p = 2 the constant is |(avg W^{-1})^{1/2} (avg W)^{1/2}|, and on
    # zero-anchored intervals avg W avg W^{-1} = (4/3) I
    W = catalog_weight("paper_example")
    est = ap_condition_check(W, 2.0, ANCHORED, 256, SPEC)
    assert est.c_hat == pytest.approx(2 / np.sqrt(3), rel=1e-3)
