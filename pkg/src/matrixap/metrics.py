"""Averaged norms rho_{p,E}, the A_p and Roudenko constants, and product slices.

All suprema are taken over finitely many sets, sphere directions and
quadrature nodes, so every reported constant is a lower bound at the stated
resolution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .domain import SetFamily, enumerate_sets, holder_conjugate
from .grids import GridSpec, SampleGrid, build_grid, resolution_ladder, set_quadrature
from .linalg import fractional_power, frobenius_norm, matvec, spectral_norm
from .verdicts import LevelRecord, Verdict, classify
from .weights import MatrixWeight, SlicedWeight, WeightPower

DEFAULT_SPEC = GridSpec(counts=(32,), grading=0.85, depth=1e-10)
DEFAULT_DEPTHS = (1e-4, 1e-7, 1e-10)
INTEGRABILITY_RATIO = 10.0
# stop exact dual solves once sphere overestimates are within this of the best exact ratio
DUAL_RTOL = 1e-3
_CHUNK = 4096


class NotLocallyIntegrableError(ValueError):
    pass


# ----------------------------------------------------------------------
# pointwise and averaged metrics
# ----------------------------------------------------------------------

def _vec(x, N):
    x = np.asarray(x, dtype=complex).reshape(-1)
    if len(x) != N:
        raise ValueError(f"vector has {len(x)} entries, weight has N={N}")
    return x


def rho(W: MatrixWeight, p: float, t, x) -> float:
    """``|W(t)^{1/p} x|``."""
    holder_conjugate(p)
    return float(np.linalg.norm(fractional_power(W.evaluate(t), 1.0 / p) @ _vec(x, W.N)))


def rho_dual(W: MatrixWeight, p: float, t, x) -> float:
    """``|W(t)^{-1/p} x|``, the dual metric of ``rho``."""
    holder_conjugate(p)
    return float(np.linalg.norm(fractional_power(W.evaluate(t), -1.0 / p) @ _vec(x, W.N)))


def _quadrature(W: MatrixWeight, E, spec: GridSpec | None) -> SampleGrid:
    spec = spec or DEFAULT_SPEC
    return set_quadrature(E, W.domain, spec.with_singular(W.singular_points))


def averaged_norms(P: np.ndarray, grid: SampleGrid, X: np.ndarray, r: float, volume: float) -> np.ndarray:
    """``(1/|E| sum_t w_t |P_t x_k|^r)^{1/r}`` for every row ``x_k`` of ``X``."""
    X = np.atleast_2d(X)
    acc = np.zeros(len(X))
    for s in range(0, len(P), _CHUNK):
        V = np.linalg.norm(matvec(P[s:s + _CHUNK], X), axis=2)
        acc += grid.weights[s:s + _CHUNK] @ V ** r
    return (acc / volume) ** (1.0 / r)


def rho_avg(W: MatrixWeight, p: float, E, x, spec: GridSpec | None = None) -> float:
    """``rho_{p,E}(x) = (avg_E |W^{1/p}(t) x|^p)^{1/p}``."""
    g = _quadrature(W, E, spec)
    return float(averaged_norms(W.power_many(g.points, 1.0 / p), g, _vec(x, W.N), p, E.volume)[0])


def rho_dual_avg(W: MatrixWeight, p: float, E, x, spec: GridSpec | None = None) -> float:
    """``rho*_{q,E}(x) = (avg_E |W^{-1/p}(t) x|^q)^{1/q}``."""
    q = holder_conjugate(p)
    g = _quadrature(W, E, spec)
    return float(averaged_norms(W.power_many(g.points, -1.0 / p), g, _vec(x, W.N), q, E.volume)[0])


# ----------------------------------------------------------------------
# sphere discretisation and dual norms
# ----------------------------------------------------------------------

def sphere_points(N: int, count: int = 512, seed: int = 0) -> np.ndarray:
    """Quasi-uniform unit vectors in ``C^N`` (global phase is irrelevant and fixed).

    ``N = 2`` uses a Fibonacci lattice on the Bloch sphere
    ``(cos(theta/2), e^{i phi} sin(theta/2))``; larger ``N`` uses the basis
    vectors followed by seeded complex Gaussian directions.
    """
    if N == 1:
        return np.ones((1, 1), dtype=complex)
    if N == 2:
        k = np.arange(count) + 0.5
        theta = np.arccos(1.0 - 2.0 * k / count)
        phi = math.pi * (3.0 - math.sqrt(5.0)) * k
        return np.stack([np.cos(theta / 2) + 0j, np.exp(1j * phi) * np.sin(theta / 2)], axis=1)
    rng = np.random.default_rng(seed)
    extra = max(count - N, 0)
    Z = rng.standard_normal((extra, N)) + 1j * rng.standard_normal((extra, N))
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    return np.concatenate([np.eye(N, dtype=complex), Z])[:max(count, N)]


def _complement_basis(x: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the complex orthogonal complement of ``x``."""
    Q, _ = np.linalg.qr(np.column_stack([x, np.eye(len(x), dtype=complex)]))
    return Q[:, 1:len(x)]


def exact_dual(x, y0, P: np.ndarray, grid: SampleGrid, p: float, volume: float) -> tuple[float, np.ndarray]:
    """Dual norm of ``rho_{p,E}`` at ``x`` by convex minimisation.

    ``rho*(x) = 1 / min{rho(y) : <x, y> = 1}``; the affine constraint is
    parametrised as ``y = y0 + B z`` with ``B`` spanning ``x^perp`` and
    ``rho(y)^p`` minimised by BFGS with its analytic gradient. ``y0`` only
    seeds the search. Returns the value and the maximising unit vector.
    """
    x = np.asarray(x, dtype=complex)
    y0 = np.asarray(y0, dtype=complex)
    ip = np.vdot(x, y0)
    y0 = y0 / ip if abs(ip) > 1e-12 else x / np.vdot(x, x)
    B = _complement_basis(x)
    base = x / np.vdot(x, x)
    z0 = B.conj().T @ y0
    n = B.shape[1]
    w = grid.weights / volume

    def f(v):
        y = base + B @ (v[:n] + 1j * v[n:])
        Py = np.einsum("mij,j->mi", P, y)
        r = np.linalg.norm(Py, axis=1)
        val = w @ r ** p
        G = p * np.einsum("m,mji,mj->i", w * r ** (p - 2), P.conj(), Py)
        gz = B.conj().T @ G
        return float(val), np.concatenate([gz.real, gz.imag])

    res = minimize(f, np.concatenate([z0.real, z0.imag]), jac=True, method="BFGS",
                   options={"gtol": 1e-12, "maxiter": 200})
    y = base + B @ (res.x[:n] + 1j * res.x[n:])
    val = 1.0 / float(res.fun) ** (1.0 / p)
    return val, y / np.linalg.norm(y)


def dual_of_avg(W: MatrixWeight, p: float, E, x, sphere_count: int = 512, spec: GridSpec | None = None,
                seed: int = 0, refine: bool = True) -> float:
    """Lower bound for the dual norm of ``rho_{p,E}`` at ``x``.

    Maximises ``|<x, y>| / rho_{p,E}(y)`` over a sphere discretisation, then
    (with ``refine``) solves the convex dual problem from the best direction.
    """
    if sphere_count < 2 * W.N ** 2:
        raise ValueError(f"sphere_count must be >= 2N^2 = {2 * W.N ** 2}")
    x = _vec(x, W.N)
    g = _quadrature(W, E, spec)
    P = W.power_many(g.points, 1.0 / p)

    def norm_fn(Y):
        return averaged_norms(P, g, Y, p, E.volume)

    Y = sphere_points(W.N, sphere_count, seed)
    vals = np.abs(Y.conj() @ x) / norm_fn(Y)
    k = int(np.argmax(vals))
    best = float(vals[k])
    if refine and W.N > 1:
        best = max(best, exact_dual(x, Y[k], P, g, p, E.volume)[0])
    return best


# ----------------------------------------------------------------------
# result containers
# ----------------------------------------------------------------------

@dataclass
class SetValue:
    set: dict
    value: float
    direction: list | None = None

    def to_dict(self):
        d = {"set": self.set, "value": self.value}
        if self.direction is not None:
            d["direction"] = self.direction
        return d


def _cplx(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v).ravel()]


@dataclass
class ApEstimate:
    """Sampled ``C`` of the averaged-metric A_p condition."""

    c_hat: float
    argmax_set: dict
    argmax_direction: list
    per_set: list[SetValue]
    sphere_count: int
    resolution: dict
    integrability: "IntegrabilityReport | None" = None

    def to_dict(self):
        return {"c_hat": self.c_hat, "argmax_set": self.argmax_set, "argmax_direction": self.argmax_direction,
                "per_set": [s.to_dict() for s in self.per_set], "sphere_count": self.sphere_count,
                "resolution": self.resolution,
                "integrability": None if self.integrability is None else self.integrability.to_dict(),
                "note": "lower bound: finite set family, sphere discretisation and quadrature"}


@dataclass
class RoudenkoEstimate:
    """Sampled ``C'`` of the double-integral condition."""

    c_prime_hat: float
    argmax_set: dict
    per_set: list[SetValue]
    resolution: dict
    norm: str = "spectral"

    def to_dict(self):
        return {"c_prime_hat": self.c_prime_hat, "argmax_set": self.argmax_set,
                "per_set": [s.to_dict() for s in self.per_set], "resolution": self.resolution,
                "norm": self.norm}


@dataclass
class A2Estimate:
    value: float
    argmax_set: dict
    per_set: list[SetValue]
    resolution: dict

    def to_dict(self):
        return {"value": self.value, "argmax_set": self.argmax_set,
                "per_set": [s.to_dict() for s in self.per_set], "resolution": self.resolution}


@dataclass
class IntegrabilityReport:
    integrable: bool
    integrals_w: list[float]
    integrals_dual: list[float]
    depths: list[float]

    def to_dict(self):
        return {"integrable": self.integrable, "integrals_w": self.integrals_w,
                "integrals_dual": self.integrals_dual, "depths": self.depths,
                "ratio_limit": INTEGRABILITY_RATIO}


@dataclass
class Ladder:
    """Estimates at increasing resolution plus the divergence verdict."""

    estimates: list
    trace: list[LevelRecord]
    verdict: Verdict
    rate: float
    reason: str = ""

    @property
    def values(self) -> list[float]:
        return [lv.value for lv in self.trace]

    @property
    def growth(self) -> float:
        return -self.rate

    def to_dict(self):
        return {"verdict": self.verdict.value, "rate": self.rate, "reason": self.reason,
                "trace": [lv.to_dict() for lv in self.trace],
                "estimates": [e.to_dict() for e in self.estimates]}


# ----------------------------------------------------------------------
# estimators
# ----------------------------------------------------------------------

def local_integrability(W: MatrixWeight, p: float, depths=DEFAULT_DEPTHS, counts: int = 32,
                        grading: float = 0.85) -> IntegrabilityReport:
    """Graded quadrature of ``|W|`` and ``|W^{-q/p}|`` over the window at several depths.

    Integrable at the declared resolution when consecutive integrals grow by
    less than a factor ``INTEGRABILITY_RATIO``.
    """
    q = holder_conjugate(p)
    iw, idual = [], []
    for dep in depths:
        spec = GridSpec((counts,), W.singular_points, grading, dep)
        g = build_grid(W.domain, spec)
        iw.append(float(g.integrate(spectral_norm(W.evaluate_many(g.points)))))
        idual.append(float(g.integrate(spectral_norm(W.power_many(g.points, -q / p)))))
    ok = True
    for seq in (iw, idual):
        for a, b in zip(seq, seq[1:]):
            if not (np.isfinite(b) and b < INTEGRABILITY_RATIO * a):
                ok = False
    return IntegrabilityReport(ok, iw, idual, list(depths))


def ap_condition_check(W: MatrixWeight, p: float, family: SetFamily, sphere_count: int = 512,
                       spec: GridSpec | None = None, seed: int = 0, require_integrable: bool = True,
                       integrability: IntegrabilityReport | None = None, refine_rounds: int | None = None) -> ApEstimate:
    """Estimate ``C = sup_E sup_x rho*_{q,E}(x) / (rho_{p,E})*(x)``.

    ``refine_rounds`` caps the exact dual solves per set (default: as many as
    there are sphere directions).
    """
    q = holder_conjugate(p)
    spec = spec or DEFAULT_SPEC
    if sphere_count < 2 * W.N ** 2:
        raise ValueError(f"sphere_count must be >= 2N^2 = {2 * W.N ** 2}")
    if require_integrable:
        integrability = integrability or local_integrability(W, p)
        if not integrability.integrable:
            raise NotLocallyIntegrableError(
                f"{W.name} is not locally integrable at declared resolution (p={p})")
    Y = sphere_points(W.N, sphere_count, seed)
    gram = np.abs(Y.conj() @ Y.T)  # gram[i, k] = |<x_i, y_k>|
    per_set = []
    for E in enumerate_sets(family, W.domain):
        g = _quadrature(W, E, spec)
        Pp = W.power_many(g.points, 1.0 / p)
        Pm = W.power_many(g.points, -1.0 / p)
        avg_p = averaged_norms(Pp, g, Y, p, E.volume)
        avg_dual = averaged_norms(Pm, g, Y, q, E.volume)
        dual = np.max(gram / avg_p[None, :], axis=1)
        ratio = avg_dual / dual
        if W.N > 1:
            # sphere duals are underestimates, so ratios are overestimates:
            # solve exactly at the current argmax until no unsolved direction
            # can beat the best exact ratio by more than DUAL_RTOL
            refined = np.zeros(len(Y), dtype=bool)
            for _ in range(refine_rounds or len(Y)):
                i = int(np.argmax(np.where(refined, -np.inf, ratio)))
                if refined.any() and ratio[i] <= ratio[refined].max() * (1 + DUAL_RTOL):
                    break
                k = int(np.argmax(gram[i] / avg_p))
                val, y = exact_dual(Y[i], Y[k], Pp, g, p, E.volume)
                # the optimiser is also a candidate for every other direction
                cand = np.abs(Y.conj() @ y) / averaged_norms(Pp, g, y, p, E.volume)[0]
                dual = np.maximum(dual, cand)
                dual[i] = max(dual[i], val)
                ratio = avg_dual / dual
                refined[i] = True
                if refined.all():
                    break
            ratio = np.where(refined, ratio, -np.inf)
        i = int(np.argmax(ratio))
        per_set.append(SetValue(E.to_dict(), float(ratio[i]), _cplx(Y[i])))
    best = max(per_set, key=lambda s: s.value)
    return ApEstimate(best.value, best.set, best.direction, per_set, sphere_count, spec.to_dict(), integrability)


def a2_averaged_matrix_constant(W: MatrixWeight, family: SetFamily, spec: GridSpec | None = None) -> A2Estimate:
    """``sup_E |(avg_E W)^{1/2} (avg_E W^{-1})^{1/2}|_F`` (p = 2)."""
    spec = spec or DEFAULT_SPEC
    per_set = []
    for E in enumerate_sets(family, W.domain):
        g = _quadrature(W, E, spec)
        A = g.integrate(W.evaluate_many(g.points)) / E.volume
        B = g.integrate(W.power_many(g.points, -1.0)) / E.volume
        val = float(frobenius_norm(fractional_power(A, 0.5) @ fractional_power(B, 0.5)))
        per_set.append(SetValue(E.to_dict(), val))
    best = max(per_set, key=lambda s: s.value)
    return A2Estimate(best.value, best.set, per_set, spec.to_dict())


def _pair_norms(A: np.ndarray, B: np.ndarray, norm: str) -> np.ndarray:
    """``|A_i B_j|`` for all pairs, shape ``(len(A), len(B))``."""
    prod = np.einsum("iab,jbc->ijac", A, B)
    if norm == "frobenius":
        return frobenius_norm(prod)
    if A.shape[-1] == 1:
        return np.abs(prod[..., 0, 0])
    return spectral_norm(prod)


def roudenko_constant(W: MatrixWeight, p: float, family: SetFamily, spec: GridSpec | None = None,
                      norm: str = "spectral") -> RoudenkoEstimate:
    """``sup_E avg_x (avg_t |W^{1/p}(x) W^{-1/p}(t)|^q)^{p/q}``."""
    if norm not in ("spectral", "frobenius"):
        raise ValueError("norm must be 'spectral' or 'frobenius'")
    q = holder_conjugate(p)
    spec = spec or DEFAULT_SPEC
    per_set = []
    for E in enumerate_sets(family, W.domain):
        g = _quadrature(W, E, spec)
        A = W.power_many(g.points, 1.0 / p)
        B = W.power_many(g.points, -1.0 / p)
        M = len(A)
        rows = max(1, min(M, 2_000_000 // max(M, 1)))
        inner = np.empty(M)
        for s in range(0, M, rows):
            inner[s:s + rows] = _pair_norms(A[s:s + rows], B, norm) ** q @ g.weights / E.volume
        val = float(g.weights @ inner ** (p / q) / E.volume)
        per_set.append(SetValue(E.to_dict(), val))
    best = max(per_set, key=lambda s: s.value)
    return RoudenkoEstimate(best.value, best.set, per_set, spec.to_dict(), norm)


def _ladder_scale(spec: GridSpec, W: MatrixWeight) -> float:
    return spec.depth if W.singular_points else 1.0 / max(spec.counts)


def _ladder(estimates, values, specs, W, argmaxes=None, reason=""):
    trace = [LevelRecord(_ladder_scale(s, W), float(v), a, s.to_dict())
             for s, v, a in zip(specs, values, argmaxes or [None] * len(values))]
    verdict, rate = classify([t.scale for t in trace], values)
    if reason:
        verdict = Verdict.DIVERGENCE_SUSPECTED
    return Ladder(estimates, trace, verdict, rate, reason)


def default_ladder(base: GridSpec | None = None, depths=DEFAULT_DEPTHS) -> list[GridSpec]:
    return resolution_ladder(base or DEFAULT_SPEC, depths)


def ap_refinement(W: MatrixWeight, p: float, family: SetFamily, specs=None, sphere_count: int = 512,
                  seed: int = 0) -> Ladder:
    """``ap_condition_check`` across a resolution ladder with a divergence verdict.

    A weight failing the local integrability test is classed divergent; its
    constants are still computed for the trace.
    """
    specs = list(specs or default_ladder())
    integ = local_integrability(W, p)
    ests = [ap_condition_check(W, p, family, sphere_count, s, seed, require_integrable=False,
                               integrability=integ) for s in specs]
    reason = "" if integ.integrable else "not locally integrable at declared resolution"
    return _ladder(ests, [e.c_hat for e in ests], specs, W, reason=reason)


def roudenko_refinement(W: MatrixWeight, p: float, family: SetFamily, specs=None,
                        norm: str = "spectral") -> Ladder:
    specs = list(specs or default_ladder())
    ests = [roudenko_constant(W, p, family, s, norm) for s in specs]
    return _ladder(ests, [e.c_prime_hat for e in ests], specs, W)


def a2_refinement(W: MatrixWeight, family: SetFamily, specs=None) -> Ladder:
    specs = list(specs or default_ladder())
    ests = [a2_averaged_matrix_constant(W, family, s) for s in specs]
    return _ladder(ests, [e.value for e in ests], specs, W)


def duality_transform(W: MatrixWeight, p: float) -> tuple[MatrixWeight, float]:
    """``(W^{-q/p}, q)``: A_p membership of ``W`` is A_q membership of the result."""
    q = holder_conjugate(p)
    return WeightPower(W, -q / p), q


# ----------------------------------------------------------------------
# product slices
# ----------------------------------------------------------------------

def slice_weight(W: MatrixWeight, axis: str, frozen) -> SlicedWeight:
    """Weight in the free variable ``axis`` with the other factor frozen at ``frozen``."""
    return SlicedWeight(W, axis, frozen)


@dataclass
class SliceReport:
    axis: str
    slices: list[list[float]]
    constants: list[float]
    ladders: list[Ladder] = field(default_factory=list)

    @property
    def supremum(self) -> float:
        return max(self.constants)

    @property
    def spread(self) -> float:
        """Relative spread ``max/min - 1`` of the per-slice constants."""
        return max(self.constants) / min(self.constants) - 1.0

    @property
    def verdicts(self) -> list[Verdict]:
        return [lad.verdict for lad in self.ladders]

    def to_dict(self):
        return {"axis": self.axis, "slices": self.slices, "constants": self.constants,
                "supremum": self.supremum, "spread": self.spread,
                "ladders": [lad.to_dict() for lad in self.ladders]}


def _slice_coords(W: MatrixWeight, axis: str, slice_samples):
    fixed = 1 if axis == "x" else 0
    dom = W.domain.factor(fixed)
    if np.ndim(slice_samples) == 0:
        n = int(slice_samples)
        lo = np.array([w[0] for w in dom.window])
        hi = np.array([w[1] for w in dom.window])
        u = (np.arange(n) + 0.5) / n
        return [list(lo + (hi - lo) * uk) for uk in u]
    return [list(np.atleast_1d(s).astype(float)) for s in slice_samples]


def uniform_slice_check(W: MatrixWeight, p: float, axis: str, slice_samples, family_on_factor: SetFamily,
                        specs=None) -> SliceReport:
    """Roudenko constant of every slice ``W(., y0)`` (or ``W(x0, .)``) across a resolution ladder."""
    if not W.domain.is_product:
        raise ValueError("uniform_slice_check needs a product-domain weight")
    specs = list(specs or default_ladder())
    coords = _slice_coords(W, axis, slice_samples)
    ladders = [roudenko_refinement(slice_weight(W, axis, c), p, family_on_factor, specs) for c in coords]
    return SliceReport(axis, coords, [lad.values[-1] for lad in ladders], ladders)
