"""Product singular kernels: size/smoothness/cancellation constants and truncated operators.

A kernel ``K(x, y)`` on ``R^n x R^m`` is tested on dyadic lattices for five constants, stored under
the keys ``C1``..``C5``:

  C1 cancellation       ``|int_{a1<|x|<a2, b1<|y|<b2} K| <= A``
  C2 partial integrals ``K_1(x) = int_{b1<|y|<b2} K(x, y) dy`` obeys ``|K_1(x)| <= A|x|^-n`` and
                        ``|D_h K_1(x)| <= A|h|^eta |x|^{-n-eta}`` for ``|x| >= 2|h|`` (and the same for ``K_2``)
  C3 size              ``|K(x, y)| <= A |x|^-n |y|^-m``
  C4 smoothness        ``|D_h^1 K| <= A |h|^eta |x|^{-n-eta} |y|^-m`` for ``|x| >= 2|h|`` (and in ``y``)
  C5 mixed smoothness  ``|D_{h,k}^{1,2} K| <= A (|h||k|)^eta |x|^{-n-eta} |y|^{-m-eta}``

Every constant is a maximum over a finite lattice, so a lower bound.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .transforms import DiscreteGridFunction, FourierMultiplierOp, NormEstimate, PeriodicGrid, weighted_operator_norm
from .verdicts import Verdict, fit_rate
from .weights import MatrixWeight

CONDITIONS = ("C1", "C2", "C3", "C4", "C5")
# peak-norm increments shrinking slower than this are read as growth
INCREMENT_RATIO_LIMIT = 0.9


@dataclass(frozen=True)
class Kernel:
    """Closed-form kernel; ``func(x, y)`` takes ``(..., n)`` and ``(..., m)`` arrays."""

    name: str
    n: int
    m: int
    func: Callable = field(compare=False)

    def __call__(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.asarray(self.func(x, y))


def _odd_power(v: np.ndarray, d: int) -> np.ndarray:
    """``v_1 / |v|^{d+1}``: the first Riesz kernel in dimension ``d`` (``1/v`` for d = 1)."""
    r = np.linalg.norm(v, axis=-1)
    return v[..., 0] / r ** (d + 1)


def product_hilbert() -> Kernel:
    return Kernel("product_hilbert", 1, 1, lambda x, y: 1.0 / (x[..., 0] * y[..., 0]))


def product_riesz(n: int = 2, m: int = 2) -> Kernel:
    if not (1 <= n <= 2 and 1 <= m <= 2):
        raise ValueError("kernel sweeps support factor dimensions 1 and 2")
    return Kernel(f"product_riesz_{n}_{m}", n, m, lambda x, y: _odd_power(x, n) * _odd_power(y, m))


def single_hilbert() -> Kernel:
    """``1/x`` in the first factor with no second factor (``m = 0``)."""
    return Kernel("single_hilbert", 1, 0, lambda x, y: 1.0 / x[..., 0])


KERNELS: dict[str, Callable[..., Kernel]] = {
    "product_hilbert": product_hilbert,
    "product_riesz": product_riesz,
    "single_hilbert": single_hilbert,
}


def register_kernel(name: str, func: Callable, n: int, m: int) -> Kernel:
    """Add a user closed-form kernel to the registry under ``name``."""
    k = Kernel(name, n, m, func)
    KERNELS[name] = lambda: k
    return k


def get_kernel(name: str, **params) -> Kernel:
    if name not in KERNELS:
        raise KeyError(f"unknown kernel {name!r}; known: {sorted(KERNELS)}")
    return KERNELS[name](**params)


# ----------------------------------------------------------------------
# lattices and annulus quadrature
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class KernelSweep:
    """Dyadic magnitudes ``2^j``, ``j in [-levels, levels]``, and quadrature orders."""

    levels: int = 6
    angles: int = 8
    radial_nodes: int = 32
    angular_nodes: int = 32

    @property
    def magnitudes(self) -> np.ndarray:
        return 2.0 ** np.arange(-self.levels, self.levels + 1)

    def directions(self, d: int) -> np.ndarray:
        if d == 1:
            return np.array([[1.0], [-1.0]])
        th = 2 * np.pi * np.arange(self.angles) / self.angles
        return np.stack([np.cos(th), np.sin(th)], axis=1)

    def to_dict(self):
        return {"levels": self.levels, "angles": self.angles, "radial_nodes": self.radial_nodes,
                "angular_nodes": self.angular_nodes}


def _lattice(sweep: KernelSweep, d: int) -> np.ndarray:
    """Points ``s * u`` for dyadic ``s`` and sweep directions ``u``."""
    return np.concatenate([s * sweep.directions(d) for s in sweep.magnitudes])


@functools.lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def annulus_rule(lo: float, hi: float, d: int, sweep: KernelSweep) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``lo < |x| < hi`` in ``R^d`` (Gauss-Legendre in ``log r``).

    Nodes come in antipodal pairs so odd integrands cancel exactly.
    """
    u, w = _gauss_legendre(sweep.radial_nodes)
    a, b = np.log(lo), np.log(hi)
    r = np.exp(0.5 * (b - a) * u + 0.5 * (a + b))
    wr = 0.5 * (b - a) * w * r
    if d == 1:
        pts = np.concatenate([r, -r])[:, None]
        return pts, np.concatenate([wr, wr])
    k = sweep.angular_nodes - sweep.angular_nodes % 2
    th = 2 * np.pi * np.arange(k) / k
    dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
    pts = (r[:, None, None] * dirs[None, :, :]).reshape(-1, 2)
    wts = (wr[:, None] * r[:, None] * np.full(k, 2 * np.pi / k)[None, :]).ravel()
    return pts, wts


def annulus_integral(K: Kernel, a: tuple[float, float], b: tuple[float, float], sweep: KernelSweep) -> float:
    px, wx = annulus_rule(a[0], a[1], K.n, sweep)
    py, wy = annulus_rule(b[0], b[1], K.m, sweep)
    vals = K(px[:, None, :], py[None, :, :])
    return float(wx @ vals @ wy)


def partial_integral(K: Kernel, x: np.ndarray, b: tuple[float, float], sweep: KernelSweep, axis: str) -> np.ndarray:
    """``K_1(x) = int_{b1<|y|<b2} K(x, y) dy`` (axis 'x') or ``K_2`` with the roles swapped."""
    if axis == "x":
        py, wy = annulus_rule(b[0], b[1], K.m, sweep)
        return K(x[:, None, :], py[None, :, :]) @ wy
    px, wx = annulus_rule(b[0], b[1], K.n, sweep)
    return K(px[None, :, :], x[:, None, :]) @ wx


# ----------------------------------------------------------------------
# condition estimates
# ----------------------------------------------------------------------

@dataclass
class KernelConditionEstimate:
    kernel: str
    eta: float
    constants: dict
    argmax: dict
    sweep: dict
    budget: float

    @property
    def passed(self) -> dict:
        return {c: (v is not None and np.isfinite(v) and v <= self.budget) for c, v in self.constants.items()}

    def to_dict(self):
        return {"kernel": self.kernel, "eta": self.eta, "constants": self.constants,
                "argmax": self.argmax, "sweep": self.sweep, "budget": self.budget, "passed": self.passed,
                "note": "lattice maxima; lower bounds for the true constants"}


def _pairs(mags):
    return [(a, b) for a, b in itertools.combinations(mags, 2)]


def _steps(x: np.ndarray, sweep: KernelSweep, d: int):
    """Every lattice step ``h`` with ``|x| >= 2|h|`` for every row of ``x``."""
    dirs = sweep.directions(d)
    mags = sweep.magnitudes
    for s in mags:
        for u in dirs:
            h = s * u
            ok = np.linalg.norm(x, axis=1) >= 2 * s
            if ok.any():
                yield h, ok


def _track(best: dict, arg: dict, key: str, vals: np.ndarray, where):
    if vals.size == 0:
        return
    i = int(np.nanargmax(vals))
    if best.get(key) is None or vals.flat[i] > best[key]:
        best[key] = float(vals.flat[i])
        arg[key] = where(i)


def kernel_condition_estimates(K: Kernel, eta: float = 1.0, sweep: KernelSweep | None = None,
                               budget: float = 100.0) -> KernelConditionEstimate:
    """Lattice maxima of the ratios for C1..C5 (``None`` where a condition needs a missing factor)."""
    sweep = sweep or KernelSweep()
    mags = sweep.magnitudes
    best: dict = {c: None for c in CONDITIONS}
    arg: dict = {c: None for c in CONDITIONS}
    X = _lattice(sweep, K.n)
    nx = np.linalg.norm(X, axis=1)

    if K.m == 0:
        Y = np.zeros((1, 0))
        ny = np.ones(1)
    else:
        Y = _lattice(sweep, K.m)
        ny = np.linalg.norm(Y, axis=1)
    val = np.abs(K(X[:, None, :], Y[None, :, :]))
    c3 = val * nx[:, None] ** K.n * ny[None, :] ** K.m
    _track(best, arg, "C3", c3, lambda i: {"x": X[i // len(Y)].tolist(), "y": Y[i % len(Y)].tolist()})

    # C4 in x (and in y below)
    for h, ok in _steps(X, sweep, K.n):
        Xs = X[ok]
        d = np.abs(K(Xs[:, None, :] + h, Y[None, :, :]) - K(Xs[:, None, :], Y[None, :, :]))
        env = np.linalg.norm(h) ** eta * nx[ok][:, None] ** (-K.n - eta) * ny[None, :] ** (-K.m)
        _track(best, arg, "C4", d / env,
               lambda i, Xs=Xs, h=h: {"x": Xs[i // len(Y)].tolist(), "y": Y[i % len(Y)].tolist(), "h": h.tolist()})
    if K.m > 0:
        for k, ok in _steps(Y, sweep, K.m):
            Ys = Y[ok]
            d = np.abs(K(X[:, None, :], Ys[None, :, :] + k) - K(X[:, None, :], Ys[None, :, :]))
            env = np.linalg.norm(k) ** eta * nx[:, None] ** (-K.n) * ny[ok][None, :] ** (-K.m - eta)
            _track(best, arg, "C4", d / env,
                   lambda i, Ys=Ys, k=k: {"x": X[i // len(Ys)].tolist(), "y": Ys[i % len(Ys)].tolist(),
                                          "k": k.tolist()})

        # C5: mixed differences
        for h, okx in _steps(X, sweep, K.n):
            Xs = X[okx]
            for k, oky in _steps(Y, sweep, K.m):
                Ys = Y[oky]
                xa, xb = Xs[:, None, :] + h, Xs[:, None, :]
                ya, yb = Ys[None, :, :] + k, Ys[None, :, :]
                d = np.abs(K(xa, ya) - K(xa, yb) - K(xb, ya) + K(xb, yb))
                env = ((np.linalg.norm(h) * np.linalg.norm(k)) ** eta * nx[okx][:, None] ** (-K.n - eta)
                       * ny[oky][None, :] ** (-K.m - eta))
                _track(best, arg, "C5", d / env,
                       lambda i, Xs=Xs, Ys=Ys, h=h, k=k: {"x": Xs[i // len(Ys)].tolist(),
                                                          "y": Ys[i % len(Ys)].tolist(),
                                                          "h": h.tolist(), "k": k.tolist()})

        # C1: annulus integrals over dyadic radius pairs
        for a in _pairs(mags):
            for b in _pairs(mags):
                v = np.array([abs(annulus_integral(K, a, b, sweep))])
                _track(best, arg, "C1", v, lambda i, a=a, b=b: {"alpha": list(a), "beta": list(b)})

        # C2: partial integrals K_1, K_2 and their differences
        for axis, pts, d_self in (("x", X, K.n), ("y", Y, K.m)):
            npts = np.linalg.norm(pts, axis=1)
            for b in _pairs(mags):
                Kp = np.abs(partial_integral(K, pts, b, sweep, axis))
                _track(best, arg, "C2", Kp * npts ** d_self,
                       lambda i, pts=pts, b=b, axis=axis: {"axis": axis, "point": pts[i].tolist(), "range": list(b)})
                for h, ok in _steps(pts, sweep, d_self):
                    P = pts[ok]
                    diff = np.abs(partial_integral(K, P + h, b, sweep, axis) - partial_integral(K, P, b, sweep, axis))
                    env = np.linalg.norm(h) ** eta * npts[ok] ** (-d_self - eta)
                    _track(best, arg, "C2", diff / env,
                           lambda i, P=P, b=b, h=h, axis=axis: {"axis": axis, "point": P[i].tolist(),
                                                               "range": list(b), "h": h.tolist()})
    return KernelConditionEstimate(K.name, eta, best, arg, sweep.to_dict(), budget)


def truncation_convergence(K: Kernel, eps_ladder, N_ladder, alpha=(0.25, 1.0), beta=(0.25, 1.0),
                           sweep: KernelSweep | None = None) -> dict:
    """Cauchy differences of the truncated annulus integrals as ``eps -> 0``, ``N -> inf``.

    The truncated kernel restricted to ``alpha x beta`` is integrated over the
    annulus intersections; successive ladder values should settle.
    """
    sweep = sweep or KernelSweep()
    values = []
    for e, n in zip(eps_ladder, N_ladder):
        a = (max(alpha[0], e), min(alpha[1], n))
        b = (max(beta[0], e), min(beta[1], n))
        if a[0] >= a[1] or b[0] >= b[1]:
            values.append(0.0)
            continue
        values.append(annulus_integral(K, a, b, sweep))
    diffs = [abs(u - v) for u, v in zip(values, values[1:])]
    return {"values": values, "cauchy_differences": diffs, "max_difference": max(diffs) if diffs else 0.0}


# ----------------------------------------------------------------------
# truncated operators
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TruncatedKernel:
    """``K(x, y) 1{eps_1 < |x| < N_1} 1{eps_2 < |y| < N_2}``."""

    kernel: Kernel
    eps: tuple[float, float]
    N: tuple[float, float]

    def __post_init__(self):
        if any(e <= 0 for e in self.eps):
            raise ValueError("truncation radii eps must be positive")

    @property
    def degenerate(self) -> bool:
        return any(e >= n for e, n in zip(self.eps, self.N))

    def sample(self, grid: PeriodicGrid) -> np.ndarray:
        """Kernel times cell volume at every periodic offset, shaped like the grid (FFT order)."""
        if grid.factors != (self.kernel.n, self.kernel.m) and not (self.kernel.m == 0 and grid.factors is None):
            raise ValueError(f"grid factors {grid.factors} do not match kernel ({self.kernel.n}, {self.kernel.m})")
        if any(n > 0.5 for n in self.N[: 1 if self.kernel.m == 0 else 2]):
            raise ValueError("truncation support overflows the periodic window (N must be <= 1/2)")
        offs = np.meshgrid(*[grid.offsets(a) for a in range(grid.ndim)], indexing="ij")
        pts = np.stack([o.ravel() for o in offs], axis=1)
        x, y = pts[:, :self.kernel.n], pts[:, self.kernel.n:]
        rx = np.linalg.norm(x, axis=1)
        mask = (rx > self.eps[0]) & (rx < self.N[0])
        if self.kernel.m > 0:
            ry = np.linalg.norm(y, axis=1)
            mask &= (ry > self.eps[1]) & (ry < self.N[1])
        vals = np.zeros(len(pts))
        if mask.any():
            vals[mask] = self.kernel(x[mask], y[mask])
        return (vals / grid.size).reshape(grid.counts)


def truncated_convolution(f: DiscreteGridFunction, tk: TruncatedKernel) -> DiscreteGridFunction:
    """``f * K_eps^N`` as a circular convolution (computed by FFT, equal to the direct sum)."""
    return kernel_multiplier(tk, f.grid).apply(f)


def kernel_multiplier(tk: TruncatedKernel, grid: PeriodicGrid) -> FourierMultiplierOp:
    """The truncated operator as a Fourier multiplier (the DFT of the sampled kernel)."""
    return FourierMultiplierOp(grid, np.fft.fftn(tk.sample(grid)), f"T[{tk.kernel.name}]")


@dataclass
class SweepTable:
    eps: list
    N: list
    norms: list[list[float]]
    estimates: list[list[NormEstimate | None]]
    trend: float

    @property
    def max_norm(self) -> float:
        return float(np.max(self.norms))

    @property
    def increment_ratio(self) -> float:
        """Ratio of the last two increments of the per-``eps`` peak norm.

        Below 1 the peaks settle (geometric convergence); near or above 1
        they keep growing like ``log(1/eps)`` or a power of it.
        """
        peaks = [max(r) for r in self.norms]
        if len(peaks) < 3:
            return float("nan")
        d1, d2 = peaks[-2] - peaks[-3], peaks[-1] - peaks[-2]
        if d2 <= 0:
            return 0.0
        return float(d2 / d1) if d1 > 0 else float("inf")

    @property
    def verdict(self) -> Verdict:
        r = self.increment_ratio
        if np.isnan(r):
            return Verdict.INCONCLUSIVE
        return Verdict.DIVERGENCE_SUSPECTED if r >= INCREMENT_RATIO_LIMIT else Verdict.BOUNDED

    def to_dict(self):
        return {"eps": self.eps, "N": self.N, "norms": self.norms, "max": self.max_norm, "trend": self.trend,
                "increment_ratio": self.increment_ratio, "verdict": self.verdict.value,
                "note": "norm estimates are lower bounds"}


def uniform_boundedness_sweep(K: Kernel, W: MatrixWeight | None, p: float, grid: PeriodicGrid, eps_ladder,
                              N_ladder, trials: int = 4, seed: int = 0, iterations: int = 200) -> SweepTable:
    """Weighted norms of the truncated operators over an ``(eps, N)`` ladder.

    ``trend`` is the fitted growth exponent of the per-``eps`` maximum as
    ``eps`` shrinks (positive means growth).
    """
    norms, ests = [], []
    for e in eps_ladder:
        row, row_est = [], []
        for n in N_ladder:
            e2 = tuple(np.broadcast_to(e, 2).tolist())
            n2 = tuple(np.broadcast_to(n, 2).tolist())
            tk = TruncatedKernel(K, e2, n2)
            if tk.degenerate:
                row.append(0.0)
                row_est.append(None)
                continue
            est = weighted_operator_norm(kernel_multiplier(tk, grid), W, p, grid, trials, seed, iterations)
            row.append(est.value)
            row_est.append(est)
        norms.append(row)
        ests.append(row_est)
    scale = [float(np.min(np.atleast_1d(e))) for e in eps_ladder]
    peaks = [max(r) for r in norms]
    trend = -fit_rate(scale, peaks) if len(scale) > 1 and min(peaks) > 0 else 0.0
    return SweepTable([np.atleast_1d(e).tolist() for e in eps_ladder], [np.atleast_1d(n).tolist() for n in N_ladder],
                      norms, ests, trend)


__all__ = ["Kernel", "KERNELS", "register_kernel", "get_kernel", "product_hilbert", "product_riesz",
           "single_hilbert", "KernelSweep", "annulus_rule", "annulus_integral", "partial_integral",
           "KernelConditionEstimate", "kernel_condition_estimates", "truncation_convergence",
           "TruncatedKernel", "truncated_convolution", "kernel_multiplier", "SweepTable",
           "uniform_boundedness_sweep"]
