"""Fourier multipliers on periodic grids and their norms on matrix-weighted L^p.

Grid functions carry an ``N``-vector per node; multipliers act on each
component separately. Grid nodes sit at cell centres ``(k + 1/2)/n`` so a
weight singular at a dyadic point of the window is never sampled.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .domain import Domain, holder_conjugate
from .weights import MatrixWeight


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform periodic grid on ``[0, 1)^d``; ``factors`` splits the axes of a product grid."""

    counts: tuple[int, ...]
    factors: tuple[int, ...] | None = None

    def __post_init__(self):
        counts = tuple(int(c) for c in np.atleast_1d(self.counts))
        if any(c < 2 for c in counts):
            raise ValueError(f"need at least 2 points per axis, got {counts}")
        object.__setattr__(self, "counts", counts)
        if self.factors is not None:
            factors = tuple(int(f) for f in self.factors)
            if sum(factors) != len(counts) or len(factors) != 2:
                raise ValueError(f"factor split {factors} does not match {len(counts)} axes")
            object.__setattr__(self, "factors", factors)

    @property
    def ndim(self) -> int:
        return len(self.counts)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def factor_axes(self, factor: str) -> tuple[int, ...]:
        if self.factors is None:
            raise ValueError("grid has no product structure")
        m = self.factors[0]
        return tuple(range(m)) if factor == "x" else tuple(range(m, self.ndim))

    def unit_points(self) -> np.ndarray:
        axes = [(np.arange(n) + 0.5) / n for n in self.counts]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def points_in(self, domain: Domain) -> np.ndarray:
        """Nodes mapped affinely onto the domain window."""
        lo = np.array([w[0] for w in domain.window])
        hi = np.array([w[1] for w in domain.window])
        return lo + (hi - lo) * self.unit_points()

    def offsets(self, axis: int) -> np.ndarray:
        """Signed periodic offsets ``j/n`` in ``(-1/2, 1/2]`` in FFT order."""
        n = self.counts[axis]
        j = np.fft.fftfreq(n) * n
        if n % 2 == 0:
            j[n // 2] = n // 2
        return j / n

    def frequencies(self, axis: int) -> np.ndarray:
        n = self.counts[axis]
        return np.fft.fftfreq(n) * n


@dataclass
class DiscreteGridFunction:
    """``values[node, component]`` with nodes in C order over ``grid.counts``."""

    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[0] != self.grid.size:
            raise ValueError(f"{v.shape[0]} values for a grid of {self.grid.size} nodes")
        self.values = v

    @property
    def N(self) -> int:
        return self.values.shape[1]

    def component(self, j: int) -> "DiscreteGridFunction":
        return DiscreteGridFunction(self.grid, self.values[:, j:j + 1])

    def cube(self) -> np.ndarray:
        return self.values.reshape(*self.grid.counts, self.N)

    @classmethod
    def from_function(cls, grid: PeriodicGrid, func: Callable) -> "DiscreteGridFunction":
        return cls(grid, func(grid.unit_points()))


@dataclass
class FourierMultiplierOp:
    """Pointwise multiplier on the discrete Fourier coefficients."""

    grid: PeriodicGrid
    multiplier: np.ndarray
    name: str = "multiplier"
    axes: tuple[int, ...] | None = None

    def __post_init__(self):
        self.multiplier = np.asarray(self.multiplier, dtype=complex).reshape(self.grid.counts)

    def _check(self, f: DiscreteGridFunction):
        if f.grid.counts != self.grid.counts:
            raise ValueError(f"grid {f.grid.counts} does not match operator grid {self.grid.counts}")

    def _apply_values(self, values: np.ndarray, mult: np.ndarray) -> np.ndarray:
        n_comp = values.shape[-1]
        cube = values.reshape(*self.grid.counts, n_comp)
        axes = tuple(range(self.grid.ndim))
        out = np.fft.ifftn(np.fft.fftn(cube, axes=axes) * mult[..., None], axes=axes)
        return out.reshape(-1, n_comp)

    def apply(self, f: DiscreteGridFunction) -> DiscreteGridFunction:
        self._check(f)
        return DiscreteGridFunction(self.grid, self._apply_values(f.values, self.multiplier))

    __call__ = apply

    def adjoint(self) -> "FourierMultiplierOp":
        return FourierMultiplierOp(self.grid, np.conj(self.multiplier), f"{self.name}*", self.axes)

    def scalar(self, values: np.ndarray) -> np.ndarray:
        """Apply to a scalar array shaped like the grid."""
        return self._apply_values(np.asarray(values).reshape(-1, 1), self.multiplier).reshape(self.grid.counts)


def apply_multiplier(op: FourierMultiplierOp, f: DiscreteGridFunction) -> DiscreteGridFunction:
    return op.apply(f)


def _freq_mesh(grid: PeriodicGrid, axes) -> list[np.ndarray]:
    freqs = [grid.frequencies(a) for a in range(grid.ndim)]
    mesh = np.meshgrid(*freqs, indexing="ij")
    return [mesh[a] for a in axes]


def _nyquist(grid: PeriodicGrid, axis: int) -> np.ndarray:
    n = grid.counts[axis]
    k = _freq_mesh(grid, [axis])[0]
    return (n % 2 == 0) & (np.abs(k) == n // 2)


def hilbert_op(grid: PeriodicGrid, axis: int = 0) -> FourierMultiplierOp:
    """``-i sgn(k)`` along ``axis``; zero and Nyquist frequencies annihilated."""
    if not 0 <= axis < grid.ndim:
        raise IndexError(f"axis {axis} out of range")
    k = _freq_mesh(grid, [axis])[0]
    mult = -1j * np.sign(k)
    mult[_nyquist(grid, axis)] = 0
    return FourierMultiplierOp(grid, mult, f"hilbert[{axis}]", (axis,))


def _riesz(grid: PeriodicGrid, axes: tuple[int, ...], j: int, name: str) -> FourierMultiplierOp:
    K = _freq_mesh(grid, axes)
    mag = np.sqrt(sum(k ** 2 for k in K))
    with np.errstate(invalid="ignore", divide="ignore"):
        mult = np.where(mag > 0, 1j * K[j] / np.where(mag > 0, mag, 1), 0)
    mult[_nyquist(grid, axes[j])] = 0
    return FourierMultiplierOp(grid, mult, name, axes)


def riesz_op(grid: PeriodicGrid, j: int) -> FourierMultiplierOp:
    """``i xi_j / |xi|`` over all axes (``d = 1`` gives ``-hilbert_op``)."""
    if not 0 <= j < grid.ndim:
        raise IndexError(f"axis {j} out of range")
    return _riesz(grid, tuple(range(grid.ndim)), j, f"riesz[{j}]")


def partial_riesz_op(grid: PeriodicGrid, factor: str, i: int) -> FourierMultiplierOp:
    """Riesz transform in one factor of a product grid, identity in the other."""
    if factor not in ("x", "y"):
        raise ValueError("factor must be 'x' or 'y'")
    axes = grid.factor_axes(factor)
    if not 0 <= i < len(axes):
        raise IndexError(f"axis {i} out of range for factor {factor}")
    return _riesz(grid, axes, i, f"riesz_{factor}[{i}]")


def lifted_apply(op: Callable, f: DiscreteGridFunction) -> DiscreteGridFunction:
    """Apply a scalar operator (grid-shaped array -> array) to every component."""
    cube = f.cube()
    out = np.stack([np.asarray(op(cube[..., j])) for j in range(f.N)], axis=-1)
    return DiscreteGridFunction(f.grid, out.reshape(-1, f.N))


# ----------------------------------------------------------------------
# weighted norms
# ----------------------------------------------------------------------

def grid_lp_norm(values: np.ndarray, Wp: np.ndarray | None, p: float) -> float:
    """``(mean_t |W^{1/p}(t) f(t)|^p)^{1/p}``; ``Wp`` holds ``W^{1/p}`` per node."""
    v = values if Wp is None else np.einsum("mij,mj->mi", Wp, values)
    return float(np.mean(np.linalg.norm(v, axis=1) ** p) ** (1.0 / p))


@dataclass
class NormEstimate:
    """Lower bound for an operator norm on ``L^p(W)``."""

    value: float
    converged: bool
    iterations: int
    trials: int
    p: float
    counts: tuple
    history: list[float] = field(default_factory=list)

    def to_dict(self):
        return {"value": self.value, "converged": self.converged, "iterations": self.iterations,
                "trials": self.trials, "p": self.p, "grid": list(self.counts),
                "note": "lower bound" + ("" if self.converged else "; not converged")}


def _duality_map(v: np.ndarray, r: float) -> np.ndarray:
    """``|v|^{r-2} v`` with the Euclidean norm per node (the l^r duality map)."""
    nrm = np.linalg.norm(v, axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(nrm > 0, nrm ** (r - 2), 0.0)
    return v * scale


def weighted_operator_norm(op: FourierMultiplierOp, W: MatrixWeight | None, p: float, grid: PeriodicGrid | None = None,
                           trials: int = 16, seed: int = 0, iterations: int = 200, tol: float = 1e-10) -> NormEstimate:
    """Estimate ``|op|`` on ``L^p(W)`` over the grid nodes mapped into ``W``'s window.

    The problem is conjugated to unweighted ``l^p``:
    ``A = W^{1/p} op W^{-1/p}``. For ``p = 2`` this is power iteration on
    ``A* A``; otherwise the nonlinear power method
    ``x <- J_q(A* J_p(A x))`` (``J`` the duality maps). Every iterate's
    quotient ``|A x| / |x|`` is a valid lower bound and the best is kept.
    """
    q = holder_conjugate(p)
    grid = grid or op.grid
    if grid.counts != op.grid.counts:
        raise ValueError("grid does not match operator grid")
    N = 1 if W is None else W.N
    if W is None:
        Wp = Wm = None
    else:
        pts = grid.points_in(W.domain)
        Wp = W.power_many(pts, 1.0 / p)
        Wm = W.power_many(pts, -1.0 / p)
    adj = op.adjoint()

    def mul(M, v):
        return v if M is None else np.einsum("mij,mj->mi", M, v)

    def A(x):
        return mul(Wp, op._apply_values(mul(Wm, x), op.multiplier))

    def A_star(y):
        return mul(Wm, adj._apply_values(mul(Wp, y), adj.multiplier))

    def lp(v, r):
        return float(np.mean(np.linalg.norm(v, axis=1) ** r) ** (1.0 / r))

    rng = np.random.default_rng(seed)
    best, history, converged, used = 0.0, [], False, 0
    for _ in range(trials):
        x = rng.standard_normal((grid.size, N)) + 1j * rng.standard_normal((grid.size, N))
        x /= lp(x, p)
        prev = 0.0
        for it in range(iterations):
            y = A(x)
            val = lp(y, p)
            best = max(best, val)
            if val == 0:
                break
            if p == 2:
                z = A_star(y)
            else:
                z = _duality_map(A_star(_duality_map(y, p)), q)
            nz = lp(z, p)
            if nz == 0:
                break
            x = z / nz
            if abs(val - prev) <= tol * max(val, 1e-300):
                converged = True
                used = max(used, it + 1)
                break
            prev = val
        else:
            used = iterations
        history.append(best)
    return NormEstimate(best, converged, used, trials, p, grid.counts, history)


def unit_multiplier_norm(op: FourierMultiplierOp) -> float:
    """Exact unweighted ``l^2`` norm: the largest multiplier modulus."""
    return float(np.max(np.abs(op.multiplier)))


__all__ = ["PeriodicGrid", "DiscreteGridFunction", "FourierMultiplierOp", "apply_multiplier", "hilbert_op",
           "riesz_op", "partial_riesz_op", "lifted_apply", "grid_lp_norm", "NormEstimate",
           "weighted_operator_norm", "unit_multiplier_norm"]
