"""Composite midpoint quadrature on uniform and geometrically graded meshes."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .domain import Domain, ProductBall, ball_volume

# Sub-cell samples per axis used to estimate the covered fraction of cells
# cut by a ball boundary (d >= 2).
_CUT_CELL_SAMPLES = 8


@dataclass(frozen=True)
class GridSpec:
    """Mesh resolution.

    ``counts`` uniform cells per axis. Toward every singular point the mesh
    is additionally refined geometrically with ratio ``grading`` until cells
    reach the absolute size ``depth``; the singular point itself is a cell
    boundary and is never sampled.
    """

    counts: tuple[int, ...]
    singular_points: tuple[tuple[float, ...], ...] = ()
    grading: float = 0.9
    depth: float = 1e-10

    def __post_init__(self):
        counts = tuple(int(c) for c in np.atleast_1d(self.counts))
        if any(c < 2 for c in counts):
            raise ValueError(f"need at least 2 cells per axis, got {counts}")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "singular_points",
                           tuple(tuple(float(c) for c in np.atleast_1d(s)) for s in self.singular_points))
        if not 0 < self.grading < 1:
            raise ValueError("grading factor must lie in (0, 1)")
        if not self.depth > 0:
            raise ValueError("depth must be positive")

    def with_singular(self, points) -> "GridSpec":
        merged = tuple(self.singular_points) + tuple(tuple(np.atleast_1d(p)) for p in points)
        return replace(self, singular_points=merged)

    def to_dict(self) -> dict:
        return {"counts": list(self.counts), "singular_points": [list(s) for s in self.singular_points],
                "grading": self.grading, "depth": self.depth}


@dataclass(frozen=True, eq=False)
class SampleGrid:
    """Quadrature nodes ``points`` (M, ndim) with weights summing to the region volume."""

    points: np.ndarray
    weights: np.ndarray
    breakpoints: tuple[np.ndarray, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def volume(self) -> float:
        return float(self.weights.sum())

    @property
    def min_cell(self) -> float:
        if not self.breakpoints:
            return float(self.weights.min())
        return float(min(np.diff(b).min() for b in self.breakpoints))

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Integrate values sampled at ``points`` (leading axis = nodes)."""
        return np.tensordot(self.weights, values, axes=(0, 0))

    def distance_to(self, singular_points) -> float:
        """Smallest distance from a node to any of ``singular_points``."""
        if not len(singular_points):
            return math.inf
        sp = np.asarray(singular_points, dtype=float)
        d = np.linalg.norm(self.points[:, None, :] - sp[None, :, :], axis=2)
        return float(d.min())


def axis_breakpoints(lo: float, hi: float, n: int, singular=(), grading: float = 0.9,
                     depth: float = 1e-10) -> np.ndarray:
    """Uniform breakpoints on ``[lo, hi]`` merged with geometric ones toward each singular coordinate."""
    pts = [np.linspace(lo, hi, n + 1)]
    for s in singular:
        reach = max(abs(hi - s), abs(s - lo))
        if reach <= 0:
            continue
        layers = max(int(math.ceil(math.log(depth / reach) / math.log(grading))), 0) if depth < reach else 0
        offsets = reach * grading ** np.arange(layers + 1)
        cand = np.concatenate([s + offsets, s - offsets, [s]])
        pts.append(cand[(cand > lo) & (cand < hi)])
    bp = np.unique(np.concatenate(pts))
    # merge breakpoints closer than a few ulps of their own magnitude
    tol = 8 * np.finfo(float).eps * np.maximum(np.abs(bp[1:]), np.abs(bp[:-1]))
    keep = np.concatenate([[True], np.diff(bp) > tol])
    bp = bp[keep]
    bp[0], bp[-1] = lo, hi
    return bp


def _tensor_grid(breakpoints) -> SampleGrid:
    mids = [0.5 * (b[1:] + b[:-1]) for b in breakpoints]
    widths = [np.diff(b) for b in breakpoints]
    mesh = np.meshgrid(*mids, indexing="ij")
    wmesh = np.meshgrid(*widths, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    weights = np.prod(np.stack([w.ravel() for w in wmesh], axis=1), axis=1)
    return SampleGrid(points, weights, tuple(breakpoints))


def _singular_coords(spec: GridSpec, axis: int) -> list[float]:
    return sorted({s[axis] for s in spec.singular_points if len(s) > axis})


def build_grid(domain: Domain, spec: GridSpec) -> SampleGrid:
    """Midpoint quadrature grid covering the whole domain window."""
    if len(spec.counts) == 1 and domain.ndim > 1:
        spec = replace(spec, counts=spec.counts * domain.ndim)
    if len(spec.counts) != domain.ndim:
        raise ValueError(f"grid counts {spec.counts} do not match {domain.ndim} axes")
    for s in spec.singular_points:
        if len(s) != domain.ndim or not domain.contains(np.array(s)[None, :])[0]:
            raise ValueError(f"singular point {s} lies outside the window {domain.window}")
    if domain.is_torus and not spec.singular_points:
        pts = [np.arange(n) / n for n in spec.counts]
        mesh = np.meshgrid(*pts, indexing="ij")
        points = np.stack([m.ravel() for m in mesh], axis=1)
        weights = np.full(len(points), 1.0 / np.prod(spec.counts))
        bps = tuple(np.arange(n + 1) / n for n in spec.counts)
        return SampleGrid(points, weights, bps)
    bps = []
    for axis, n in enumerate(spec.counts):
        lo, hi = domain.window[axis]
        sing = _singular_coords(spec, axis)
        if domain.is_torus:
            sing = [c + shift for c in sing for shift in (-1.0, 0.0, 1.0)]
        bps.append(axis_breakpoints(lo, hi, n, sing, spec.grading, spec.depth))
    return _tensor_grid(bps)


def _interval_breakpoints(center: float, r: float, n: int, sing, spec: GridSpec, periodic: bool):
    lo, hi = center - r, center + r
    if periodic:
        # pick the image of every singular coordinate nearest the interval
        sing = [c + round(center - c) for c in sing]
    return axis_breakpoints(lo, hi, n, sing, spec.grading, spec.depth)


def _ball_factor_grid(center, r: float, axes, spec: GridSpec, periodic: bool) -> SampleGrid:
    d = len(center)
    counts = [spec.counts[a] if len(spec.counts) > a else spec.counts[0] for a in axes]
    bps = [_interval_breakpoints(c, r, n, _singular_coords(spec, a), spec, periodic)
           for c, n, a in zip(center, counts, axes)]
    grid = _tensor_grid(bps)
    if d == 1:
        return grid
    # restrict to the ball: cells fully inside keep weight, cut cells get
    # their sampled covered fraction, then renormalise to the exact volume
    c = np.asarray(center)
    lows = np.stack(np.meshgrid(*[b[:-1] for b in bps], indexing="ij"), -1).reshape(-1, d)
    highs = np.stack(np.meshgrid(*[b[1:] for b in bps], indexing="ij"), -1).reshape(-1, d)
    far = np.maximum(np.abs(lows - c), np.abs(highs - c))
    near = np.clip(c, lows, highs) - c
    inside = np.linalg.norm(far, axis=1) <= r
    outside = np.linalg.norm(near, axis=1) >= r
    frac = np.where(inside, 1.0, 0.0)
    cut = ~inside & ~outside
    if cut.any():
        u = (np.arange(_CUT_CELL_SAMPLES) + 0.5) / _CUT_CELL_SAMPLES
        sub = np.array(list(itertools.product(u, repeat=d)))
        lo_c, hi_c = lows[cut], highs[cut]
        samples = lo_c[:, None, :] + sub[None, :, :] * (hi_c - lo_c)[:, None, :]
        frac[cut] = np.mean(np.linalg.norm(samples - c, axis=2) < r, axis=1)
    weights = grid.weights * frac
    keep = weights > 0
    weights = weights[keep] * (ball_volume(d, r) / weights[keep].sum())
    return SampleGrid(grid.points[keep], weights, tuple(bps))


def set_quadrature(E, domain: Domain, spec: GridSpec) -> SampleGrid:
    """Quadrature over one averaging set; weights sum to ``|E|``."""
    if isinstance(E, ProductBall) != domain.is_product:
        raise ValueError("product balls belong to product domains and balls to the others")
    grids = []
    for f, (center, r) in enumerate(E.factors()):
        axes = domain.factor_axes(f)
        if len(center) != len(axes):
            raise ValueError(f"set center {center} does not match factor dimension {len(axes)}")
        grids.append(_ball_factor_grid(center, r, axes, spec, domain.is_torus))
    if len(grids) == 1:
        g = grids[0]
    else:
        gx, gy = grids
        points = np.concatenate([np.repeat(gx.points, len(gy), axis=0),
                                 np.tile(gy.points, (len(gx), 1))], axis=1)
        weights = np.outer(gx.weights, gy.weights).ravel()
        g = SampleGrid(points, weights, gx.breakpoints + gy.breakpoints)
    if domain.is_torus:
        g = SampleGrid(np.mod(g.points, 1.0), g.weights, g.breakpoints)
    return g


def graded_gauss_rule(lo: float, hi: float, singular=(), grading: float = 0.5, depth: float = 1e-20,
                      order: int = 8, counts: int = 8) -> SampleGrid:
    """Gauss-Legendre nodes of ``order`` on every cell of a graded 1-D mesh.

    Far more accurate than midpoints for algebraic singularities at the
    graded points; the cell ``[s, s + depth]`` next to each singular point is
    still covered, so the neglected mass is of the order of the integral
    over that cell.
    """
    bp = axis_breakpoints(lo, hi, counts, singular, grading, depth)
    u, w = np.polynomial.legendre.leggauss(order)
    a, b = bp[:-1, None], bp[1:, None]
    pts = (0.5 * (b - a) * u[None, :] + 0.5 * (a + b)).ravel()
    wts = (0.5 * (b - a) * w[None, :]).ravel()
    return SampleGrid(pts[:, None], wts, (bp,))


def resolution_ladder(base: GridSpec, depths) -> list[GridSpec]:
    """One spec per depth, doubling the uniform counts at every level."""
    return [replace(base, depth=float(dep), counts=tuple(c * 2 ** i for c in base.counts))
            for i, dep in enumerate(depths)]


__all__ = ["GridSpec", "SampleGrid", "axis_breakpoints", "build_grid", "set_quadrature",
           "graded_gauss_rule", "resolution_ladder"]
