"""Domains, Lebesgue exponents, averaging sets and set families.

A domain is always computed on a finite window: Euclidean axes carry an
explicit ``[lo, hi]`` interval, torus axes are normalised to period 1.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class DomainKind(str, Enum):
    EUCLIDEAN = "euclidean"
    TORUS = "torus"
    PRODUCT_EUCLIDEAN = "product_euclidean"
    PRODUCT_TORUS = "product_torus"


def holder_conjugate(p: float) -> float:
    """Return ``q`` with ``1/p + 1/q = 1``."""
    p = float(p)
    if not p > 1.0 or math.isinf(p):
        raise ValueError(f"exponent must lie in (1, inf), got {p}")
    return p / (p - 1.0)


@dataclass(frozen=True)
class LebesgueExponent:
    p: float

    def __post_init__(self):
        holder_conjugate(self.p)

    @property
    def q(self) -> float:
        return holder_conjugate(self.p)

    def conjugate(self) -> "LebesgueExponent":
        return LebesgueExponent(self.q)


@dataclass(frozen=True)
class Domain:
    """A domain ``D`` together with its computational window.

    ``dims`` is ``(d,)`` for a single factor and ``(m, n)`` for products.
    """

    kind: DomainKind
    dims: tuple[int, ...]
    window: tuple[tuple[float, float], ...]

    def __post_init__(self):
        kind = DomainKind(self.kind)
        object.__setattr__(self, "kind", kind)
        dims = tuple(int(d) for d in self.dims)
        expected = 2 if kind in (DomainKind.PRODUCT_EUCLIDEAN, DomainKind.PRODUCT_TORUS) else 1
        if len(dims) != expected or any(d < 1 for d in dims):
            raise ValueError(f"{kind.value} domain needs {expected} dimension(s) >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)
        ndim = sum(dims)
        if self.is_torus:
            window = tuple((0.0, 1.0) for _ in range(ndim))
        else:
            window = tuple((float(lo), float(hi)) for lo, hi in self.window)
            if len(window) != ndim:
                raise ValueError(f"window has {len(window)} axes, domain has {ndim}")
            if any(not hi > lo for lo, hi in window):
                raise ValueError(f"window must have positive volume, got {window}")
        object.__setattr__(self, "window", window)

    # constructors -----------------------------------------------------

    @classmethod
    def line(cls, d: int = 1, window=None) -> "Domain":
        if window is None:
            window = ((0.0, 1.0),) * d
        return cls(DomainKind.EUCLIDEAN, (d,), tuple(window))

    @classmethod
    def torus(cls, d: int = 1) -> "Domain":
        return cls(DomainKind.TORUS, (d,), ())

    @classmethod
    def product(cls, m: int = 1, n: int = 1, window=None) -> "Domain":
        if window is None:
            window = ((0.0, 1.0),) * (m + n)
        return cls(DomainKind.PRODUCT_EUCLIDEAN, (m, n), tuple(window))

    @classmethod
    def product_torus(cls, m: int = 1, n: int = 1) -> "Domain":
        return cls(DomainKind.PRODUCT_TORUS, (m, n), ())

    # queries ----------------------------------------------------------

    @property
    def is_product(self) -> bool:
        return self.kind in (DomainKind.PRODUCT_EUCLIDEAN, DomainKind.PRODUCT_TORUS)

    @property
    def is_torus(self) -> bool:
        return self.kind in (DomainKind.TORUS, DomainKind.PRODUCT_TORUS)

    @property
    def ndim(self) -> int:
        return sum(self.dims)

    @property
    def volume(self) -> float:
        return float(np.prod([hi - lo for lo, hi in self.window]))

    def factor_axes(self, factor: int) -> tuple[int, ...]:
        start = sum(self.dims[:factor])
        return tuple(range(start, start + self.dims[factor]))

    def factor(self, factor: int) -> "Domain":
        """The single-factor domain spanned by one factor of a product."""
        if not self.is_product:
            if factor != 0:
                raise ValueError("non-product domain has a single factor")
            return self
        axes = self.factor_axes(factor)
        if self.is_torus:
            return Domain.torus(len(axes))
        return Domain.line(len(axes), tuple(self.window[a] for a in axes))

    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        pts = as_points(points, self.ndim)
        if self.is_torus:
            return np.ones(len(pts), dtype=bool)
        lo = np.array([w[0] for w in self.window])
        hi = np.array([w[1] for w in self.window])
        return np.all((pts >= lo - tol) & (pts <= hi + tol), axis=1)

    def reduce(self, points) -> np.ndarray:
        """Reduce torus coordinates mod 1; Euclidean points pass through."""
        pts = as_points(points, self.ndim)
        return np.mod(pts, 1.0) if self.is_torus else pts

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "dims": list(self.dims),
                "window": [list(w) for w in self.window]}

    @classmethod
    def from_dict(cls, data: dict) -> "Domain":
        return cls(DomainKind(data["kind"]), tuple(data["dims"]),
                   tuple(tuple(w) for w in data.get("window", ())))


def as_points(points, ndim: int) -> np.ndarray:
    """Coerce scalars, 1-D arrays or ``(M, ndim)`` arrays to ``(M, ndim)``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 0:
        pts = pts.reshape(1, 1)
    elif pts.ndim == 1:
        pts = pts.reshape(-1, 1) if ndim == 1 else pts.reshape(1, -1)
    if pts.shape[1] != ndim:
        raise ValueError(f"points have {pts.shape[1]} coordinates, expected {ndim}")
    return pts


def ball_volume(d: int, r: float) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * r ** d


@dataclass(frozen=True)
class Ball:
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    @property
    def volume(self) -> float:
        return ball_volume(len(self.center), self.radius)

    def factors(self) -> list[tuple[tuple[float, ...], float]]:
        return [(self.center, self.radius)]

    def to_dict(self) -> dict:
        return {"kind": "ball", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class ProductBall:
    center_x: tuple[float, ...]
    radius_x: float
    center_y: tuple[float, ...]
    radius_y: float

    def __post_init__(self):
        object.__setattr__(self, "center_x", tuple(float(c) for c in np.atleast_1d(self.center_x)))
        object.__setattr__(self, "center_y", tuple(float(c) for c in np.atleast_1d(self.center_y)))
        if not (self.radius_x > 0 and self.radius_y > 0):
            raise ValueError("radii must be positive")

    @property
    def volume(self) -> float:
        return (ball_volume(len(self.center_x), self.radius_x)
                * ball_volume(len(self.center_y), self.radius_y))

    def factors(self) -> list[tuple[tuple[float, ...], float]]:
        return [(self.center_x, self.radius_x), (self.center_y, self.radius_y)]

    def to_dict(self) -> dict:
        return {"kind": "product_ball", "center_x": list(self.center_x), "radius_x": self.radius_x,
                "center_y": list(self.center_y), "radius_y": self.radius_y}


AveragingSet = Ball | ProductBall


def geometric_radii(r_min: float, r_max: float, count: int) -> tuple[float, ...]:
    """Log-spaced radius ladder from ``r_max`` down to ``r_min``."""
    if count < 1 or not 0 < r_min <= r_max:
        raise ValueError("need 0 < r_min <= r_max and count >= 1")
    if count == 1:
        return (float(r_max),)
    return tuple(float(r) for r in np.geomspace(r_max, r_min, count))


@dataclass(frozen=True)
class SetFamily:
    """A finite, reproducible sample of the set family ``S_D``.

    ``radii`` holds one radius ladder per factor. Centers are either a
    per-axis lattice (``center_counts``), explicit per-axis coordinates
    (``centers``), or anchored at the lower window edge (``anchored``), in
    which case each set is ``[lo, lo + 2r]`` along every axis.
    """

    radii: tuple[tuple[float, ...], ...]
    center_counts: tuple[int, ...] = ()
    centers: tuple[tuple[float, ...], ...] | None = None
    anchored: bool = False

    def __post_init__(self):
        radii = tuple(tuple(float(r) for r in ladder) for ladder in self.radii)
        if not radii or any(not ladder for ladder in radii):
            raise ValueError("every factor needs at least one radius")
        if any(r <= 0 for ladder in radii for r in ladder):
            raise ValueError("radii must be positive")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "center_counts", tuple(int(c) for c in self.center_counts))
        if self.centers is not None:
            object.__setattr__(self, "centers",
                               tuple(tuple(float(c) for c in axis) for axis in self.centers))

    @classmethod
    def lattice(cls, domain: Domain, center_counts, r_min: float, r_max: float,
                n_radii: int, radii_y=None) -> "SetFamily":
        ladder = geometric_radii(r_min, r_max, n_radii)
        radii = (ladder, tuple(radii_y) if radii_y is not None else ladder) if domain.is_product else (ladder,)
        counts = tuple(center_counts) if np.ndim(center_counts) else (int(center_counts),) * domain.ndim
        return cls(radii=radii, center_counts=counts)

    @classmethod
    def anchored_intervals(cls, domain: Domain, r_min: float, r_max: float, n_radii: int) -> "SetFamily":
        ladder = geometric_radii(r_min, r_max, n_radii)
        radii = (ladder, ladder) if domain.is_product else (ladder,)
        return cls(radii=radii, anchored=True)

    def size(self, domain: Domain) -> int:
        return len(enumerate_sets(self, domain))

    def to_dict(self) -> dict:
        return {"radii": [list(r) for r in self.radii], "center_counts": list(self.center_counts),
                "centers": None if self.centers is None else [list(c) for c in self.centers],
                "anchored": self.anchored}


def _axis_centers(family: SetFamily, domain: Domain, axis: int, r: float) -> list[float]:
    lo, hi = domain.window[axis]
    if family.centers is not None:
        return list(family.centers[axis])
    if family.anchored:
        return [lo + r]
    count = family.center_counts[axis] if family.center_counts else 1
    if count < 1:
        raise ValueError("center counts must be >= 1")
    if domain.is_torus:
        return [k / count for k in range(count)]
    if 2 * r > hi - lo + 1e-12:
        raise ValueError(f"radius {r} does not fit window axis {axis} {domain.window[axis]}")
    if count == 1:
        return [0.5 * (lo + hi)]
    return [float(c) for c in np.linspace(lo + r, hi - r, count)]


def _check_inside(domain: Domain, axes, center, r):
    for axis, c in zip(axes, center):
        if domain.is_torus:
            if r > 0.5 + 1e-12:
                raise ValueError(f"torus radius {r} exceeds the 1/2 cap")
            continue
        lo, hi = domain.window[axis]
        if c - r < lo - 1e-12 or c + r > hi + 1e-12:
            raise ValueError(f"set with center {tuple(center)} and radius {r} leaves the window")


def enumerate_sets(family: SetFamily, domain: Domain) -> list:
    """Deterministically enumerate the averaging sets of ``family`` in ``domain``."""
    nfactors = 2 if domain.is_product else 1
    if len(family.radii) != nfactors:
        raise ValueError(f"family has {len(family.radii)} radius ladder(s), domain needs {nfactors}")
    if family.center_counts and len(family.center_counts) != domain.ndim:
        raise ValueError("center_counts must list one count per axis")
    if family.centers is not None and len(family.centers) != domain.ndim:
        raise ValueError("explicit centers must list coordinates per axis")
    sets = []
    for radii in itertools.product(*family.radii):
        per_factor = []
        for f, r in enumerate(radii):
            axes = domain.factor_axes(f)
            coords = [_axis_centers(family, domain, a, r) for a in axes]
            centers = list(itertools.product(*coords))
            for c in centers:
                _check_inside(domain, axes, c, r)
            per_factor.append(centers)
        if nfactors == 1:
            sets.extend(Ball(c, radii[0]) for c in per_factor[0])
        else:
            sets.extend(ProductBall(cx, radii[0], cy, radii[1])
                        for cx in per_factor[0] for cy in per_factor[1])
    return sets
