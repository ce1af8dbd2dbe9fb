"""Matrix and scalar weights, their fractional powers, and the built-in catalog."""
from __future__ import annotations

import inspect
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree

from .domain import Domain, as_points
from .grids import SampleGrid
from .linalg import EIG_FLOOR, NearSingularMatrixError, as_hermitian, fractional_power


class SingularPointError(ValueError):
    pass


class DegenerateSampleError(ValueError):
    """A sampled matrix is not positive definite."""

    def __init__(self, point, min_eigenvalue):
        self.point = tuple(np.atleast_1d(point).tolist())
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(f"degenerate sample at {self.point}: min eigenvalue {min_eigenvalue:.3e}")


class CatalogError(ValueError):
    pass


class MatrixWeight:
    """Hermitian positive definite matrix function on a domain window.

    Subclasses implement ``_values(points)`` returning ``(M, N, N)`` arrays.
    """

    name = "weight"

    def __init__(self, N: int, domain: Domain, singular_points=(), params=None):
        self.N = int(N)
        self.domain = domain
        self.singular_points = tuple(tuple(float(c) for c in np.atleast_1d(s)) for s in singular_points)
        self.params = dict(params or {})

    def _values(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def is_singular(self, pts: np.ndarray) -> np.ndarray:
        if not self.singular_points:
            return np.zeros(len(pts), dtype=bool)
        sp = np.asarray(self.singular_points)
        return np.any(np.all(pts[:, None, :] == sp[None, :, :], axis=2), axis=1)

    def evaluate_many(self, points) -> np.ndarray:
        """Unchecked batch evaluation, ``(M, N, N)`` complex."""
        pts = self.domain.reduce(as_points(points, self.domain.ndim))
        return as_hermitian(self._values(pts))

    def evaluate(self, t) -> np.ndarray:
        """Evaluate at one point, rejecting singular points and non-PD samples."""
        pts = self.domain.reduce(as_points(t, self.domain.ndim))
        if len(pts) != 1:
            raise ValueError("evaluate takes a single point; use evaluate_many")
        if not self.domain.contains(pts)[0]:
            raise ValueError(f"point {pts[0]} outside window {self.domain.window}")
        if self.is_singular(pts)[0]:
            raise SingularPointError(f"{self.name} is singular at {tuple(pts[0])}")
        M = self.evaluate_many(pts)[0]
        lam = np.linalg.eigvalsh(M)
        if not lam[0] > EIG_FLOOR * abs(lam[-1]):
            raise DegenerateSampleError(pts[0], lam[0])
        return M

    def power_many(self, points, s: float) -> np.ndarray:
        """``W(t)**s`` at every point."""
        return fractional_power(self.evaluate_many(points), s)

    def power(self, s: float) -> "WeightPower":
        return WeightPower(self, s)

    def describe(self) -> dict:
        return {"name": self.name, "N": self.N, "params": _jsonable(self.params),
                "domain": self.domain.to_dict()}

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r}, N={self.N})"


class ClosedFormWeight(MatrixWeight):
    """Weight given by a formula; ``power_func(pts, s)`` may supply exact powers ``W^s``."""

    def __init__(self, name: str, N: int, domain: Domain, func: Callable, singular_points=(),
                 params=None, singular_axes: bool = False, power_func: Callable | None = None):
        super().__init__(N, domain, singular_points, params)
        self.name = name
        self._func = func
        self._singular_axes = singular_axes
        self._power_func = power_func

    def _values(self, pts):
        return self._func(pts)

    def power_many(self, points, s):
        if self._power_func is None:
            return super().power_many(points, s)
        pts = self.domain.reduce(as_points(points, self.domain.ndim))
        return as_hermitian(self._power_func(pts, float(s)))

    def is_singular(self, pts):
        if not self._singular_axes or not self.singular_points:
            return super().is_singular(pts)
        # product weights are singular on the whole cross through each point
        sp = np.asarray(self.singular_points)
        return np.any(np.any(pts[:, None, :] == sp[None, :, :], axis=2), axis=1)


class WeightPower(MatrixWeight):
    """``W**s``; powers of powers compose exponents on the base weight."""

    def __init__(self, base: MatrixWeight, s: float):
        super().__init__(base.N, base.domain, base.singular_points, {"s": float(s)})
        self.base = base
        self.s = float(s)
        self.name = f"({base.name})^{self.s:g}"

    def _values(self, pts):
        return self.base.power_many(pts, self.s)

    def is_singular(self, pts):
        return self.base.is_singular(pts)

    def power_many(self, points, s):
        return self.base.power_many(points, self.s * s)

    def describe(self):
        return {"name": "power", "s": self.s, "base": self.base.describe()}


class ScaledWeight(MatrixWeight):
    def __init__(self, base: MatrixWeight, c: float):
        if not c > 0:
            raise ValueError("scale factor must be positive")
        super().__init__(base.N, base.domain, base.singular_points, {"c": float(c)})
        self.base, self.c = base, float(c)
        self.name = f"{self.c:g}*{base.name}"

    def _values(self, pts):
        return self.c * self.base.evaluate_many(pts)

    def is_singular(self, pts):
        return self.base.is_singular(pts)


class SlicedWeight(MatrixWeight):
    """Restriction of a product-domain weight with one factor frozen."""

    def __init__(self, base: MatrixWeight, axis: str, frozen):
        dom = base.domain
        if not dom.is_product:
            raise ValueError("slicing needs a product-domain weight")
        if axis not in ("x", "y"):
            raise ValueError("axis must be 'x' or 'y'")
        free = 0 if axis == "x" else 1
        fixed = 1 - free
        frozen = np.atleast_1d(np.asarray(frozen, dtype=float))
        if len(frozen) != dom.dims[fixed]:
            raise ValueError(f"frozen coordinate needs {dom.dims[fixed]} entries")
        fixed_dom = dom.factor(fixed)
        if not fixed_dom.contains(frozen[None, :])[0]:
            raise ValueError(f"frozen coordinate {frozen} outside window")
        free_axes = dom.factor_axes(free)
        sing = [tuple(s[a] for a in free_axes) for s in base.singular_points]
        super().__init__(base.N, dom.factor(free), sing, {"axis": axis, "frozen": frozen.tolist()})
        self.base, self.axis, self.frozen = base, axis, frozen
        self._free = free
        self.name = f"{base.name}|{'y' if axis == 'x' else 'x'}={frozen.tolist()}"

    def join(self, pts: np.ndarray) -> np.ndarray:
        fixed = np.broadcast_to(self.frozen, (len(pts), len(self.frozen)))
        return np.concatenate([pts, fixed] if self._free == 0 else [fixed, pts], axis=1)

    def _values(self, pts):
        return self.base.evaluate_many(self.join(pts))

    def power_many(self, points, s):
        pts = self.domain.reduce(as_points(points, self.domain.ndim))
        return self.base.power_many(self.join(pts), s)


class TabulatedWeight(MatrixWeight):
    """Sampled weight with nearest-sample lookup (no interpolation)."""

    name = "tabulated"

    def __init__(self, domain: Domain, points, matrices, singular_points=(), counts=None):
        pts = as_points(points, domain.ndim)
        mats = as_hermitian(matrices)
        if mats.shape[0] != len(pts):
            raise ValueError("need one matrix per sample point")
        super().__init__(mats.shape[-1], domain, singular_points)
        self.points, self.matrices = pts, mats
        self.counts = tuple(counts) if counts is not None else (len(pts),)
        box = np.ones(domain.ndim) if domain.is_torus else None
        self._tree = cKDTree(np.mod(pts, 1.0) if box is not None else pts, boxsize=box)

    @classmethod
    def from_grid(cls, weight: MatrixWeight, grid: SampleGrid) -> "TabulatedWeight":
        return cls(weight.domain, grid.points, weight.evaluate_many(grid.points),
                   weight.singular_points, counts=tuple(len(b) - 1 for b in grid.breakpoints) or None)

    def _values(self, pts):
        if not np.all(self.domain.contains(pts)):
            raise ValueError(f"tabulated weight evaluated outside its window {self.domain.window}")
        _, idx = self._tree.query(pts)
        return self.matrices[idx]


# ----------------------------------------------------------------------
# Tabulated weight files
# ----------------------------------------------------------------------

TABULATED_MAGIC = "# matrixap-tabulated-weight v1"


def write_tabulated(path, weight: TabulatedWeight) -> None:
    """Write the plain-text tabulated format (see docs/file_formats.md)."""
    dom = weight.domain
    lines = [TABULATED_MAGIC,
             f"N {weight.N}",
             f"domain {dom.kind.value} {' '.join(str(d) for d in dom.dims)}",
             "window " + " ".join(f"{lo!r} {hi!r}" for lo, hi in dom.window),
             "counts " + " ".join(str(c) for c in weight.counts),
             "singular " + " ".join(",".join(repr(c) for c in s) for s in weight.singular_points),
             "data"]
    for t, M in zip(weight.points, weight.matrices):
        vals = np.stack([M.real.ravel(), M.imag.ravel()], axis=1).ravel()
        lines.append(" ".join(repr(float(v)) for v in np.concatenate([t, vals])))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_tabulated(path) -> TabulatedWeight:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or text[0].strip() != TABULATED_MAGIC:
        raise ValueError(f"{path}: not a tabulated weight file")
    header, rows = {}, []
    in_data = False
    for line in text[1:]:
        line = line.strip()
        if not line:
            continue
        if in_data:
            rows.append([float(v) for v in line.split()])
            continue
        key, _, rest = line.partition(" ")
        if key == "data":
            in_data = True
        else:
            header[key] = rest.split()
    N = int(header["N"][0])
    kind, *dims = header["domain"]
    w = [float(v) for v in header.get("window", [])]
    domain = Domain(kind, tuple(int(d) for d in dims), tuple(zip(w[0::2], w[1::2])))
    singular = [tuple(float(c) for c in s.split(",")) for s in header.get("singular", [])]
    data = np.array(rows, dtype=float)
    nd = domain.ndim
    if data.ndim != 2 or data.shape[1] != nd + 2 * N * N:
        raise ValueError(f"{path}: expected {nd + 2 * N * N} columns per row")
    vals = data[:, nd:].reshape(-1, N * N, 2)
    mats = (vals[..., 0] + 1j * vals[..., 1]).reshape(-1, N, N)
    counts = tuple(int(c) for c in header.get("counts", [len(data)]))
    return TabulatedWeight(domain, data[:, :nd], mats, singular, counts)


# ----------------------------------------------------------------------
# Scalar weights
# ----------------------------------------------------------------------

class ScalarWeight:
    """Positive scalar function on a domain window."""

    def __init__(self, func: Callable, domain: Domain, singular_points=(), name: str = "scalar"):
        self._func = func
        self.domain = domain
        self.singular_points = tuple(tuple(float(c) for c in np.atleast_1d(s)) for s in singular_points)
        self.name = name

    def evaluate_many(self, points) -> np.ndarray:
        pts = self.domain.reduce(as_points(points, self.domain.ndim))
        return np.asarray(self._func(pts), dtype=float).reshape(len(pts))

    def __call__(self, points):
        return self.evaluate_many(points)

    @classmethod
    def constant(cls, c: float, domain: Domain) -> "ScalarWeight":
        return cls(lambda pts: np.full(len(pts), float(c)), domain, name=f"const({c:g})")

    @classmethod
    def power(cls, alpha: float, domain: Domain, center=0.0) -> "ScalarWeight":
        c = np.atleast_1d(np.asarray(center, dtype=float))
        return cls(lambda pts: _distance(pts, c, domain) ** alpha, domain,
                   [tuple(c)] if alpha != 0 else [], name=f"|x-{c.tolist()}|^{alpha:g}")

    def __pow__(self, s: float) -> "ScalarWeight":
        return ScalarWeight(lambda pts: self._func(pts) ** s, self.domain, self.singular_points,
                            f"({self.name})^{s:g}")

    def to_matrix_weight(self) -> MatrixWeight:
        return ClosedFormWeight(self.name, 1, self.domain,
                                lambda pts: self._func(pts).reshape(-1, 1, 1).astype(complex),
                                self.singular_points)


def entry_weight(W: MatrixWeight, s: float, k: int, outer: float = 1.0) -> ScalarWeight:
    """Scalar weight ``(w_kk^{(s)})**outer``: pointwise power of a diagonal entry of ``W**s``."""
    if not 0 <= k < W.N:
        raise IndexError(f"index {k} out of range for N={W.N}")

    def func(pts):
        return np.real(W.power_many(pts, s)[:, k, k]) ** outer

    return ScalarWeight(func, W.domain, W.singular_points, f"(w_{k}{k}^({s:g}))^{outer:g}")


def entry_of_power(W: MatrixWeight, s: float, i: int, j: int, t) -> complex:
    """The ``(i, j)`` entry of ``W(t)**s`` (0-based indices)."""
    M = W.evaluate(t)
    return complex(fractional_power(M, s)[i, j])


@dataclass
class PDReport:
    min_eigenvalue: float
    failures: list = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_positive_definite(W: MatrixWeight, grid: SampleGrid, floor: float = EIG_FLOOR) -> PDReport:
    """Report the minimum eigenvalue over ``grid`` and every sample failing the floor."""
    lam = np.linalg.eigvalsh(W.evaluate_many(grid.points))
    bad = ~(lam[:, 0] > floor * np.abs(lam[:, -1]))
    return PDReport(float(lam[:, 0].min()), [tuple(p) for p in grid.points[bad]], len(grid.points))


# ----------------------------------------------------------------------
# Catalog
# ----------------------------------------------------------------------

def _distance(pts, center, domain: Domain) -> np.ndarray:
    diff = pts - center
    if domain.is_torus:
        diff = diff - np.round(diff)
    return np.linalg.norm(diff, axis=1)


def _rotation(N: int, angle: float) -> np.ndarray:
    U = np.eye(N, dtype=complex)
    c, s = math.cos(angle), math.sin(angle)
    U[0, 0], U[0, 1], U[1, 0], U[1, 1] = c, -s, s, c
    return U


def _example_values(pts):
    x = pts[:, 0]
    r = np.sqrt(x)
    out = np.empty((len(x), 2, 2), dtype=complex)
    out[:, 0, 0] = r + 1.0 / r
    out[:, 0, 1] = 1j / r
    out[:, 1, 0] = -1j / r
    out[:, 1, 1] = 1.0 / r
    return out


def _example_power(pts, s):
    # det W = 1, so the eigenvalues are lam and 1/lam with lam from the trace;
    # this keeps the small eigenvalue accurate where W is badly conditioned
    W = _example_values(pts)
    a, c, d = W[:, 0, 0].real, W[:, 0, 1], W[:, 1, 1].real
    tr = a + d
    lam = 0.5 * (tr + np.sqrt((tr - 2.0) * (tr + 2.0)))
    v = np.stack([lam - d + 0j, np.conj(c)], axis=1)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    u = np.stack([-c, lam - d + 0j], axis=1)
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    Pv = v[:, :, None] * np.conj(v[:, None, :])
    Pu = u[:, :, None] * np.conj(u[:, None, :])
    return lam[:, None, None] ** s * Pv + lam[:, None, None] ** (-s) * Pu


def _as_vector(value, name) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.ndim != 1 or not np.all(np.isfinite(arr)):
        raise CatalogError(f"parameter {name!r} must be a finite number or list of numbers")
    return arr


def _parse_matrix(value) -> np.ndarray:
    arr = np.asarray(value)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        arr = arr[..., 0] + 1j * arr[..., 1]
    arr = np.asarray(arr, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise CatalogError("matrix must be square (entries real or [re, im] pairs)")
    lam = np.linalg.eigvalsh(as_hermitian(arr))
    if not lam[0] > 0:
        raise CatalogError("constant matrix must be Hermitian positive definite")
    return as_hermitian(arr)


def _cat_identity(domain, N=2):
    N = int(N)
    if N < 1:
        raise CatalogError("N must be >= 1")
    eye = np.eye(N, dtype=complex)
    return ClosedFormWeight("identity", N, domain, lambda pts: np.broadcast_to(eye, (len(pts), N, N)).copy(),
                            params={"N": N})


def _cat_constant(domain, matrix=((1.0, 0.0), (0.0, 1.0))):
    M = _parse_matrix(matrix)
    N = M.shape[0]
    return ClosedFormWeight("constant", N, domain, lambda pts: np.broadcast_to(M, (len(pts), N, N)).copy(),
                            params={"matrix": M})


def _center_param(center, domain: Domain, factor_dims=None):
    c = _as_vector(center, "center")
    dim = factor_dims if factor_dims is not None else domain.ndim
    if len(c) == 1 and dim > 1:
        c = np.repeat(c, dim)
    if len(c) != dim:
        raise CatalogError(f"center needs {dim} coordinates")
    return c


def _cat_diag_power(domain, alpha=(1.0,), center=0.0):
    if domain.is_product:
        raise CatalogError("diag_power lives on non-product domains; use product_diag_power")
    a = _as_vector(alpha, "alpha")
    c = _center_param(center, domain)

    def powered(pts, s=1.0):
        r = _distance(pts, c, domain)
        out = np.zeros((len(pts), len(a), len(a)), dtype=complex)
        idx = np.arange(len(a))
        out[:, idx, idx] = r[:, None] ** (s * a[None, :])
        return out

    sing = [tuple(c)] if np.any(a != 0) else []
    return ClosedFormWeight("diag_power", len(a), domain, powered, sing, {"alpha": a.tolist(), "center": c.tolist()},
                            power_func=powered)


def _cat_scalar_power(domain, alpha=0.5, center=0.0):
    a = float(_as_vector(alpha, "alpha")[0])
    w = _cat_diag_power(domain, (a,), center)
    w.name = "scalar_power"
    w.params = {"alpha": a, "center": w.params["center"]}
    return w


def _cat_example_weight(domain):
    if domain.is_product or domain.ndim != 1 or domain.is_torus:
        raise CatalogError("paper_example lives on a one-dimensional Euclidean window inside [0, 1]")
    lo, hi = domain.window[0]
    if lo < 0 or hi > 1:
        raise CatalogError("paper_example window must lie inside [0, 1]")
    return ClosedFormWeight("paper_example", 2, domain, _example_values, [(0.0,)],
                            power_func=_example_power)


def _cat_rotated_power(domain, alpha=(0.5, -0.5), angle=math.pi / 6, center=0.0):
    base = _cat_diag_power(domain, alpha, center)
    if base.N < 2:
        raise CatalogError("rotated_power needs at least two exponents")
    U = _rotation(base.N, float(angle))
    Uh = U.conj().T

    def powered(pts, s=1.0):
        return U @ base.power_many(pts, s) @ Uh

    return ClosedFormWeight("rotated_power", base.N, domain, powered, base.singular_points,
                            {"alpha": base.params["alpha"], "angle": float(angle), "center": base.params["center"]},
                            power_func=powered)


def _cat_product_diag_power(domain, alpha=(0.5,), beta=(0.5,), center_x=0.0, center_y=0.0):
    if not domain.is_product:
        raise CatalogError("product_diag_power needs a product domain")
    a, b = _as_vector(alpha, "alpha"), _as_vector(beta, "beta")
    if len(a) != len(b):
        raise CatalogError("alpha and beta need the same length")
    cx = _center_param(center_x, domain, domain.dims[0])
    cy = _center_param(center_y, domain, domain.dims[1])
    ax, ay = domain.factor_axes(0), domain.factor_axes(1)
    fx, fy = domain.factor(0), domain.factor(1)

    def powered(pts, s=1.0):
        rx = _distance(pts[:, list(ax)], cx, fx)
        ry = _distance(pts[:, list(ay)], cy, fy)
        out = np.zeros((len(pts), len(a), len(a)), dtype=complex)
        idx = np.arange(len(a))
        out[:, idx, idx] = rx[:, None] ** (s * a[None, :]) * ry[:, None] ** (s * b[None, :])
        return out

    sing = [tuple(cx) + tuple(cy)] if np.any(a != 0) or np.any(b != 0) else []
    return ClosedFormWeight("product_diag_power", len(a), domain, powered, sing,
                            {"alpha": a.tolist(), "beta": b.tolist(), "center_x": cx.tolist(),
                             "center_y": cy.tolist()}, singular_axes=True, power_func=powered)


CATALOG = {
    "identity": (_cat_identity, "W = I_N", lambda: Domain.line()),
    "constant": (_cat_constant, "W = fixed Hermitian positive definite matrix", lambda: Domain.line()),
    "diag_power": (_cat_diag_power, "W = diag(|t - center|^alpha_k)", lambda: Domain.line()),
    "scalar_power": (_cat_scalar_power, "N = 1, w = |t - center|^alpha", lambda: Domain.line()),
    "paper_example": (_cat_example_weight,
                      "W(x) = [[sqrt(x) + 1/sqrt(x), i/sqrt(x)], [-i/sqrt(x), 1/sqrt(x)]] on (0, 1]",
                      lambda: Domain.line()),
    "rotated_power": (_cat_rotated_power, "W = U(angle) diag(|t - center|^alpha_k) U(angle)*",
                      lambda: Domain.line()),
    "product_diag_power": (_cat_product_diag_power, "W = diag(|x - cx|^alpha_k |y - cy|^beta_k)",
                           lambda: Domain.product()),
}


def catalog_weight(name: str, params=None, domain: Domain | None = None) -> MatrixWeight:
    """Build a named catalog weight."""
    if name not in CATALOG:
        raise CatalogError(f"unknown weight {name!r}; known: {sorted(CATALOG)}")
    factory, _, default_domain = CATALOG[name]
    dom = domain if domain is not None else default_domain()
    try:
        return factory(dom, **dict(params or {}))
    except TypeError as exc:
        raise CatalogError(f"bad parameters for {name!r}: {exc}") from None


def list_catalog() -> list[dict]:
    out = []
    for k, (fn, desc, _) in sorted(CATALOG.items()):
        params = {n: prm.default for n, prm in inspect.signature(fn).parameters.items() if n != "domain"}
        out.append({"name": k, "description": desc, "params": params})
    return out


# ----------------------------------------------------------------------
# Closed forms for the two-by-two example weight on (0, 1]
# ----------------------------------------------------------------------

def example_integrals_closed_form(a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact ``int_a^b W`` and ``int_a^b W^{-1}`` for the catalog ``paper_example``."""
    A = 2.0 / 3.0 * (b ** 1.5 - a ** 1.5)
    B = 2.0 * (math.sqrt(b) - math.sqrt(a))
    Wab = np.array([[A + B, 1j * B], [-1j * B, B]])
    Winv = np.array([[B, -1j * B], [1j * B, A + B]])
    return Wab, Winv


def example_product_scalar(a: float, b: float) -> float:
    """``c`` with ``W_ab W^{-1}_ab = c I``: ``(4/3)((b-a)^2 - sqrt(ab)(sqrt(b)-sqrt(a))^2)``."""
    return 4.0 / 3.0 * ((b - a) ** 2 - math.sqrt(a * b) * (math.sqrt(b) - math.sqrt(a)) ** 2)


def example_frobenius(a: float, b: float) -> float:
    """``(1/(b-a)) sqrt(tr(W_ab W^{-1}_ab))`` in closed form."""
    return math.sqrt(2.0 * example_product_scalar(a, b)) / (b - a)


A2_EXAMPLE_BOUND = 2.0 * math.sqrt(2.0) / math.sqrt(3.0)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return np.stack([obj.real, obj.imag], axis=-1).tolist()
        return obj.tolist()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


__all__ = [
    "MatrixWeight", "ClosedFormWeight", "WeightPower", "ScaledWeight", "SlicedWeight", "TabulatedWeight",
    "ScalarWeight", "entry_weight", "entry_of_power", "verify_positive_definite", "PDReport",
    "catalog_weight", "list_catalog", "CATALOG", "read_tabulated", "write_tabulated",
    "example_integrals_closed_form", "example_product_scalar", "example_frobenius",
    "A2_EXAMPLE_BOUND", "SingularPointError", "DegenerateSampleError", "CatalogError",
    "NearSingularMatrixError",
]
