"""Run configurations, analysis dispatch and JSON reports."""
from __future__ import annotations

import copy
import json
import math
import time
import warnings
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .domain import Domain, SetFamily, holder_conjugate
from .grids import GridSpec, build_grid, graded_gauss_rule, resolution_ladder
from .kernels import KernelSweep, get_kernel, kernel_condition_estimates, uniform_boundedness_sweep
from .linalg import NearSingularMatrixError
from .metrics import NotLocallyIntegrableError, ap_refinement, roudenko_refinement, uniform_slice_check
from .projection import CoordinateTarget, coordinate_projection_bound, eigen_projection_check, projection_ladder
from .sufficient import example_families, non_necessity_demo, sufficient_ap_check
from .transforms import PeriodicGrid, hilbert_op, riesz_op, weighted_operator_norm
from .verdicts import Verdict, classify
from .weights import (A2_EXAMPLE_BOUND, CatalogError, DegenerateSampleError, SingularPointError, catalog_weight,
                      example_product_scalar, read_tabulated)

SCHEMA_VERSION = "1"
ANALYSES = ("ap", "roudenko", "projection", "sufficient", "slices", "transform", "kernel", "example")

DEFAULT_CONFIG = {
    "weight": {"catalog": "identity", "params": {}},
    "p": 2.0,
    "seed": 0,
    "sphere_count": 512,
    "expect_bounded": False,
    "family": {"type": "lattice", "center_counts": 3, "r_min": 0.01, "r_max": 0.25, "n_radii": 3},
    "grid": {"counts": 32, "grading": 0.85, "depths": [1e-4, 1e-7, 1e-10]},
    "analyses": ["ap"],
    "options": {},
}

# (a, b) pairs of the example report; (0.25, 1) has a hand-checkable product
EXAMPLE_PAIRS = [(0.0, 1.0), (0.25, 1.0), (0.0, 0.5), (0.1, 0.9), (0.5, 1.0), (0.01, 0.02), (0.3, 0.31)]
EXAMPLE_DEPTHS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)


class ConfigError(ValueError):
    """Invalid configuration: exit code 2."""


def load_schema(name: str) -> dict:
    return json.loads(resources.files("matrixap").joinpath("schemas", name).read_text(encoding="utf-8"))


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "params":
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def validate_config(config: dict) -> dict:
    """Schema-check ``config`` and fill defaults; raises ``ConfigError``."""
    try:
        jsonschema.validate(config, load_schema("config.schema.json"))
    except jsonschema.ValidationError as exc:
        where = ".".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config field {where}: {exc.message}") from None
    return _merge(DEFAULT_CONFIG, config)


def load_config(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return validate_config(data)


@dataclass
class RunContext:
    config: dict
    weight: object
    p: float
    family: SetFamily
    specs: list
    base: GridSpec
    seed: int


def build_context(config: dict) -> RunContext:
    """Turn a validated config into weight, family and grid ladder."""
    try:
        domain = Domain.from_dict(config["domain"]) if "domain" in config else None
        wspec = config["weight"]
        if "file" in wspec:
            W = read_tabulated(wspec["file"])
        else:
            W = catalog_weight(wspec["catalog"], wspec.get("params", {}), domain)
        fam = config["family"]
        dom = W.domain
        if fam.get("type", "lattice") == "anchored":
            family = SetFamily.anchored_intervals(dom, fam["r_min"], fam["r_max"], fam["n_radii"])
        else:
            family = SetFamily.lattice(dom, fam.get("center_counts", 3), fam["r_min"], fam["r_max"], fam["n_radii"])
        g = config["grid"]
        base = GridSpec(tuple(np.atleast_1d(g["counts"])), (), g["grading"], g["depths"][0])
        specs = resolution_ladder(base, g["depths"])
        holder_conjugate(config["p"])
    except (CatalogError, ValueError, KeyError, OSError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None
    return RunContext(config, W, float(config["p"]), family, specs, base, int(config["seed"]))


# ----------------------------------------------------------------------
# JSON cleaning
# ----------------------------------------------------------------------

def clean(obj):
    """Recursively convert numpy/enum/complex/tuple values to plain JSON types."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# ----------------------------------------------------------------------
# analyses; each returns (result, trace rows, resolution, verdict)
# ----------------------------------------------------------------------

def _ladder_rows(trace):
    return [[t.scale, t.value, t.resolution.get("depth", t.scale)] for t in trace]


def _analysis_ap(ctx: RunContext):
    lad = ap_refinement(ctx.weight, ctx.p, ctx.family, ctx.specs, ctx.config["sphere_count"], ctx.seed)
    res = lad.to_dict()
    res["c_hat"] = lad.values[-1]
    return res, _ladder_rows(lad.trace), ctx.specs[-1].to_dict(), lad.verdict


def _analysis_roudenko(ctx: RunContext):
    norm = ctx.config["options"].get("roudenko", {}).get("norm", "spectral")
    lad = roudenko_refinement(ctx.weight, ctx.p, ctx.family, ctx.specs, norm)
    res = lad.to_dict()
    res["c_prime_hat"] = lad.values[-1]
    return res, _ladder_rows(lad.trace), ctx.specs[-1].to_dict(), lad.verdict


def _projection_specs(ctx: RunContext):
    return projection_ladder(GridSpec(ctx.base.counts, (), ctx.base.grading, ctx.base.depth),
                             ctx.config["grid"]["depths"])


def _analysis_projection(ctx: RunContext):
    opts = ctx.config["options"].get("projection", {})
    W = ctx.weight
    target = CoordinateTarget(opts.get("target", "entry_of_w"))
    ks = [opts["k"]] if "k" in opts else list(range(W.N))
    specs = _projection_specs(ctx)
    per_k, rows, verdicts = [], [], []
    for k in ks:
        est = coordinate_projection_bound(W, ctx.p, k, target, specs)
        d = est.to_dict()
        d["k"] = k
        per_k.append(d)
        rows.extend(_ladder_rows(est.trace))
        verdicts.append(est.verdict)
    res = {"target": target.value, "per_k": per_k}
    if opts.get("eigen"):
        g = build_grid(W.domain, specs[-1].with_singular(W.singular_points))
        res["eigen"] = [eigen_projection_check(W, ctx.p, i, g).to_dict() for i in range(W.N)]
    verdict = _worst(verdicts)
    return res, rows, specs[-1].to_dict(), verdict


def _worst(verdicts):
    if any(v is Verdict.DIVERGENCE_SUSPECTED for v in verdicts):
        return Verdict.DIVERGENCE_SUSPECTED
    if any(v is Verdict.INCONCLUSIVE for v in verdicts):
        return Verdict.INCONCLUSIVE
    return Verdict.BOUNDED


def _analysis_sufficient(ctx: RunContext):
    specs = _projection_specs(ctx)
    rep = sufficient_ap_check(ctx.weight, ctx.p, ctx.family, specs, ctx.specs)
    rows = [r for est in rep.condition_i for r in _ladder_rows(est.trace)]
    return rep.to_dict(), rows, specs[-1].to_dict(), rep.verdict


def _analysis_slices(ctx: RunContext):
    opts = ctx.config["options"].get("slices", {})
    W = ctx.weight
    if not W.domain.is_product:
        raise ValueError("slice analysis needs a product-domain weight")
    axis = opts.get("axis", "x")
    free = W.domain.factor(0 if axis == "x" else 1)
    fam = ctx.config["family"]
    if fam.get("type", "lattice") == "anchored":
        family = SetFamily.anchored_intervals(free, fam["r_min"], fam["r_max"], fam["n_radii"])
    else:
        counts = fam.get("center_counts", 3)
        counts = counts if isinstance(counts, int) else counts[0]
        family = SetFamily.lattice(free, counts, fam["r_min"], fam["r_max"], fam["n_radii"])
    rep = uniform_slice_check(W, ctx.p, axis, opts.get("samples", 10), family, ctx.specs)
    rows = [[float(c[0]) if c else 0.0, v, ctx.specs[-1].depth] for c, v in zip(rep.slices, rep.constants)]
    return rep.to_dict(), rows, ctx.specs[-1].to_dict(), _worst(rep.verdicts)


def _analysis_transform(ctx: RunContext):
    opts = ctx.config["options"].get("transform", {})
    W = ctx.weight
    sizes = opts.get("grids", [64, 128, 256])
    nd = W.domain.ndim
    values, rows, ests = [], [], []
    for n in sizes:
        grid = PeriodicGrid((n,) * nd, W.domain.dims if W.domain.is_product else None)
        axis = opts.get("axis", 0)
        op = riesz_op(grid, axis) if opts.get("operator", "hilbert") == "riesz" else hilbert_op(grid, axis)
        est = weighted_operator_norm(op, W, ctx.p, grid, opts.get("trials", 4), ctx.seed, opts.get("iterations", 200))
        ests.append(est.to_dict())
        values.append(est.value)
        rows.append([1.0 / n, est.value, 1.0 / n])
    verdict, rate = classify([1.0 / n for n in sizes], values)
    res = {"operator": opts.get("operator", "hilbert"), "grids": sizes, "norms": values, "slope": -rate,
           "estimates": ests, "verdict": verdict.value}
    return res, rows, {"grids": sizes}, verdict


def _analysis_kernel(ctx: RunContext):
    opts = ctx.config["options"].get("kernel", {})
    K = get_kernel(opts.get("name", "product_hilbert"))
    cond = kernel_condition_estimates(K, opts.get("eta", 1.0), KernelSweep())
    n = opts.get("grid", 64)
    factors = None if K.m == 0 else (K.n, K.m)
    grid = PeriodicGrid((n,) * (K.n + K.m), factors)
    W = ctx.weight if opts.get("weighted", False) else None
    if W is not None and W.domain.ndim != grid.ndim:
        raise ValueError("weighted kernel sweep needs a weight on a domain of the kernel's dimension")
    sweep = uniform_boundedness_sweep(K, W, ctx.p, grid, opts.get("eps", [1 / 32, 1 / 16, 1 / 8]),
                                      opts.get("N", [1 / 4, 3 / 8, 7 / 16]), opts.get("trials", 2), ctx.seed)
    rows = [[float(e[0]), float(v), 1.0 / n] for e, row in zip(sweep.eps, sweep.norms) for v in row]
    verdict = sweep.verdict
    return {"conditions": cond.to_dict(), "sweep": sweep.to_dict()}, rows, {"grid": [n] * grid.ndim}, verdict


# ----------------------------------------------------------------------
# the 2x2 example
# ----------------------------------------------------------------------

def example_det_block():
    W = catalog_weight("paper_example")
    x = np.geomspace(1e-5, 1.0, 1001)[:-1]
    det = np.real(np.linalg.det(W.evaluate_many(x)))
    dev = np.abs(det - 1.0)
    res = {"max_abs_deviation": float(dev.max()), "samples": len(x), "range": [float(x[0]), float(x[-1])],
           "tolerance": 1e-10, "ok": bool(dev.max() <= 1e-10)}
    rows = [[float(t), float(d), 0.0] for t, d in zip(x, det)]
    return res, rows, {"samples": "geometric", "count": len(x)}, None


def example_divergence_block():
    """``w_11 w_11^{(-1)}`` sampled toward 0 with its fitted power law."""
    W = catalog_weight("paper_example")
    specs = projection_ladder(GridSpec((64,), (), 0.7, EXAMPLE_DEPTHS[-1]), EXAMPLE_DEPTHS)
    est = coordinate_projection_bound(W, 2.0, 0, CoordinateTarget.ENTRY_OF_W, specs, squared=True)
    pts, vals = est.samples
    order = np.argsort(pts[:, 0])
    rows = [[float(pts[i, 0]), float(vals[i]), EXAMPLE_DEPTHS[-1]] for i in order]
    res = est.to_dict()
    res["closed_form"] = "1 + 1/x"
    res["max_rel_error_vs_closed_form"] = float(np.max(np.abs(vals / (1 + 1 / pts[:, 0]) - 1)))
    return res, rows, specs[-1].to_dict(), est.verdict


def example_integrals(a: float, b: float):
    """Graded Gauss quadrature of ``W`` and ``W^{-1}`` over ``[a, b]``."""
    W = catalog_weight("paper_example")
    g = graded_gauss_rule(a, b, [0.0])
    return g.integrate(W.evaluate_many(g.points)), g.integrate(W.power_many(g.points, -1.0)), len(g)


def example_product_block(pairs=EXAMPLE_PAIRS):
    out = []
    for a, b in pairs:
        Wab, Winv, n = example_integrals(a, b)
        P = Wab @ Winv
        c = example_product_scalar(a, b)
        out.append({"a": a, "b": b, "numeric": clean(P), "closed_form_scalar": c,
                    "rel_error": float(np.max(np.abs(P - c * np.eye(2))) / c), "nodes": n})
    res = {"pairs": out, "max_rel_error": max(o["rel_error"] for o in out)}
    return res, [], {"rule": "graded gauss-legendre", "order": 8, "grading": 0.5, "depth": 1e-20}, None


def example_frobenius_block(pairs=EXAMPLE_PAIRS):
    out = []
    for a, b in pairs:
        Wab, Winv, _ = example_integrals(a, b)
        val = math.sqrt(np.real(np.trace(Wab @ Winv))) / (b - a)
        out.append({"a": a, "b": b, "value": val})
    limit = next(o["value"] for o in out if o["a"] == 0.0 and o["b"] == 1.0)
    res = {"pairs": out, "max": max(o["value"] for o in out), "bound": A2_EXAMPLE_BOUND,
           "limit_0_1": limit, "limit_closed_form": math.sqrt(8.0 / 3.0),
           "ok": bool(max(o["value"] for o in out) <= A2_EXAMPLE_BOUND + 1e-6)}
    rows = [[o["b"] - o["a"], o["value"], 1e-20] for o in out]
    return res, rows, {"rule": "graded gauss-legendre", "order": 8}, None


def example_sufficient_block():
    W = catalog_weight("paper_example")
    rep = sufficient_ap_check(W, 2.0, example_families()[0])
    rows = [r for est in rep.condition_i for r in _ladder_rows(est.trace)]
    return rep.to_dict(), rows, projection_ladder()[-1].to_dict(), rep.verdict


def example_non_necessity_block():
    rep = non_necessity_demo()
    return rep.to_dict(), _ladder_rows(rep.a2.trace), rep.a2.trace[-1].resolution, rep.a2.verdict


EXAMPLE_BLOCKS = [
    ("example.det", example_det_block),
    ("example.divergence", example_divergence_block),
    ("example.product", example_product_block),
    ("example.frobenius", example_frobenius_block),
    ("example.sufficient", example_sufficient_block),
    ("example.non_necessity", example_non_necessity_block),
]

ANALYSIS_FUNCS = {
    "ap": _analysis_ap,
    "roudenko": _analysis_roudenko,
    "projection": _analysis_projection,
    "sufficient": _analysis_sufficient,
    "slices": _analysis_slices,
    "transform": _analysis_transform,
    "kernel": _analysis_kernel,
}


# ----------------------------------------------------------------------
# run
# ----------------------------------------------------------------------

def _error_code(exc: Exception) -> str:
    if isinstance(exc, NotLocallyIntegrableError):
        return "not_locally_integrable"
    if isinstance(exc, (NearSingularMatrixError, DegenerateSampleError, SingularPointError, FloatingPointError,
                        np.linalg.LinAlgError, ZeroDivisionError)):
        return "numeric_error"
    if isinstance(exc, (ValueError, IndexError, KeyError)):
        return "invalid_input"
    return "internal_error"


def _run_block(block_id: str, analysis: str, func) -> dict:
    t0 = time.perf_counter()
    try:
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            result, rows, resolution, verdict = func()
        block = {"status": "ok", "error": None, "result": clean(result), "trace": clean(rows),
                 "resolution": clean(resolution), "verdict": None if verdict is None else clean(verdict)}
    except Exception as exc:  # captured into the block by design
        block = {"status": "error", "error": {"code": _error_code(exc), "message": f"{type(exc).__name__}: {exc}"},
                 "result": None, "trace": [], "resolution": None, "verdict": None}
    block.update({"id": block_id, "analysis": analysis, "wall_time_s": time.perf_counter() - t0})
    return block


def _exit_code(blocks, expect_bounded: bool) -> int:
    if any(b["status"] == "error" for b in blocks):
        return 3
    if expect_bounded and any(b["verdict"] == Verdict.DIVERGENCE_SUSPECTED.value for b in blocks):
        return 1
    return 0


def run(config: dict) -> dict:
    """Validate ``config``, run its analyses in order and assemble the report."""
    cfg = validate_config(config)
    blocks = []
    analyses = cfg["analyses"]
    ctx = build_context(cfg) if any(a != "example" for a in analyses) else None
    for name in analyses:
        if name == "example":
            blocks.extend(_run_block(bid, "example", fn) for bid, fn in EXAMPLE_BLOCKS)
        else:
            blocks.append(_run_block(name, name, lambda f=ANALYSIS_FUNCS[name]: f(ctx)))
    return {"tool": "matrixap", "version": __version__, "schema_version": SCHEMA_VERSION,
            "config": clean(cfg), "blocks": blocks, "exit_code": _exit_code(blocks, cfg["expect_bounded"])}


def reproduce_example() -> dict:
    """Report for the built-in 2x2 example weight."""
    return run({"analyses": ["example"]})


def validate_report(report: dict) -> None:
    jsonschema.validate(report, load_schema("report.schema.json"))


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def strip_timing(report: dict) -> dict:
    """Copy without wall-time fields (for determinism comparisons)."""
    r = copy.deepcopy(report)
    for b in r.get("blocks", []):
        b.pop("wall_time_s", None)
    return r


def emit_plot_data(report: dict, block_id: str, path) -> Path:
    """Write a block's trace as whitespace-separated ``x value resolution`` columns."""
    block = next((b for b in report["blocks"] if b["id"] == block_id), None)
    if block is None:
        raise KeyError(f"no block {block_id!r} in report")
    lines = ["# x value resolution"]
    lines += [f"{x!r} {v!r} {r!r}" for x, v, r in block["trace"]]
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_plot_data(path) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)  # header-only files are valid
        return np.loadtxt(path, comments="#", ndmin=2).reshape(-1, 3)
