"""Numerical toolkit for matrix-weighted A_p conditions and weighted operator bounds."""

__version__ = "0.1.0"

from .domain import Domain, SetFamily, holder_conjugate  # noqa: E402
from .grids import GridSpec, build_grid, resolution_ladder  # noqa: E402
from .weights import MatrixWeight, ScalarWeight, catalog_weight, list_catalog  # noqa: E402
from .verdicts import Verdict  # noqa: E402
from .metrics import (ap_condition_check, ap_refinement, duality_transform, roudenko_constant,  # noqa: E402
                      roudenko_refinement, uniform_slice_check)
from .projection import coordinate_projection_bound, projection_bound  # noqa: E402
from .sufficient import non_necessity_demo, sufficient_ap_check  # noqa: E402
from .transforms import PeriodicGrid, hilbert_op, riesz_op, weighted_operator_norm  # noqa: E402
from .kernels import get_kernel, kernel_condition_estimates, uniform_boundedness_sweep  # noqa: E402

__all__ = [
    "Domain", "SetFamily", "holder_conjugate", "GridSpec", "build_grid", "resolution_ladder",
    "MatrixWeight", "ScalarWeight", "catalog_weight", "list_catalog", "Verdict",
    "ap_condition_check", "ap_refinement", "duality_transform", "roudenko_constant", "roudenko_refinement",
    "uniform_slice_check", "coordinate_projection_bound", "projection_bound", "non_necessity_demo",
    "sufficient_ap_check", "PeriodicGrid", "hilbert_op", "riesz_op", "weighted_operator_norm",
    "get_kernel", "kernel_condition_estimates", "uniform_boundedness_sweep",
]
