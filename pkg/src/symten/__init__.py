"""Symmetric tensor fields: pointwise algebra, differential operators,
conformal Killing tensors, boundary coefficients, kinetic relations and a
discrete decomposition solver."""

from . import _threads

_threads.apply()

from .symcore import MultiIndex, RawTensor, SymTensor, dim_sym  # noqa: E402
from .metric_ops import MetricPoint, harmonic_decompose, project_p, project_q  # noqa: E402
from .geom import Chart, TensorField, conformal_chart, euclidean_chart, named_chart  # noqa: E402
from .poly import PolyTensorField  # noqa: E402
from .ckt import ck_residual, ckt_from_holomorphic, constrained_ck_kernel, poly_ck_kernel  # noqa: E402
from .boundary_coeffs import a_coeff, b_coeff, coeff_table  # noqa: E402
from .kinetic import KineticStack, consistency_residual, transport_relations  # noqa: E402
from .decomp import GridField, decompose_field, refinement_study  # noqa: E402
from .suites import Check, run_suite  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "Chart",
    "Check",
    "GridField",
    "KineticStack",
    "MetricPoint",
    "MultiIndex",
    "PolyTensorField",
    "RawTensor",
    "SymTensor",
    "TensorField",
    "a_coeff",
    "b_coeff",
    "ck_residual",
    "ckt_from_holomorphic",
    "coeff_table",
    "conformal_chart",
    "consistency_residual",
    "constrained_ck_kernel",
    "decompose_field",
    "dim_sym",
    "euclidean_chart",
    "harmonic_decompose",
    "named_chart",
    "poly_ck_kernel",
    "project_p",
    "project_q",
    "refinement_study",
    "run_suite",
    "transport_relations",
]
