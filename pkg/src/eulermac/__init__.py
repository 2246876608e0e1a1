"""Euler-MacLaurin expansions of lattice Riemann sums over regular wedges and Delzant polytopes."""

from .analysis import ConvergenceReport, RiemannSum, TooManyPoints, convergence_report, riemann_sum
from .exact import MultiIndex, ToddCoefficients, bernoulli, lambda_alpha, multi_indices, todd_coefficients
from .expansion import (ExpansionResult, PartitionFailure, PartitionOfUnity, expand, gs_todd_oracle,
                        interval_expansion, partition_expansion, polygon_expansion, polytope3_expansion,
                        wedge_expansion)
from .expressions import parse_expression
from .functions import (BumpCutoff, ExpressionFunction, Polynomial, SmoothFunction, finite_difference_check,
                        function_from_source)
from .geometry import (DelzantPolytope, RegularWedge, build_polytope, build_wedge, edge_zeta, k_alpha,
                       load_polytope, parse_polytope, unit_cube, unit_simplex, vertex_frame)
from .quadrature import QuadratureConfig, ToleranceNotReached, integrate_face_star, integrate_region

__all__ = [name for name in dir() if not name.startswith("_")]
