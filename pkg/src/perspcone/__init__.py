"""Projections onto epigraphs of perspective functions.

The main entry points are :func:`project_epi` (scalar cones such as the
exponential cone) and :func:`project_epi_radial` (cones built from
``phi(||x||)``). Builtin functions live in :mod:`perspcone.functions`.
"""

from .errors import (BracketExpansionExceeded, ConeProjectionError,
                     InnerSolveFailed, NonFiniteInput)
from .functions import (ExpFunction, HyperbolicFunction, QuadraticFunction,
                        RadialExpFunction, ScalarConvexFunction, get_function)
from .perspective import PerspProxResult, persp_prox, persp_prox_radial
from .projection import (BatchResult, ConePoint, PhiObjective, ProjectionResult,
                         certify_error_bound, project, project_batch,
                         project_epi, project_epi_radial)
from .rootfind import (Bracket, RootResult, SolverConfig, expand_bracket,
                       solve_bisection, solve_brent)
from .special import lambert_w, lambert_w_of_exp, safeguarded_cubic_root
from .testgen import (LabeledSample, RegionSpec, generate_labeled,
                      labeled_sample, oracle_project, region)

__all__ = [
    "BatchResult", "Bracket", "BracketExpansionExceeded", "ConePoint",
    "ConeProjectionError", "ExpFunction", "HyperbolicFunction",
    "InnerSolveFailed", "LabeledSample", "NonFiniteInput", "PerspProxResult",
    "PhiObjective", "ProjectionResult", "QuadraticFunction",
    "RadialExpFunction", "RegionSpec", "RootResult", "ScalarConvexFunction",
    "SolverConfig", "certify_error_bound", "expand_bracket",
    "generate_labeled", "get_function", "labeled_sample", "lambert_w",
    "lambert_w_of_exp", "oracle_project", "persp_prox", "persp_prox_radial",
    "project", "project_batch", "project_epi", "project_epi_radial", "region",
    "safeguarded_cubic_root", "solve_bisection", "solve_brent",
]

__version__ = "0.1.0"
