"""Variational tools for the prescribed Ricci curvature problem on compact
homogeneous spaces G/H."""

from .core import (
    BracketTable,
    HomSpaceSpec,
    center_point,
    ricci_diag,
    ricci_full,
    scalar_curvature_diag,
    scalar_full,
    structure_constants_from_brackets,
    trace_constraint,
)
from .errors import DomainError, IndefiniteDrift, NoConvergence, NoSolution, SpecError, UsageError
from .families import MetricFamily
from .fibration import (
    AlphaBetaReport,
    Verdict,
    all_reports,
    alpha_of_stratum,
    beta_of_stratum,
    canonical_variation,
    check_main_theorem,
    maximize_scalar,
    stratum_report,
)
from .solver import CriticalPoint, classify, find_critical, hessian_signature, ricci_map_rank, solve_diag_system
from .strata import GeodesicRay, StratumInfo, divergence_witness, enumerate_strata, make_stratum

__version__ = "0.1.0"
