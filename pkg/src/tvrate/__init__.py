"""Convergence-rate limits of minimal-order filtered gradient methods for
time-varying quadratic optimization."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .polynomial import (  # noqa: F401
    Polynomial, elementary_symmetric, max_root_modulus, poly_eval,
    poly_from_roots, poly_roots,
)
from .model import (  # noqa: F401
    PoleSpec, SignalTrace, TimeVariationModel, build_model, generate_signal,
    optimal_trajectory, parse_poles,
)
from .filters import (  # noqa: F401
    FilterRealization, MinimalFilter, design_for_model, design_n1,
    design_n2_conjugate, design_n2_real, design_n3, gradient_descent_filter,
    realize,
)
from .rate import (  # noqa: F401
    BoundReport, LocusPoint, RateReport, closed_loop_poly,
    coefficient_lower_bound, minmax_search, rho_tv, root_locus,
    worst_case_rate,
)
from .sim import (  # noqa: F401
    QuadraticProblem, SimTrace, empirical_rate, internal_model_violation_demo,
    make_problem, simulate,
)
