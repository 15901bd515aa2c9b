"""Isolated singular radial solutions of ``-M_theta(u) Delta u = u^p`` in the punctured unit ball.

``M_theta(u) = theta + int_B |grad u| dx``.  The package builds Dirac-type
weak singular solutions by a barrier fixed-point scheme, absorption
solutions and their negative-theta branch, and strong power-law profiles,
with closed-form constants to check them against.
"""

from .constants import (
    BootstrapLedger,
    ConditionReport,
    admissible_intervals,
    barrier_scale,
    bootstrap_ledger,
    check_condition,
    compute_ap,
    singularity_coeff,
)
from .dirac import (
    BranchReport,
    SolveReport,
    absorption_solve,
    branch_function,
    negative_branch_solve,
    weak_singularity_solve,
)
from .errors import ConvergenceError, KirchhoffError, ParameterDomainError
from .green import dirac_potential, green_apply, potential_pair
from .mass import gradient_mass, m_theta, weak_residual
from .radial import Params, RadialFn, RadialGrid, Singular, make_grid
from .strong import (
    ProfileReport,
    ScalarBranchReport,
    StrongSummary,
    end_to_end_strong,
    scalar_branch,
    strong_profile,
)

__version__ = "0.1.0"
