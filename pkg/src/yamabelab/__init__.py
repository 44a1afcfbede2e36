"""Rearrangement inequalities and subcritical Yamabe minimization on M x R^n."""

__version__ = "0.1.0"

from .domain import (  # noqa: E402
    ConformalExponents,
    Field,
    Homogeneous,
    Line1D,
    Radial,
    WeightedGraph,
    conformal_exponents,
    grad_lp_norm,
    lp_norm,
    mass_profile,
    total_volume,
)
from .errors import (  # noqa: E402
    BracketFailure,
    DimensionError,
    DomainError,
    FormatError,
    IoError,
    NonConvergence,
    ReflectionOutOfDomain,
    UnsupportedGrid,
    YamabeLabError,
)
from .functional import (  # noqa: E402
    el_residual,
    energy,
    sphere_volume,
    yamabe_quotient,
    yamabe_sphere_constant,
)
from .rearrange import (  # noqa: E402
    Polarizer,
    greedy_polarization_sequence,
    greedy_polarization_step,
    mirror,
    polarize,
    polarizer_candidates,
    steiner_symmetrize,
)
from .solver import RadialProblem, SolverOptions, continuation, minimize_subcritical  # noqa: E402
from .shooting import shoot_radial  # noqa: E402
