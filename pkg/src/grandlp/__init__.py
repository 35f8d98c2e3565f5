"""Variable exponent and grand variable exponent Lebesgue norms on probability
spaces, with numerical checks of the ergodic theorem in the grand space."""

from .dynamics import (
    Doubling,
    FiniteMap,
    Identity,
    LimitAverage,
    Rotation,
    apply_map,
    birkhoff_average,
    check_exponent_invariant,
    check_measure_preserving,
    exact_limit_average,
)
from .ergodic import TheoremReport, run_theorem
from .errors import ConvergenceError, DomainError, HypothesisError
from .norms import (
    GrandNormEstimate,
    GridSpec,
    VanishingVerdict,
    grand_norm,
    grand_weight,
    luxemburg_norm,
    modular,
    vanishing_limit,
)
from .space import (
    Constant,
    Cosine,
    Exponent,
    FiniteSpace,
    Indicator,
    IntervalSpace,
    Pointwise,
    Power,
    Sampled,
    evaluate,
    exponent_bounds,
    integrate,
)

__version__ = "0.1.0"
