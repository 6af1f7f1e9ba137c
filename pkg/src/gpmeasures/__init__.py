"""The G_p family of inequality measures.

G_1 is the Gini coefficient, G_2 the squared-sine angle measure and G_inf
the share of zero entries.
"""

from .analysis import (
    ConvergenceFit,
    DegenerateTable,
    SweepTable,
    fit_convergence,
    p_sweep,
    two_point_closed_form,
)
from .measures import *  # noqa: F401,F403
from .measures import __all__ as _measures_all
from .properties import CheckOutcome, ComonotonePair, PreconditionViolated

__version__ = "0.1.0"

__all__ = list(_measures_all) + [
    "ConvergenceFit",
    "DegenerateTable",
    "SweepTable",
    "fit_convergence",
    "p_sweep",
    "two_point_closed_form",
    "CheckOutcome",
    "ComonotonePair",
    "PreconditionViolated",
]
