"""Linear-programming kernel: dense two-phase simplex with Bland's rule."""

from .certify import Certificate, check
from .kernel import BACKEND
from .problem import LpError, LpProblem, LpSolution, Status
from .simplex import DEFAULT_EPS, feasibility, solve

__all__ = [
    "BACKEND",
    "Certificate",
    "DEFAULT_EPS",
    "LpError",
    "LpProblem",
    "LpSolution",
    "Status",
    "check",
    "feasibility",
    "solve",
]
