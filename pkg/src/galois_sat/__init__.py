"""Non-integrability analysis of a rigid satellite with gravity-gradient and
induced magnetic torques.

Modules
-------
elliptic    Jacobi elliptic functions and complete integrals.
dynamics    Euler-Poisson equations, first integrals, equilibria.
reduction   Euler-angle canonical coordinates and the reduced system.
solutions   Elliptic-function particular solutions.
ratfun      Rational functions with factored denominators.
nve         Normal variational equation and its Fuchsian form.
kovacic     Kovacic's algorithm, cases I and II.
monodromy   Numerical monodromy by transport along loops.
poincare    Poincare sections of the reduced system.
cli         Command-line interface.
"""

from .dynamics import SatelliteParams, first_integrals, integrate
from .kovacic import Classification, classify
from .nve import FuchsianProblem, frobenius_infinity, satellite_problem
from .solutions import Branch, ParticularSolution

__version__ = "0.1.0"

__all__ = ["SatelliteParams", "first_integrals", "integrate", "Classification", "classify",
           "FuchsianProblem", "frobenius_infinity", "satellite_problem", "Branch",
           "ParticularSolution", "__version__"]
