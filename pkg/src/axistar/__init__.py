"""Steady states and free boundaries of rotating, stratified, self-gravitating
axisymmetric fluids, with a posteriori checks against the full equations."""

from .boundary import (BoundaryCurve, BoundaryData, SurfaceODE, closed_form_curve,
                       closed_form_z, fit_constants, integrate_surface_ode)
from .closures import CASES, ClosureSet, closure_set
from .errors import (BvpSingularError, ConfigError, DomainError, FitError, IntegrationError,
                     ShapeError, SingularPointError)
from .grid import CylGrid, ScalarField, laplacian_axisym
from .perturb import CloudScenario, cloud_boundary_bessel, cloud_boundary_linear
from .reduced import SteadyState, pressure_at, pressure_field, recover_velocity
from .scenarios import CloudBessel, CloudLinear, StarExp, StarLinear
from .separated import (BoundaryCondition, Bvp4Problem, Bvp4Solution, build_exp_problem,
                        build_linear_problem, solve_bvp4, z_surface_exp, z_surface_linear)
from .specfun import bessel_j, bessel_jy, bessel_y, j0, j1, y0, y1
from .verify import ResidualReport, convergence_study, full_system_residuals

__version__ = "0.1.0"
