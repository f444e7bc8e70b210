"""Grid-based Hamilton-Jacobi reachability."""

from .dynamics import Advection, DubinsCar, InputMode, Integrator1D
from .errors import (ConfigError, DivergenceError, DomainError, DynamicsError, FieldFormatError,
                     GridError, HJReachError)
from .grid import Grid, ValueField, create_grid, interpolate, state_at, upwind_first_derivatives
from .oracle import OracleConfig, oracle_value
from .shapes import (field_complement, field_intersection, field_union, shape_cylinder,
                     shape_rectangle, shape_sphere)
from .solver import Direction, MinWith, SolveConfig, SolveResult, solve
from .synthesis import DisturbancePolicy, Outcome, Trajectory, compute_trajectory, gradient_at

__version__ = "0.1.0"
