"""Active exterior cloaking of time-harmonic scalar waves in two dimensions.

Three multipolar devices outside a region cancel an incident wave inside it
while radiating almost nothing to the far field. The main entry points are
re-exported here; see the submodules for the full API.
"""

from activecloak.errors import (
    ActiveCloakError,
    GeometryError,
    LevelSetNotFound,
    NearBoundaryWarning,
    NumericalError,
    SingularityError,
)
from activecloak.fields import eval_grid, plane_wave, point_source, superpose
from activecloak.geometry import (
    circle_curve,
    equilateral_layout,
    kite_curve,
    optimal_effective_radius,
    shadow_radius,
)
from activecloak.interior_cloak import build_densities, interior_cloak_eval
from activecloak.metrics import cloak_report, device_radius_estimate, interior_error, radiation_error
from activecloak.multipole_cloak import (
    eval_device_field,
    green_coefficients,
    illusion_coefficients,
    truncation_M,
)
from activecloak.scatter import scattering_suppression, solve_scattering
from activecloak.specfun import WaveContext
from activecloak.svd_cloak import build_system, svd_solve

__version__ = "0.1.0"

__all__ = [
    "ActiveCloakError",
    "GeometryError",
    "LevelSetNotFound",
    "NearBoundaryWarning",
    "NumericalError",
    "SingularityError",
    "WaveContext",
    "build_densities",
    "build_system",
    "circle_curve",
    "cloak_report",
    "device_radius_estimate",
    "equilateral_layout",
    "eval_device_field",
    "eval_grid",
    "green_coefficients",
    "illusion_coefficients",
    "interior_cloak_eval",
    "interior_error",
    "kite_curve",
    "optimal_effective_radius",
    "plane_wave",
    "point_source",
    "radiation_error",
    "scattering_suppression",
    "shadow_radius",
    "solve_scattering",
    "superpose",
    "svd_solve",
    "truncation_M",
]
