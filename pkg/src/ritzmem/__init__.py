"""Finite axisymmetric deformation of a clamped circular hyperelastic
membrane under hydrostatic load, computed by a Ritz expansion with an
optional steep Bessel-profile basis for boundary layers."""

from .assembly import functional_value, jacobian, p_gradient, residual
from .basis import (
    BasisSpec,
    SolutionState,
    bessel_i0_i1,
    eval_shape,
    eval_u,
    eval_v,
    phi,
    shape_p_derivs,
)
from .kinematics import (
    LoadParams,
    ShapeEval,
    curvatures,
    hydro_load,
    normal_angle,
    stretches,
)
from .material import (
    MaterialParams,
    StretchState,
    energy,
    energy_derivs,
    principal_stresses,
    stiffness_derivs,
    stiffness_scalar,
)
from .quadrature import QuadratureRule, auto_rule, gauss_rule, integrate, two_panel_rule
from .solver import (
    ContinuationPoint,
    SolveContext,
    SolveFailure,
    SolveReport,
    StepPolicy,
    continue_in_load,
    delta_diagnostic,
    init_p1,
    initial_guess,
    newton_solve,
    optimize_basis,
    solve_at_sag,
    solve_membrane,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
