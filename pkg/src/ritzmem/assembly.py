"""Weighted-residual assembly for the membrane equilibrium.

With U(a, b) the tension coefficient and Q = c - d*z the local pressure,
the stationarity conditions of the potential energy in the Ritz
coefficients are

  g_i     = int [ U(l1,l2) z' u_i' - Q l2 r' u_i ] s ds
  g_{m+i} = int [ U(l1,l2) r' v_i' + (U(l2,l1) l2 / s + Q l2 z') v_i ] s ds

and the tangent matrix is their exact coefficient Jacobian, which is
symmetric because g is the gradient of a scalar.  All integrals run over
the open interval, so the 1/s factors never hit the pole.
"""

from __future__ import annotations

import numpy as np

from .basis import BasisTables, SolutionState, shape_p_derivs
from .kinematics import hydro_load
from .material import MaterialParams, energy, stiffness_derivs, stiffness_scalar


def _nodal(state: SolutionState, tables: BasisTables):
    """Trial shape and stretches at the quadrature nodes."""
    m = state.spec.m
    xu, xv = state.x[:m], state.x[m:]
    z = xu @ tables.u
    dz = xu @ tables.du
    r = tables.s + xv @ tables.v
    dr = 1.0 + xv @ tables.dv
    l1 = np.hypot(dz, dr)
    l2 = r / tables.s
    q = hydro_load(z, state.load.c, state.load.d)
    return z, r, dz, dr, l1, l2, q


def _tables(state, rule, tables):
    if tables is None:
        return BasisTables.build(state.spec, rule)
    return tables


def functional_value(state: SolutionState, mat: MaterialParams, rule,
                     tables: BasisTables | None = None) -> float:
    """Potential energy of the trial shape.

    One half of int [ W s + Q r**2 z' ] ds; its gradient in the Ritz
    coefficients is exactly the residual vector, for any d.
    """
    t = _tables(state, rule, tables)
    z, r, dz, dr, l1, l2, q = _nodal(state, t)
    l3 = 1.0 / (l1 * l2)
    i1 = l1 * l1 + l2 * l2 + l3 * l3
    i2 = 1.0 / (l1 * l1) + 1.0 / (l2 * l2) + 1.0 / (l3 * l3)
    w = energy(i1, i2, mat)
    return 0.5 * float(t.w @ (w * t.s + q * r * r * dz))


def residual(state: SolutionState, mat: MaterialParams, rule,
             tables: BasisTables | None = None) -> np.ndarray:
    """Equilibrium residual g (length 2m) at the current coefficients."""
    t = _tables(state, rule, tables)
    z, r, dz, dr, l1, l2, q = _nodal(state, t)
    su12 = stiffness_scalar(l1, l2, mat)
    su21 = stiffness_scalar(l2, l1, mat)
    ws = t.w * t.s
    g_u = t.du @ (ws * su12 * dz) - t.u @ (ws * q * l2 * dr)
    g_v = t.dv @ (ws * su12 * dr) + t.v @ (t.w * su21 * l2 + ws * q * l2 * dz)
    return np.concatenate([g_u, g_v])


def _sandwich(a, c, b):
    """Row-weighted product A diag(c) B^T."""
    return (a * c) @ b.T


def jacobian(state: SolutionState, mat: MaterialParams, rule,
             tables: BasisTables | None = None) -> np.ndarray:
    """Tangent matrix H = dg/dx, assembled symmetric.

    Diagonal blocks are symmetric by construction; the coupling block is
    built once and mirrored.  The v-v curvature coefficient uses the swap
    identity dU/db(a,b) = (b/a) dU/db(b,a), so the mirrored matrix equals
    the exact coefficient Jacobian of `residual` up to quadrature error.
    """
    t = _tables(state, rule, tables)
    z, r, dz, dr, l1, l2, q = _nodal(state, t)
    d = state.load.d
    su12 = stiffness_scalar(l1, l2, mat)
    su21 = stiffness_scalar(l2, l1, mat)
    du1, du2 = stiffness_derivs(l1, l2, mat)
    du1_swap, _ = stiffness_derivs(l2, l1, mat)
    w, s = t.w, t.s
    ws = w * s

    h_uu = _sandwich(t.du, ws * (du1 * dz * dz / l1 + su12), t.du)
    h_uu += _sandwich(t.u, ws * d * l2 * dr, t.u)

    h_uv = _sandwich(t.du, ws * du1 * dz * dr / l1, t.dv)
    h_uv += _sandwich(t.du, w * (du2 * dz + s * q * l2), t.v)
    h_uv -= _sandwich(t.u, ws * d * l2 * dz, t.v)

    h_vv = _sandwich(t.dv, ws * (du1 * dr * dr / l1 + su12), t.dv)
    mid = w * du2 * dr
    h_vv += _sandwich(t.dv, mid, t.v) + _sandwich(t.v, mid, t.dv)
    h_vv += _sandwich(t.v, w * (l2 * du1_swap + su21 + q * s * dz) / s, t.v)

    m = state.spec.m
    h = np.empty((2 * m, 2 * m))
    h[:m, :m] = 0.5 * (h_uu + h_uu.T)
    h[:m, m:] = h_uv
    h[m:, :m] = h_uv.T
    h[m:, m:] = 0.5 * (h_vv + h_vv.T)
    return h


def load_derivative(state: SolutionState, mat: MaterialParams, rule,
                    tables: BasisTables | None = None) -> np.ndarray:
    """dg/dc at fixed coefficients, for load-parametrized continuation."""
    t = _tables(state, rule, tables)
    z, r, dz, dr, l1, l2, q = _nodal(state, t)
    ws = t.w * t.s
    gc_u = -(t.u @ (ws * l2 * dr))
    gc_v = t.v @ (ws * l2 * dz)
    return np.concatenate([gc_u, gc_v])


def p_gradient(state: SolutionState, mat: MaterialParams, rule,
               tables: BasisTables | None = None) -> np.ndarray:
    """Partial of the potential energy in the steepness parameters.

    Same integrand structure as the residual with the basis generators
    replaced by the parameter derivatives of the trial shape.  At a
    converged state this is also the total derivative of the energy along
    the optimized family, which is what the outer parameter search zeroes.
    """
    t = _tables(state, rule, tables)
    z, r, dz, dr, l1, l2, q = _nodal(state, t)
    su12 = stiffness_scalar(l1, l2, mat)
    su21 = stiffness_scalar(l2, l1, mat)
    dz_dp, dr_dp, dzp_dp, drp_dp = shape_p_derivs(state, t.s)
    w, s = t.w, t.s
    ws = w * s
    out = (
        dzp_dp @ (ws * su12 * dz)
        - dz_dp @ (ws * q * l2 * dr)
        + drp_dp @ (ws * su12 * dr)
        + dr_dp @ (w * (su21 * l2 + s * q * l2 * dz))
    )
    return np.asarray(out, dtype=float)
