"""Ritz trial families for the membrane meridian.

The displacement expansion is

    z(s) = sum_k x[k] * u_k(s),      r(s) = s + sum_k x[m+k] * v_k(s)

with u_k'(0) = u_k(1) = 0 and v_k(0) = v_k(1) = 0, so every trial shape
satisfies the clamped-edge and pole conditions identically.

Two families are provided.  The polynomial one,

    u_k = (s**2 - 1) * s**(2k-2),    v_k = (s**2 - 1) * s**(2k-1),

works well for smooth profiles.  When the hydrostatic gradient d is large
the solution develops an edge layer of width ~ 1/sqrt(d) that polynomials
cannot track; the steep family replaces the generators by a modified
Bessel profile

    phi(s) = I0(y(s)),   y(s) = sum_i p[i] * s**(2i+1),
    u_1 = 1 - phi(s)/phi(1),   u_2 = phi(s)/phi(1) * (s**2 - 1),
    u_k = s**2 * u_{k-1} (k >= 3),   v_k = s * u_k,

whose interior-to-edge contrast is controlled by the free parameters p.
Internally only the ratio phi(s)/phi(1) is ever formed, evaluated as
exp(|y(s)| - |y(1)|) * i0e(y(s)) / i0e(y(1)) so that arbitrarily steep
parameters never overflow (I0 alone overflows near y ~ 713).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import i0e, i1e

from .kinematics import LoadParams, ShapeEval

FAMILIES = ("polynomial", "adaptive")

# Below this the first two steep generators become numerically parallel.
P_MIN = 1e-3


def bessel_i0_i1(x):
    """Modified Bessel functions (I0(x), I1(x)) for x >= 0.

    Unscaled values; overflows for x beyond ~713.  The basis evaluation
    itself never calls this, it works with the exponentially scaled forms.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("bessel_i0_i1 requires x >= 0")
    e = np.exp(x)
    return e * i0e(x), e * i1e(x)


def _i1e_over_x(x):
    """Exponentially scaled I1(x)/x, finite at x = 0 (limit 1/2)."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    series = np.exp(-np.abs(x)) * (0.5 + x * x / 16.0 + x ** 4 / 384.0)
    return np.where(small, series, i1e(xs) / xs)


def _poly_y(s, p):
    """Steepness polynomial y(s) = sum p[i] s**(2i+1) and derivatives."""
    s = np.asarray(s, dtype=float)
    y = np.zeros_like(s)
    dy = np.zeros_like(s)
    d2y = np.zeros_like(s)
    for i, pi in enumerate(p):
        e = 2 * i + 1
        y += pi * s ** e
        dy += pi * e * s ** (e - 1)
        if e >= 2:
            d2y += pi * e * (e - 1) * s ** (e - 2)
    return y, dy, d2y


def phi(s, p):
    """Raw Bessel profile phi = I0(y(s)) with derivatives.

    Returns (phi, dphi, d2phi, dphi_dp, ddphi_dp); the last two are arrays
    with one leading axis per component of p.  Unscaled, so usable only for
    moderate y; the basis tables use the scaled ratio instead.
    """
    s = np.asarray(s, dtype=float)
    y, dy, d2y = _poly_y(s, p)
    ay = np.abs(y)
    b0 = np.exp(ay) * i0e(y)
    b1 = np.exp(ay) * i1e(y)
    # I1'(y) = I0(y) - I1(y)/y, finite at the origin
    db1 = np.exp(ay) * (i0e(y) - _i1e_over_x(y))
    val = b0
    dval = b1 * dy
    d2val = db1 * dy * dy + b1 * d2y
    dval_dp = np.empty((len(p),) + s.shape)
    ddval_dp = np.empty((len(p),) + s.shape)
    for i in range(len(p)):
        e = 2 * i + 1
        dval_dp[i] = b1 * s ** e
        ddval_dp[i] = db1 * s ** e * dy + b1 * e * s ** (e - 1)
    return val, dval, d2val, dval_dp, ddval_dp


@dataclass(frozen=True)
class BasisSpec:
    """Trial family selector: family name, size m, steepness parameters p."""

    family: str
    m: int
    p: tuple = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown basis family {self.family!r}")
        if self.m < 1:
            raise ValueError("basis size m must be >= 1")
        object.__setattr__(self, "p", tuple(float(x) for x in self.p))
        if self.family == "adaptive":
            if len(self.p) < 1:
                raise ValueError("steep family needs at least one parameter")
            if self.p[0] < P_MIN:
                raise ValueError(
                    f"p[0] = {self.p[0]!r} below {P_MIN}; generators degenerate"
                )

    @property
    def n_p(self) -> int:
        return len(self.p)

    def with_p(self, p) -> "BasisSpec":
        return BasisSpec(self.family, self.m, tuple(p))


def _rho_scaled(s, p):
    """phi(s)/phi(1) and its two s-derivatives, overflow safe.

    rho  = exp(|y| - |y1|) * i0e(y) / i0e(y1)
    rho' = exp(|y| - |y1|) * i1e(y) * y' / i0e(y1)
    rho'' uses I1'(y) = I0(y) - I1(y)/y in the same scaling.
    """
    s = np.asarray(s, dtype=float)
    y, dy, d2y = _poly_y(s, p)
    y1 = float(sum(p))
    scale = np.exp(np.abs(y) - abs(y1)) / i0e(y1)
    rho = scale * i0e(y)
    drho = scale * i1e(y) * dy
    d2rho = scale * ((i0e(y) - _i1e_over_x(y)) * dy * dy + i1e(y) * d2y)
    return rho, drho, d2rho


def _rho_p_derivs(s, p):
    """Partials of rho and rho' in each steepness parameter.

    d(rho)/dp_i = rho * (beta(s) s**(2i+1) - beta(1)) with
    beta = I1(y)/I0(y) evaluated from the scaled functions.
    """
    s = np.asarray(s, dtype=float)
    y, dy, _ = _poly_y(s, p)
    y1 = float(sum(p))
    scale = np.exp(np.abs(y) - abs(y1)) / i0e(y1)
    rho = scale * i0e(y)
    drho = scale * i1e(y) * dy
    beta = i1e(y) / i0e(y)
    beta1 = i1e(y1) / i0e(y1)
    db1 = i0e(y) - _i1e_over_x(y)
    n = len(p)
    drho_dp = np.empty((n,) + s.shape)
    ddrho_dp = np.empty((n,) + s.shape)
    for i in range(n):
        e = 2 * i + 1
        se = s ** e
        drho_dp[i] = rho * (beta * se - beta1)
        ddrho_dp[i] = scale * (db1 * se * dy + i1e(y) * e * s ** (e - 1)) - drho * beta1
    return drho_dp, ddrho_dp


def _poly_uv(spec: BasisSpec, s):
    s = np.asarray(s, dtype=float)
    m = spec.m
    u = np.empty((m,) + s.shape)
    du = np.empty_like(u)
    d2u = np.empty_like(u)
    v = np.empty_like(u)
    dv = np.empty_like(u)
    d2v = np.empty_like(u)
    for k in range(1, m + 1):
        i = k - 1
        u[i] = s ** (2 * k) - s ** (2 * k - 2)
        du[i] = 2 * k * s ** (2 * k - 1)
        d2u[i] = 2 * k * (2 * k - 1) * s ** (2 * k - 2)
        if k > 1:
            du[i] -= (2 * k - 2) * s ** (2 * k - 3)
            d2u[i] -= (2 * k - 2) * (2 * k - 3) * s ** (2 * k - 4)
        v[i] = s ** (2 * k + 1) - s ** (2 * k - 1)
        dv[i] = (2 * k + 1) * s ** (2 * k) - (2 * k - 1) * s ** (2 * k - 2)
        d2v[i] = 2 * k * (2 * k + 1) * s ** (2 * k - 1)
        if k > 1:
            d2v[i] -= (2 * k - 2) * (2 * k - 1) * s ** (2 * k - 3)
    return u, du, d2u, v, dv, d2v


def _steep_uv(spec: BasisSpec, s):
    s = np.asarray(s, dtype=float)
    m = spec.m
    rho, drho, d2rho = _rho_scaled(s, spec.p)
    u = np.empty((m,) + s.shape)
    du = np.empty_like(u)
    d2u = np.empty_like(u)
    u[0] = 1.0 - rho
    du[0] = -drho
    d2u[0] = -d2rho
    if m >= 2:
        w = s * s - 1.0
        u[1] = rho * w
        du[1] = drho * w + 2.0 * s * rho
        d2u[1] = d2rho * w + 4.0 * s * drho + 2.0 * rho
    for k in range(2, m):
        u[k] = s * s * u[k - 1]
        du[k] = 2.0 * s * u[k - 1] + s * s * du[k - 1]
        d2u[k] = 2.0 * u[k - 1] + 4.0 * s * du[k - 1] + s * s * d2u[k - 1]
    v = s * u
    dv = u + s * du
    d2v = 2.0 * du + s * d2u
    return u, du, d2u, v, dv, d2v


def eval_u(spec: BasisSpec, s):
    """Axial generators: (u, u', u'') arrays shaped (m,) + s.shape."""
    if spec.family == "polynomial":
        u, du, d2u, _, _, _ = _poly_uv(spec, s)
    else:
        u, du, d2u, _, _, _ = _steep_uv(spec, s)
    return u, du, d2u


def eval_v(spec: BasisSpec, s):
    """Radial generators: (v, v', v'') arrays shaped (m,) + s.shape."""
    if spec.family == "polynomial":
        _, _, _, v, dv, d2v = _poly_uv(spec, s)
    else:
        _, _, _, v, dv, d2v = _steep_uv(spec, s)
    return v, dv, d2v


def _steep_uv_p_derivs(spec: BasisSpec, s):
    """Partials of (u_k, u_k', v_k, v_k') in each steepness parameter."""
    s = np.asarray(s, dtype=float)
    m, n = spec.m, spec.n_p
    dP, dPp = _rho_p_derivs(s, spec.p)
    u_p = np.empty((n, m) + s.shape)
    du_p = np.empty_like(u_p)
    for i in range(n):
        u_p[i, 0] = -dP[i]
        du_p[i, 0] = -dPp[i]
        if m >= 2:
            w = s * s - 1.0
            u_p[i, 1] = dP[i] * w
            du_p[i, 1] = dPp[i] * w + 2.0 * s * dP[i]
        for k in range(2, m):
            u_p[i, k] = s * s * u_p[i, k - 1]
            du_p[i, k] = 2.0 * s * u_p[i, k - 1] + s * s * du_p[i, k - 1]
    v_p = s * u_p
    dv_p = u_p + s * du_p
    return u_p, du_p, v_p, dv_p


@dataclass
class SolutionState:
    """Ritz coefficients x (length 2m) with their basis and load."""

    x: np.ndarray
    spec: BasisSpec
    load: LoadParams

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        if self.x.shape != (2 * self.spec.m,):
            raise ValueError(
                f"coefficient vector must have length {2 * self.spec.m}"
            )

    def sag(self) -> float:
        """Pole deflection z(0)."""
        u0, _, _ = eval_u(self.spec, np.array(0.0))
        return float(self.x[: self.spec.m] @ u0)


def eval_shape(state: SolutionState, s, second: bool = False) -> ShapeEval:
    """Trial shape at points s; second derivatives on request."""
    s = np.asarray(s, dtype=float)
    m = state.spec.m
    xu = state.x[:m]
    xv = state.x[m:]
    u, du, d2u = eval_u(state.spec, s)
    v, dv, d2v = eval_v(state.spec, s)
    tensordot = lambda c, t: np.tensordot(c, t, axes=(0, 0))
    shape = ShapeEval(
        z=tensordot(xu, u),
        r=s + tensordot(xv, v),
        dz=tensordot(xu, du),
        dr=1.0 + tensordot(xv, dv),
    )
    if second:
        shape.d2z = tensordot(xu, d2u)
        shape.d2r = tensordot(xv, d2v)
    return shape


def shape_p_derivs(state: SolutionState, s):
    """Partials of the trial shape in the steepness parameters.

    Returns (dz_dp, dr_dp, dzp_dp, drp_dp), each shaped (n_p,) + s.shape,
    where dzp_dp is the parameter derivative of dz/ds.
    """
    if state.spec.family != "adaptive":
        raise ValueError("shape parameter derivatives exist only for the steep family")
    m = state.spec.m
    u_p, du_p, v_p, dv_p = _steep_uv_p_derivs(state.spec, np.asarray(s, dtype=float))
    xu = state.x[:m]
    xv = state.x[m:]
    dz_dp = np.tensordot(xu, u_p, axes=(0, 1))
    dzp_dp = np.tensordot(xu, du_p, axes=(0, 1))
    dr_dp = np.tensordot(xv, v_p, axes=(0, 1))
    drp_dp = np.tensordot(xv, dv_p, axes=(0, 1))
    return dz_dp, dr_dp, dzp_dp, drp_dp


@dataclass
class BasisTables:
    """Generator values cached at the quadrature nodes.

    Assembly is a handful of weighted outer products against these tables,
    so they are built once per (spec, rule) pair and reused across Newton
    iterations.
    """

    s: np.ndarray
    w: np.ndarray
    u: np.ndarray
    du: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    u0: np.ndarray = field(default=None, repr=False)

    @classmethod
    def build(cls, spec: BasisSpec, rule) -> "BasisTables":
        s = rule.nodes
        u, du, _ = eval_u(spec, s)
        v, dv, _ = eval_v(spec, s)
        u_at_0, _, _ = eval_u(spec, np.array(0.0))
        return cls(s=s, w=rule.weights, u=u, du=du, v=v, dv=dv, u0=u_at_0)
