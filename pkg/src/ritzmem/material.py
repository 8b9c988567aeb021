"""Incompressible hyperelastic membrane material.

Strain energy is the three-term Bidermann form, written per unit volume and
scaled by 2*C1 so the leading neo-Hookean coefficient is 1:

    W = (I1 - 3) + gamma1*(I2 - 3) + gamma2*(I1 - 3)**2 + gamma3*(I1 - 3)**3

All stresses returned here are membrane tensions scaled the same way,
T_i = T_i_physical / (2*C1*h0).  Incompressibility ties the thickness
stretch to the in-plane ones, lambda3 = 1/(lambda1*lambda2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MaterialParams:
    """Dimensionless Bidermann coefficients (gamma_i = C_i / C_1 ratios)."""

    gamma1: float = 0.0
    gamma2: float = 0.0
    gamma3: float = 0.0


@dataclass(frozen=True)
class StretchState:
    """Principal stretches of an incompressible membrane element."""

    lambda1: float
    lambda2: float
    lambda3: float

    @staticmethod
    def from_plane(lambda1, lambda2) -> "StretchState":
        return StretchState(lambda1, lambda2, 1.0 / (lambda1 * lambda2))

    def invariants(self):
        l1s = self.lambda1 ** 2
        l2s = self.lambda2 ** 2
        l3s = self.lambda3 ** 2
        i1 = l1s + l2s + l3s
        i2 = 1.0 / l1s + 1.0 / l2s + 1.0 / l3s
        return i1, i2


def energy(i1, i2, mat: MaterialParams):
    """Strain energy density at the given invariants."""
    e1 = i1 - 3.0
    e2 = i2 - 3.0
    return e1 + mat.gamma1 * e2 + mat.gamma2 * e1 * e1 + mat.gamma3 * e1 ** 3


def energy_derivs(i1, i2, mat: MaterialParams):
    """First and second partials of the energy in the invariants.

    Returns (W1, W2, W11, W12, W22).  For the Bidermann form W2 is the
    constant gamma1 and the cross and I2-squared terms vanish.
    """
    e1 = i1 - 3.0
    w1 = 1.0 + 2.0 * mat.gamma2 * e1 + 3.0 * mat.gamma3 * e1 * e1
    w2 = mat.gamma1 * np.ones_like(np.asarray(i1, dtype=float))
    w11 = 2.0 * mat.gamma2 + 6.0 * mat.gamma3 * e1
    zero = np.zeros_like(np.asarray(i1, dtype=float))
    return w1, w2, w11, zero, zero


def principal_stresses(lambda1, lambda2, mat: MaterialParams):
    """Membrane tensions (T1, T2) along the principal directions.

    T_i = lambda3 * (lambda_i**2 - lambda3**2) * (W1 + lambda_other**2 * W2)
    with lambda_other the in-plane stretch orthogonal to direction i.
    """
    l1s = np.asarray(lambda1, dtype=float) ** 2
    l2s = np.asarray(lambda2, dtype=float) ** 2
    l3 = 1.0 / (lambda1 * lambda2)
    l3s = l3 * l3
    i1 = l1s + l2s + l3s
    i2 = 1.0 / l1s + 1.0 / l2s + 1.0 / l3s
    w1, w2, _, _, _ = energy_derivs(i1, i2, mat)
    t1 = l3 * (l1s - l3s) * (w1 + l2s * w2)
    t2 = l3 * (l2s - l3s) * (w1 + l1s * w2)
    return t1, t2


def stiffness_scalar(la, lb, mat: MaterialParams):
    """Tension coefficient U(la, lb) = (1 - la**-4 lb**-2) (W1 + lb**2 W2).

    The argument order is significant: U(lambda1, lambda2) weighs the
    meridional terms of the equilibrium forms, U(lambda2, lambda1) the
    circumferential ones.  Related to the tension by
    T1 = (lambda1/lambda2) * U(lambda1, lambda2).
    """
    la = np.asarray(la, dtype=float)
    lb = np.asarray(lb, dtype=float)
    las = la * la
    lbs = lb * lb
    i1 = las + lbs + 1.0 / (las * lbs)
    i2 = 1.0 / las + 1.0 / lbs + las * lbs
    w1, w2, _, _, _ = energy_derivs(i1, i2, mat)
    return (1.0 - 1.0 / (las * las * lbs)) * (w1 + lbs * w2)


def stiffness_derivs(la, lb, mat: MaterialParams):
    """Analytic partials (dU/dla, dU/dlb) of the tension coefficient.

    Obeys the swap identity dU/dlb (la, lb) = (lb/la) * dU/dlb (lb, la),
    which is what makes the assembled tangent matrix symmetric.
    """
    la = np.asarray(la, dtype=float)
    lb = np.asarray(lb, dtype=float)
    las = la * la
    lbs = lb * lb
    i1 = las + lbs + 1.0 / (las * lbs)
    i2 = 1.0 / las + 1.0 / lbs + las * lbs
    w1, w2, w11, _, _ = energy_derivs(i1, i2, mat)
    a = 1.0 - 1.0 / (las * las * lbs)
    b = w1 + lbs * w2
    di1_dla = 2.0 * la - 2.0 / (las * la * lbs)
    di1_dlb = 2.0 * lb - 2.0 / (las * lbs * lb)
    da_dla = 4.0 / (las * las * la * lbs)
    da_dlb = 2.0 / (las * las * lbs * lb)
    du_dla = da_dla * b + a * w11 * di1_dla
    du_dlb = da_dlb * b + a * (w11 * di1_dlb + 2.0 * lb * w2)
    return du_dla, du_dlb
