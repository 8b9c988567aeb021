"""Gauss-Legendre rules on the open interval (0, 1).

Endpoints are never sampled: the integrands carry r/s and 1/s factors that
are only defined as limits at the pole.  For strongly edge-localized
integrands (steep basis parameter p1) a two-panel composite concentrates
nodes in the boundary layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

MIN_NODES = 2
MAX_NODES = 512

# Composite threshold: below this p1 a single panel resolves the layer.
SPLIT_P1 = 60.0


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if np.any(self.nodes <= 0.0) or np.any(self.nodes >= 1.0):
            raise ValueError("quadrature nodes must lie strictly inside (0, 1)")

    @property
    def n(self) -> int:
        return self.nodes.size


def gauss_rule(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule mapped to (0, 1)."""
    if not MIN_NODES <= n <= MAX_NODES:
        raise ValueError(f"node count must be in [{MIN_NODES}, {MAX_NODES}], got {n}")
    x, w = roots_legendre(n)
    return QuadratureRule(nodes=0.5 * (x + 1.0), weights=0.5 * w)


def two_panel_rule(n: int, split: float) -> QuadratureRule:
    """Composite rule with n Gauss points on (0, split) and on (split, 1)."""
    if not 0.0 < split < 1.0:
        raise ValueError("split must lie strictly inside (0, 1)")
    x, w = roots_legendre(n)
    left_nodes = 0.5 * split * (x + 1.0)
    right_nodes = split + 0.5 * (1.0 - split) * (x + 1.0)
    nodes = np.concatenate([left_nodes, right_nodes])
    weights = np.concatenate([0.5 * split * w, 0.5 * (1.0 - split) * w])
    return QuadratureRule(nodes=nodes, weights=weights)


def auto_rule(family: str, p1: float | None = None, n: int | None = None) -> QuadratureRule:
    """Default rule for a basis family.

    Polynomial runs use 64 points.  The steep-basis family gets 192, and
    above p1 ~ 60 a composite split at 1 - 6/p1 so the layer panel holds
    the fast variation.
    """
    if family == "polynomial":
        return gauss_rule(n or 64)
    base = n or 192
    if p1 is not None and p1 > SPLIT_P1:
        return two_panel_rule(base, 1.0 - 6.0 / p1)
    return gauss_rule(base)


def integrate(f, rule: QuadratureRule) -> float:
    """Apply the rule to a callable f(s).

    f may be vectorized over the node array; scalar-only callables are
    looped.  Non-finite values abort with the offending node named.
    """
    try:
        vals = np.asarray(f(rule.nodes), dtype=float)
        if vals.shape != rule.nodes.shape:
            raise TypeError
    except TypeError:
        vals = np.array([float(f(s)) for s in rule.nodes])
    if not np.all(np.isfinite(vals)):
        bad = rule.nodes[~np.isfinite(vals)][0]
        raise FloatingPointError(f"integrand not finite at s = {bad!r}")
    return float(np.dot(rule.weights, vals))
