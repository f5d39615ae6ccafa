"""Quadrature rules for integrals of the form  int_0^inf g(u) u^(p-1) du,
0 < p < 1, with g smooth, finite at 0, and decaying like 1/u at infinity.

The half-line is split at u = 1 and each half is mapped to [0, 1] with a
power substitution that absorbs the endpoint singularity of the measure
(u = v^(1/p) on the lower half; u = y^(-1/(1-p)) on the upper half, where the
decay of g supplies the integrable exponent 1 - p).  Plain Gauss-Legendre is
then accurate on both halves.  A single rational map u = s/(1-s) was tried
first and converges too slowly near the endpoints for the tolerances used
here, which is why the rule below carries the extra substitutions.
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy.integrate import quad as _scipy_quad


@dataclasses.dataclass(frozen=True)
class QuadratureConfig:
    """Node budget per integration axis and target relative error."""

    nodes_per_axis: int = 64
    tolerance: float = 1e-5

    def __post_init__(self):
        if self.nodes_per_axis < 8:
            raise ValueError("nodes_per_axis must be >= 8")


def gauss_legendre_01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights shifted to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def halfline_power_rule(p: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes u_i and weights w_i with  sum_i w_i g(u_i) ~ int_0^inf g(u) u^(p-1) du.

    Valid for 0 < p < 1 and g as described in the module docstring; the decay
    assumption enters only through the upper-half weights (they carry a factor
    u_i, so g must fall off like 1/u for the sum to converge as nodes grow).
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"exponent must lie in (0, 1), got {p}")
    half = max(nodes // 2, 4)
    v, gw = gauss_legendre_01(half)

    # Lower half: u = v^(1/p), u^(p-1) du = dv / p.
    u_lo = v ** (1.0 / p)
    w_lo = gw / p

    # Upper half: u = x^(-1), then x = y^(1/(1-p)); weight carries u once.
    q = 1.0 - p
    x = v ** (1.0 / q)
    u_hi = 1.0 / x
    w_hi = gw * u_hi / q

    return np.concatenate([u_lo, u_hi]), np.concatenate([w_lo, w_hi])


def unit_power_rule(p: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for  int_0^1 phi(t) t^(p-1) dt  with phi smooth.

    The substitution t = v^(1/p) absorbs the endpoint singularity.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"exponent must lie in (0, 1], got {p}")
    v, gw = gauss_legendre_01(nodes)
    return v ** (1.0 / p), gw / p


def orthant_rule(ps: list[float], nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Joint rule for  int_(0,inf)^d g(u) prod_j u_j^(p_j - 1) du_j  with g
    smooth and decaying like 1/(u_1 + ... + u_d); d in {1, 2}.

    Points come back as an (m, d) array with matching weights.  The 2-d case
    splits the orthant along its diagonal and rescales the smaller variable
    (u_minor = t * u_major), because the joint decay puts an integrable but
    quadrature-hostile ridge along u_1 ~ u_2 that a per-axis product rule
    resolves only at first order.
    """
    d = len(ps)
    if d == 1:
        u, w = halfline_power_rule(ps[0], nodes)
        return u[:, None], w
    if d != 2:
        raise ValueError(f"orthant_rule supports 1 or 2 axes, got {d}")
    p1, p2 = ps
    points, weights = [], []
    for major, minor in ((0, 1), (1, 0)):
        p_major, p_minor = (p1, p2) if major == 0 else (p2, p1)
        u, wu = halfline_power_rule(p_major + p_minor, nodes)
        t, wt = unit_power_rule(p_minor, nodes)
        uu, tt = np.meshgrid(u, t, indexing="ij")
        ww = np.outer(wu, wt)
        pts = np.empty((uu.size, 2))
        pts[:, major] = uu.ravel()
        pts[:, minor] = (uu * tt).ravel()
        points.append(pts)
        weights.append(ww.ravel())
    return np.concatenate(points), np.concatenate(weights)


def gamma_quadrature(p: float) -> float:
    """Independent 1-d quadrature of int_0^inf e^(-v) v^(p-1) dv (adaptive)."""
    if p <= 0.0:
        raise ValueError(f"integral diverges for exponent {p}")
    value, _ = _scipy_quad(
        lambda v: np.exp(-v) * v ** (p - 1.0), 0.0, np.inf, limit=200
    )
    return float(value)
