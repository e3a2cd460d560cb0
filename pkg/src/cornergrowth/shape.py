"""Limit-shape function of the corner growth models.

For both weight kinds the shape is a one-dimensional variational problem in
a tilt parameter z:

* exponential: g(s,t) = inf_z { s E[1/(a+z)] + t E[1/(b-z)] },
  z in [-lo(alpha), lo(beta)];
* geometric:   g(s,t) = inf_z { s E[a/(z-a)] + t E[bz/(1-bz)] },
  z in [hi(alpha), 1/hi(beta)].

The objective is strictly convex in the interior, so there are two critical
direction ratios c1 < c2: the minimizer sits at the left/right endpoint (and
g is linear in (s,t)) outside [c1, c2], and is the unique interior
stationary point inside, where g is strictly concave.  The same variational
problem evaluated on empirical parameter prefixes drives the fluctuation
pipeline, where the minimizer is the saddle point of the kernel action.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import model
from .model import ParamLaw, transform_A, transform_A2, transform_A3, transform_Ga, transform_Gb

__all__ = [
    "Regime",
    "ShapeEval",
    "EmpiricalShape",
    "shape_exponential",
    "shape_exponential_closed_uniform",
    "shape_geometric",
    "shape_geometric_closed_reciprocal",
    "empirical_shape",
    "scaling_index",
    "level_curve_radius",
]


class Regime(Enum):
    LINEAR_LOW = "LinearLow"
    STRICTLY_CONCAVE = "StrictlyConcave"
    LINEAR_HIGH = "LinearHigh"
    DEGENERATE = "Degenerate"


@dataclass
class ShapeEval:
    g: float
    zeta: float | None
    c1: float
    c2: float
    sigma: float | None
    regime: Regime


@dataclass
class EmpiricalShape:
    """gamma, zeta, sigma of the variational problem on parameter prefixes."""

    gamma_mn: float
    zeta_mn: float
    sigma_mn: float
    m: int
    n: int


def _solve_stationary(fprime, lo, hi, bisect_tol=1e-12, newton_steps=3, fsecond=None):
    """Unique zero of an increasing fprime on (lo, hi): bisection + polish."""
    a, c = lo, hi
    fa = fprime(a)
    fc = fprime(c)
    if not (fa < 0 < fc):
        raise RuntimeError("stationary point not bracketed")
    target = bisect_tol * (hi - lo)
    while c - a > target:
        mid = 0.5 * (a + c)
        if fprime(mid) < 0:
            a = mid
        else:
            c = mid
    z = 0.5 * (a + c)
    if fsecond is not None:
        for _ in range(newton_steps):
            d2 = fsecond(z)
            if d2 <= 0:
                break
            step = fprime(z) / d2
            znew = z - step
            if not (lo < znew < hi):
                break
            z = znew
    return z


# ---------------------------------------------------------------------------
# exponential model


def shape_exponential(alpha: ParamLaw, beta: ParamLaw, s: float, t: float) -> ShapeEval:
    if s < 0 or t < 0 or s + t == 0:
        raise ValueError("need s, t >= 0 with (s, t) != (0, 0)")
    lo_a, lo_b = alpha.lo, beta.lo
    if lo_a + lo_b == 0.0:
        g = s * transform_A(alpha, 0.0) + t * transform_A(beta, 0.0)
        return ShapeEval(g, None, 0.0, math.inf, None, Regime.DEGENERATE)

    def A(z):
        return transform_A(alpha, z)

    def B(z):
        return transform_A(beta, -z)

    c1 = _ratio(transform_A2(beta, lo_a), transform_A2(alpha, -lo_a))
    c2 = _ratio(transform_A2(beta, -lo_b), transform_A2(alpha, lo_b))

    # boundary directions via the stated limits
    if t == 0.0:
        return ShapeEval(s * A(lo_b), lo_b, c1, c2, None, Regime.LINEAR_HIGH)
    if s == 0.0:
        return ShapeEval(t * B(-lo_a), -lo_a, c1, c2, None, Regime.LINEAR_LOW)

    ratio = s / t
    if ratio <= c1:
        g = s * A(-lo_a) + t * B(-lo_a)
        return ShapeEval(g, -lo_a, c1, c2, None, Regime.LINEAR_LOW)
    if ratio >= c2:
        g = s * A(lo_b) + t * B(lo_b)
        return ShapeEval(g, lo_b, c1, c2, None, Regime.LINEAR_HIGH)

    def fprime(z):
        return -s * transform_A2(alpha, z) + t * transform_A2(beta, -z)

    def fsecond(z):
        return 2.0 * (s * transform_A3(alpha, z) + t * transform_A3(beta, -z))

    zeta = _solve_stationary(fprime, -lo_a, lo_b, fsecond=fsecond)
    g = s * A(zeta) + t * B(zeta)
    sigma = (0.5 * fsecond(zeta) / t) ** (1.0 / 3.0)
    return ShapeEval(g, zeta, c1, c2, sigma, Regime.STRICTLY_CONCAVE)


def _ratio(num, den):
    if math.isinf(den):
        return 0.0
    if math.isinf(num):
        return math.inf
    return num / den


def shape_exponential_closed_uniform(lam, l, m, s, t):
    """Explicit shape value for uniform laws on [lam/2, lam/2+l] and
    [lam/2, lam/2+m]; l and/or m may be zero (point masses)."""
    if lam <= 0 or l < 0 or m < 0 or s <= 0 or t <= 0:
        raise ValueError("need lam > 0, l, m >= 0 and s, t > 0")
    if l == 0.0 and m == 0.0:
        return (math.sqrt(s) + math.sqrt(t)) ** 2 / lam
    if l == 0.0:
        root = math.sqrt((m * s) ** 2 + 4 * s * t * lam * (lam + m))
        return (2 * s * lam + m * s + root) / (2 * lam * (lam + m)) + (t / m) * math.log(
            1 + m / lam + (m / lam) * (m * s + root) / (2 * t * lam)
        )
    if m == 0.0:
        return shape_exponential_closed_uniform(lam, 0.0, l, t, s)
    root = math.sqrt((l * t - m * s) ** 2 + 4 * s * t * (lam + l) * (lam + m))
    term1 = (s / l) * math.log(
        1 + l / lam + (l / lam) * (l * t - m * s + root) / (2 * s * (lam + m))
    )
    term2 = (t / m) * math.log(
        1 + m / lam + (m / lam) * (m * s - l * t + root) / (2 * t * (lam + l))
    )
    return term1 + term2


# ---------------------------------------------------------------------------
# geometric model


def shape_geometric(alpha: ParamLaw, beta: ParamLaw, s: float, t: float) -> ShapeEval:
    if s < 0 or t < 0 or s + t == 0:
        raise ValueError("need s, t >= 0 with (s, t) != (0, 0)")
    hi_a, hi_b = alpha.hi, beta.hi
    if hi_a * hi_b >= 1.0:
        if hi_a == 1.0 and hi_b == 1.0:
            g = s * alpha.expect(lambda x: x / (1 - x)) + t * beta.expect(lambda x: x / (1 - x))
            return ShapeEval(g, None, 0.0, math.inf, None, Regime.DEGENERATE)
        raise ValueError("geometric shape needs hi(alpha)*hi(beta) <= 1")
    zlo, zhi = hi_a, 1.0 / hi_b

    c1 = _ratio(transform_Gb(beta, zlo, 1), -transform_Ga(alpha, zlo, 1))
    c2 = _ratio(transform_Gb(beta, zhi, 1), -transform_Ga(alpha, zhi, 1))

    if t == 0.0:
        return ShapeEval(s * transform_Ga(alpha, zhi), zhi, c1, c2, None, Regime.LINEAR_HIGH)
    if s == 0.0:
        return ShapeEval(t * transform_Gb(beta, zlo), zlo, c1, c2, None, Regime.LINEAR_LOW)

    ratio = s / t
    if ratio <= c1:
        g = s * transform_Ga(alpha, zlo) + t * transform_Gb(beta, zlo)
        return ShapeEval(g, zlo, c1, c2, None, Regime.LINEAR_LOW)
    if ratio >= c2:
        g = s * transform_Ga(alpha, zhi) + t * transform_Gb(beta, zhi)
        return ShapeEval(g, zhi, c1, c2, None, Regime.LINEAR_HIGH)

    def fprime(z):
        return s * transform_Ga(alpha, z, 1) + t * transform_Gb(beta, z, 1)

    def fsecond(z):
        return s * transform_Ga(alpha, z, 2) + t * transform_Gb(beta, z, 2)

    zeta = _solve_stationary(fprime, zlo, zhi, fsecond=fsecond)
    g = s * transform_Ga(alpha, zeta) + t * transform_Gb(beta, zeta)
    sigma = (0.5 * zeta**2 * fsecond(zeta) / t) ** (1.0 / 3.0)
    return ShapeEval(g, zeta, c1, c2, sigma, Regime.STRICTLY_CONCAVE)


def shape_geometric_closed_reciprocal(q, l, m, s, t):
    """Explicit shape value when both laws have density proportional to 1/x,
    supported on [sqrt(q)-l, sqrt(q)] and [sqrt(q)-m, sqrt(q)]."""
    rq = math.sqrt(q)
    if not (0 < l < rq and 0 < m < rq and rq < 1):
        raise ValueError("need 0 < l, m < sqrt(q) < 1")
    L = math.log(rq / (rq - l))
    Mc = math.log(rq / (rq - m))
    x = s * l * Mc
    y = t * m * L
    delta = (l * y - m * x) ** 2 + 4 * x * y * (1 + m * rq - q) * (1 + l * rq - q)
    root = math.sqrt(delta)
    term1 = (s / L) * math.log(
        1 + l * rq / (1 - q) + (l / (1 - q)) * (l * y - m * x + root) / (2 * x * (1 + m * rq - q))
    )
    term2 = (t / Mc) * math.log(
        1 + m * rq / (1 - q) + (m / (1 - q)) * (m * x - l * y + root) / (2 * y * (1 + l * rq - q))
    )
    return term1 + term2


# ---------------------------------------------------------------------------
# empirical (prefix) version used by the exact-distribution pipeline


def empirical_g(a, b, z):
    """(1/n) sum a_i/(z-a_i) + (1/n) sum b_j z/(1-b_j z); complex z allowed."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = len(b)
    val = np.sum(a / (z - a)) / n + np.sum(b * z / (1.0 - b * z)) / n
    return complex(val) if np.iscomplexobj(np.asarray(z)) else float(np.real(val))


def empirical_shape(a, b) -> EmpiricalShape:
    """Variational quantities computed from sampled prefixes (geometric).

    The stationary point always lies strictly inside
    (max a_i, min 1/b_j) because the prefix laws put mass at their own
    extremes.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.max(a) * np.max(b) >= 1.0:
        raise ValueError("need a_i b_j < 1")
    m, n = len(a), len(b)
    zlo, zhi = float(np.max(a)), float(1.0 / np.max(b))

    def fprime(z):
        return float((-np.sum(a / (z - a) ** 2) + np.sum(b / (1.0 - b * z) ** 2)) / n)

    def fsecond(z):
        return float(2.0 * (np.sum(a / (z - a) ** 3) + np.sum(b**2 / (1.0 - b * z) ** 3)) / n)

    pad = 1e-13 * (zhi - zlo)
    zeta = _solve_stationary(lambda z: fprime(z), zlo + pad, zhi - pad, fsecond=fsecond)
    gamma = empirical_g(a, b, zeta)
    sigma = zeta ** (2.0 / 3.0) * (
        (np.sum(a / (zeta - a) ** 3) + np.sum(b**2 / (1.0 - b * zeta) ** 3)) / n
    ) ** (1.0 / 3.0)
    return EmpiricalShape(gamma, zeta, float(sigma), m, n)


def scaling_index(es: EmpiricalShape, s: float) -> int:
    """floor(n gamma + n^{1/3} sigma s): lattice height of the scaled level s."""
    n = es.n
    return math.floor(n * es.gamma_mn + n ** (1.0 / 3.0) * es.sigma_mn * s)


def level_curve_radius(kind, alpha, beta, thetas):
    """Radius r(theta) of the level set {g = 1} along rays; uses homogeneity."""
    shape_fn = shape_exponential if kind == model.EXPONENTIAL else shape_geometric
    out = []
    for th in np.atleast_1d(thetas):
        s, t = math.cos(th), math.sin(th)
        g = shape_fn(alpha, beta, max(s, 0.0), max(t, 0.0)).g
        out.append(1.0 / g if g > 0 else math.inf)
    return np.asarray(out)
