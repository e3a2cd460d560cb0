"""Exact one-point distribution of the geometric last-passage time.

For parameter prefixes (a_i)_{i<=m}, (b_j)_{j<=n} with all a_i b_j < 1 the
law of G(m, n) is determinantal.  The building blocks are

    F_{m,n,x}(z) = prod_j (1 - z b_j) / prod_i (z - a_i) * z^{m+x},
    I_{m,n,x}    = (1/2 pi i) oint_{|z|=rho} F_{m,n,x}(z) dz,
    K(x, y)      = sum_{l>=0} I_{m,n,x+l} I_{n,m,y+l}            (series)
                 = double contour integral of F F~ / (1 - z w)   (equivalent)

and P(G(m,n) <= k) = 1 + sum_{l>=1} ((-1)^l / l!) sum_{x_i >= k} det K.
The alternating sum is evaluated as the finite determinant det(I - K) on a
truncated index window: determinants of order > min(m, n) vanish (the kernel
has rank <= min(m, n)), so the window determinant equals the series exactly
up to the certified window tail.

In the square injective case the kernel collapses to a finite parameter sum
and the CDF to an n x n determinant built from the explicit inverse of the
Cauchy-type matrix C(i,j) = 1/(1 - a_i b_j); repeated parameters route to
the contour evaluation, which is continuous in the parameters.

All contour quadrature is trapezoidal on uniform nodes (geometrically
convergent for periodic analytic integrands) and runs in log space so that
the z^{m+x} factor can span thousands of orders of magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iter_product

import numpy as np

from .shape import EmpiricalShape, empirical_shape

__all__ = [
    "KernelContext",
    "KernelMatrix",
    "integrand_F",
    "contour_I",
    "kernel_series",
    "kernel_double_contour",
    "kernel_finite_sum",
    "kernel_matrix",
    "cdf_fredholm_series",
    "cdf_det_form",
    "cdf_enumeration",
    "cdf_monte_carlo",
    "schur_polynomial",
    "ssyt_enumerate",
    "schur_measure",
    "schur_normalization",
    "cauchy_binet_check",
    "cramer_inverse",
]

_MIN_PARAM_GAP = 1e-8


def _default_rho(a, b):
    mx = max(np.max(a), np.max(b))
    return min(0.5 * (mx + 1.0), math.sqrt(0.97))


@dataclass
class KernelContext:
    """Everything needed to evaluate the contour kernel for fixed prefixes."""

    a: np.ndarray
    b: np.ndarray
    rho: float = 0.0
    quad_nodes: int = 512
    tail_eps: float = 1e-12
    shape: EmpiricalShape = field(init=False)

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        if np.any(self.a < 0) or np.any(self.b < 0):
            raise ValueError("parameters must be nonnegative")
        if np.max(self.a) * np.max(self.b) >= 1.0:
            raise ValueError("need a_i b_j < 1")
        if not self.rho:
            self.rho = _default_rho(self.a, self.b)
        if not (max(np.max(self.a), np.max(self.b)) < self.rho < 1.0):
            raise ValueError("rho must separate the poles a_i from the 1/b_j")
        # prefixes used by the kernel keep zero padding out of the shape solve
        apos, bpos = self.a[self.a > 0], self.b[self.b > 0]
        if len(apos) and len(bpos):
            self.shape = empirical_shape(apos, bpos)
        else:
            # one-sided contexts have no interior saddle; skip balancing
            self.shape = EmpiricalShape(math.nan, 1.0, math.nan, self.m, self.n)

    @property
    def m(self):
        return len(self.a)

    @property
    def n(self):
        return len(self.b)

    def swapped(self):
        return KernelContext(self.b, self.a, self.rho, self.quad_nodes, self.tail_eps)


def integrand_F(ctx: KernelContext, x: int, z: complex) -> complex:
    """F_{m,n,x}(z) evaluated as exp of a complex log sum."""
    z = complex(z)
    if np.min(np.abs(z - ctx.a)) < 1e-14:
        raise ValueError("z too close to a pole a_i")
    val = (
        np.sum(np.log(1.0 - z * ctx.b))
        - np.sum(np.log(z - ctx.a))
        + (ctx.m + x) * np.log(z)
    )
    return complex(np.exp(val))


# -- scaled trapezoid machinery --------------------------------------------


def _node_logs(a, b, rho, nodes):
    """Complex log of F(z_j) z_j without the z^x factor, on the rho-circle.

    Includes the z^{m} factor and the extra z from dz = i z dtheta.
    """
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    z = rho * np.exp(1j * theta)
    L = (
        np.log(1.0 - np.outer(z, b)).sum(axis=1)
        - np.log(z[:, None] - a[None, :]).sum(axis=1)
        + (len(a) + 1) * np.log(z)
    )
    return z, L


def _scaled_I_range(a, b, rho, nodes, xs, log_balance):
    """I_x * exp(-x*log_balance - scale) for x in xs.

    ``log_balance`` = log(zeta) balances the growth in x so that products of
    opposite orientations stay O(1); ``scale`` is one shared exponent.
    Returns (vals, scale, mag) where mag bounds the quadrature magnitude
    (mean |integrand|) per x, the natural yardstick for convergence and
    imaginary-residue checks.
    """
    z, L = _node_logs(a, b, rho, nodes)
    logz = np.log(z)
    xs = np.asarray(xs)
    expo = L[None, :] + np.outer(xs, logz - log_balance)
    scale = float(np.max(expo.real))
    terms = np.exp(expo - scale)
    vals = terms.sum(axis=1) / nodes
    mag = np.abs(terms).sum(axis=1) / nodes
    return vals, scale, mag


def _log_envelope(a, b, rho, nodes):
    """log of the x-free bound: |I_x| <= exp(envelope) * rho^x."""
    _, L = _node_logs(a, b, rho, nodes)
    return float(np.max(L.real)) - 0.0  # max modulus on the contour, dz folded in


def contour_I(ctx: KernelContext, x: int, _nodes: int | None = None) -> float:
    """Trapezoidal contour integral of F over |z| = rho.

    Node count is doubled until two successive evaluations agree to 1e-12
    relative; the imaginary residue must vanish at the same tolerance.
    """
    if x < 0:
        raise ValueError("x must be a nonnegative integer")
    nodes = _nodes or ctx.quad_nodes
    prev = None
    for _ in range(8):
        vals, scale, mags = _scaled_I_range(ctx.a, ctx.b, ctx.rho, nodes, [x], 0.0)
        cur, mag = vals[0], max(mags[0], 1e-300)
        if abs(cur.imag) > 1e-12 * mag:
            raise RuntimeError("quadrature not converged")
        if prev is not None and abs(cur - prev) <= 1e-12 * mag:
            return float(cur.real * np.exp(scale))
        prev = cur
        nodes *= 2
    raise RuntimeError("quadrature not converged")


def _resolve_nodes(ctx, x_probe):
    """Smallest node count (doubling from the context default) stable at x_probe."""
    nodes = ctx.quad_nodes
    prev = None
    for _ in range(9):
        vals, _, mags = _scaled_I_range(
            ctx.a, ctx.b, ctx.rho, nodes, [x_probe], math.log(ctx.shape.zeta_mn)
        )
        cur, mag = vals[0], max(mags[0], 1e-300)
        if prev is not None and abs(cur - prev) <= 1e-12 * mag and abs(cur.imag) <= 1e-12 * mag:
            return nodes // 2
        prev = cur
        nodes *= 2
    raise RuntimeError("quadrature not converged")


def kernel_series(ctx: KernelContext, x: int, y: int) -> float:
    """K(x, y) by summing I-products with a certified geometric tail."""
    K, _ = _kernel_window(ctx, np.array([x]), np.array([y]))
    zeta = ctx.shape.zeta_mn
    return float(K[0, 0] * zeta ** (x - y))


def kernel_double_contour(ctx: KernelContext, x: int, y: int) -> float:
    """K(x, y) by tensor-product quadrature of F F~/(1-zw); needs rho^2 < 1."""
    rho = ctx.rho
    if rho * rho >= 1.0:
        raise ValueError("need rho^2 < 1 for the 1/(1-zw) factor")
    nodes = ctx.quad_nodes
    z, La = _node_logs(ctx.a, ctx.b, rho, nodes)
    w, Lb = _node_logs(ctx.b, ctx.a, rho, nodes)
    ea = La + x * np.log(z)
    eb = Lb + y * np.log(w)
    sa, sb = float(np.max(ea.real)), float(np.max(eb.real))
    M = np.outer(np.exp(ea - sa), np.exp(eb - sb)) / (1.0 - np.outer(z, w))
    val = M.sum() / nodes**2
    mag = np.abs(M).sum() / nodes**2
    if abs(val.imag) > 1e-10 * max(mag, 1e-300):
        raise RuntimeError("quadrature not converged")
    return float(val.real * math.exp(sa + sb))


def kernel_finite_sum(a, b, x: int, y: int) -> float:
    """Finite parameter-sum kernel; requires injective a's and b's.

    K(x,y) = sum_{i,j} a_i^x b_j^y / (1-a_i b_j)
             * prod_k (1-a_i b_k)(1-a_k b_j)
             / [prod_{k != i} (a_k-a_i) prod_{k != j} (b_k-b_j)].
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = len(a)
    if len(b) != n:
        raise ValueError("finite-sum kernel needs equal-length parameter lists")
    if np.any(a < 0) or np.any(b < 0) or np.max(a) * np.max(b) >= 1.0:
        raise ValueError("need nonnegative parameters with a_i b_j < 1")
    if _min_gap(a) < _MIN_PARAM_GAP or _min_gap(b) < _MIN_PARAM_GAP:
        raise ValueError("use contour form: parameters repeat or nearly repeat")
    one_ab = 1.0 - np.outer(a, b)
    pref_a = np.empty(n)
    pref_b = np.empty(n)
    for i in range(n):
        others = np.delete(a, i)
        pref_a[i] = np.prod(one_ab[i, :]) / np.prod(others - a[i])
        othb = np.delete(b, i)
        pref_b[i] = np.prod(one_ab[:, i]) / np.prod(othb - b[i])
    core = (a[:, None] ** x) * (b[None, :] ** y) / one_ab
    return float(np.sum(core * np.outer(pref_a, pref_b)))


def _min_gap(v):
    if len(v) < 2:
        return math.inf
    s = np.sort(v)
    return float(np.min(np.diff(s)))


@dataclass
class KernelMatrix:
    xs: np.ndarray
    K: np.ndarray
    route: str


def kernel_matrix(ctx: KernelContext, xs, route="series") -> KernelMatrix:
    xs = np.asarray(xs, dtype=int)
    if route == "series":
        zeta = ctx.shape.zeta_mn
        Kb, _ = _kernel_window(ctx, xs, xs)
        K = Kb * zeta ** (xs[:, None] - xs[None, :])
    elif route == "double":
        K = np.array([[kernel_double_contour(ctx, x, y) for y in xs] for x in xs])
    elif route == "finite":
        K = np.array([[kernel_finite_sum(ctx.a, ctx.b, x, y) for y in xs] for x in xs])
    else:
        raise ValueError(f"unknown route {route!r}")
    return KernelMatrix(xs, K, route)


def _kernel_window(ctx: KernelContext, xs, ys):
    """Balanced kernel zeta^{y-x} K(x, y) on an index window, plus tail info.

    Returns (K, l_tail_bound).  The balancing by powers of the saddle
    location keeps entries O(1); determinants are unchanged on square
    windows with xs == ys.
    """
    zeta = ctx.shape.zeta_mn
    log_zeta = math.log(zeta)
    log_rho = math.log(ctx.rho)
    nodes = _resolve_nodes(ctx, int(xs[0]))
    env_ab = _log_envelope(ctx.a, ctx.b, ctx.rho, nodes)
    env_ba = _log_envelope(ctx.b, ctx.a, ctx.rho, nodes)

    x0, y0 = int(np.min(xs)), int(np.min(ys))
    # series length: envelope * rho^{x+y+2l} / (1 - rho^2) < tail_eps
    log_fail = env_ab + env_ba + (x0 + y0) * log_rho - math.log1p(-ctx.rho**2)
    need = log_fail - math.log(ctx.tail_eps)
    ltail = max(8, int(math.ceil(need / (-2.0 * log_rho))) + 1) if need > 0 else 8

    ax = np.arange(int(np.min(xs)), int(np.max(xs)) + ltail + 1)
    ay = np.arange(int(np.min(ys)), int(np.max(ys)) + ltail + 1)
    iv, is_, imag_a = _scaled_I_range(ctx.a, ctx.b, ctx.rho, nodes, ax, log_zeta)
    jv, js_, _ = _scaled_I_range(ctx.b, ctx.a, ctx.rho, nodes, ay, -log_zeta)
    if np.max(np.abs(iv.imag)) > 1e-10 * max(np.max(imag_a), 1e-300):
        raise RuntimeError("quadrature not converged")
    ii = iv.real
    jj = jv.real
    # K~(x, y) = sum_l ii[x+l] jj[y+l] * exp(is_ + js_)
    xi = np.asarray(xs) - ax[0]
    yi = np.asarray(ys) - ay[0]
    A = np.stack([ii[i : i + ltail + 1] for i in xi])
    B = np.stack([jj[j : j + ltail + 1] for j in yi])
    combined = is_ + js_
    K = (A @ B.T) * math.exp(combined)
    tail_bound = math.exp(
        env_ab + env_ba + (x0 + y0) * log_rho + 2 * (ltail + 1) * log_rho
        - math.log1p(-ctx.rho**2)
    )
    return K, tail_bound


# ---------------------------------------------------------------------------
# cumulative distribution of G


def cdf_fredholm_series(ctx: KernelContext, k: int, return_error: bool = False):
    """P(G(m, n) <= k) via the alternating kernel-determinant series.

    Evaluated as det(I - K) on the window [k, X_max]: determinants of order
    above min(m, n) vanish, so this equals the series with every inner sum
    truncated at X_max, where the rho-decay envelope certifies the tail.
    """
    if k < 0:
        raise ValueError("k must be a nonnegative integer")
    nodes = _resolve_nodes(ctx, k)
    env = _log_envelope(ctx.a, ctx.b, ctx.rho, nodes) + _log_envelope(ctx.b, ctx.a, ctx.rho, nodes)
    log_rho = math.log(ctx.rho)
    # diagonal envelope: |K~(x, x)| <= exp(env + 2 x log rho) / (1 - rho^2)
    log_tail_target = math.log(ctx.tail_eps) + math.log1p(-ctx.rho**2)
    x_max = int(math.ceil((log_tail_target - env) / (2.0 * log_rho)))
    est_error = math.exp(env + 2 * max(x_max, k) * log_rho - math.log1p(-ctx.rho**2)) / (
        1.0 - ctx.rho**2
    )
    if x_max <= k:
        p = 1.0
    else:
        xs = np.arange(k, x_max + 1)
        K, tail = _kernel_window(ctx, xs, xs)
        p = float(np.linalg.det(np.eye(len(xs)) - K))
        est_error += tail * len(xs)
    if not (-1e-8 <= p <= 1.0 + 1e-8):
        raise RuntimeError("truncation insufficient")
    p = min(max(p, 0.0), 1.0)
    return (p, est_error) if return_error else p


def cramer_inverse(a, b):
    """Explicit inverse of C(i,j) = 1/(1 - a_i b_j) for injective lists."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = len(a)
    Cinv = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            num = np.prod(1.0 - a[j] * b) * np.prod(1.0 - a * b[i])
            den = (1.0 - a[j] * b[i]) * np.prod(np.delete(b, i) - b[i]) * np.prod(
                np.delete(a, j) - a[j]
            )
            Cinv[i, j] = num / den
    return Cinv


def cdf_det_form(a, b, k: int, warn=None) -> float:
    """P(G(n, n) <= k) as an n x n determinant (square injective case).

    det[ delta_ij - sum_p Cinv(i, p) (a_p b_j)^{k+n} / (1 - a_p b_j) ].
    Rectangular inputs are zero-padded to square; repeated or nearly
    repeated parameters route to the contour evaluation, which is continuous
    in the parameters.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a < 0) or np.any(b < 0) or np.max(a) * np.max(b) >= 1.0:
        raise ValueError("need nonnegative parameters with a_i b_j < 1")
    if len(a) != len(b):
        n = max(len(a), len(b))
        a = np.concatenate([a, np.zeros(n - len(a))])
        b = np.concatenate([b, np.zeros(n - len(b))])
    n = len(a)
    if _min_gap(a) < _MIN_PARAM_GAP or _min_gap(b) < _MIN_PARAM_GAP:
        ctx = KernelContext(a, b)
        return cdf_fredholm_series(ctx, k)
    C = 1.0 / (1.0 - np.outer(a, b))
    cond = np.linalg.cond(C)
    Cinv = cramer_inverse(a, b)
    if cond > 1e12:
        resid = np.max(np.abs(C @ Cinv - np.eye(n)))
        msg = f"ill-conditioned parameter matrix (cond ~ {cond:.2e}, inverse residual {resid:.2e})"
        if warn is not None:
            warn(msg)
        else:
            import warnings

            warnings.warn(msg, stacklevel=2)
    tail = (np.outer(a, b) ** (k + n)) / (1.0 - np.outer(a, b))  # (p, j)
    M = np.eye(n) - Cinv @ tail
    p = float(np.linalg.det(M))
    return min(max(p, 0.0), 1.0)


def cdf_enumeration(a, b, kmax: int, entry_tail: float = 1e-12) -> np.ndarray:
    """CDF of G by exhaustive enumeration over truncated weight matrices.

    Each entry's support is cut where the geometric tail drops below
    ``entry_tail``; the result is exact up to the total truncated mass.
    Intended as a test oracle for small grids.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = np.outer(a, b)
    if np.any(p >= 1.0) or np.any(p <= 0.0):
        raise ValueError("need parameters with 0 < a_i b_j < 1")
    cuts = np.ceil(np.log(entry_tail) / np.log(p)).astype(int) + 1
    if len(a) == len(b) == 2:
        return _cdf_enum_2x2(p, cuts, kmax)
    return _cdf_enum_generic(a, b, kmax, entry_tail)


def _cdf_enum_generic(a, b, kmax, entry_tail: float = 1e-12):
    m, n = len(a), len(b)
    p = np.outer(np.asarray(a, float), np.asarray(b, float))
    cuts = np.ceil(np.log(entry_tail) / np.log(p)).astype(int) + 1
    if np.prod(cuts + 0.0) > 5e6:
        raise ValueError("enumeration too large")
    cdf = np.zeros(kmax + 1)
    ranges = [range(int(c) + 1) for c in cuts.ravel()]
    for entries in iter_product(*ranges):
        W = np.asarray(entries, dtype=np.int64).reshape(m, n)
        prob = float(np.prod((1.0 - p) * p**W))
        g = _lpp_small(W)
        if g <= kmax:
            cdf[g:] += prob
    return cdf


def _cdf_enum_2x2(p, cuts, kmax):
    grids = np.meshgrid(*[np.arange(c + 1) for c in cuts.ravel()], indexing="ij")
    w11, w12, w21, w22 = [g.astype(np.int64) for g in grids]
    G = w11 + w22 + np.maximum(w12, w21)
    pr = (
        (1 - p[0, 0]) * p[0, 0] ** w11
        * (1 - p[0, 1]) * p[0, 1] ** w12
        * (1 - p[1, 0]) * p[1, 0] ** w21
        * (1 - p[1, 1]) * p[1, 1] ** w22
    )
    cdf = np.zeros(kmax + 1)
    for k in range(kmax + 1):
        cdf[k] = pr[G <= k].sum()
    return cdf


def _lpp_small(W):
    m, n = W.shape
    G = np.zeros((m + 1, n + 1), dtype=np.int64)
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            G[i, j] = max(G[i - 1, j], G[i, j - 1]) + W[i - 1, j - 1]
    return int(G[m, n])


def cdf_monte_carlo(a, b, ks, reps: int, seed: int = 0):
    """Empirical CDF of G at the values ``ks``; returns (cdf, stderr)."""
    from .lpp import last_passage_ensemble_params

    g = last_passage_ensemble_params(a, b, "geometric", reps, seed)
    ks = np.asarray(ks)
    cdf = (g[None, :] <= ks[:, None]).mean(axis=1)
    stderr = np.sqrt(np.maximum(cdf * (1 - cdf), 1.0 / reps) / reps)
    return cdf, stderr


# ---------------------------------------------------------------------------
# Schur utilities (test oracles)


def schur_polynomial(lam, x) -> float:
    """Bialternant ratio det[x_i^{lam_j + n - j}] / det[x_i^{n - j}]."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    lam = list(lam) + [0] * (n - len(lam))
    if len(lam) > n:
        if any(v > 0 for v in lam[n:]):
            return 0.0
        lam = lam[:n]
    if _min_gap(x) < _MIN_PARAM_GAP:
        raise ValueError("bialternant needs distinct variables")
    powers = np.array([lam[j] - (j + 1) + n for j in range(n)], dtype=float)
    num = np.linalg.det(x[:, None] ** powers[None, :])
    den = np.prod([x[i] - x[j] for i in range(n) for j in range(i + 1, n)])
    return float(num / den)


def ssyt_enumerate(lam, nvars: int):
    """All semi-standard fillings of shape lam with entries in 1..nvars."""
    lam = [v for v in lam if v > 0]
    if not lam:
        return [[]]
    out = []

    def fill(rows, r, c):
        if r == len(lam):
            out.append([list(row) for row in rows])
            return
        nr, nc = (r, c + 1) if c + 1 < lam[r] else (r + 1, 0)
        lo = 1
        if c > 0:
            lo = max(lo, rows[r][c - 1])  # weakly increasing along rows
        if r > 0 and c < lam[r - 1]:
            lo = max(lo, rows[r - 1][c] + 1)  # strictly increasing down columns
        for v in range(lo, nvars + 1):
            rows[r][c] = v
            fill(rows, nr, nc)
        rows[r][c] = 0

    fill([[0] * k for k in lam], 0, 0)
    return out


def schur_via_ssyt(lam, x) -> float:
    x = np.asarray(x, dtype=float)
    total = 0.0
    for tab in ssyt_enumerate(lam, len(x)):
        counts = np.zeros(len(x))
        for row in tab:
            for v in row:
                counts[v - 1] += 1
        total += float(np.prod(x**counts))
    return total


def schur_normalization(a, b) -> float:
    """Z_n = prod_{i<j}(a_i-a_j)(b_i-b_j) / prod_{i,j}(1-a_i b_j)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = len(a)
    num = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            num *= (a[i] - a[j]) * (b[i] - b[j])
    return num / np.prod(1.0 - np.outer(a, b))


def schur_measure(lam, a, b) -> float:
    """P(shape = lam) = s_lam(a) s_lam(b) prod (1 - a_i b_j)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(
        schur_polynomial(lam, a) * schur_polynomial(lam, b) * np.prod(1.0 - np.outer(a, b))
    )


def _det_exact(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    total = Fraction(0)
    import itertools

    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = list(perm)
        # parity by counting inversions
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if seen[i] > seen[j])
        sign = -1 if inv % 2 else 1
        term = Fraction(1)
        for i in range(n):
            term *= M[i][perm[i]]
        total += sign * term
    return total


def cauchy_binet_check(f_table, g_table) -> bool:
    """Exact check of det[sum_x f_i(x) g_j(x)] = (1/n!) sum_x det det.

    Tables are n x |X| nested lists of Fractions (or ints); both sides are
    evaluated independently in exact arithmetic.
    """
    f = [[Fraction(v) for v in row] for row in f_table]
    g = [[Fraction(v) for v in row] for row in g_table]
    n = len(f)
    npts = len(f[0])
    lhs = _det_exact(
        [[sum(f[i][x] * g[j][x] for x in range(npts)) for j in range(n)] for i in range(n)]
    )
    rhs = Fraction(0)
    for xs in iter_product(range(npts), repeat=n):
        d1 = _det_exact([[f[i][xs[j]] for j in range(n)] for i in range(n)])
        d2 = _det_exact([[g[i][xs[j]] for j in range(n)] for i in range(n)])
        rhs += d1 * d2
    rhs /= math.factorial(n)
    return lhs == rhs
