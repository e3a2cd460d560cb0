"""Steepest-descent machinery for the kernel's contour integrals.

The contour integrand is exp{n f(z) + lower order} with the action

    f(z) = -(1/n) sum_i log(z - a_i) + (1/n) sum_j log(1 - z b_j)
           + (gamma + m/n) log z

whose derivative has a double zero at the variational saddle zeta and one
simple zero in each gap between consecutive distinct poles.  The curve Phi
of steepest descent of u = Re f leaves zeta at angle 2 pi / 3, stays in the
open upper half-plane inside the disk |z| < zeta, and terminates at the
origin; Phi followed by its reflection is a closed contour enclosing every
a_i and none of the 1/b_j, so it can replace the circle in the kernel's
integrals.  Since Im f is constant along Phi, the integrand's modulus
decays monotonically away from the saddle, which is what makes the deformed
contour useful.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .shape import empirical_shape

__all__ = [
    "ActionFunction",
    "TraceStatus",
    "TracedContour",
    "DeformedContour",
    "locate_zeros",
    "trace_phi",
    "build_gamma",
    "build_gamma_prime",
    "contour_I_descent",
]


@dataclass
class ActionFunction:
    a: np.ndarray
    b: np.ndarray
    gamma: float = field(init=False)
    zeta: float = field(init=False)
    sigma: float = field(init=False)

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        es = empirical_shape(self.a, self.b)
        self.gamma = es.gamma_mn
        self.zeta = es.zeta_mn
        self.sigma = es.sigma_mn

    @property
    def m(self):
        return len(self.a)

    @property
    def n(self):
        return len(self.b)

    @property
    def exponent(self):
        return self.gamma + self.m / self.n

    def f(self, z):
        z = np.asarray(z, dtype=complex)
        n = self.n
        return (
            -np.log(z[..., None] - self.a).sum(-1) / n
            + np.log(1.0 - z[..., None] * self.b).sum(-1) / n
            + self.exponent * np.log(z)
        )

    def u(self, z):
        z = np.asarray(z, dtype=complex)
        n = self.n
        return (
            -np.log(np.abs(z[..., None] - self.a)).sum(-1) / n
            + np.log(np.abs(1.0 - z[..., None] * self.b)).sum(-1) / n
            + self.exponent * np.log(np.abs(z))
        )

    def v(self, z):
        return np.imag(self.f(z))

    def fp(self, z):
        z = np.asarray(z, dtype=complex)
        n = self.n
        return (
            -(1.0 / (z[..., None] - self.a)).sum(-1) / n
            - (self.b / (1.0 - z[..., None] * self.b)).sum(-1) / n
            + self.exponent / z
        )

    def fpp(self, z):
        z = np.asarray(z, dtype=complex)
        n = self.n
        return (
            (1.0 / (z[..., None] - self.a) ** 2).sum(-1) / n
            - (self.b**2 / (1.0 - z[..., None] * self.b) ** 2).sum(-1) / n
            - self.exponent / z**2
        )

    def fppp_at_saddle(self):
        """f'''(zeta) = -2 sigma^3 / zeta^3 (< 0)."""
        return -2.0 * self.sigma**3 / self.zeta**3

    def poles(self):
        return np.concatenate([[0.0], np.unique(self.a), np.unique(1.0 / self.b)])

    def saddle_clearance(self):
        """Distance from the saddle to the nearest pole."""
        return float(np.min(np.abs(self.poles() - self.zeta)))


def locate_zeros(af: ActionFunction):
    """All real zeros of f' with multiplicity: one simple zero per gap
    between consecutive distinct a's and between consecutive 1/b's, plus the
    double zero at the saddle."""
    zeros = []
    av = np.unique(af.a)
    bv = np.sort(np.unique(1.0 / af.b))
    for lo, hi in zip(av[:-1], av[1:]):
        zeros.append(_bisect_fp(af, lo, hi))
    for lo, hi in zip(bv[:-1], bv[1:]):
        zeros.append(_bisect_fp(af, lo, hi))
    zeros.extend([af.zeta, af.zeta])
    return sorted(zeros)


def _bisect_fp(af, lo, hi):
    pad = 1e-12 * (hi - lo)
    a, c = lo + pad, hi - pad
    fa = np.real(af.fp(a + 0j))
    fc = np.real(af.fp(c + 0j))
    if fa * fc > 0:
        raise RuntimeError(f"no sign change of f' in gap ({lo}, {hi})")
    for _ in range(200):
        mid = 0.5 * (a + c)
        fm = np.real(af.fp(mid + 0j))
        if fm == 0.0:
            return mid
        if fa * fm < 0:
            c, fc = mid, fm
        else:
            a, fa = mid, fm
        if c - a < 1e-14 * (hi - lo):
            break
    return 0.5 * (a + c)


class TraceStatus(Enum):
    REACHED_ORIGIN = "ReachedOrigin"
    EXITED_DISK = "ExitedDiskRadius"
    STEP_LIMIT = "StepLimit"


@dataclass
class TracedContour:
    points: np.ndarray  # complex, starting at the saddle
    arclen: np.ndarray
    status: TraceStatus
    zeta: float
    direction: str

    def exit_time(self, center: complex, radius: float) -> float:
        """First arclength at which |z - center| reaches ``radius``."""
        d = np.abs(self.points - center)
        idx = np.nonzero(d >= radius)[0]
        if len(idx) == 0:
            raise ValueError("trace never leaves the disk")
        i = idx[0]
        if i == 0:
            return 0.0
        # linear interpolation between the straddling points
        d0, d1 = d[i - 1], d[i]
        w = (radius - d0) / (d1 - d0)
        return float(self.arclen[i - 1] + w * (self.arclen[i] - self.arclen[i - 1]))


def _saddle_constants(af: ActionFunction, boundary_samples=720):
    """Estimated step-size constants from suprema on a saddle-centered circle."""
    rho = 0.9 * af.saddle_clearance()
    theta = 2.0 * np.pi * np.arange(boundary_samples) / boundary_samples
    ring = af.zeta + 0.5 * rho * np.exp(1j * theta)
    sup = float(np.max(np.abs(af.f(ring)) + rho * np.abs(af.fp(ring))))
    K0 = 48.0 / rho**4 * af.zeta**3 / af.sigma**3 * sup
    eps0 = min(rho, 1.0 / K0, 1.0) / 16.0
    return rho, K0, eps0


def trace_phi(
    af: ActionFunction,
    direction: str = "descent",
    step: float | None = None,
    stop_radius: float | None = None,
    outer_radius: float | None = None,
    max_steps: int = 200000,
    v_step_tol: float = 1e-10,
) -> TracedContour:
    """Unit-speed steepest descent/ascent curve of u from the saddle.

    The first step leaves along e^{i 2 pi/3} (descent) or e^{i pi/3}
    (ascent) using the local cubic model (f' and f'' vanish at the saddle);
    afterwards RK4 follows z' = -/+ conj(f')/|f'| with the per-step drift of
    Im f as the step-size control, plus a Newton projection back onto the
    level line Im f = 0.
    """
    if direction not in ("descent", "ascent"):
        raise ValueError("direction must be 'descent' or 'ascent'")
    sgn = -1.0 if direction == "descent" else 1.0
    zeta = af.zeta
    rho_loc, _K0, eps0 = _saddle_constants(af)
    eps_init = min(eps0 / 1024.0, af.saddle_clearance() / 8.0)
    start_dir = cmath.exp(2j * math.pi / 3) if direction == "descent" else cmath.exp(1j * math.pi / 3)
    if stop_radius is None:
        stop_radius = 1e-3 * zeta
    if outer_radius is None:
        outer_radius = 3.0 / float(np.max(af.b))

    def vel(z):
        d = af.fp(z)
        mag = abs(d)
        if mag < 1e-13:
            raise RuntimeError(f"stalled near a critical point at z = {z}")
        return sgn * np.conj(d) / mag

    pts = [complex(zeta), complex(zeta + eps_init * start_dir)]
    tvals = [0.0, eps_init]
    z = pts[-1]
    h = step if step is not None else max(eps_init, 2e-3 * zeta)
    h_max = 0.02 * zeta

    status = TraceStatus.STEP_LIMIT
    for _ in range(max_steps):
        if direction == "descent" and abs(z) <= stop_radius:
            status = TraceStatus.REACHED_ORIGIN if stop_radius <= 2e-3 * zeta else TraceStatus.EXITED_DISK
            break
        if direction == "ascent" and abs(z) >= outer_radius:
            status = TraceStatus.EXITED_DISK
            break
        # RK4 step with |delta v| control
        while True:
            k1 = vel(z)
            k2 = vel(z + 0.5 * h * k1)
            k3 = vel(z + 0.5 * h * k2)
            k4 = vel(z + h * k3)
            znew = z + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            if abs(af.v(znew)) <= v_step_tol or h < 1e-14 * zeta:
                break
            h *= 0.5
        # project back onto the v = 0 level line
        for _ in range(3):
            vv = af.v(znew)
            if abs(vv) < 1e-13:
                break
            d = af.fp(znew)
            znew = znew - vv * (1j * np.conj(d)) / (abs(d) ** 2)
        # keep the inner stopping circle from being jumped over
        if direction == "descent" and abs(znew) < 0.5 * stop_radius:
            h *= 0.5
            continue
        tvals.append(tvals[-1] + abs(znew - z))
        pts.append(complex(znew))
        z = znew
        if abs(af.v(znew)) < 0.2 * v_step_tol and h < h_max:
            h = min(1.5 * h, h_max)
    return TracedContour(np.asarray(pts), np.asarray(tvals), status, zeta, direction)


def build_gamma(phi: TracedContour) -> np.ndarray:
    """Closed contour: Phi, through the origin, then the reflection of Phi
    reversed.  Encircles every a_i once, no 1/b_j."""
    if phi.status not in (TraceStatus.REACHED_ORIGIN, TraceStatus.EXITED_DISK):
        raise ValueError("trace did not terminate cleanly")
    fwd = phi.points
    back = np.conj(fwd[::-1])
    return np.concatenate([fwd, [0.0], back])


@dataclass
class DeformedContour:
    gamma_prime: np.ndarray  # saddle -> crossing of |z| = delta, upper half
    arc: np.ndarray  # circular arc through -delta to the reflected crossing
    delta: float

    @property
    def closed(self) -> np.ndarray:
        return np.concatenate(
            [self.gamma_prime, self.arc, np.conj(self.gamma_prime[::-1])]
        )


def build_gamma_prime(phi: TracedContour, delta: float) -> DeformedContour:
    """Replace the descent curve inside |z| <= delta by the circular arc of
    radius delta through -delta (counterclockwise in the upper half-plane,
    clockwise back in the lower)."""
    if delta >= phi.zeta:
        raise ValueError("delta must be below the saddle radius")
    d = np.abs(phi.points)
    idx = np.nonzero(d <= delta)[0]
    if len(idx) == 0:
        raise ValueError("trace does not reach the delta circle; trace further")
    i = idx[0]
    z0, z1 = phi.points[i - 1], phi.points[i]
    # interpolate the crossing of |z| = delta
    w = (d[i - 1] - delta) / (d[i - 1] - d[i])
    zc = z0 + w * (z1 - z0)
    zc = delta * zc / abs(zc)
    gamma_prime = np.concatenate([phi.points[:i], [zc]])
    phase0 = np.angle(zc)
    phases = np.linspace(phase0, 2.0 * np.pi - phase0, max(128, int(16 * delta / abs(zc - z0) + 1)))
    arc = delta * np.exp(1j * phases)
    return DeformedContour(gamma_prime, arc, delta)


def _log_F(a, b, x, z):
    z = np.asarray(z, dtype=complex)
    return (
        np.log(1.0 - z[..., None] * b).sum(-1)
        - np.log(z[..., None] - a).sum(-1)
        + (len(a) + x) * np.log(z)
    )


def contour_I_descent(a, b, x: int, contour: np.ndarray, rel_tol: float = 1e-10) -> float:
    """(1/2 pi i) * integral of F along a closed polyline contour.

    Piecewise trapezoid over the chords with midpoint refinement and
    Richardson extrapolation until two refinements agree.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    pts = np.asarray(contour, dtype=complex)
    # drop exact-zero vertices (origin closure); F vanishes there for x+m >= 1
    pts = pts[np.abs(pts) > 1e-300]

    def F(z):
        return np.exp(_log_F(a, b, x, z))

    vals = F(pts)
    prev_richardson = None
    I_h = None
    for _ in range(10):
        segs = np.diff(pts)
        I_trap = np.sum(0.5 * (vals[:-1] + vals[1:]) * segs) / (2j * np.pi)
        if I_h is not None:
            richardson = (4.0 * I_trap - I_h) / 3.0
            scale = np.sum(np.abs(vals[:-1]) * np.abs(segs)) / (2 * np.pi)
            if prev_richardson is not None and abs(richardson - prev_richardson) <= rel_tol * max(
                abs(richardson), 1e-3 * scale
            ):
                return float(richardson.real)
            prev_richardson = richardson
        I_h = I_trap
        mids = 0.5 * (pts[:-1] + pts[1:])
        mvals = F(mids)
        newpts = np.empty(2 * len(pts) - 1, dtype=complex)
        newpts[0::2] = pts
        newpts[1::2] = mids
        newvals = np.empty_like(newpts)
        newvals[0::2] = vals
        newvals[1::2] = mvals
        pts, vals = newpts, newvals
    raise RuntimeError("refinement did not converge")
