"""Parameter laws, model specification and weight sampling.

The corner-growth models here are driven by two sequences of inhomogeneity
parameters: a row sequence ``a`` drawn i.i.d. from a law ``alpha`` and a
column sequence ``b`` drawn i.i.d. from a law ``beta``.  Given the sequences,
site weights are conditionally independent with

* exponential kind:  P(W(i,j) >= x) = exp(-(a_i + b_j) x),
* geometric kind:    P(W(i,j) >= k) = (a_i b_j)^k.

The laws also enter the limit-shape formulas through a handful of integral
transforms (inverse moments and tilted means) which are implemented in closed
form for all variants except the power density, which uses adaptive
quadrature.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

__all__ = [
    "ParamLaw",
    "PointMass",
    "Uniform",
    "PowerDensity",
    "Reciprocal",
    "Atoms",
    "ModelSpec",
    "WeightMatrix",
    "EXPONENTIAL",
    "GEOMETRIC",
    "law_from_config",
    "law_to_config",
    "sample_sequences",
    "sample_weights",
    "sample_boundary_weights",
    "transform_A",
    "transform_A2",
    "transform_A3",
    "transform_Ga",
    "transform_Gb",
]

EXPONENTIAL = "exponential"
GEOMETRIC = "geometric"

# Quadrature integrals larger than this are reported as divergent.
_DIVERGENCE_THRESHOLD = 1e14
_QUAD_RTOL = 1e-12


class ParamLaw:
    """Base class for the supported parameter laws.

    Subclasses expose the support endpoints ``lo``/``hi`` and the transforms

    * ``inv_moment(z, k)``  = E[(X+z)^-k]          (exponential model),
    * ``tilt_a(z, order)``  = d^order/dz^order E[X/(z-X)]   (geometric),
    * ``tilt_b(z, order)``  = d^order/dz^order E[Xz/(1-Xz)] (geometric),

    with endpoint values defined as monotone limits; a divergent limit is
    returned as ``math.inf`` (never NaN).
    """

    # subclasses provide: lo, hi (exact support endpoints)

    # -- generic quadrature expectation; closed forms override the transforms.
    def expect(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        raise NotImplementedError

    def inv_moment(self, z: float, k: int = 1) -> float:
        return self._expect_guarded(lambda x: (x + z) ** (-float(k)), z_shift=z)

    def tilt_a(self, z: float, order: int = 0) -> float:
        sign = (-1.0) ** order
        k = order + 1
        fact = math.factorial(order)
        return sign * fact * self._expect_guarded(
            lambda x: x * (z - x) ** (-float(k)), z_shift=-z
        )

    def tilt_b(self, z: float, order: int = 0) -> float:
        if order == 0:
            return self._expect_guarded(lambda x: x * z / (1.0 - x * z))
        fact = math.factorial(order)
        return fact * self._expect_guarded(
            lambda x: x**order * (1.0 - x * z) ** (-float(order + 1))
        )

    def _expect_guarded(self, f, z_shift=None) -> float:
        """Quadrature expectation mapped to +inf past the divergence threshold."""
        val = self.expect(f)
        if not math.isfinite(val) or abs(val) > _DIVERGENCE_THRESHOLD:
            return math.inf
        return val

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def validate_for(self, kind: str) -> None:
        if kind == EXPONENTIAL:
            if self.lo < 0.0 or self._has_atom_at(0.0):
                raise ValueError("exponential model needs support in (0, inf) with no mass at 0")
        elif kind == GEOMETRIC:
            if self.lo < 0.0 or self.hi > 1.0 or self._has_atom_at(0.0) or self._has_atom_at(1.0):
                raise ValueError("geometric model needs support in (0, 1) with no mass at 0 or 1")
        else:
            raise ValueError(f"unknown model kind {kind!r}")

    def _has_atom_at(self, x: float) -> bool:
        return False


@dataclass(frozen=True)
class PointMass(ParamLaw):
    v: float

    def __post_init__(self):
        if self.v <= 0:
            raise ValueError("point mass must sit at a positive value")

    @property
    def lo(self):
        return self.v

    @property
    def hi(self):
        return self.v

    def expect(self, f):
        return float(f(np.asarray(self.v)))

    def inv_moment(self, z, k=1):
        d = self.v + z
        return math.inf if d <= 0 else d ** (-k)

    def tilt_a(self, z, order=0):
        d = z - self.v
        if d <= 0:
            return math.inf if order % 2 == 0 else -math.inf
        return (-1.0) ** order * math.factorial(order) * self.v * d ** (-(order + 1))

    def tilt_b(self, z, order=0):
        d = 1.0 - self.v * z
        if d <= 0:
            return math.inf
        if order == 0:
            return self.v * z / d
        return math.factorial(order) * self.v**order * d ** (-(order + 1))

    def sample(self, rng, size):
        return np.full(size, self.v)

    def _has_atom_at(self, x):
        return self.v == x


@dataclass(frozen=True)
class _IntervalLaw(ParamLaw):
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise ValueError("interval law needs lo < hi")
        if self.lo < 0:
            raise ValueError("support must be nonnegative")

    def _density(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def expect(self, f):
        val, _ = integrate.quad(
            lambda x: float(f(np.asarray(x)) * self._density(np.asarray(x))),
            self.lo,
            self.hi,
            epsabs=0.0,
            epsrel=_QUAD_RTOL,
            limit=200,
        )
        return val


@dataclass(frozen=True)
class Uniform(_IntervalLaw):
    def _density(self, x):
        return np.full_like(x, 1.0 / (self.hi - self.lo), dtype=float)

    def sample(self, rng, size):
        return self.lo + (self.hi - self.lo) * rng.random(size)

    def inv_moment(self, z, k=1):
        u0, u1 = self.lo + z, self.hi + z
        L = self.hi - self.lo
        if u0 < 0:
            raise ValueError("z below the transform domain")
        if u0 == 0.0:
            return math.inf
        if k == 1:
            return (math.log(u1) - math.log(u0)) / L
        if k == 2:
            return (1.0 / u0 - 1.0 / u1) / L
        if k == 3:
            return (u0**-2 - u1**-2) / (2.0 * L)
        raise ValueError("only inverse moments of order 1..3 are provided")

    def tilt_a(self, z, order=0):
        d0, d1 = z - self.lo, z - self.hi
        L = self.hi - self.lo
        if d1 < 0:
            raise ValueError("z below the right support endpoint")
        if d1 == 0.0:
            return math.inf if order % 2 == 0 else -math.inf
        if order == 0:
            return z * (math.log(d0) - math.log(d1)) / L - 1.0
        if order == 1:
            return -(z * (1.0 / d1 - 1.0 / d0) + math.log(d1) - math.log(d0)) / L
        if order == 2:
            return (z * (d1**-2 - d0**-2) - 2.0 * (1.0 / d1 - 1.0 / d0)) / L
        raise ValueError("only derivatives of order 0..2 are provided")

    def tilt_b(self, z, order=0):
        w0, w1 = 1.0 - self.lo * z, 1.0 - self.hi * z
        L = self.hi - self.lo
        if w1 < 0:
            raise ValueError("z above the transform domain")
        if w1 == 0.0:
            return math.inf
        if order == 0:
            if z == 0.0:
                return 0.0
            return (math.log(w0) - math.log(w1)) / (L * z) - 1.0
        if order == 1:
            if z == 0.0:
                return 0.5 * (self.lo + self.hi)
            return ((1.0 / w1 + math.log(w1)) - (1.0 / w0 + math.log(w0))) / (L * z * z)
        if order == 2:
            if z == 0.0:
                return 2.0 * (self.hi**3 - self.lo**3) / (3.0 * L)
            t1 = 0.5 * w1**-2 - 2.0 / w1 - math.log(w1)
            t0 = 0.5 * w0**-2 - 2.0 / w0 - math.log(w0)
            return 2.0 * (t1 - t0) / (L * z**3)
        raise ValueError("only derivatives of order 0..2 are provided")


@dataclass(frozen=True)
class PowerDensity(_IntervalLaw):
    """Density proportional to (x-lo)^p (default) or to x^p on [lo, hi]."""

    p: float = 1.0
    shifted: bool = True

    def __post_init__(self):
        super().__post_init__()
        if self.p <= 0:
            raise ValueError("power exponent must be positive")
        if not self.shifted and self.lo == 0.0:
            object.__setattr__(self, "shifted", True)

    def _norm(self):
        if self.shifted:
            return (self.p + 1.0) / (self.hi - self.lo) ** (self.p + 1.0)
        return (self.p + 1.0) / (self.hi ** (self.p + 1.0) - self.lo ** (self.p + 1.0))

    def _density(self, x):
        base = (x - self.lo) if self.shifted else x
        return self._norm() * base**self.p

    def sample(self, rng, size):
        u = rng.random(size)
        q = 1.0 / (self.p + 1.0)
        if self.shifted:
            return self.lo + (self.hi - self.lo) * u**q
        lo_p, hi_p = self.lo ** (self.p + 1.0), self.hi ** (self.p + 1.0)
        return (lo_p + u * (hi_p - lo_p)) ** q

    # Left-endpoint inverse moments have an exact power-law form; the density
    # is positive at the right endpoint, so right-endpoint moments diverge.
    def inv_moment(self, z, k=1):
        if self.shifted and z == -self.lo:
            if self.p + 1.0 - k <= 0:
                return math.inf
            L = self.hi - self.lo
            return (self.p + 1.0) * L ** (-float(k)) / (self.p + 1.0 - k)
        if z <= -self.lo:
            return math.inf
        return self._expect_guarded(lambda x: (x + z) ** (-float(k)))

    def tilt_a(self, z, order=0):
        if z < self.hi:
            raise ValueError("z below the right support endpoint")
        if z == self.hi:
            return math.inf if order % 2 == 0 else -math.inf
        return super().tilt_a(z, order)

    def tilt_b(self, z, order=0):
        if z > 1.0 / self.hi:
            raise ValueError("z above the transform domain")
        if z == 1.0 / self.hi:
            return math.inf
        return super().tilt_b(z, order)


@dataclass(frozen=True)
class Reciprocal(_IntervalLaw):
    """Density proportional to 1/x on [lo, hi]; requires lo > 0."""

    def __post_init__(self):
        super().__post_init__()
        if self.lo <= 0:
            raise ValueError("reciprocal law needs lo > 0")

    def _lognorm(self):
        return math.log(self.hi / self.lo)

    def _density(self, x):
        return 1.0 / (self._lognorm() * x)

    def sample(self, rng, size):
        return self.lo * (self.hi / self.lo) ** rng.random(size)

    def inv_moment(self, z, k=1):
        C = self._lognorm()
        u0, u1 = self.lo + z, self.hi + z
        if u0 < 0:
            raise ValueError("z below the transform domain")
        if u0 == 0.0:
            return math.inf
        if z == 0.0:
            if k == 1:
                return (1.0 / self.lo - 1.0 / self.hi) / C
            if k == 2:
                return (self.lo**-2 - self.hi**-2) / (2.0 * C)
            if k == 3:
                return (self.lo**-3 - self.hi**-3) / (3.0 * C)
        logs = C - (math.log(u1) - math.log(u0))
        if k == 1:
            return logs / (C * z)
        if k == 2:
            return (logs / z**2 + (1.0 / u1 - 1.0 / u0) / z) / C
        if k == 3:
            return (logs / z**3 + (1.0 / u1 - 1.0 / u0) / z**2 + 0.5 * (u1**-2 - u0**-2) / z) / C
        raise ValueError("only inverse moments of order 1..3 are provided")

    def tilt_a(self, z, order=0):
        C = self._lognorm()
        d0, d1 = z - self.lo, z - self.hi
        if d1 < 0:
            raise ValueError("z below the right support endpoint")
        if d1 == 0.0:
            return math.inf if order % 2 == 0 else -math.inf
        if order == 0:
            return (math.log(d0) - math.log(d1)) / C
        if order == 1:
            return -(1.0 / d1 - 1.0 / d0) / C
        if order == 2:
            return (d1**-2 - d0**-2) / C
        raise ValueError("only derivatives of order 0..2 are provided")

    def tilt_b(self, z, order=0):
        C = self._lognorm()
        w0, w1 = 1.0 - self.lo * z, 1.0 - self.hi * z
        if w1 < 0:
            raise ValueError("z above the transform domain")
        if w1 == 0.0:
            return math.inf
        if order == 0:
            return (math.log(w0) - math.log(w1)) / C
        if order == 1:
            if z == 0.0:
                return (self.hi - self.lo) / C
            return (1.0 / w1 - 1.0 / w0) / (C * z)
        if order == 2:
            if z == 0.0:
                return (self.hi**2 - self.lo**2) / C
            t1 = 0.5 * w1**-2 - 1.0 / w1
            t0 = 0.5 * w0**-2 - 1.0 / w0
            return 2.0 * (t1 - t0) / (C * z**2)
        raise ValueError("only derivatives of order 0..2 are provided")


@dataclass(frozen=True)
class Atoms(ParamLaw):
    atoms: tuple  # ((value, weight), ...)

    def __init__(self, atoms: Sequence[tuple]):
        pairs = tuple(sorted((float(v), float(w)) for v, w in atoms))
        object.__setattr__(self, "atoms", pairs)
        if not pairs:
            raise ValueError("need at least one atom")
        if any(w <= 0 for _, w in pairs):
            raise ValueError("atom weights must be positive")
        if abs(sum(w for _, w in pairs) - 1.0) > 1e-12:
            raise ValueError("atom weights must sum to 1 within 1e-12")
        if any(v <= 0 for v, _ in pairs):
            raise ValueError("atom values must be positive")

    @property
    def lo(self):
        return self.atoms[0][0]

    @property
    def hi(self):
        return self.atoms[-1][0]

    def expect(self, f):
        return float(sum(w * float(f(np.asarray(v))) for v, w in self.atoms))

    def _combine(self, method, z, order):
        total = 0.0
        for v, w in self.atoms:
            val = getattr(PointMass(v), method)(z, order)
            if math.isinf(val):
                return val
            total += w * val
        return total

    def inv_moment(self, z, k=1):
        return self._combine("inv_moment", z, k)

    def tilt_a(self, z, order=0):
        return self._combine("tilt_a", z, order)

    def tilt_b(self, z, order=0):
        return self._combine("tilt_b", z, order)

    def sample(self, rng, size):
        values = np.array([v for v, _ in self.atoms])
        cumw = np.cumsum([w for _, w in self.atoms])
        idx = np.searchsorted(cumw, rng.random(size), side="right")
        return values[np.minimum(idx, len(values) - 1)]

    def _has_atom_at(self, x):
        return any(v == x for v, _ in self.atoms)


# ---------------------------------------------------------------------------
# transforms with the interface names used across the package


def transform_A(law: ParamLaw, z: float) -> float:
    """E[(X+z)^-1]; +inf when the integral diverges."""
    return law.inv_moment(z, 1)


def transform_A2(law: ParamLaw, z: float) -> float:
    return law.inv_moment(z, 2)


def transform_A3(law: ParamLaw, z: float) -> float:
    return law.inv_moment(z, 3)


def transform_Ga(law: ParamLaw, z: float, order: int = 0) -> float:
    """order-th z-derivative of E[(X/z)/(1-X/z)] = E[X/(z-X)], z >= hi."""
    return law.tilt_a(z, order)


def transform_Gb(law: ParamLaw, z: float, order: int = 0) -> float:
    """order-th z-derivative of E[Xz/(1-Xz)], z <= 1/hi."""
    return law.tilt_b(z, order)


# ---------------------------------------------------------------------------
# model spec


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    alpha: ParamLaw
    beta: ParamLaw
    seed: int = 0
    boundary_z: float | None = None
    allow_degenerate: bool = False

    def __post_init__(self):
        self.alpha.validate_for(self.kind)
        self.beta.validate_for(self.kind)
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.kind == EXPONENTIAL:
            if self.alpha.lo + self.beta.lo <= 0 and not self.allow_degenerate:
                raise ValueError(
                    "exponential model needs lo(alpha)+lo(beta) > 0; "
                    "pass allow_degenerate=True for the linear branch"
                )
        else:
            if self.alpha.hi * self.beta.hi >= 1 and not self.allow_degenerate:
                raise ValueError(
                    "geometric model needs hi(alpha)*hi(beta) < 1; "
                    "pass allow_degenerate=True for the linear branch"
                )
        if self.boundary_z is not None:
            z = self.boundary_z
            if self.kind == EXPONENTIAL:
                if not (-self.alpha.lo < z < self.beta.lo):
                    raise ValueError("boundary z must lie in (-lo(alpha), lo(beta))")
            else:
                if not (self.alpha.hi < z < 1.0 / self.beta.hi):
                    raise ValueError("boundary z must lie in (hi(alpha), 1/hi(beta))")

    # substream layout: (0,) row params, (1,) column params, (2, i) weight row i,
    # (3,) horizontal boundary, (4,) vertical boundary, (5, i) ensemble row i.
    def stream(self, *key: int) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=tuple(key))
        return np.random.Generator(np.random.Philox(ss))


@dataclass
class WeightMatrix:
    m: int
    n: int
    w: np.ndarray  # shape (m, n); site (i, j) is w[i-1, j-1]
    a_prefix: np.ndarray
    b_prefix: np.ndarray
    kind: str = GEOMETRIC

    def __post_init__(self):
        if self.w.shape != (self.m, self.n):
            raise ValueError("weight array shape does not match (m, n)")
        if self.kind == GEOMETRIC and not np.issubdtype(self.w.dtype, np.integer):
            raise ValueError("geometric weights must be integers")
        if np.any(self.w < 0):
            raise ValueError("weights must be nonnegative")


def sample_sequences(spec: ModelSpec, m: int, n: int):
    """Draw the i.i.d. parameter prefixes (a_1..a_m) and (b_1..b_n)."""
    a = spec.alpha.sample(spec.stream(0), m)
    b = spec.beta.sample(spec.stream(1), n)
    return a, b


def _exponential_rows(spec, a, b):
    n = len(b)
    for i, ai in enumerate(a):
        u = spec.stream(2, i).random(n)
        yield -np.log1p(-u) / (ai + b)


def _geometric_rows(spec, a, b):
    n = len(b)
    for i, ai in enumerate(a):
        p = ai * b
        if np.any(p >= 1.0):
            raise ValueError("invalid parameter product: a_i * b_j must be < 1")
        u = spec.stream(2, i).random(n)
        yield np.floor(np.log1p(-u) / np.log(p)).astype(np.int64)


def sample_weights(spec: ModelSpec, a: np.ndarray, b: np.ndarray) -> WeightMatrix:
    """Sample the conditionally independent site weights by inverse CDF.

    Per-row substreams keep row prefixes identical across matrices of
    different widths sampled from the same spec.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    rows = _exponential_rows(spec, a, b) if spec.kind == EXPONENTIAL else _geometric_rows(spec, a, b)
    w = np.stack(list(rows))
    return WeightMatrix(len(a), len(b), w, a, b, spec.kind)


def sample_boundary_weights(spec: ModelSpec, m: int, n: int) -> np.ndarray:
    """Extended (m+1)x(n+1) weight array for the stationary model, index from 0.

    W[0,0] = 0; W[i,0] has rate a_i+z (exponential) or parameter a_i/z
    (geometric); W[0,j] has rate b_j-z or parameter b_j z; the interior block
    matches sample_weights on the same spec and prefixes.
    """
    if spec.boundary_z is None:
        raise ValueError("spec has no boundary parameter z")
    z = spec.boundary_z
    a, b = sample_sequences(spec, m, n)
    interior = sample_weights(spec, a, b).w
    if spec.kind == EXPONENTIAL:
        ext = np.zeros((m + 1, n + 1))
        u_row = spec.stream(3).random(m)
        u_col = spec.stream(4).random(n)
        ext[1:, 0] = -np.log1p(-u_row) / (a + z)
        ext[0, 1:] = -np.log1p(-u_col) / (b - z)
        ext[1:, 1:] = interior
    else:
        pr = a / z
        pc = b * z
        if np.any(pr >= 1.0) or np.any(pc >= 1.0):
            raise ValueError("boundary z out of range for the sampled parameters")
        ext = np.zeros((m + 1, n + 1), dtype=np.int64)
        u_row = spec.stream(3).random(m)
        u_col = spec.stream(4).random(n)
        ext[1:, 0] = np.floor(np.log1p(-u_row) / np.log(pr)).astype(np.int64)
        ext[0, 1:] = np.floor(np.log1p(-u_col) / np.log(pc)).astype(np.int64)
        ext[1:, 1:] = interior
    return ext


# ---------------------------------------------------------------------------
# JSON-style config document


def law_to_config(law: ParamLaw) -> dict:
    if isinstance(law, PointMass):
        return {"point": law.v}
    if isinstance(law, Uniform):
        return {"uniform": [law.lo, law.hi]}
    if isinstance(law, PowerDensity):
        return {"power": {"p": law.p, "lo": law.lo, "hi": law.hi, "shifted": law.shifted}}
    if isinstance(law, Reciprocal):
        return {"reciprocal": [law.lo, law.hi]}
    if isinstance(law, Atoms):
        return {"atoms": [[v, w] for v, w in law.atoms]}
    raise TypeError(f"cannot serialize law of type {type(law).__name__}")


def law_from_config(doc: dict) -> ParamLaw:
    if not isinstance(doc, dict) or len(doc) != 1:
        raise ValueError("a law document must have exactly one key")
    (key, value), = doc.items()
    if key == "point":
        return PointMass(float(value))
    if key == "uniform":
        lo, hi = value
        return Uniform(float(lo), float(hi))
    if key == "power":
        return PowerDensity(
            float(value["lo"]),
            float(value["hi"]),
            p=float(value["p"]),
            shifted=bool(value.get("shifted", True)),
        )
    if key == "reciprocal":
        lo, hi = value
        return Reciprocal(float(lo), float(hi))
    if key == "atoms":
        return Atoms([(v, w) for v, w in value])
    raise ValueError(f"unknown law variant {key!r}")


def spec_to_config(spec: ModelSpec) -> dict:
    return {
        "kind": spec.kind,
        "alpha": law_to_config(spec.alpha),
        "beta": law_to_config(spec.beta),
        "seed": spec.seed,
        "z": spec.boundary_z,
    }


def spec_from_config(doc: dict) -> ModelSpec:
    known = {"kind", "alpha", "beta", "seed", "z", "allow_degenerate"}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown model config keys: {sorted(unknown)}")
    return ModelSpec(
        kind=doc["kind"],
        alpha=law_from_config(doc["alpha"]),
        beta=law_from_config(doc["beta"]),
        seed=int(doc.get("seed", 0)),
        boundary_z=None if doc.get("z") is None else float(doc["z"]),
        allow_degenerate=bool(doc.get("allow_degenerate", False)),
    )


def spec_to_json(spec: ModelSpec) -> str:
    return json.dumps(spec_to_config(spec), sort_keys=True)


def spec_from_json(text: str) -> ModelSpec:
    return spec_from_config(json.loads(text))
