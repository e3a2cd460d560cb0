"""Last-passage computation, RSK, the stationary boundary model and the
three-variable queueing map.

The last-passage time over up-right lattice paths satisfies

    G(i, j) = max(G(i-1, j), G(i, j-1)) + W(i, j),   G(i, 0) = G(0, j) = 0.

``lpp_dp`` evaluates the recursion row by row with a prefix-sum/cummax scan;
``lpp_bruteforce`` maximizes over explicitly enumerated paths and serves as
an oracle on small grids.  The RSK correspondence maps a nonnegative integer
matrix to a pair of semi-standard Young tableaux whose common shape has
largest part equal to the last-passage value; both directions are
implemented so the bijection can be tested directly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .model import EXPONENTIAL, GEOMETRIC, ModelSpec, WeightMatrix, sample_sequences

__all__ = [
    "LastPassageField",
    "Tableau",
    "IncrementField",
    "lpp_dp",
    "lpp_bruteforce",
    "rsk",
    "rsk_inverse",
    "stationary_field",
    "increments",
    "burke_map",
    "growth_set",
    "staircase_boundary",
    "growth_boundary_profile",
    "last_passage_ensemble",
    "last_passage_ensemble_params",
]

ENUMERATION_GUARD = 22  # C(20, 10) ~ 1.8e5 paths


@dataclass
class LastPassageField:
    """G on the (m+1) x (n+1) index box; G[i, j] is the site (i, j) value.

    Row and column 0 hold the source convention: zeros for the interior
    model, boundary partial sums for the stationary model.
    """

    G: np.ndarray
    stationary: bool = False

    @property
    def m(self):
        return self.G.shape[0] - 1

    @property
    def n(self):
        return self.G.shape[1] - 1


@dataclass
class IncrementField:
    """Horizontal/vertical increments of a stationary last-passage field.

    I[i, j] = G(i, j) - G(i-1, j) for i >= 1 (shape (m, n+1));
    J[i, j] = G(i, j) - G(i, j-1) for j >= 1 (shape (m+1, n)).
    """

    I: np.ndarray
    J: np.ndarray


def _dp_rows(weight_rows, boundary_col, boundary_row):
    """Shared scan: G(i,j) = max(G(i-1,j), G(i,j-1)) + W(i,j) row by row.

    Within a row, G(i, j) = S_j + max_{0<=k<=j} A_k with S the in-row weight
    prefix sums, A_0 = G(i, 0) and A_k = G(i-1, k) - S_{k-1}.
    """
    prev = np.asarray(boundary_row, dtype=float)
    n = prev.shape[0] - 1
    out = [prev]
    for i, w in enumerate(weight_rows, start=1):
        s = np.cumsum(w)
        cand = np.empty(n + 1)
        cand[0] = boundary_col[i]
        cand[1:] = prev[1:] - np.concatenate(([0.0], s[:-1]))
        row = np.empty(n + 1)
        row[0] = boundary_col[i]
        row[1:] = s + np.maximum.accumulate(cand)[1:]
        out.append(row)
        prev = row
    return np.stack(out)


def lpp_dp(W: WeightMatrix | np.ndarray) -> LastPassageField:
    """Last-passage field of an m x n weight array, zero boundary."""
    w = W.w if isinstance(W, WeightMatrix) else np.asarray(W)
    m, n = w.shape
    G = _dp_rows(w, np.zeros(m + 1), np.zeros(n + 1))
    if np.issubdtype(w.dtype, np.integer):
        G = np.rint(G).astype(np.int64).astype(float)
    return LastPassageField(G)


def lpp_bruteforce(W: WeightMatrix | np.ndarray) -> float:
    """Maximum path weight by enumeration of all up-right paths."""
    w = W.w if isinstance(W, WeightMatrix) else np.asarray(W)
    m, n = w.shape
    if m + n > ENUMERATION_GUARD:
        raise ValueError("grid too large for enumeration")
    best = -math.inf
    steps = m + n - 2
    for rights in itertools.combinations(range(steps), m - 1):
        i = j = 0
        total = w[0, 0]
        rset = set(rights)
        for k in range(steps):
            if k in rset:
                i += 1
            else:
                j += 1
            total += w[i, j]
        best = max(best, total)
    return float(best)


def stationary_field(Wext: np.ndarray) -> LastPassageField:
    """Field with boundary sources: G(i,0), G(0,j) are partial sums of the
    extended weight array's axis entries, interior recursion unchanged."""
    Wext = np.asarray(Wext)
    m, n = Wext.shape[0] - 1, Wext.shape[1] - 1
    boundary_col = np.concatenate(([0.0], np.cumsum(Wext[1:, 0])))
    boundary_row = np.concatenate(([0.0], np.cumsum(Wext[0, 1:])))
    G = _dp_rows(Wext[1:, 1:], boundary_col, boundary_row)
    if np.issubdtype(Wext.dtype, np.integer):
        G = np.rint(G).astype(np.int64).astype(float)
    return LastPassageField(G, stationary=True)


def increments(fld: LastPassageField) -> IncrementField:
    G = fld.G
    return IncrementField(I=G[1:, :] - G[:-1, :], J=G[:, 1:] - G[:, :-1])


def burke_map(x, y, z):
    """(x, y, z) -> (x - x^y + z, y - x^y + z, x^y); an involution on R^3."""
    x = np.asarray(x)
    y = np.asarray(y)
    z = np.asarray(z)
    m = np.minimum(x, y)
    return x - m + z, y - m + z, m


# ---------------------------------------------------------------------------
# growth set


def growth_set(fld: LastPassageField, t: float):
    """Sites (i, j), 1-based, with G(i, j) <= t; down-left closed."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    ii, jj = np.nonzero(fld.G[1:, 1:] <= t)
    return {(int(i) + 1, int(j) + 1) for i, j in zip(ii, jj)}


def staircase_boundary(fld: LastPassageField, t: float):
    """Staircase vertices separating the occupied set from its complement.

    Returns the ordered vertex list [(0, J_1), (1, J_1), (1, J_2), ...] with
    J_i = max{j : G(i, j) <= t} (0 when the row is empty), ending on the
    i-axis.
    """
    G = fld.G[1:, 1:]
    profile = (G <= t).sum(axis=1)
    return _staircase_from_profile(profile)


def _staircase_from_profile(profile):
    verts = []
    prev = None
    for i, j in enumerate(profile):
        j = int(j)
        if j == 0:
            break
        if prev is None:
            verts.append((i, j))
        elif j != prev:
            verts.append((i, prev))
            verts.append((i, j))
        prev = j
        verts_end = (i + 1, j)
    if prev is not None:
        verts.append(verts_end)
        verts.append((verts_end[0], 0))
    return verts


def growth_boundary_profile(spec: ModelSpec, t: float, max_rows: int | None = None):
    """Row profile J_i = max{j : G(i, j) <= t} computed without storing G.

    Rows are generated from the spec's per-row substreams, so the profile is
    reproducible and consistent with ``sample_weights`` on the same spec.
    Since G is nondecreasing in i, the working width shrinks as rows are
    consumed; iteration stops at the first empty row.
    """
    if spec.kind != EXPONENTIAL:
        raise NotImplementedError("profile simulation is for the exponential model")
    rng_a = spec.stream(0)
    rng_b = spec.stream(1)

    # width of row 1: extend the column-parameter prefix until the running
    # first-row passage time exceeds t
    b = np.empty(0)
    row1 = np.empty(0)
    a1 = None
    width = 0
    total = 0.0
    chunk = 1024
    while True:
        b_new = spec.beta.sample(rng_b, chunk)
        b = np.concatenate([b, b_new])
        if a1 is None:
            a1 = spec.alpha.sample(rng_a, 1)[0]
        u = spec.stream(2, 0).random(len(b))  # row stream replayed on the grown prefix
        row1 = -np.log1p(-u) / (a1 + b)
        c = np.cumsum(row1)
        if c[-1] > t:
            width = int(np.searchsorted(c, t, side="right"))
            break
    if width == 0:
        return np.zeros(0, dtype=int)

    b = b[:width]
    prev = np.concatenate(([0.0], np.cumsum(row1[:width])))
    profile = [int(width)]
    i = 1
    while True:
        if max_rows is not None and i >= max_rows:
            break
        ai = spec.alpha.sample(rng_a, 1)[0]
        w = len(prev) - 1
        if w == 0:
            break
        u = spec.stream(2, i).random(w)
        row_w = -np.log1p(-u) / (ai + b[:w])
        s = np.cumsum(row_w)
        cand = np.concatenate(([0.0], prev[1:] - np.concatenate(([0.0], s[:-1]))))
        row = np.concatenate(([0.0], s + np.maximum.accumulate(cand)[1:]))
        j_i = int(np.searchsorted(row[1:], t, side="right"))
        if j_i == 0:
            break
        profile.append(j_i)
        prev = row[: j_i + 1]
        b = b[:j_i]
        i += 1
    return np.asarray(profile, dtype=int)


def last_passage_ensemble(spec: ModelSpec, m: int, n: int, reps: int) -> np.ndarray:
    """G(m, n) over ``reps`` independent replicas, vectorized over replicas.

    Weight rows are drawn from dedicated ensemble substreams (one per row),
    deterministic given (spec, m, n, reps).
    """
    a, b = sample_sequences(spec, m, n)
    streams = (spec.stream(5, i) for i in range(m))
    return _ensemble_scan(a, b, spec.kind, reps, streams)


def last_passage_ensemble_params(a, b, kind, reps, seed) -> np.ndarray:
    """Like ``last_passage_ensemble`` but conditional on explicit prefixes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    streams = (
        np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(5, i))))
        for i in range(len(a))
    )
    return _ensemble_scan(a, b, kind, reps, streams)


def _ensemble_scan(a, b, kind, reps, streams):
    n = len(b)
    prev = np.zeros((reps, n))
    for i, rng in enumerate(streams):
        u = rng.random((reps, n))
        if kind == EXPONENTIAL:
            w = -np.log1p(-u) / (a[i] + b)[None, :]
        else:
            p = a[i] * b
            if np.any(p >= 1.0):
                raise ValueError("invalid parameter product: a_i * b_j must be < 1")
            w = np.floor(np.log1p(-u) / np.log(p)[None, :])
        s = np.cumsum(w, axis=1)
        cand = prev.copy()
        cand[:, 1:] -= s[:, :-1]
        prev = s + np.maximum.accumulate(np.maximum(cand, 0.0), axis=1)
    return prev[:, -1]


# ---------------------------------------------------------------------------
# RSK correspondence


@dataclass
class Tableau:
    """Semi-standard Young tableau stored as rows of nondecreasing entries."""

    rows: list = field(default_factory=list)

    @property
    def shape(self):
        return tuple(len(r) for r in self.rows)

    @property
    def size(self):
        return sum(len(r) for r in self.rows)

    def type_counts(self, upto: int | None = None):
        """Occurrences of each entry value 1..max (weak composition)."""
        top = upto or max((max(r) for r in self.rows if r), default=0)
        counts = [0] * top
        for r in self.rows:
            for v in r:
                counts[v - 1] += 1
        return tuple(counts)

    def is_valid(self):
        for r in self.rows:
            if any(r[k] > r[k + 1] for k in range(len(r) - 1)):
                return False
        for ri in range(1, len(self.rows)):
            upper, lower = self.rows[ri], self.rows[ri - 1]
            if len(upper) > len(lower):
                return False
            if any(upper[k] <= lower[k] for k in range(len(upper))):
                return False
        return True


def _row_insert(tab: Tableau, value: int):
    """Classical row bumping; returns (row_index, col_index) of the new box."""
    r = 0
    while True:
        if r == len(tab.rows):
            tab.rows.append([value])
            return r, 0
        row = tab.rows[r]
        # leftmost entry strictly greater than value gets bumped
        k = _bisect_gt(row, value)
        if k == len(row):
            row.append(value)
            return r, k
        row[k], value = value, row[k]
        r += 1


def _bisect_gt(row, value):
    lo, hi = 0, len(row)
    while lo < hi:
        mid = (lo + hi) // 2
        if row[mid] > value:
            hi = mid
        else:
            lo = mid + 1
    return lo


def rsk(A: np.ndarray):
    """RSK image (P, Q) of a nonnegative integer matrix.

    The matrix is read as the lexicographic two-line word with (i, j)
    repeated A[i-1, j-1] times; the j's are row-inserted into P and the i's
    recorded in Q.  The common shape's largest part equals the last-passage
    value of A.
    """
    A = np.asarray(A)
    if np.any(A < 0) or not np.issubdtype(A.dtype, np.integer):
        raise ValueError("RSK needs a nonnegative integer matrix")
    P, Q = Tableau(), Tableau()
    m, n = A.shape
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            for _ in range(int(A[i - 1, j - 1])):
                r, _c = _row_insert(P, j)
                if r == len(Q.rows):
                    Q.rows.append([])
                Q.rows[r].append(i)
    return P, Q


def rsk_inverse(P: Tableau, Q: Tableau, m: int | None = None, n: int | None = None):
    """Matrix A with rsk(A) = (P, Q); inverts the correspondence.

    Among boxes holding the current maximum of Q the rightmost was inserted
    last, and reverse bumping replaces the rightmost entry strictly smaller
    than the travelling value in each row above.
    """
    if P.shape != Q.shape:
        raise ValueError("tableaux must share a shape")
    p_rows = [list(r) for r in P.rows]
    q_rows = [list(r) for r in Q.rows]
    word = []
    while any(q_rows):
        i_max = max(r[-1] for r in q_rows if r)
        cand = [
            (len(r) - 1, ri)
            for ri, r in enumerate(q_rows)
            if r and r[-1] == i_max
        ]
        col, row = max(cand)  # rightmost box carrying the maximal entry
        q_rows[row].pop()
        value = p_rows[row].pop()
        for r in range(row - 1, -1, -1):
            k = _bisect_gt(p_rows[r], value - 1) - 1  # rightmost entry < value
            p_rows[r][k], value = value, p_rows[r][k]
        word.append((i_max, value))
        while q_rows and not q_rows[-1]:
            q_rows.pop()
            p_rows.pop()
    word.reverse()
    m = m or max((i for i, _ in word), default=1)
    n = n or max((j for _, j in word), default=1)
    A = np.zeros((m, n), dtype=np.int64)
    for i, j in word:
        A[i - 1, j - 1] += 1
    return A
