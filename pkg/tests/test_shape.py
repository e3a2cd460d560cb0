import math

import numpy as np
import pytest

from cornergrowth import lpp
from cornergrowth import model as M
from cornergrowth import shape as S

UNIFORM = M.Uniform(0.5, 1.5)
FIG_ALPHA = M.PowerDensity(0.0, 1.0, p=2.0)  # density 3a^2 on [0,1]
FIG_BETA = M.PowerDensity(1.0, 2.0, p=3.0)  # density 4(b-1)^3 on [1,2]


def test_point_mass_recovers_parabola():
    for lam in (0.5, 1.0, 2.0):
        for s, t in ((1, 1), (2, 0.5), (0.3, 4)):
            ev = S.shape_exponential(M.PointMass(lam / 2), M.PointMass(lam / 2), s, t)
            assert abs(ev.g - (math.sqrt(s) + math.sqrt(t)) ** 2 / lam) < 1e-9


def test_uniform_value_two_log_three():
    ev = S.shape_exponential(UNIFORM, UNIFORM, 1, 1)
    assert abs(ev.g - 2 * math.log(3)) < 1e-12
    assert ev.regime is S.Regime.STRICTLY_CONCAVE


def test_figure_critical_values():
    ev = S.shape_exponential(FIG_ALPHA, FIG_BETA, 1, 1)
    assert abs(ev.c1 - 0.105922) < 1e-5
    assert abs(ev.c2 - 5.863092) < 1e-5


def test_closed_uniform_matches_minimizer():
    rng = np.random.default_rng(0)
    for lam, l, m_ in [(1, 1, 1), (1, 0, 1), (2, 0.5, 1.5), (0.7, 0.2, 0.0)]:
        alpha = M.Uniform(lam / 2, lam / 2 + l) if l else M.PointMass(lam / 2)
        beta = M.Uniform(lam / 2, lam / 2 + m_) if m_ else M.PointMass(lam / 2)
        for _ in range(6):
            s, t = rng.uniform(0.1, 10, 2)
            num = S.shape_exponential(alpha, beta, s, t).g
            assert abs(num - S.shape_exponential_closed_uniform(lam, l, m_, s, t)) < 1e-9


def test_closed_uniform_point_mass_limit():
    assert S.shape_exponential_closed_uniform(2.0, 0, 0, 3, 5) == pytest.approx(
        (math.sqrt(3) + math.sqrt(5)) ** 2 / 2.0, abs=1e-14
    )


def test_geometric_point_mass_formulas():
    q = 0.25
    rq = math.sqrt(q)
    for r in (0.5, 1.0, 2.0):
        ev = S.shape_geometric(M.PointMass(rq), M.PointMass(rq), r, 1)
        gam = (q * (1 + r) + 2 * math.sqrt(q * r)) / (1 - q)
        sig = (
            (1 / (1 - q)) * (q / r) ** (1 / 6)
            * (math.sqrt(q) + math.sqrt(r)) ** (2 / 3)
            * (1 + math.sqrt(q * r)) ** (2 / 3)
        )
        assert abs(ev.g - gam) < 1e-9
        assert abs(ev.sigma - sig) < 1e-9


def test_geometric_diagonal_identity():
    law = M.Uniform(0.2, 0.45)
    for s in (0.5, 1.0, 3.0):
        ev = S.shape_geometric(law, law, s, s)
        assert abs(ev.g - 2 * s * law.expect(lambda x: x / (1 - x))) < 1e-10


def test_exponential_diagonal_identity():
    law = M.Uniform(0.5, 1.5)
    for s in (0.5, 2.0):
        ev = S.shape_exponential(law, law, s, s)
        assert abs(ev.g - 2 * s * law.expect(lambda x: 1.0 / x)) < 1e-10


def test_closed_reciprocal_symmetry_and_oracle():
    # symmetric l = m, s = t: the two log terms coincide
    g = S.shape_geometric_closed_reciprocal(0.5, 0.2, 0.2, 1.3, 1.3)
    half = S.shape_geometric_closed_reciprocal(0.5, 0.2, 0.2, 1.3, 1.3) / 2
    assert abs(g - 2 * half) < 1e-15
    rng = np.random.default_rng(1)
    for _ in range(8):
        q = rng.uniform(0.3, 0.8)
        rq = math.sqrt(q)
        l = rng.uniform(0.05, 0.9 * rq)
        m_ = rng.uniform(0.05, 0.9 * rq)
        s, t = rng.uniform(0.2, 4, 2)
        num = S.shape_geometric(M.Reciprocal(rq - l, rq), M.Reciprocal(rq - m_, rq), s, t).g
        assert abs(num - S.shape_geometric_closed_reciprocal(q, l, m_, s, t)) < 1e-9


def test_closed_reciprocal_homogeneous_limit():
    # l = m -> 0 approaches the homogeneous value q(s+t)/(1-q) + 2 sqrt(q s t)/(1-q)
    q, s, t = 0.25, 1.0, 2.0
    target = (q * (s + t) + 2 * math.sqrt(q * s * t)) / (1 - q)
    prev_gap = math.inf
    for l in (0.2, 0.05, 0.01, 0.002):
        gap = abs(S.shape_geometric_closed_reciprocal(q, l, l, s, t) - target)
        assert gap < prev_gap
        assert gap < 10.0 * l  # first-order in the interval width
        prev_gap = gap


def test_degenerate_branches():
    ev = S.shape_exponential(
        M.PowerDensity(0.0, 1.0, p=1.0), M.PowerDensity(0.0, 1.0, p=1.0), 1, 1
    )
    assert ev.regime is S.Regime.DEGENERATE
    assert abs(ev.g - 4.0) < 1e-12  # E[1/a] = 2 for density 2a on [0,1]
    ev = S.shape_exponential(M.Uniform(0.0, 1.0), M.Uniform(0.0, 1.0), 1, 1)
    assert ev.regime is S.Regime.DEGENERATE and math.isinf(ev.g)


def test_linear_regimes_of_figure_law():
    ev = S.shape_exponential(FIG_ALPHA, FIG_BETA, 1, 1)
    c1, c2 = ev.c1, ev.c2
    low = S.shape_exponential(FIG_ALPHA, FIG_BETA, 0.5 * c1, 1.0)
    assert low.regime is S.Regime.LINEAR_LOW
    expected = 0.5 * c1 * FIG_ALPHA.inv_moment(0.0, 1) + FIG_BETA.inv_moment(0.0, 1)
    assert abs(low.g - expected) < 1e-9
    high = S.shape_exponential(FIG_ALPHA, FIG_BETA, 2 * c2, 1.0)
    assert high.regime is S.Regime.LINEAR_HIGH
    # linearity along a segment inside the low cone
    g1 = S.shape_exponential(FIG_ALPHA, FIG_BETA, 0.2 * c1, 1.0).g
    g2 = S.shape_exponential(FIG_ALPHA, FIG_BETA, 0.8 * c1, 1.0).g
    gm = S.shape_exponential(FIG_ALPHA, FIG_BETA, 0.5 * c1, 1.0).g
    assert abs(gm - 0.5 * (g1 + g2)) < 1e-9


def test_symmetry_alpha_beta_swap():
    rng = np.random.default_rng(2)
    for _ in range(5):
        s, t = rng.uniform(0.2, 5, 2)
        g1 = S.shape_exponential(UNIFORM, M.PointMass(0.7), s, t).g
        g2 = S.shape_exponential(M.PointMass(0.7), UNIFORM, t, s).g
        assert abs(g1 - g2) < 1e-10
        ga = S.shape_geometric(M.Uniform(0.2, 0.4), M.PointMass(0.3), s, t).g
        gb = S.shape_geometric(M.PointMass(0.3), M.Uniform(0.2, 0.4), t, s).g
        assert abs(ga - gb) < 1e-10


def test_homogeneity():
    for c in (0.5, 2.0, 7.0):
        base = S.shape_exponential(UNIFORM, UNIFORM, 1.3, 0.8).g
        scaled = S.shape_exponential(UNIFORM, UNIFORM, c * 1.3, c * 0.8).g
        assert abs(scaled - c * base) < 1e-10 * max(1, c)


def test_midpoint_concavity_strict():
    rng = np.random.default_rng(3)
    alpha, beta = M.Uniform(0.2, 0.4), M.Uniform(0.25, 0.45)
    for _ in range(10):
        s1, t1, s2, t2 = rng.uniform(0.3, 3, 4)
        if abs(s1 * t2 - s2 * t1) < 1e-3:
            continue
        gm = S.shape_geometric(alpha, beta, 0.5 * (s1 + s2), 0.5 * (t1 + t2)).g
        g1 = S.shape_geometric(alpha, beta, s1, t1).g
        g2 = S.shape_geometric(alpha, beta, s2, t2).g
        assert gm > 0.5 * (g1 + g2)


def test_minimizer_stationarity():
    ev = S.shape_geometric(M.Uniform(0.2, 0.4), M.Uniform(0.25, 0.45), 1.7, 1.0)
    d = M.transform_Ga(M.Uniform(0.2, 0.4), ev.zeta, 1) * 1.7 + M.transform_Gb(
        M.Uniform(0.25, 0.45), ev.zeta, 1
    )
    assert abs(d) < 1e-10 * max(1.0, abs(ev.g))


def test_stationary_upper_bound_mc():
    # G(ns, nt)/n <= g_z(s, t) + 3 stderr for the stationary comparison law
    alpha = beta = M.PointMass(0.5)
    z = 1.0
    s = t = 1.0
    n = 48
    spec = M.ModelSpec(M.GEOMETRIC, alpha, beta, seed=12)
    g = lpp.last_passage_ensemble(spec, n, n, 2000) / n
    gz = M.transform_Ga(alpha, z) * s + M.transform_Gb(beta, z) * t
    assert g.mean() <= gz + 3 * g.std() / math.sqrt(len(g))


# -- empirical quantities ------------------------------------------------------


def test_empirical_matches_point_mass():
    rq = 0.5
    es = S.empirical_shape(np.full(9, rq), np.full(9, rq))
    ev = S.shape_geometric(M.PointMass(rq), M.PointMass(rq), 1, 1)
    assert abs(es.gamma_mn - ev.g) < 1e-12
    assert abs(es.zeta_mn - ev.zeta) < 1e-9
    assert abs(es.sigma_mn - ev.sigma) < 1e-9


def test_empirical_converges_to_population():
    alpha = M.Uniform(0.2, 0.4)
    beta = M.Uniform(0.25, 0.45)
    spec = M.ModelSpec(M.GEOMETRIC, alpha, beta, seed=5)
    ev = S.shape_geometric(alpha, beta, 1, 1)
    gaps = []
    for n in (100, 1000, 10000):
        a, b = M.sample_sequences(spec, n, n)
        es = S.empirical_shape(a, b)
        gaps.append(abs(es.zeta_mn - ev.zeta))
    assert gaps[2] < gaps[0]
    assert gaps[2] < 5e-3


def test_duality_identities():
    rng = np.random.default_rng(7)
    a = rng.uniform(0.2, 0.45, size=9)
    b = rng.uniform(0.1, 0.5, size=6)
    e1 = S.empirical_shape(a, b)
    e2 = S.empirical_shape(b, a)
    assert abs(e1.gamma_mn - (9 / 6) * e2.gamma_mn) < 1e-10
    assert abs(e1.zeta_mn * e2.zeta_mn - 1.0) < 1e-10
    assert abs(e1.sigma_mn - (9 / 6) ** (1 / 3) * e2.sigma_mn) < 1e-10


def test_empirical_zeta_strictly_interior():
    rng = np.random.default_rng(8)
    a = rng.uniform(0.2, 0.5, 12)
    b = rng.uniform(0.2, 0.5, 12)
    es = S.empirical_shape(a, b)
    assert np.max(a) < es.zeta_mn < 1.0 / np.max(b)


def test_scaling_index_and_shift_identity():
    es = S.empirical_shape(np.full(27, 0.5), np.full(27, 0.5))
    assert S.scaling_index(es, 0.0) == math.floor(27 * es.gamma_mn)
    rng = np.random.default_rng(9)
    n13sig = 27 ** (1 / 3) * es.sigma_mn
    for _ in range(100):
        s = float(rng.uniform(-4, 4))
        l = int(rng.integers(-10, 11))
        assert S.scaling_index(es, s) + l == S.scaling_index(es, s + l / n13sig)
    # |p'(s) - s| <= 1/(n^{1/3} sigma)
    for s in rng.uniform(-4, 4, 50):
        pk = S.scaling_index(es, s)
        pprime = (pk - 27 * es.gamma_mn) / n13sig
        assert abs(pprime - s) <= 1.0 / n13sig + 1e-12
