import math

import numpy as np
import pytest

from cornergrowth import airy as A
from cornergrowth import descent as D
from cornergrowth import exactdist as X
from cornergrowth import shape as S


def _af(seed=3, m=8, n=8):
    rng = np.random.default_rng(seed)
    a = np.sort(rng.uniform(0.15, 0.5, m))
    b = np.sort(rng.uniform(0.1, 0.45, n))
    return D.ActionFunction(a, b)


def test_action_identity_z_fprime():
    af = _af()
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1, 1, 100) + 1j * rng.uniform(0.05, 1.0, 100)
    for z in pts:
        lhs = z * af.fp(z)
        rhs = -S.empirical_g(af.a, af.b, z) + af.gamma
        assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(rhs))


def test_saddle_is_double_zero():
    af = _af()
    assert abs(af.fp(af.zeta + 0j)) < 1e-10
    assert abs(af.fpp(af.zeta + 0j)) < 1e-10
    assert af.fppp_at_saddle() < 0


def test_locate_zeros_count_and_signs():
    af = _af(seed=11, m=3, n=2)
    zeros = D.locate_zeros(af)
    mu = len(np.unique(af.a))
    nu = len(np.unique(af.b))
    assert len(zeros) == mu + nu  # saddle counted twice
    for z in zeros:
        assert abs(af.fp(z + 0j)) < 1e-8
    # simple zeros show a sign change of f'
    simple = [z for z in zeros if abs(z - af.zeta) > 1e-12]
    for z in simple:
        left = np.real(af.fp(z - 1e-6 + 0j))
        right = np.real(af.fp(z + 1e-6 + 0j))
        assert left * right < 0


def test_single_gapless_case_only_saddle():
    af = D.ActionFunction(np.array([0.4]), np.array([0.3]))
    zeros = D.locate_zeros(af)
    assert len(zeros) == 2
    assert zeros[0] == zeros[1] == af.zeta


def test_action_numerator_polynomial_degree():
    # n z f'(z) * denominators is a polynomial of degree (#distinct a) + (#distinct b)
    af = _af(seed=5, m=4, n=3)
    av = np.unique(af.a)
    bv = np.unique(af.b)
    P = np.polynomial.Polynomial([af.gamma + 1.0])
    for x in av:
        P *= np.polynomial.Polynomial([-x, 1.0])
    for x in bv:
        P *= np.polynomial.Polynomial([1.0, -x])
    # subtract the pole expansions of the remaining terms
    for x in av:
        term = np.polynomial.Polynomial([np.sum(af.a == x) * x / af.n])
        for y in av:
            if y != x:
                term *= np.polynomial.Polynomial([-y, 1.0])
        for y in bv:
            term *= np.polynomial.Polynomial([1.0, -y])
        P -= term
    for x in bv:
        term = np.polynomial.Polynomial([np.sum(af.b == x) / af.n])
        for y in av:
            term *= np.polynomial.Polynomial([-y, 1.0])
        for y in bv:
            if y != x:
                term *= np.polynomial.Polynomial([1.0, -y])
        P -= term
    coeffs = P.coef
    assert len(coeffs) - 1 == len(av) + len(bv)
    assert abs(coeffs[-1]) > 1e-12
    assert abs(P(0.0)) > 1e-12
    # it must vanish at every zero of f'
    for z in D.locate_zeros(af):
        assert abs(P(z)) < 1e-8 * max(1.0, abs(coeffs[-1]))


def test_trace_phi_stationary_and_confined():
    af = _af()
    phi = D.trace_phi(af)
    assert phi.status is D.TraceStatus.REACHED_ORIGIN
    v = af.v(phi.points[1:])
    assert np.max(np.abs(v)) <= 1e-8
    u = af.u(phi.points)
    assert np.all(np.diff(u) < 1e-12)
    inner = phi.points[1:]
    assert np.all(inner.imag > -1e-15)
    assert np.all(np.abs(inner) < af.zeta * (1 + 1e-12))


def test_trace_initial_direction():
    af = _af()
    phi = D.trace_phi(af)
    d = (phi.points[1] - phi.points[0]) / abs(phi.points[1] - phi.points[0])
    assert abs(d - np.exp(2j * np.pi / 3)) < 1e-6
    psi = D.trace_phi(af, direction="ascent")
    d = (psi.points[1] - psi.points[0]) / abs(psi.points[1] - psi.points[0])
    assert abs(d - np.exp(1j * np.pi / 3)) < 1e-6


def test_trace_ascent_exits_outward():
    af = _af()
    psi = D.trace_phi(af, direction="ascent")
    assert psi.status is D.TraceStatus.EXITED_DISK
    assert abs(psi.points[-1]) >= 3.0 / np.max(af.b) * (1 - 1e-9)
    u = af.u(psi.points)
    assert np.all(np.diff(u) > -1e-12)


def test_exit_time_bracket():
    af = _af()
    phi = D.trace_phi(af)
    _, _, eps0 = D._saddle_constants(af)
    C = 64.0 / eps0
    for eps in (eps0 / 256, eps0 / 1024):
        tau = phi.exit_time(af.zeta, eps)
        assert eps * (1 - C * eps) <= tau <= eps * (1 + 2 * C * eps)


def test_confinement_after_exit():
    # past the saddle neighborhood the curve stays inside |z| <= c zeta, c < 1
    af = _af()
    phi = D.trace_phi(af)
    _, _, eps0 = D._saddle_constants(af)
    eps = eps0 / 256
    tau = phi.exit_time(af.zeta, eps)
    after = phi.points[phi.arclen >= tau]
    assert np.max(np.abs(after)) < af.zeta * (1 - eps / (8 * af.zeta))


def test_gamma_closed_and_symmetric():
    af = _af()
    gam = D.build_gamma(D.trace_phi(af))
    assert abs(gam[0] - gam[-1]) < 1e-10
    # conjugation symmetry
    assert np.allclose(np.conj(gam[::-1]), gam, atol=1e-12)


def test_gamma_winding_numbers():
    af = _af(seed=7, m=4, n=4)
    gam = D.build_gamma(D.trace_phi(af))
    for pole in np.concatenate([af.a, 1.0 / af.b]):
        segs = np.diff(gam)
        mids = 0.5 * (gam[:-1] + gam[1:])
        wind = np.sum(segs / (mids - pole)) / (2j * np.pi)
        expected = 1.0 if pole in af.a else 0.0
        assert abs(wind.real - expected) < 1e-2
        assert abs(wind.imag) < 1e-2


def test_build_gamma_prime_geometry():
    af = _af()
    phi = D.trace_phi(af)
    delta = 0.1 * af.zeta
    dc = D.build_gamma_prime(phi, delta)
    assert abs(abs(dc.gamma_prime[-1]) - delta) < 1e-9
    assert np.min(np.abs(dc.gamma_prime[:-1])) >= delta - 1e-12
    assert np.allclose(np.abs(dc.arc), delta, atol=1e-12)
    assert np.any(dc.arc.real < 0)  # passes through -delta
    closed = dc.closed
    assert abs(closed[0] - closed[-1]) < 1e-10


def test_contour_equivalence_8x8():
    af = _af()
    ctx = X.KernelContext(af.a, af.b)
    phi = D.trace_phi(af)
    gam = D.build_gamma(phi)
    closed = D.build_gamma_prime(phi, 0.1 * af.zeta).closed
    n = af.n
    for x in (int(n * af.gamma), int(n * af.gamma + n ** (1 / 3)), 3):
        ref = X.contour_I(ctx, x)
        v1 = D.contour_I_descent(af.a, af.b, x, gam)
        v2 = D.contour_I_descent(af.a, af.b, x, closed)
        assert abs(v1 - ref) <= 1e-8 * abs(ref)
        assert abs(v2 - ref) <= 1e-8 * abs(ref)


def test_integrand_dominated_away_from_saddle():
    # max |F| over Gamma outside Disc(zeta, eps) <= |F(zeta)| e^{-c n}
    n = 24
    a = np.full(n, 0.5)
    b = np.full(n, 0.5)
    af = D.ActionFunction(a, b)
    phi = D.trace_phi(af)
    x = int(n * af.gamma)
    eps = 0.15
    far = phi.points[np.abs(phi.points - af.zeta) > eps]
    far = far[np.abs(far) > 1e-6]
    logF = lambda z: np.real(D._log_F(a, b, x, np.asarray(z, complex)))
    log_ratio = np.max(logF(far)) - logF(np.array([af.zeta + 0j]))[0]
    assert log_ratio < -1e-3 * n  # exponentially dominated


def test_scaled_integral_approximates_airy():
    for n in (32, 64):
        a = np.full(n, 0.5)
        b = np.full(n, 0.5)
        af = D.ActionFunction(a, b)
        ctx = X.KernelContext(a, b)
        s = 0.5
        pk = math.floor(n * af.gamma + n ** (1 / 3) * af.sigma * s)
        pkp = (pk - n * af.gamma) / (n ** (1 / 3) * af.sigma)
        I = X.contour_I(ctx, pk)
        logF_zeta = n * af.f(np.array([af.zeta + 0j]))[0].real + (
            pk - n * af.gamma
        ) * math.log(af.zeta)
        val = af.sigma * n ** (1 / 3) * I / (af.zeta * math.exp(logF_zeta))
        assert abs(val - A.airy(pkp)) <= 0.5 / n ** (1 / 3)
