import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cornergrowth import model as M

ALL_LAWS = [
    M.PointMass(0.5),
    M.Uniform(0.5, 1.5),
    M.Reciprocal(0.3, 0.9),
    M.PowerDensity(0.0, 1.0, p=2.0),
    M.PowerDensity(1.0, 2.0, p=3.0),
    M.Atoms([(0.3, 0.5), (0.6, 0.5)]),
]


def test_point_mass_sequence_constant():
    spec = M.ModelSpec(M.EXPONENTIAL, M.PointMass(0.5), M.PointMass(0.5), seed=1)
    a, b = M.sample_sequences(spec, 3, 2)
    assert np.all(a == 0.5) and np.all(b == 0.5)


def test_uniform_support_and_reproducibility():
    spec = M.ModelSpec(M.EXPONENTIAL, M.Uniform(0.5, 1.5), M.Uniform(0.5, 1.5), seed=7)
    a1, b1 = M.sample_sequences(spec, 100, 80)
    a2, b2 = M.sample_sequences(spec, 100, 80)
    assert np.array_equal(a1, a2) and np.array_equal(b1, b2)
    assert np.all((a1 >= 0.5) & (a1 <= 1.5))
    # matrices of different sizes share prefixes
    a3, b3 = M.sample_sequences(spec, 40, 200)
    assert np.array_equal(a3, a1[:40]) and np.array_equal(b3[:80], b1)


def test_atoms_law_of_large_numbers():
    law = M.Atoms([(0.3, 0.5), (0.6, 0.5)])
    spec = M.ModelSpec(M.GEOMETRIC, law, M.PointMass(0.3), seed=11)
    a, _ = M.sample_sequences(spec, 10**5, 1)
    freq = np.mean(a == 0.3)
    assert abs(freq - 0.5) < 0.01  # ~6 sigma at this sample size


def test_geometric_weight_mean():
    q = 0.25
    spec = M.ModelSpec(M.GEOMETRIC, M.PointMass(math.sqrt(q)), M.PointMass(math.sqrt(q)), seed=3)
    a, b = M.sample_sequences(spec, 1000, 1000)
    W = M.sample_weights(spec, a, b)
    assert abs(W.w.mean() - q / (1 - q)) < 0.002


def test_exponential_weight_mean():
    spec = M.ModelSpec(M.EXPONENTIAL, M.PointMass(1.2), M.PointMass(0.8), seed=4)
    a, b = M.sample_sequences(spec, 1000, 1000)
    W = M.sample_weights(spec, a, b)
    assert abs(W.w.mean() - 0.5) < 0.002


def test_single_site_matrix():
    spec = M.ModelSpec(M.GEOMETRIC, M.PointMass(0.5), M.PointMass(0.5), seed=0)
    W = M.sample_weights(spec, *M.sample_sequences(spec, 1, 1))
    assert W.w.shape == (1, 1)


def test_weight_determinism_bit_identical():
    spec = M.ModelSpec(M.GEOMETRIC, M.Uniform(0.2, 0.4), M.Uniform(0.3, 0.5), seed=21)
    a, b = M.sample_sequences(spec, 12, 9)
    w1 = M.sample_weights(spec, a, b).w
    w2 = M.sample_weights(spec, a, b).w
    assert np.array_equal(w1, w2)
    # row prefixes shared across widths
    a2, b2 = M.sample_sequences(spec, 12, 5)
    w3 = M.sample_weights(spec, a2, b2).w
    assert np.array_equal(w3, w1[:, :5])


def test_invalid_parameter_product_rejected():
    spec = M.ModelSpec(M.GEOMETRIC, M.Uniform(0.2, 0.4), M.Uniform(0.3, 0.5), seed=2)
    with pytest.raises(ValueError, match="invalid parameter product"):
        M.sample_weights(spec, np.array([0.9]), np.array([1.2]))


def test_invalid_supports_rejected():
    with pytest.raises(ValueError):
        M.ModelSpec(M.GEOMETRIC, M.Uniform(0.5, 1.5), M.PointMass(0.3))
    with pytest.raises(ValueError):
        M.ModelSpec(M.GEOMETRIC, M.PointMass(1.0), M.PointMass(0.3))
    with pytest.raises(ValueError):
        M.ModelSpec(M.EXPONENTIAL, M.Uniform(0.0, 1.0), M.Uniform(0.0, 1.0))
    # degenerate branch must be opted into explicitly
    M.ModelSpec(M.EXPONENTIAL, M.Uniform(0.0, 1.0), M.Uniform(0.0, 1.0), allow_degenerate=True)


def test_boundary_z_range_checked():
    with pytest.raises(ValueError):
        M.ModelSpec(M.GEOMETRIC, M.PointMass(0.5), M.PointMass(0.5), boundary_z=0.4)
    M.ModelSpec(M.GEOMETRIC, M.PointMass(0.5), M.PointMass(0.5), boundary_z=1.0)


# -- transforms -------------------------------------------------------------


def test_transform_A_uniform_log3():
    assert abs(M.transform_A(M.Uniform(0.5, 1.5), 0.0) - math.log(3)) < 1e-14


def test_transform_A_point_mass():
    law = M.PointMass(0.7)
    for z in (0.0, 0.4, 2.0):
        assert M.transform_A(law, z) == 1.0 / (0.7 + z)


def test_transform_A2_uniform():
    assert abs(M.transform_A2(M.Uniform(0.5, 1.5), 0.0) - 4.0 / 3.0) < 1e-14


@pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: type(l).__name__ + str(l.lo))
def test_transform_closed_forms_match_quadrature(law):
    for z in np.linspace(0.05, 2.0, 7):
        for k in (1, 2, 3):
            cf = law.inv_moment(z, k)
            q = law.expect(lambda x: (x + z) ** (-float(k)))
            assert abs(cf - q) <= 1e-10 * max(1.0, abs(q))


@pytest.mark.parametrize(
    "law",
    [M.PointMass(0.45), M.Uniform(0.2, 0.45), M.Reciprocal(0.3, 0.45),
     M.PowerDensity(0.1, 0.45, p=1.5), M.Atoms([(0.3, 0.5), (0.45, 0.5)])],
    ids=lambda l: type(l).__name__,
)
def test_tilt_transforms_match_quadrature(law):
    for z in (0.5, 0.9, 1.7):
        for order in (0, 1, 2):
            cf = law.tilt_a(z, order)
            q = (-1.0) ** order * math.factorial(order) * law.expect(
                lambda x: x * (z - x) ** (-(order + 1.0))
            )
            assert abs(cf - q) <= 1e-9 * max(1.0, abs(q))
            cf = law.tilt_b(z, order)
            if order == 0:
                q = law.expect(lambda x: x * z / (1 - x * z))
            else:
                q = math.factorial(order) * law.expect(
                    lambda x: x**order * (1 - x * z) ** (-(order + 1.0))
                )
            assert abs(cf - q) <= 1e-9 * max(1.0, abs(q))


def test_transform_monotonicity():
    law = M.Uniform(0.3, 0.45)
    zs = np.linspace(0.5, 2.0, 40)
    ga = [M.transform_Ga(law, z) for z in zs]
    assert np.all(np.diff(ga) < 0)
    zs = np.linspace(0.1, 2.0, 40)
    gb = [M.transform_Gb(law, z) for z in zs]
    assert np.all(np.diff(gb) > 0)
    av = [M.transform_A(law, z) for z in np.linspace(-0.2, 2.0, 40)]
    assert np.all(np.diff(av) < 0)


def test_divergent_moments_return_inf():
    u = M.Uniform(0.5, 1.5)
    assert M.transform_A(u, -0.5) == math.inf
    assert M.transform_Ga(u, 1.5) == math.inf
    assert M.PowerDensity(0.0, 1.0, p=1.0).inv_moment(0.0, 2) == math.inf
    assert not math.isnan(M.transform_A2(M.PointMass(0.3), -0.3))


def test_boundary_weights_layout():
    spec = M.ModelSpec(
        M.GEOMETRIC, M.Uniform(0.2, 0.4), M.PointMass(0.3), seed=5, boundary_z=0.8
    )
    ext = M.sample_boundary_weights(spec, 6, 7)
    assert ext.shape == (7, 8)
    assert ext[0, 0] == 0
    a, b = M.sample_sequences(spec, 6, 7)
    interior = M.sample_weights(spec, a, b).w
    assert np.array_equal(ext[1:, 1:], interior)


def test_boundary_z_one_is_plain_parameters():
    # at z = 1 boundary parameters reduce to a_i and b_j
    spec = M.ModelSpec(M.GEOMETRIC, M.PointMass(0.5), M.PointMass(0.5), seed=9, boundary_z=1.0)
    ext = M.sample_boundary_weights(spec, 2000, 2000)
    mean = 0.5 / (1 - 0.5)
    assert abs(ext[1:, 0].mean() - mean) < 0.1
    assert abs(ext[0, 1:].mean() - mean) < 0.1


def test_boundary_z_near_upper_end_valid():
    spec = M.ModelSpec(
        M.GEOMETRIC, M.Uniform(0.2, 0.4), M.Uniform(0.3, 0.5), seed=9, boundary_z=1.999
    )
    ext = M.sample_boundary_weights(spec, 10, 10)
    assert np.all(ext >= 0)


def test_boundary_mean_matches_law():
    # geometric z-model: E[W(i,0)] = (a_i/z)/(1 - a_i/z)
    spec = M.ModelSpec(M.GEOMETRIC, M.PointMass(0.4), M.PointMass(0.4), seed=13, boundary_z=0.9)
    ext = M.sample_boundary_weights(spec, 2 * 10**5, 1)
    p = 0.4 / 0.9
    assert abs(ext[1:, 0].mean() - p / (1 - p)) < 0.01


# -- serialization ----------------------------------------------------------


@pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: type(l).__name__ + str(l.lo))
def test_law_config_roundtrip(law):
    assert M.law_from_config(M.law_to_config(law)) == law


def test_spec_json_roundtrip():
    spec = M.ModelSpec(
        M.GEOMETRIC, M.Uniform(0.2, 0.4), M.PointMass(0.3), seed=42, boundary_z=None
    )
    text = M.spec_to_json(spec)
    assert M.spec_from_json(text) == spec
    doc = M.spec_to_config(spec)
    assert doc == {
        "kind": "geometric",
        "alpha": {"uniform": [0.2, 0.4]},
        "beta": {"point": 0.3},
        "seed": 42,
        "z": None,
    }


def test_spec_config_rejects_unknown_keys():
    doc = M.spec_to_config(M.ModelSpec(M.GEOMETRIC, M.PointMass(0.5), M.PointMass(0.5)))
    doc["extra"] = 1
    with pytest.raises(ValueError, match="unknown"):
        M.spec_from_config(doc)


@settings(max_examples=30, deadline=None)
@given(
    lo=st.floats(0.05, 0.4),
    width=st.floats(0.05, 0.4),
    seed=st.integers(0, 2**32 - 1),
)
def test_sampled_support_containment(lo, width, seed):
    law = M.Uniform(lo, lo + width)
    spec = M.ModelSpec(M.GEOMETRIC, law, M.PointMass(0.5), seed=seed)
    a, _ = M.sample_sequences(spec, 50, 1)
    assert np.all((a >= law.lo) & (a <= law.hi))
