import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgauge.core import Thresholds, Weights, as_point, ipow, quasi_action, validate_weights, weighted_degree
from qgauge.errors import DimensionMismatch, EmptyWeights, InvalidPoint, NonPositiveWeight, NotCoprime


def test_validate_weights_examples():
    assert validate_weights([1, 2]) == Weights((1, 2))
    assert validate_weights((1, 1, 1)).balanced
    with pytest.raises(NotCoprime):
        validate_weights([2, 4])
    with pytest.raises(NonPositiveWeight):
        validate_weights([1, 0])
    with pytest.raises(NonPositiveWeight):
        validate_weights([-1, 2])
    with pytest.raises(EmptyWeights):
        validate_weights([])


def test_quasi_action_examples():
    p = Weights((1, 2))
    np.testing.assert_allclose(quasi_action(1j, [1, 0, 1, 0], p), [0, 1, -1, 0], atol=0)
    z = np.array([0.3, -0.2, 1.5, 0.7])
    np.testing.assert_array_equal(quasi_action(1.0, z, p), z)
    np.testing.assert_array_equal(quasi_action(0.5, [1, 0, 1, 0], p), [0.5, 0, 0.25, 0])
    with pytest.raises(DimensionMismatch):
        quasi_action(1.0, [1, 0], p)


def test_ipow_exact_on_negative_axis():
    # binary exponentiation has no branch cut on the negative real axis
    assert ipow(-1.0, 3) == -1.0
    assert ipow(-2.0, 4) == 16.0
    assert ipow(1j, 4) == 1.0


def test_weighted_degree_examples():
    assert weighted_degree((0, 0), Weights((1, 2))) == 0
    assert weighted_degree((2, 1), Weights((1, 2))) == 4
    assert weighted_degree((1, 0), Weights((3, 5))) == 3
    with pytest.raises(DimensionMismatch):
        weighted_degree((1,), Weights((1, 2)))


@pytest.mark.parametrize("p", [(1,), (1, 1), (1, 2), (2, 3), (3, 5, 7)])
def test_only_constant_monomials_are_invariant(p):
    w = Weights(p)
    for alpha in itertools.product(range(4), repeat=len(p)):
        assert (weighted_degree(alpha, w) == 0) == (not any(alpha))


complex_small = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(lam=complex_small, mu=complex_small, zs=st.lists(complex_small, min_size=2, max_size=2))
def test_action_law(lam, mu, zs):
    p = Weights((1, 2))
    z = np.array([v for w in zs for v in (w.real, w.imag)])
    lhs = quasi_action(lam, quasi_action(mu, z, p), p)
    rhs = quasi_action(lam * mu, z, p)
    scale = max(1.0, np.abs(rhs).max())
    assert np.abs(lhs - rhs).max() <= 1e-14 * scale * 10


@settings(max_examples=200, deadline=None)
@given(theta=st.floats(0, 2 * np.pi), zs=st.lists(complex_small, min_size=3, max_size=3))
def test_unimodular_action_preserves_moduli(theta, zs):
    p = Weights((1, 2, 3))
    z = np.array([v for w in zs for v in (w.real, w.imag)])
    w = quasi_action(np.exp(1j * theta), z, p)
    np.testing.assert_allclose(np.hypot(w[0::2], w[1::2]), np.hypot(z[0::2], z[1::2]), rtol=1e-14, atol=1e-15)


def test_as_point_validation():
    assert as_point([1, 2]).flags.writeable is False
    with pytest.raises(InvalidPoint):
        as_point([1, 2, 3])
    with pytest.raises(InvalidPoint):
        as_point([1, float("nan")])
    with pytest.raises(DimensionMismatch):
        as_point([1, 2], n=2)


def test_thresholds_override():
    t = Thresholds().replace(psh=1e-4)
    assert t.psh == 1e-4 and t.homogeneity == 1e-9
    with pytest.raises(KeyError):
        Thresholds().replace(bogus=1)
