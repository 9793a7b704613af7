import numpy as np
import pytest

from aeset.core import Partition, PureState, StateSet, haar_random_state_set
from aeset.errors import BoundExceededError, NotUnitaryError
from aeset.rng import RunSeed
from aeset.separability import (
    Unitary,
    cross_ratio_residual,
    disentangling_unitary,
    haar_random_unitary,
    is_fully_product,
    is_product_bipartite,
    second_schmidt_coefficient,
    unitary_from_dict,
    unitary_to_dict,
)

BELL = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)


def _random_product(p, seed):
    vec = np.array([1.0 + 0j])
    for i, f in enumerate(p.factors):
        part = haar_random_state_set(f, 1, seed.child(i)).vectors[0]
        vec = np.kron(vec, part)
    return PureState(vec)


def test_unitary_rejects_non_unitary():
    with pytest.raises(NotUnitaryError):
        Unitary(np.array([[1.0, 0.1], [0.0, 1.0]]))


def test_haar_unitary_is_unitary_and_deterministic():
    u = haar_random_unitary(5, RunSeed(31))
    assert np.max(np.abs(u.entries.conj().T @ u.entries - np.eye(5))) < 1e-12
    v = haar_random_unitary(5, RunSeed(31))
    assert np.array_equal(u.entries, v.entries)


def test_product_state_detected():
    state = _random_product(Partition((2, 2)), RunSeed(1))
    verdict = is_product_bipartite(state, 2, 2)
    assert verdict.is_product
    assert verdict.residual < 1e-12
    assert cross_ratio_residual(state, 2, 2) < 1e-12


def test_bell_not_product():
    verdict = is_product_bipartite(PureState(BELL), 2, 2)
    assert not verdict.is_product
    assert verdict.residual == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-12)


def test_second_schmidt_matches_cross_ratio_scale():
    # both diagnostics vanish together on product states and not on entangled ones
    state = haar_random_state_set(6, 1, RunSeed(55)).state(0)
    s2 = second_schmidt_coefficient(state.amplitudes, 2, 3)
    cr = cross_ratio_residual(state, 2, 3)
    assert (s2 < 1e-9) == (cr < 1e-9)
    assert s2 > 1e-3 and cr > 1e-3  # Haar states are entangled almost surely


@pytest.mark.parametrize("factors", [(2, 2), (2, 4), (3, 3), (2, 2, 2), (2, 3, 2)])
def test_fully_product_on_tensor_products(factors):
    p = Partition(factors)
    state = _random_product(p, RunSeed(hash(factors) & 0xFFFF))
    verdict = is_fully_product(state, p)
    assert verdict.is_product
    assert verdict.residual < 1e-12


def test_fully_product_rejects_ghz():
    vec = np.zeros(8)
    vec[0] = vec[7] = 1.0 / np.sqrt(2.0)
    assert not is_fully_product(PureState(vec), Partition((2, 2, 2))).is_product


def test_unitary_json_round_trip():
    u = haar_random_unitary(4, RunSeed(77))
    again = unitary_from_dict(unitary_to_dict(u))
    assert np.array_equal(u.entries, again.entries)


def test_apply_set_matches_per_state():
    states = haar_random_state_set(4, 3, RunSeed(5))
    u = haar_random_unitary(4, RunSeed(6))
    images = u.apply_set(states)
    for i in range(3):
        assert np.allclose(images.vectors[i], u.entries @ states.vectors[i], atol=1e-15)


@pytest.mark.parametrize("factors", [(2, 2), (2, 4), (3, 3), (2, 2, 2)])
def test_disentangling_unitary_small_sets(factors):
    """Any max(d_i)+1 states can be made simultaneously fully product."""
    p = Partition(factors)
    n = max(factors) + 1
    states = haar_random_state_set(p.product, n, RunSeed(1234 + p.product))
    u = disentangling_unitary(states, p)
    images = u.apply_set(states)
    for i in range(n):
        assert is_fully_product(images.state(i), p, tol=1e-10).is_product


def test_disentangling_unitary_dependent_extra_state():
    # the "extra" state lying inside the span of the others is handled too
    p = Partition((2, 2))
    base = haar_random_state_set(4, 2, RunSeed(500)).vectors
    extra = 0.8 * base[0] - 0.6j * base[1]
    extra /= np.linalg.norm(extra)
    states = StateSet(np.vstack([base, extra]))
    u = disentangling_unitary(states, p)
    images = u.apply_set(states)
    for i in range(3):
        assert is_fully_product(images.state(i), p, tol=1e-10).is_product


def test_disentangling_unitary_bound():
    with pytest.raises(BoundExceededError):
        disentangling_unitary(haar_random_state_set(4, 4, RunSeed(0)), Partition((2, 2)))
