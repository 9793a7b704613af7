import numpy as np
import pytest

from aeset.core import Partition, StateSet, haar_random_state_set
from aeset.constructions import star_states
from aeset.errors import InvalidCountError
from aeset.optimizer import (
    OptimizerConfig,
    _central_diff,
    _hermitian_from_params,
    _logi,
    _objective,
    _params_from_hermitian,
    minimize_total_entropy,
    param_count,
    total_entropy,
    unitary_from_params,
)
from aeset.rng import RunSeed
from aeset.separability import Unitary, haar_random_unitary

P22 = Partition((2, 2))


def test_zero_params_give_identity():
    u = unitary_from_params(np.zeros(16))
    assert np.allclose(u.entries, np.eye(4), atol=1e-15)


def test_unitary_from_params_is_unitary():
    gen = RunSeed(101).generator()
    for _ in range(20):
        x = gen.random(param_count(4)) * 4.0 - 2.0
        u = unitary_from_params(x)
        assert np.max(np.abs(u.entries.conj().T @ u.entries - np.eye(4))) < 1e-12


def test_param_hermitian_round_trip():
    gen = RunSeed(202).generator()
    x = gen.random(25) * 2.0 - 1.0
    h = _hermitian_from_params(x, 5)
    assert np.allclose(h, h.conj().T)
    assert np.allclose(_params_from_hermitian(h), x, atol=1e-15)


def test_log_inverts_exp():
    u = haar_random_unitary(4, RunSeed(303))
    h = _logi(u.entries)
    again = unitary_from_params(_params_from_hermitian(h))
    assert np.allclose(again.entries, u.entries, atol=1e-10)


def test_param_count_mismatch_raises():
    with pytest.raises(InvalidCountError):
        unitary_from_params(np.zeros(10))


def test_total_entropy_of_basis_states_zero():
    states = StateSet(np.eye(4, dtype=complex))
    assert total_entropy(states, P22, Unitary(np.eye(4))) == pytest.approx(0.0, abs=1e-12)


def test_total_entropy_counts_both_cut_sides():
    bell = np.array([[1.0, 0.0, 0.0, 1.0]]) / np.sqrt(2.0)
    val = total_entropy(StateSet(bell), P22, Unitary(np.eye(4)))
    assert val == pytest.approx(2.0, abs=1e-12)  # one bit per subsystem


def test_objective_matches_total_entropy():
    states = haar_random_state_set(4, 4, RunSeed(404))
    fun = _objective(states.vectors, P22)
    x = RunSeed(405).generator().random(16)
    assert fun(x) == pytest.approx(
        total_entropy(states, P22, unitary_from_params(x)), abs=1e-10)


def test_central_difference_gradient():
    states = haar_random_state_set(4, 4, RunSeed(406))
    fun = _objective(states.vectors, P22)
    x = RunSeed(407).generator().random(16)
    g = _central_diff(fun, 1e-6)(x)
    # compare against a coarser independent step
    g2 = _central_diff(fun, 1e-5)(x)
    assert np.max(np.abs(g - g2)) < 1e-5


def test_three_states_always_disentanglable():
    states = haar_random_state_set(4, 3, RunSeed(808))
    result = minimize_total_entropy(states, P22, OptimizerConfig(seed=RunSeed(1)))
    assert result.min_total_entropy < 1e-11
    assert not result.classified_aes


def test_star_family_classified_aes():
    result = minimize_total_entropy(star_states(P22, 0.9), P22,
                                    OptimizerConfig(seed=RunSeed(2)))
    assert result.classified_aes
    assert result.min_total_entropy > 1e-8
    assert not result.entropy_band_warning


def test_minimizer_reproducible():
    states = haar_random_state_set(4, 4, RunSeed(909))
    cfg = OptimizerConfig(restarts=2, seed=RunSeed(55))
    a = minimize_total_entropy(states, P22, cfg)
    b = minimize_total_entropy(states, P22, cfg)
    assert a.min_total_entropy == b.min_total_entropy
    assert np.array_equal(a.best_params, b.best_params)


def test_config_validation():
    with pytest.raises(InvalidCountError):
        OptimizerConfig(restarts=0)
    with pytest.raises(InvalidCountError):
        OptimizerConfig(gradient_step=0.0)
