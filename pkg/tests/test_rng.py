import numpy as np
import pytest

from aeset.rng import RunSeed, complex_normal, standard_normal


def test_child_seeds_are_order_independent():
    root = RunSeed(123, 0)
    first = [root.child(i).seed for i in range(10)]
    second = [root.child(i).seed for i in reversed(range(10))]
    assert first == list(reversed(second))
    assert len(set(first)) == 10


def test_child_differs_from_parent_stream():
    root = RunSeed(5, 7)
    assert root.child(0) != root
    assert root.child(0) != root.child(1)


def test_generator_reproducible():
    a = RunSeed(99, 1).generator().random(16)
    b = RunSeed(99, 1).generator().random(16)
    assert np.array_equal(a, b)


def test_seed_bounds():
    with pytest.raises(ValueError):
        RunSeed(-1)
    with pytest.raises(ValueError):
        RunSeed(1 << 64)


def test_standard_normal_moments():
    gen = RunSeed(2718).generator()
    x = standard_normal(gen, 200000)
    assert abs(x.mean()) < 0.01
    assert abs(x.std() - 1.0) < 0.01


def test_standard_normal_odd_count_prefix():
    x = standard_normal(RunSeed(3).generator(), 7)
    y = standard_normal(RunSeed(3).generator(), 8)
    assert np.array_equal(x, y[:7])


def test_complex_normal_shape_and_independence():
    z = complex_normal(RunSeed(4).generator(), (50, 4))
    assert z.shape == (50, 4)
    assert abs(z.real.std() - 1.0) < 0.15
    assert abs(z.imag.std() - 1.0) < 0.15
