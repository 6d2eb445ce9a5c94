import math

import numpy as np
import pytest

from lpunwrap.errors import DimensionMismatchError, UndefinedMetricError
from lpunwrap.grid import MapKind, PhaseMap, wrap_array
from lpunwrap.metrics import congruence_error, q_error, q_error_mean_aligned


def test_q_zero_for_identical_inputs(rng):
    x = rng.normal(size=50)
    assert q_error(x, x) == 0.0


def test_q_one_for_negated_input(rng):
    x = rng.normal(size=50)
    assert q_error(x, -x) == 1.0


def test_q_one_against_zero_vector(rng):
    x = rng.normal(size=20)
    assert q_error(np.zeros(20), x) == 1.0
    assert q_error(x, np.zeros(20)) == 1.0


def test_q_undefined_for_two_zero_vectors():
    with pytest.raises(UndefinedMetricError):
        q_error(np.zeros(5), np.zeros(5))


def test_q_symmetry(rng):
    a = rng.normal(size=30)
    b = rng.normal(size=30)
    assert q_error(a, b) == q_error(b, a)


def test_q_scale_invariance(rng):
    a = rng.normal(size=30)
    b = rng.normal(size=30)
    base = q_error(a, b)
    for c in (0.5, 3.0, 1e6):
        assert abs(q_error(c * a, c * b) - base) <= 1e-12


def test_q_range_on_random_pairs(rng):
    for _ in range(200):
        a = rng.normal(size=17)
        b = rng.normal(size=17)
        q = q_error(a, b)
        assert 0.0 <= q <= 1.0


def test_q_length_mismatch():
    with pytest.raises(DimensionMismatchError):
        q_error(np.zeros(3), np.zeros(4))


def test_q_mean_aligned_removes_constant_offset(rng):
    x = rng.normal(size=40)
    assert q_error_mean_aligned(x, x + 5.0) <= 1e-15
    assert q_error(x, x + 5.0) > 0.0


def test_congruence_zero_for_equal_maps():
    values = wrap_array(np.linspace(-2.0, 2.0, 12).reshape(3, 4))
    phi = PhaseMap(values, MapKind.UNWRAPPED)
    psi = PhaseMap(values, MapKind.WRAPPED)
    assert congruence_error(phi, psi) <= 1e-12


def test_congruence_ignores_two_pi_offsets():
    values = wrap_array(np.linspace(-2.0, 2.0, 12).reshape(3, 4))
    phi = PhaseMap(values + 2.0 * math.pi, MapKind.UNWRAPPED)
    psi = PhaseMap(values, MapKind.WRAPPED)
    assert congruence_error(phi, psi) <= 1e-12


def test_congruence_ignores_constant_shift():
    values = wrap_array(np.linspace(-1.0, 1.0, 16).reshape(4, 4))
    phi = PhaseMap(values + 0.37, MapKind.UNWRAPPED)
    psi = PhaseMap(values, MapKind.WRAPPED)
    assert congruence_error(phi, psi) <= 1e-12


def test_congruence_detects_real_disagreement(rng):
    values = wrap_array(rng.uniform(-3.0, 3.0, (5, 5)))
    noisy = values + rng.normal(0.0, 0.3, (5, 5))
    phi = PhaseMap(noisy, MapKind.UNWRAPPED)
    psi = PhaseMap(values, MapKind.WRAPPED)
    assert congruence_error(phi, psi) > 0.05


def test_congruence_shape_mismatch():
    a = PhaseMap(np.zeros((3, 3)), MapKind.UNWRAPPED)
    b = PhaseMap(np.zeros((3, 4)), MapKind.WRAPPED)
    with pytest.raises(DimensionMismatchError):
        congruence_error(a, b)
