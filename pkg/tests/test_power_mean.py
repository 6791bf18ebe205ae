import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bregclust.power_mean import PowerMeanConfig, mm_weights, power_mean, power_mean_grad


def test_classical_means():
    assert power_mean([1.0, 3.0], 1.0) == pytest.approx(2.0)
    # harmonic mean ((1 + 1/3) / 2)^-1
    assert power_mean([1.0, 3.0], -1.0) == pytest.approx(1.5)


@pytest.mark.parametrize("s", [-20.0, -5.0, -1.0, -0.2, 0.5, 2.0])
def test_constant_vector(s):
    assert power_mean([4.0, 4.0, 4.0], s) == pytest.approx(4.0, rel=1e-12)


def test_rejects_zero_power():
    with pytest.raises(ValueError):
        power_mean([1.0, 2.0], 0.0)


def test_zero_entries_clamped():
    assert power_mean([0.0, 5.0], -1.0) == pytest.approx(2e-300)


def test_log_space_does_not_overflow():
    y = np.array([1e-30, 1e-20, 1.0])
    m = power_mean(y, -20.0)
    assert np.isfinite(m) and 1e-30 <= m <= 1.0


def _fd_grad(y, s, h=1e-6):
    return np.array([
        (power_mean(y + h * y_j * e, s) - power_mean(y - h * y_j * e, s)) / (2 * h * y_j)
        for y_j, e in zip(y, np.eye(len(y)))
    ])


def test_grad_arithmetic_mean():
    np.testing.assert_allclose(power_mean_grad([0.3, 2.0, 7.0, 1.0], 1.0), 0.25, rtol=1e-12)


def test_grad_harmonic_matches_finite_difference():
    y = np.array([1.0, 3.0])
    np.testing.assert_allclose(power_mean_grad(y, -1.0), _fd_grad(y, -1.0), atol=1e-6)


def test_grad_symmetric_at_constant():
    g = power_mean_grad([2.5] * 5, -3.0)
    assert np.ptp(g) == 0


def test_grad_matches_finite_differences_random(rng):
    for _ in range(100):
        s = rng.uniform(-5, -0.1)
        y = rng.uniform(0.1, 10, size=rng.integers(2, 6))
        g = power_mean_grad(y, s)
        fd = _fd_grad(y, s)
        # relative to the gradient's scale; tiny components sit at the FD noise floor
        assert np.max(np.abs(g - fd)) / np.max(np.abs(fd)) <= 1e-5


def test_grad_rejects_nonpositive():
    with pytest.raises(ValueError):
        power_mean_grad([0.0, 1.0], -1.0)


def test_monotone_in_s(rng):
    for _ in range(100):
        y = rng.uniform(0.5, 10, size=4)
        for _ in range(5):
            s1, s2 = np.sort(rng.uniform(-20, -0.05, size=2))
            assert power_mean(y, s1) < power_mean(y, s2)


@settings(max_examples=200)
@given(
    st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=6),
    st.floats(-25, -0.05),
    st.floats(1e-3, 1e3),
)
def test_homogeneous(y, s, c):
    y = np.array(y)
    assert power_mean(c * y, s) == pytest.approx(c * power_mean(y, s), rel=1e-9)


@settings(max_examples=200)
@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=6), st.floats(-25, 3))
def test_between_min_and_max(y, s):
    if abs(s) < 1e-3:
        s = -1.0
    y = np.array(y)
    m = power_mean(y, s)
    assert y.min() * (1 - 1e-12) <= m <= y.max() * (1 + 1e-12)


def test_tends_to_min(rng):
    # min <= M_s <= min * k^(-1/s)
    for _ in range(100):
        y = rng.permutation(np.arange(1, 6) + rng.uniform(0, 0.9, size=5))
        m = power_mean(y, -20.0)
        assert y.min() <= m <= y.min() * 5 ** (1 / 20)
    for _ in range(100):
        y = rng.uniform(1, 10, size=2)
        assert abs(power_mean(y, -20.0) - y.min()) <= 0.05 * y.min()


# ----------------------------------------------------------------- MM weights


def test_weights_equal_for_equal_distances():
    w = mm_weights([[1.0, 1.0]], -1.0)
    assert w[0, 0] == w[0, 1]


def test_weight_ratio():
    # (d1/d2)^(s-1) = (1/4)^-2
    w = mm_weights([[1.0, 4.0]], -1.0)
    assert w[0, 0] / w[0, 1] == pytest.approx(16.0, rel=1e-12)


def test_weights_concentrate_as_s_drops():
    w = mm_weights([[1.0, 4.0]], -20.0)
    assert w[0, 0] / w[0, 1] > 1e9


def test_weights_equal_gradient_up_to_global_constant(rng):
    D = rng.uniform(0.1, 10, size=(6, 3))
    s = -1.7
    W = mm_weights(D, s)
    G = np.array([power_mean_grad(row, s) for row in D])
    ratio = W / G
    np.testing.assert_allclose(ratio, ratio[0, 0], rtol=1e-10)


def test_weights_handle_exact_zero_distance():
    W = mm_weights([[0.0, 2.0, 3.0]], -20.0)
    assert np.all(np.isfinite(W))
    assert W[0, 0] == 1.0 and W[0, 1] < 1e-100


def test_anneal_schedule():
    cfg = PowerMeanConfig()
    assert cfg.next_s(-0.2) == pytest.approx(-0.21)
    assert cfg.next_s(-19.9) == -20.0
    with pytest.raises(ValueError):
        PowerMeanConfig(s0=0.1)
    with pytest.raises(ValueError):
        PowerMeanConfig(anneal_factor=1.0)
