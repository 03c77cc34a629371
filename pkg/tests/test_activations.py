import math

import numpy as np
import pytest

from modxor.activations import ACTIVATION_NAMES, ACTIVATIONS, get_activation

# Breakpoints of the 3-segment elu approximation, solved from
# -1 = 0.231x - 0.387 and 0.231x - 0.387 = x.
L3_LO = (-1.0 + 0.387) / 0.231   # -2.6536796...
L3_HI = -0.387 / (1.0 - 0.231)   # -0.5032509...

EXPECTED_NAMES = (
    "sigmoid", "tanh", "elu", "relu", "leaky-relu", "bounded-relu",
    "lelu", "l3elu", "llelu",
)


def f(name, x):
    return float(get_activation(name).fn(np.float64(x)))


def g(name, x):
    return float(get_activation(name).grad(np.float64(x)))


def test_exactly_nine_activations():
    assert set(ACTIVATION_NAMES) == set(EXPECTED_NAMES)
    assert len(ACTIVATIONS) == 9


def test_unknown_name_lists_valid_ones():
    with pytest.raises(ValueError, match="sigmoid"):
        get_activation("swish")


class TestValues:
    def test_zero_points(self):
        assert f("sigmoid", 0.0) == 0.5
        assert f("tanh", 0.0) == 0.0
        assert f("elu", 0.0) == 0.0
        assert f("relu", 0.0) == 0.0
        assert f("l3elu", 0.0) == 0.0  # segments give -1, -0.387, 0

    def test_positive_side_is_identity_for_relu_family(self):
        for name in ("elu", "relu", "leaky-relu", "lelu", "l3elu", "llelu"):
            for x in (0.5, 1.0, 3.7):
                assert f(name, x) == x

    def test_bounded_relu_saturates_at_two(self):
        assert f("bounded-relu", 3.0) == 2.0
        assert f("bounded-relu", 1.5) == 1.5
        assert f("bounded-relu", -1.0) == 0.0

    def test_leaky_relu_slope(self):
        assert f("leaky-relu", -2.0) == -0.4

    def test_lelu_floors_at_minus_one(self):
        assert f("lelu", -5.0) == -1.0
        assert f("lelu", -0.5) == -0.5

    def test_l3elu_middle_segment(self):
        # at -1 the three segments give -1, -0.618, -1
        assert f("l3elu", -1.0) == pytest.approx(-0.618, abs=1e-15)
        # the middle constants are literal, never recomputed
        assert f("l3elu", -2.0) == 0.231 * -2.0 - 0.387

    def test_llelu_leaks_below_minus_one(self):
        assert f("llelu", -1.0) == -1.0
        assert f("llelu", -5.0) == -1.0 + (-5.0 + 1.0) / 5.0
        assert f("llelu", 2.0) == 2.0

    def test_elu_negative_branch(self):
        assert f("elu", -1.0) == math.expm1(-1.0)


class TestGradients:
    def test_sigmoid_grad_at_zero(self):
        assert g("sigmoid", 0.0) == 0.25

    def test_elu_grad_continuous_at_zero(self):
        assert g("elu", 0.0) == 1.0
        assert g("elu", -1e-12) == pytest.approx(1.0, abs=1e-11)
        assert g("elu", -2.0) == math.exp(-2.0)

    def test_l3elu_grad_segments(self):
        assert g("l3elu", -3.0) == 0.0    # flat floor, x < -2.653
        assert g("l3elu", -2.0) == 0.231  # middle segment
        assert g("l3elu", -1.0) == 0.231
        assert g("l3elu", -0.2) == 1.0

    def test_right_hand_convention_at_kinks(self):
        assert g("relu", 0.0) == 1.0
        assert g("leaky-relu", 0.0) == 1.0
        assert g("bounded-relu", 0.0) == 1.0
        assert g("bounded-relu", 2.0) == 0.0
        assert g("lelu", -1.0) == 1.0
        assert g("llelu", -1.0) == 1.0
        assert g("l3elu", L3_LO) == 0.231
        assert g("l3elu", L3_HI) == 1.0

    @pytest.mark.parametrize("name", EXPECTED_NAMES)
    def test_matches_central_differences(self, name):
        act = get_activation(name)
        rng = np.random.default_rng(hash(name) % 2**32)
        xs = rng.uniform(-6.0, 6.0, size=1000)
        for kink in act.kinks:
            xs = xs[np.abs(xs - kink) > 1e-4]
        h = 1e-6
        numeric = (act.fn(xs + h) - act.fn(xs - h)) / (2 * h)
        analytic = act.grad(xs)
        assert np.all(np.abs(analytic - numeric) <= 1e-6 * (1.0 + np.abs(analytic)))


class TestShapeProperties:
    @pytest.mark.parametrize("name", EXPECTED_NAMES)
    def test_nondecreasing(self, name):
        act = get_activation(name)
        xs = np.linspace(-25.0, 25.0, 20001)
        ys = act.fn(xs)
        assert np.all(np.diff(ys) >= 0.0)

    def test_left_asymptotes(self):
        for name in ("elu", "lelu", "l3elu"):
            assert f(name, -40.0) == pytest.approx(-1.0, abs=1e-15)
            assert f(name, -1e6) >= -1.0
        assert f("relu", -40.0) == 0.0

    def test_bounded_relu_range(self):
        ys = get_activation("bounded-relu").fn(np.linspace(-10, 10, 1001))
        assert ys.min() == 0.0 and ys.max() == 2.0

    def test_llelu_left_slope_is_one_fifth(self):
        assert (f("llelu", -10.0) - f("llelu", -20.0)) / 10.0 == pytest.approx(0.2, abs=1e-15)

    def test_vectorized_matches_scalar(self):
        xs = np.array([-3.0, -1.0, -0.25, 0.0, 0.5, 2.5])
        for name in EXPECTED_NAMES:
            act = get_activation(name)
            vec = act.fn(xs)
            for x, y in zip(xs, vec):
                assert f(name, x) == y
