"""Core grid plumbing: clamping, sigmoid, soft confusion, reductions, config."""

import math

import numpy as np
import pytest

from segloss.core import (
    ConfigError,
    LossConfig,
    ShapeError,
    clamp_prob,
    reduce_mean,
    reduce_sum,
    sigmoid,
    soft_confusion,
)


class TestClampProb:
    def test_lower_boundary(self):
        assert clamp_prob(np.array([[0.0]]), 1e-7)[0, 0] == 1e-7

    def test_interior_unchanged(self):
        assert clamp_prob(np.array([[0.5]]), 1e-7)[0, 0] == 0.5

    def test_upper_boundary(self):
        assert clamp_prob(np.array([[1.0]]), 0.01)[0, 0] == 0.99

    def test_idempotent_exactly(self):
        rng = np.random.default_rng(7)
        p = rng.random((16, 16))
        once = clamp_prob(p, 1e-3)
        twice = clamp_prob(once, 1e-3)
        assert np.array_equal(once, twice)

    @pytest.mark.parametrize("eps", [0.0, 0.5, -0.1, 0.7])
    def test_rejects_bad_epsilon(self, eps):
        with pytest.raises(ConfigError):
            clamp_prob(np.array([[0.5]]), eps)


class TestSigmoid:
    def test_zero_is_half(self):
        assert sigmoid(np.array([[0.0]]))[0, 0] == 0.5

    def test_saturation(self):
        assert abs(sigmoid(np.array([[50.0]]))[0, 0] - 1.0) < 1e-15

    def test_log_three(self):
        # 1 / (1 + 1/3) = 0.75
        assert sigmoid(np.array([[math.log(3.0)]]))[0, 0] == pytest.approx(0.75, abs=1e-15)

    def test_symmetry(self):
        z = np.linspace(-30.0, 30.0, 401).reshape(1, -1)
        total = sigmoid(z) + sigmoid(-z)
        assert np.max(np.abs(total - 1.0)) < 1e-15

    def test_monotone(self):
        z = np.linspace(-20.0, 20.0, 2000).reshape(1, -1)
        s = sigmoid(z)[0]
        assert np.all(np.diff(s) > 0)


class TestSoftConfusion:
    def test_perfect_single_pixel(self):
        c = soft_confusion([[1.0]], [[1.0]])
        assert (c.tp, c.fp, c.tn, c.fn) == (1.0, 0.0, 0.0, 0.0)

    def test_two_pixel_oracle(self):
        # Hand accumulation: tp = 1*0.6, fn = 1*0.4, fp = 1*0.2, tn = 1*0.8.
        c = soft_confusion([[1.0, 0.0]], [[0.6, 0.2]])
        assert c.tp == pytest.approx(0.6, abs=1e-15)
        assert c.fn == pytest.approx(0.4, abs=1e-15)
        assert c.fp == pytest.approx(0.2, abs=1e-15)
        assert c.tn == pytest.approx(0.8, abs=1e-15)

    def test_all_background(self):
        c = soft_confusion(np.zeros((2, 2)), np.zeros((2, 2)))
        assert (c.tp, c.fp, c.fn) == (0.0, 0.0, 0.0)
        assert c.tn == 4.0

    def test_counts_sum_to_pixel_count(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            y = (rng.random((9, 7)) < 0.4).astype(float)
            p = rng.random((9, 7))
            c = soft_confusion(y, p)
            assert c.total == pytest.approx(63.0, rel=1e-9)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ShapeError):
            soft_confusion(np.zeros((2, 2)), np.zeros((2, 3)))


class TestReductions:
    def test_small_sum_and_mean(self):
        grid = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert reduce_sum(grid) == 10.0
        assert reduce_mean(grid) == 2.5

    def test_all_zeros(self):
        assert reduce_sum(np.zeros((8, 8))) == 0.0

    def test_matches_sequential_oracle(self):
        values = np.full((20, 50), 0.1)
        total = 0.0
        for v in values.ravel().tolist():
            total += v
        assert abs(reduce_sum(values) - total) < 1e-10

    def test_bitwise_reproducible(self):
        rng = np.random.default_rng(3)
        grid = rng.random((31, 17))
        assert reduce_sum(grid) == reduce_sum(grid.copy())

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            reduce_sum(np.zeros((0,)))


class TestLossConfig:
    def test_defaults_valid(self):
        LossConfig().validate()

    @pytest.mark.parametrize(
        "field,value",
        [
            ("epsilon", 0.0),
            ("epsilon", 0.6),
            ("smooth", -1.0),
            ("beta", 0.0),
            ("beta", -2.0),
            ("alpha", 1.5),
            ("gamma", -0.1),
            ("w", -0.5),
            ("w_dice", -1.0),
            ("w_label", -1.0),
            ("c4", 0.0),
            ("window", 2),
            ("window", 0),
            ("hd_alpha", 0.5),
        ],
    )
    def test_rejects_out_of_range(self, field, value):
        with pytest.raises(ConfigError):
            LossConfig(**{field: value}).validate()

    def test_replace_validates(self):
        cfg = LossConfig().replace(beta=0.5, gamma=1.0)
        assert cfg.beta == 0.5
        with pytest.raises(ConfigError):
            LossConfig().replace(window=4)


class TestGridGuards:
    def test_mask_values_checked(self):
        with pytest.raises(ValueError):
            soft_confusion([[0.5]], [[0.5]])

    def test_probability_range_checked(self):
        with pytest.raises(ValueError):
            soft_confusion([[1.0]], [[1.5]])

    def test_logits_must_be_finite(self):
        from segloss.core import as_logits

        assert np.array_equal(as_logits([[0.0, -3.5]]), [[0.0, -3.5]])
        with pytest.raises(ValueError):
            as_logits([[np.inf, 0.0]])

    def test_pixel_count_guard(self):
        from segloss.core import validate_shape

        with pytest.raises(ShapeError):
            validate_shape(1 << 14, 1 << 13)
