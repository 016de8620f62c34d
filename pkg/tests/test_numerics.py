import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homsense.errors import InvalidAlpha, NonConvergentSum, QuadratureFailure
from homsense.numerics import (central_difference, gaussian_moment, integrate,
                               truncated_double_sum)


class TestIntegrate:
    def test_gaussian_closed_form(self):
        res = integrate(lambda x: np.exp(-x * x), -10, 10, tol=1e-13)
        assert abs(res.real - math.sqrt(math.pi)) < 1e-13

    def test_oscillatory_complex(self):
        # int_0^1 e^{50 i x} dx
        res = integrate(lambda x: np.exp(50j * x), 0, 1, tol=1e-12)
        exact = (np.exp(50j) - 1.0) / 50j
        assert abs(res.value - exact) < 1e-11

    def test_panels_split_oscillation(self):
        res = integrate(lambda x: np.cos(200 * x) ** 2, 0, np.pi,
                        tol=1e-11, panels=32)
        assert abs(res.real - np.pi / 2) < 1e-10

    def test_error_estimate_conservative(self):
        battery = [
            (lambda x: np.exp(-x * x), -8, 8, math.sqrt(math.pi)),
            (lambda x: x * x * np.exp(-x * x), -8, 8, math.sqrt(math.pi) / 2),
            (lambda x: np.cos(7 * x) * np.exp(-x * x), -8, 8,
             math.sqrt(math.pi) * math.exp(-49 / 4)),
        ]
        for f, lo, hi, exact in battery:
            res = integrate(f, lo, hi, tol=1e-12)
            floor = 50 * np.finfo(float).eps * max(1.0, abs(exact))
            assert abs(res.real - exact) <= max(res.error, floor)

    def test_order_cap_failure(self):
        with pytest.raises(QuadratureFailure):
            integrate(lambda x: np.cos(5e4 * x), 0, 10, tol=1e-13,
                      max_order=128)


class TestGaussianMoment:
    @given(ar=st.floats(0.2, 5.0), ai=st.floats(-3.0, 3.0),
           br=st.floats(-2.0, 2.0), bi=st.floats(-2.0, 2.0),
           order=st.integers(0, 2))
    @settings(max_examples=60, deadline=None)
    def test_matches_quadrature(self, ar, ai, br, bi, order):
        alpha = complex(ar, ai)
        beta = complex(br, bi)
        closed = gaussian_moment(alpha, beta, order)
        span = 12.0 / math.sqrt(ar)
        res = integrate(lambda x: x ** order * np.exp(-alpha * x * x + beta * x),
                        -span, span, tol=1e-12)
        assert abs(closed - res.value) < 1e-9 * max(1.0, abs(closed))

    def test_rejects_nonpositive_real_part(self):
        with pytest.raises(InvalidAlpha):
            gaussian_moment(-1.0, 0.0)
        with pytest.raises(InvalidAlpha):
            gaussian_moment(1j, 0.0)

    def test_rejects_high_order(self):
        with pytest.raises(ValueError):
            gaussian_moment(1.0, 0.0, order=3)


class TestTruncatedDoubleSum:
    def test_geometric_closed_form(self):
        R = 0.5
        val = truncated_double_sum(
            lambda n, m: R ** (n + m),
            lambda k: 2.0 * R ** k / (1.0 - R) ** 2, tol=1e-13)
        assert abs(val - 1.0 / (1.0 - R) ** 2) < 1e-12

    def test_degenerate_single_term(self):
        val = truncated_double_sum(
            lambda n, m: np.where((n == 0) & (m == 0), 1.0, 0.0),
            lambda k: 0.0, tol=1e-12)
        assert val == 1.0

    def test_cross_damped_vs_brute_force(self):
        R, a = 0.9, 10.0

        def weight(n, m):
            return R ** (n + m) * np.exp(-((n - m) * a) ** 2)

        val = truncated_double_sum(
            weight, lambda k: 4.0 * k * R ** k / (1.0 - R) ** 2, tol=1e-12)
        n = np.arange(0, 800)
        nn, mm = np.meshgrid(n, n, indexing="ij")
        brute = float(np.sum(weight(nn, mm)))
        assert abs(val - brute) < 1e-10 * brute

    def test_index_cap_raises(self):
        with pytest.raises(NonConvergentSum):
            truncated_double_sum(lambda n, m: np.ones_like(n, dtype=float),
                                 lambda k: 1.0, tol=1e-12, max_index=256)


def test_central_difference_accuracy():
    d = central_difference(math.sin, 0.7)
    assert abs(d - math.cos(0.7)) < 1e-9
