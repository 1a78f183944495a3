"""Testes da norma p, da norma 0 e da norma bounded-ℓp,0."""

from __future__ import annotations


import numpy as np
import pytest
from conftest import numeric_grad, rel_error
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from slim.norms import (
    BoundedNormParams,
    bounded_norm,
    bounded_norm_grad,
    p_norm,
    zero_norm,
)

vectors = arrays(
    np.float64,
    st.integers(1, 16),
    elements=st.floats(-5.0, 5.0, allow_nan=False, allow_infinity=False),
)
sigmas = st.floats(0.05, 10.0)
exponents = st.floats(1.0, 4.0)


class TestNorms:
    """Valores de referência e validação dos parâmetros."""

    def test_p_norm(self) -> None:
        assert p_norm([3.0, -4.0], 2) == pytest.approx(5.0)
        assert p_norm([1.0, -2.0, 3.0], 1) == pytest.approx(6.0)
        assert p_norm([], 2) == 0.0

    def test_p_norm_rejects_p_below_one(self) -> None:
        with pytest.raises(ValueError):
            p_norm([1.0], 0.5)

    def test_zero_norm_counts_exact_nonzeros(self) -> None:
        assert zero_norm([0.0, 1e-30, -2.0, 0.0]) == 2.0

    def test_single_entry(self) -> None:
        value = bounded_norm([1.0], BoundedNormParams(p=1.0, sigma=1.0))
        assert value == pytest.approx(0.632121, abs=1e-6)

    def test_reference_values(self) -> None:
        assert p_norm([0.3, -0.7, 0.1], 1) == pytest.approx(1.1)
        assert p_norm([1.0, -1.0, 1.0], 1) == pytest.approx(3.0)
        expected = (0.3**1.1 + 0.7**1.1 + 0.1**1.1) ** (1 / 1.1)
        assert p_norm([0.3, -0.7, 0.1], 1.1) == pytest.approx(expected)
        assert zero_norm([0.0, 5.0, -2.0]) == 2.0
        assert bounded_norm([0.0, 0.0], BoundedNormParams()) == 0.0
        value = bounded_norm([0.5, 2.0], BoundedNormParams(p=2.0, sigma=1.0))
        assert value == pytest.approx(0.221199 + 0.981684, abs=1e-6)

    def test_gradient_reference_values(self) -> None:
        grad = bounded_norm_grad([0.5, -0.5, 20.0], BoundedNormParams())
        assert grad[0] == pytest.approx(0.606531, abs=1e-6)
        assert grad[1] == pytest.approx(-0.606531, abs=1e-6)
        assert 0.0 < grad[2] < 1e-8

    @pytest.mark.parametrize(("p", "sigma"), [(0.9, 1.0), (1.0, 0.0), (2.0, -1.0)])
    def test_invalid_params(self, p: float, sigma: float) -> None:
        with pytest.raises(ValueError):
            BoundedNormParams(p=p, sigma=sigma)

    def test_gradient_is_zero_at_zero(self) -> None:
        for p in (1.0, 1.5, 2.0):
            grad = bounded_norm_grad([0.0, 0.0], BoundedNormParams(p=p, sigma=1.0))
            assert np.all(grad == 0.0)


class TestLimits:
    """Convergência para a norma 0 e aproximação de Taylor."""

    def test_converges_to_zero_norm(self, rng: np.random.Generator) -> None:
        params = BoundedNormParams(p=1.0, sigma=1e-3)
        for _ in range(100):
            size = int(rng.integers(1, 20))
            x = rng.uniform(0.1, 3.0, size) * rng.choice([-1.0, 1.0], size)
            x[rng.random(size) < 0.3] = 0.0
            assert abs(bounded_norm(x, params) - zero_norm(x)) < 1e-6

    @pytest.mark.parametrize("p", [1.0, 2.0])
    def test_small_entries_follow_scaled_p_norm(
        self, rng: np.random.Generator, p: float
    ) -> None:
        sigma = 2.0
        params = BoundedNormParams(p=p, sigma=sigma)
        for _ in range(100):
            x = rng.uniform(-1e-3 * sigma, 1e-3 * sigma, 8)
            expected = float(np.sum(np.abs(x / sigma) ** p))
            assert abs(bounded_norm(x, params) - expected) / expected < 1e-2


class TestProperties:
    """Propriedades verificadas com hypothesis."""

    @given(vectors, sigmas, exponents)
    def test_bounded_by_entry_count(
        self, x: np.ndarray, sigma: float, p: float
    ) -> None:
        value = bounded_norm(x, BoundedNormParams(p=p, sigma=sigma))
        assert 0.0 <= value <= x.size

    @given(vectors, sigmas, sigmas)
    def test_non_increasing_in_sigma(self, x: np.ndarray, s1: float, s2: float) -> None:
        small, large = sorted((s1, s2))
        lo = bounded_norm(x, BoundedNormParams(sigma=large))
        hi = bounded_norm(x, BoundedNormParams(sigma=small))
        assert lo <= hi + 1e-12

    @given(vectors, sigmas)
    def test_even_in_x(self, x: np.ndarray, sigma: float) -> None:
        params = BoundedNormParams(sigma=sigma)
        assert bounded_norm(-x, params) == bounded_norm(x, params)

    @given(vectors, sigmas, st.integers(0, 15), st.floats(1.0, 3.0))
    def test_non_decreasing_in_each_magnitude(
        self, x: np.ndarray, sigma: float, index: int, scale: float
    ) -> None:
        params = BoundedNormParams(sigma=sigma)
        grown = x.copy()
        grown[index % x.size] *= scale
        assert bounded_norm(grown, params) >= bounded_norm(x, params) - 1e-12

    @given(arrays(np.float64, st.integers(1, 8), elements=st.floats(1e-3, 5.0)))
    def test_gradient_is_damped_l1_gradient(self, x: np.ndarray) -> None:
        grad = bounded_norm_grad(x, BoundedNormParams(p=1.0, sigma=1.0))
        np.testing.assert_allclose(grad, np.sign(x) * np.exp(-np.abs(x)), rtol=1e-9)
        assert np.all(np.abs(grad) <= 1.0)

    @settings(max_examples=30)
    @given(
        arrays(np.float64, st.integers(1, 6), elements=st.floats(1e-2, 3.0)),
        st.lists(st.booleans(), min_size=6, max_size=6),
        st.floats(0.5, 4.0),
        exponents,
    )
    def test_gradient_matches_finite_differences(
        self, magnitudes: np.ndarray, signs: list[bool], sigma: float, p: float
    ) -> None:
        x = magnitudes * np.where(signs[: magnitudes.size], 1.0, -1.0)
        params = BoundedNormParams(p=p, sigma=sigma)
        numeric = numeric_grad(lambda: bounded_norm(x, params), x)
        assert rel_error(bounded_norm_grad(x, params), numeric) < 1e-4
