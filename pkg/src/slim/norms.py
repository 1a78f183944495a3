"""Norma p, norma 0 e norma bounded-ℓp,0 com seu gradiente.

A norma bounded-ℓp,0 é `Σ 1 − exp(−|xᵢ|^p / σ^p)`: limitada a `[0, n)`, tende à
norma 0 quando σ → 0⁺ e aproxima `‖x/σ‖_p^p` quando todos os `|xᵢ|` são
pequenos frente a σ. As funções são puras e calculam na precisão da entrada.
"""

from __future__ import annotations


from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from slim.model import Exponent, Sigma


@dataclass(frozen=True)
class BoundedNormParams:
    """Parâmetros `p` e `σ` da norma bounded-ℓp,0."""

    p: float = 1.0
    sigma: float = 1.0

    def __post_init__(self) -> None:
        """Valida `p ≥ 1` e `σ > 0`.

        Raises:
            ValueError: Se algum parâmetro for inválido.
        """
        object.__setattr__(self, "p", Exponent(self.p))
        object.__setattr__(self, "sigma", Sigma(self.sigma))


def _as_vector(x: ArrayLike) -> np.ndarray:
    array = np.asarray(x)
    if not np.issubdtype(array.dtype, np.floating):
        array = array.astype(np.float64)

    return array.reshape(-1)


def p_norm(x: ArrayLike, p: float) -> float:
    """Norma p: `(Σ|xᵢ|^p)^(1/p)`.

    Args:
        x (ArrayLike): Vetor de entrada.
        p (float): Expoente, com `p ≥ 1`.

    Returns:
        float: O valor da norma; 0 para vetor vazio.

    Raises:
        ValueError: Se `p < 1`.
    """
    p = Exponent(p)
    v = _as_vector(x)
    if v.size == 0:
        return 0.0

    return float(np.sum(np.abs(v) ** p) ** (1.0 / p))


def zero_norm(x: ArrayLike) -> float:
    """Norma 0: quantidade de entradas exatamente diferentes de zero.

    Args:
        x (ArrayLike): Vetor de entrada.

    Returns:
        float: A contagem de entradas não nulas.
    """
    return float(np.count_nonzero(_as_vector(x)))


def bounded_terms(x: ArrayLike, params: BoundedNormParams) -> np.ndarray:
    """Termos `1 − exp(−|xᵢ|^p / σ^p)` da norma, cada um em `[0, 1)`.

    Usa `expm1` para manter precisão relativa quando `|xᵢ| ≪ σ`.

    Args:
        x (ArrayLike): Vetor de entrada.
        params (BoundedNormParams): Parâmetros `p` e `σ`.

    Returns:
        np.ndarray: Um termo por entrada.
    """
    v = _as_vector(x)
    scaled = (np.abs(v) / v.dtype.type(params.sigma)) ** v.dtype.type(params.p)
    return -np.expm1(-scaled)


def bounded_norm(x: ArrayLike, params: BoundedNormParams) -> float:
    """Norma bounded-ℓp,0: `Σ 1 − exp(−|xᵢ|^p / σ^p)`.

    Args:
        x (ArrayLike): Vetor de entrada.
        params (BoundedNormParams): Parâmetros `p` e `σ`.

    Returns:
        float: Valor em `[0, n)`.
    """
    return float(np.sum(bounded_terms(x, params)))


def bounded_norm_grad(x: ArrayLike, params: BoundedNormParams) -> np.ndarray:
    """Gradiente componente a componente da norma bounded-ℓp,0.

    `∂/∂xᵢ = sign(xᵢ)·(p·|xᵢ|^{p−1}/σ^p)·exp(−|xᵢ|^p/σ^p)`, com `sign(0) = 0`: um
    parâmetro exatamente nulo recebe gradiente zero para qualquer `p`.

    Args:
        x (ArrayLike): Vetor de entrada.
        params (BoundedNormParams): Parâmetros `p` e `σ`.

    Returns:
        np.ndarray: Gradiente no formato de `x` (achatado).
    """
    v = _as_vector(x)
    dtype = v.dtype.type
    p, sigma = dtype(params.p), dtype(params.sigma)
    magnitude = np.abs(v)
    decay = np.exp(-((magnitude / sigma) ** p))
    # p = 1: |x|^0 = 1 mesmo em x = 0; sign(0) zera o termo.
    slope = p * magnitude ** (p - 1) / sigma**p
    return np.sign(v) * slope * decay
