"""Escalares validados usados como hiperparâmetros (σ, p, limiar, força λ)."""

from __future__ import annotations


import math
from typing import Self


class Sigma(float):
    """Representa o parâmetro σ da norma bounded-ℓp,0, sempre positivo."""

    def __new__(cls, value: float) -> Self:
        """Valida o valor e cria a instância.

        Args:
            value (float): O valor de σ.

        Returns:
            Self: Uma instância de Sigma se o valor for válido.

        Raises:
            ValueError: Se σ não for finito e estritamente positivo.
        """
        value = float(value)
        if not (math.isfinite(value) and value > 0.0):
            raise ValueError(f"σ inválido: {value} (exige σ > 0)")

        return float.__new__(cls, value)


class Exponent(float):
    """Representa o expoente p de uma norma, com p ≥ 1."""

    def __new__(cls, value: float) -> Self:
        """Valida o expoente e cria a instância.

        Args:
            value (float): O valor de p.

        Returns:
            Self: Uma instância de Exponent se o valor for válido.

        Raises:
            ValueError: Se p < 1 ou não for finito.
        """
        value = float(value)
        if not (math.isfinite(value) and value >= 1.0):
            raise ValueError(f"Expoente p inválido: {value} (exige p ≥ 1)")

        return float.__new__(cls, value)


class Threshold(float):
    """Representa um limiar de poda, não negativo."""

    def __new__(cls, value: float) -> Self:
        """Valida o limiar e cria a instância.

        Args:
            value (float): O limiar aplicado aos valores de porta.

        Returns:
            Self: Uma instância de Threshold se o valor for válido.

        Raises:
            ValueError: Se o limiar for negativo ou não finito.
        """
        value = float(value)
        if not (math.isfinite(value) and value >= 0.0):
            raise ValueError(f"Limiar inválido: {value} (exige limiar ≥ 0)")

        return float.__new__(cls, value)


class Strength(float):
    """Representa uma força de regularização λ, não negativa."""

    def __new__(cls, value: float) -> Self:
        """Valida a força e cria a instância.

        Args:
            value (float): O valor de λ.

        Returns:
            Self: Uma instância de Strength se o valor for válido.

        Raises:
            ValueError: Se λ for negativo ou não finito.
        """
        value = float(value)
        if not (math.isfinite(value) and value >= 0.0):
            raise ValueError(f"Força de regularização inválida: {value} (exige λ ≥ 0)")

        return float.__new__(cls, value)
