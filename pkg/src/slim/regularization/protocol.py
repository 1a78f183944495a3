"""Interface para penalidades sobre os parâmetros de porta."""

from __future__ import annotations


from typing import Protocol, runtime_checkable

import numpy as np

from slim.model import RegularizerKind


@runtime_checkable
class Penalty(Protocol):
    """Penalidade por elemento, sem a força λ (aplicada pela especificação)."""

    kind: RegularizerKind

    def value(self, theta: np.ndarray, sigma: float) -> float:
        """Valor da penalidade somado sobre `theta`.

        Args:
            theta (np.ndarray): Parâmetros de porta achatados.
            sigma (float): σ vigente.

        Returns:
            float: O valor, sem o fator λ.
        """
        ...

    def grad(self, theta: np.ndarray, sigma: float) -> np.ndarray:
        """Gradiente da penalidade em relação a `theta`.

        Args:
            theta (np.ndarray): Parâmetros de porta.
            sigma (float): σ vigente.

        Returns:
            np.ndarray: Gradiente no formato de `theta`, sem o fator λ.
        """
        ...
