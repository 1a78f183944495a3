"""Penalidades ℓ2, ℓ1 e bounded-ℓ1 sobre os parâmetros de porta."""

from __future__ import annotations


import numpy as np

from slim.model import RegularizerKind
from slim.norms import BoundedNormParams, bounded_norm, bounded_norm_grad


class L2Penalty:
    """ℓ2 via decaimento de pesos do otimizador: a penalidade explícita é nula."""

    kind = RegularizerKind.L2

    def value(self, theta: np.ndarray, sigma: float) -> float:
        """Sempre 0; o termo λ2·θ entra no passo do SGD."""
        return 0.0

    def grad(self, theta: np.ndarray, sigma: float) -> np.ndarray:
        """Sempre zero."""
        return np.zeros_like(theta)


class L1Penalty:
    """ℓ1 com σ embutido: `Σ|θ|/σ`, gradiente `sign(θ)/σ`."""

    kind = RegularizerKind.L1

    def value(self, theta: np.ndarray, sigma: float) -> float:
        """`Σ|θ|/σ`."""
        return float(np.sum(np.abs(theta)) / sigma)

    def grad(self, theta: np.ndarray, sigma: float) -> np.ndarray:
        """`sign(θ)/σ`, com `sign(0) = 0`."""
        return np.sign(theta) / theta.dtype.type(sigma)


class BoundedL1Penalty:
    """bounded-ℓ1: `Σ 1 − e^{−|θ|/σ}`, gradiente `sign(θ)·e^{−|θ|/σ}/σ`."""

    kind = RegularizerKind.BOUNDED_L1

    def value(self, theta: np.ndarray, sigma: float) -> float:
        """Norma bounded-ℓ1,0 com o σ vigente."""
        return bounded_norm(theta, BoundedNormParams(p=1.0, sigma=sigma))

    def grad(self, theta: np.ndarray, sigma: float) -> np.ndarray:
        """Gradiente da norma bounded-ℓ1,0, no formato de `theta`."""
        grad = bounded_norm_grad(theta, BoundedNormParams(p=1.0, sigma=sigma))
        return grad.reshape(theta.shape)


PENALTIES: dict[RegularizerKind, L2Penalty | L1Penalty | BoundedL1Penalty] = {
    RegularizerKind.L2: L2Penalty(),
    RegularizerKind.L1: L1Penalty(),
    RegularizerKind.BOUNDED_L1: BoundedL1Penalty(),
}
