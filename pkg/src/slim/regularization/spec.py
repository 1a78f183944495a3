"""Especificação do regularizador: tipo, força λ, σ e agendas."""

from __future__ import annotations


from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from slim.model import RegularizerKind, Sigma, Strength
from slim.regularization.impl import PENALTIES
from slim.regularization.protocol import Penalty
from slim.regularization.schedule import SigmaSchedule
from slim.tensor import Tensor


@dataclass(frozen=True)
class RegularizerSpec:
    """Escolha da penalidade sobre as portas e de seus hiperparâmetros.

    `lambda_schedule` lista pares `(época, λ)`: a partir de cada época listada, λ
    passa a valer o novo valor. Sem agenda de σ, usa-se o `sigma` constante.
    """

    kind: RegularizerKind = RegularizerKind.BOUNDED_L1
    lambda1: float = 0.0
    sigma: float = 1.0
    sigma_schedule: SigmaSchedule | None = None
    lambda_schedule: tuple[tuple[int, float], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        """Valida λ ≥ 0 e σ > 0, e ordena a agenda de λ.

        Raises:
            ValueError: Se algum valor for inválido.
        """
        object.__setattr__(self, "kind", RegularizerKind(self.kind))
        Strength(self.lambda1)
        Sigma(self.sigma)
        for epoch, value in self.lambda_schedule:
            Strength(value)
            if epoch < 0:
                raise ValueError(f"Época inválida na agenda de λ: {epoch}")

        object.__setattr__(
            self, "lambda_schedule", tuple(sorted(self.lambda_schedule))
        )

    @property
    def penalty_fn(self) -> Penalty:
        """Implementação da penalidade escolhida."""
        return PENALTIES[self.kind]

    def sigma_at(self, epoch: int) -> float:
        """σ vigente na época."""
        if self.sigma_schedule is None:
            return self.sigma

        return self.sigma_schedule.sigma_at(epoch)

    def lambda_at(self, epoch: int) -> float:
        """λ vigente na época, considerando a agenda de λ."""
        value = self.lambda1
        for start, override in self.lambda_schedule:
            if epoch >= start:
                value = override

        return value


def penalty(gates: Sequence[Tensor], spec: RegularizerSpec, epoch: int = 0) -> float:
    """Termo de regularização `λ·Σ R(θ)` sobre todos os parâmetros de porta.

    Args:
        gates (Sequence[Tensor]): Parâmetros de porta (`g` ou `γ`).
        spec (RegularizerSpec): Especificação do regularizador.
        epoch (int): Época corrente, para as agendas de σ e λ.

    Returns:
        float: O valor do termo; 0 para `l2` (tratado pelo decaimento de pesos).
    """
    strength = spec.lambda_at(epoch)
    sigma = spec.sigma_at(epoch)
    fn = spec.penalty_fn
    return strength * sum(fn.value(gate.data.reshape(-1), sigma) for gate in gates)


def penalty_grad(
    gates: Sequence[Tensor], spec: RegularizerSpec, epoch: int = 0
) -> list[np.ndarray]:
    """Gradiente do termo de regularização para cada parâmetro de porta.

    Args:
        gates (Sequence[Tensor]): Parâmetros de porta.
        spec (RegularizerSpec): Especificação do regularizador.
        epoch (int): Época corrente.

    Returns:
        list[np.ndarray]: Um gradiente por tensor, no formato e tipo do tensor.
    """
    strength = spec.lambda_at(epoch)
    sigma = spec.sigma_at(epoch)
    fn = spec.penalty_fn
    return [
        (strength * fn.grad(gate.data, sigma)).astype(gate.dtype) for gate in gates
    ]


def spec_to_dict(spec: RegularizerSpec) -> dict[str, Any]:
    """Converte a especificação em dicionário serializável em JSON."""
    schedule = spec.sigma_schedule
    return {
        "kind": spec.kind,
        "lambda1": spec.lambda1,
        "sigma": spec.sigma,
        "sigma_schedule": None if schedule is None else asdict(schedule),
        "lambda_schedule": [list(item) for item in spec.lambda_schedule],
    }


def spec_from_dict(payload: dict[str, Any]) -> RegularizerSpec:
    """Reconstrói a especificação gravada por `spec_to_dict`.

    Raises:
        ValueError: Se algum campo for inválido.
    """
    schedule = payload.get("sigma_schedule")
    return RegularizerSpec(
        kind=RegularizerKind(payload["kind"]),
        lambda1=payload["lambda1"],
        sigma=payload["sigma"],
        sigma_schedule=None if schedule is None else SigmaSchedule(**schedule),
        lambda_schedule=tuple(
            (int(epoch), float(value)) for epoch, value in payload["lambda_schedule"]
        ),
    )
