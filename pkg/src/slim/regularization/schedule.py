"""Agenda de σ por época."""

from __future__ import annotations


import math
from dataclasses import dataclass

from slim.model import Sigma, SigmaMode


@dataclass(frozen=True)
class SigmaSchedule:
    """Agenda determinística de σ, avançada uma vez por época.

    - `constant`: σ fixo em `initial`.
    - `exp_decay`: `initial · decay_rate^época`.
    - `step_then_exp`: cai `step_delta` por época até atingir `floor`; a partir
      daí decai à taxa `decay_rate` por época.
    """

    initial: float = 2.0
    mode: SigmaMode = SigmaMode.EXP_DECAY
    decay_rate: float = 0.99
    step_delta: float = 0.02
    floor: float = 0.2

    def __post_init__(self) -> None:
        """Valida os parâmetros para que a sequência seja positiva e não crescente.

        Raises:
            ValueError: Se algum parâmetro permitir σ ≤ 0 ou σ crescente.
        """
        object.__setattr__(self, "mode", SigmaMode(self.mode))
        Sigma(self.initial)
        if not 0.0 < self.decay_rate <= 1.0:
            raise ValueError(f"Taxa de decaimento inválida: {self.decay_rate}")

        if self.mode is SigmaMode.STEP_THEN_EXP:
            Sigma(self.floor)
            if self.step_delta <= 0.0:
                raise ValueError(f"Passo de σ inválido: {self.step_delta}")

            if self.floor > self.initial:
                raise ValueError(
                    f"Piso de σ ({self.floor}) acima do valor inicial ({self.initial})"
                )

    @property
    def epochs_to_floor(self) -> int:
        """Número de épocas da fase linear do modo `step_then_exp`."""
        steps = (self.initial - self.floor) / self.step_delta
        return max(math.ceil(steps - 1e-9), 0)

    def sigma_at(self, epoch: int) -> float:
        """Retorna σ na época informada.

        Args:
            epoch (int): Índice da época, a partir de 0.

        Returns:
            float: O valor de σ.

        Raises:
            ValueError: Se `epoch < 0`.
        """
        if epoch < 0:
            raise ValueError(f"Época inválida: {epoch}")

        match self.mode:
            case SigmaMode.CONSTANT:
                return self.initial

            case SigmaMode.EXP_DECAY:
                return self.initial * self.decay_rate**epoch

            case SigmaMode.STEP_THEN_EXP:
                boundary = self.epochs_to_floor
                if epoch <= boundary:
                    return max(self.initial - self.step_delta * epoch, self.floor)

                return self.floor * self.decay_rate ** (epoch - boundary)

        raise ValueError(f"Modo de σ desconhecido: {self.mode!r}")


def sigma_at(schedule: SigmaSchedule, epoch: int) -> float:
    """Atalho funcional para `SigmaSchedule.sigma_at`."""
    return schedule.sigma_at(epoch)
