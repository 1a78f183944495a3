"""Módulo de treino: laço de SGD, ajuste fino e métricas."""

from __future__ import annotations


from .finetune import FINETUNE_LR, MAX_FINETUNE_EPOCHS, finetune
from .metrics import (
    METRICS_HEADER,
    EpochRecord,
    Evaluation,
    append_record,
    evaluate,
    read_records,
)
from .trainer import Trainer, TrainerState

__all__ = [
    "FINETUNE_LR",
    "MAX_FINETUNE_EPOCHS",
    "METRICS_HEADER",
    "EpochRecord",
    "Evaluation",
    "Trainer",
    "TrainerState",
    "append_record",
    "evaluate",
    "finetune",
    "read_records",
]
