"""Camada de aplicação: comandos da CLI e relatórios das execuções."""

from __future__ import annotations


from .commands import (
    cmd_eval,
    cmd_finetune,
    cmd_prune,
    cmd_report,
    cmd_sweep,
    cmd_train,
    load_datasets,
)
from .summary import SummaryPayload, read_summary, update_summary, write_report

__all__ = [
    "SummaryPayload",
    "cmd_eval",
    "cmd_finetune",
    "cmd_prune",
    "cmd_report",
    "cmd_sweep",
    "cmd_train",
    "load_datasets",
    "read_summary",
    "update_summary",
    "write_report",
]
