"""Módulo de poda: seleção por limiar, compactação, fusão de portas e relatórios."""

from __future__ import annotations


from .accounting import (
    FLOP_CONVENTION,
    channel_fraction_removed,
    count_flops,
    count_params,
    pruning_rate,
)
from .compaction import compact, merge_gates
from .report import GroupReport, PruneReport, build_report
from .selection import (
    DEFAULT_THRESHOLDS,
    ChannelSelection,
    Selection,
    default_threshold,
    select_channels,
)
from .sweep import (
    DEAD_LAYER_NOTE,
    SWEEP_HEADER,
    PruneOutcome,
    SweepRow,
    prune,
    pruning_rate_at,
    threshold_sweep,
    write_sweep_csv,
)

__all__ = [
    "DEAD_LAYER_NOTE",
    "DEFAULT_THRESHOLDS",
    "FLOP_CONVENTION",
    "SWEEP_HEADER",
    "ChannelSelection",
    "GroupReport",
    "PruneOutcome",
    "PruneReport",
    "Selection",
    "SweepRow",
    "build_report",
    "channel_fraction_removed",
    "compact",
    "count_flops",
    "count_params",
    "default_threshold",
    "merge_gates",
    "prune",
    "pruning_rate",
    "pruning_rate_at",
    "select_channels",
    "threshold_sweep",
    "write_sweep_csv",
]
