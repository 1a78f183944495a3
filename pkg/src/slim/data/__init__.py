"""Módulo de dados: MNIST, checkpoints, configuração de execução e presets."""

from __future__ import annotations


from .checkpoint import (
    CHECKPOINT_VERSION,
    Checkpoint,
    deserialize,
    load_checkpoint,
    save_checkpoint,
    serialize,
)
from .config import (
    RunConfig,
    config_to_text,
    data_dir,
    load_config_file,
    parse_config_text,
    resolve_config,
    write_config,
)
from .mnist import Dataset, load_mnist, normalize, parse_idx_images, parse_idx_labels
from .presets import PRESETS, preset_config, preset_overrides

__all__ = [
    "CHECKPOINT_VERSION",
    "PRESETS",
    "Checkpoint",
    "Dataset",
    "RunConfig",
    "config_to_text",
    "data_dir",
    "deserialize",
    "load_checkpoint",
    "load_config_file",
    "load_mnist",
    "normalize",
    "parse_config_text",
    "parse_idx_images",
    "parse_idx_labels",
    "preset_config",
    "preset_overrides",
    "resolve_config",
    "save_checkpoint",
    "serialize",
    "write_config",
]
