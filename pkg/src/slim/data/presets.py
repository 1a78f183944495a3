"""Presets nomeados: uma linha por regularizador do experimento com a LeNet5-Caffe.

Todos usam portas exponenciais após cada camada (exceto a de saída) e σ
constante 1.0. O decaimento de pesos só é usado no preset `l2`. As variantes
`*_smoke` rodam 20 épocas.
"""

from __future__ import annotations


from typing import Any

from slim.data.config import RunConfig, resolve_config
from slim.errors import ConfigError
from slim.model import GateKind, RegularizerKind

SMOKE_EPOCHS = 20
SMOKE_SUFFIX = "_smoke"

PRESETS: dict[str, dict[str, Any]] = {
    "l2": {
        "gate_kind": GateKind.EXPONENTIAL,
        "regularizer_kind": RegularizerKind.L2,
        "regularizer_lambda1": 0.0,
        "regularizer_lambda2": 5e-4,
        "train_epochs": 200,
    },
    "l1": {
        "gate_kind": GateKind.EXPONENTIAL,
        "regularizer_kind": RegularizerKind.L1,
        "regularizer_lambda1": 1e-3,
        "regularizer_lambda2": 0.0,
        "train_epochs": 60,
    },
    "bounded_l1": {
        "gate_kind": GateKind.EXPONENTIAL,
        "regularizer_kind": RegularizerKind.BOUNDED_L1,
        "regularizer_lambda1": 4e-3,
        "regularizer_lambda2": 0.0,
        "train_epochs": 60,
    },
    "bounded_l1_3e3": {
        "gate_kind": GateKind.EXPONENTIAL,
        "regularizer_kind": RegularizerKind.BOUNDED_L1,
        "regularizer_lambda1": 3e-3,
        "regularizer_lambda2": 0.0,
        "train_epochs": 60,
    },
}

PRESETS |= {
    f"{name}{SMOKE_SUFFIX}": values | {"train_epochs": SMOKE_EPOCHS}
    for name, values in list(PRESETS.items())
}

# Rótulo do método usado no relatório consolidado.
METHOD_LABELS: dict[RegularizerKind, str] = {
    RegularizerKind.L2: "ℓ2",
    RegularizerKind.L1: "ℓ1",
    RegularizerKind.BOUNDED_L1: "bounded-ℓ1",
}


def preset_overrides(name: str) -> dict[str, Any]:
    """Sobrescritas do preset.

    Raises:
        ConfigError: Se o preset não existir.
    """
    if name not in PRESETS:
        raise ConfigError("preset", name, f"disponíveis: {sorted(PRESETS)}")

    return dict(PRESETS[name])


def preset_config(name: str) -> RunConfig:
    """Configuração completa do preset (padrões + sobrescritas)."""
    return resolve_config(preset_overrides(name))
