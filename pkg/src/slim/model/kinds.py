"""Enumerações dos tipos de porta, regularizador, modo de σ e modo de execução."""

from __future__ import annotations


from enum import StrEnum


class GateKind(StrEnum):
    """Famílias de porta por canal."""

    EXPONENTIAL = "exponential"
    LINEAR = "linear"
    NONE = "none"


class RegularizerKind(StrEnum):
    """Penalidades suportadas sobre os parâmetros de porta."""

    L2 = "l2"
    L1 = "l1"
    BOUNDED_L1 = "bounded_l1"


class SigmaMode(StrEnum):
    """Modos de agendamento de σ por época."""

    CONSTANT = "constant"
    EXP_DECAY = "exp_decay"
    STEP_THEN_EXP = "step_then_exp"


class Mode(StrEnum):
    """Modo de execução da rede."""

    TRAIN = "train"
    EVAL = "eval"


class LayerKind(StrEnum):
    """Tipos de camada do grafo de rede (etiqueta usada pelo codec)."""

    CONV2D = "conv2d"
    LINEAR = "linear"
    BATCH_NORM = "batch_norm"
    EXP_GATE = "exp_gate"
    RELU = "relu"
    MAX_POOL2D = "max_pool2d"
    GLOBAL_AVG_POOL = "global_avg_pool"
    FLATTEN = "flatten"
    DROPOUT = "dropout"
