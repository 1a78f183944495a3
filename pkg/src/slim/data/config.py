"""Configuração de execução: dataclass imutável e arquivo texto `chave=valor`.

Cada campo tem uma chave pontuada obtida trocando o primeiro `_` por `.`
(`regularizer_kind` ↔ `regularizer.kind`, `train_batch_size` ↔
`train.batch_size`). Precedência: padrões < preset < arquivo < flags da CLI.
"""

from __future__ import annotations


import dataclasses
import logging
import os
from collections.abc import Callable, Mapping
from dataclasses import dataclass, fields
from enum import StrEnum
from pathlib import Path
from typing import Any, get_type_hints

from slim.errors import ConfigError
from slim.model import GateKind, RegularizerKind, SigmaMode
from slim.regularization import RegularizerSpec, SigmaSchedule
from slim.tensor import MultiStepLR

logger = logging.getLogger(__name__)

DATA_DIR_ENV = "SLIM_DATA_DIR"
DEFAULT_DATA_DIR = Path("data")
CONFIG_FILENAME = "config.txt"


@dataclass(frozen=True)
class RunConfig:
    """Configuração completa de uma execução.

    Os padrões seguem o treino da LeNet5-Caffe: lote 128, SGD com taxa 0.1 e
    momento 0.9, 60 épocas, portas exponenciais e σ constante 1.0.
    """

    model: str = "lenet5_caffe"
    gate_kind: GateKind = GateKind.EXPONENTIAL
    regularizer_kind: RegularizerKind = RegularizerKind.BOUNDED_L1
    regularizer_lambda1: float = 0.0
    regularizer_lambda2: float = 0.0
    regularizer_lambda_schedule: tuple[tuple[int, float], ...] = ()
    sigma_mode: SigmaMode = SigmaMode.CONSTANT
    sigma_initial: float = 1.0
    sigma_decay_rate: float = 0.99
    sigma_step_delta: float = 0.02
    sigma_floor: float = 0.2
    train_epochs: int = 60
    train_batch_size: int = 128
    train_lr: float = 0.1
    train_momentum: float = 0.9
    train_milestones: tuple[int, ...] = ()
    train_lr_gamma: float = 0.1
    train_subset: int = 0
    prune_threshold: float | None = None
    finetune_epochs: int = 3
    finetune_lr: float = 0.01
    seed: int = 0
    out: str = "runs/default"

    def __post_init__(self) -> None:
        """Valida os valores que a dataclass não consegue restringir pelo tipo.

        Raises:
            ConfigError: Se algum valor estiver fora do domínio.
        """
        positives = ("train_epochs", "train_batch_size")
        for name in positives:
            if getattr(self, name) <= 0:
                raise ConfigError(dotted_key(name), getattr(self, name), "deve ser > 0")

        if self.finetune_epochs < 0:
            raise ConfigError("finetune.epochs", self.finetune_epochs, "deve ser ≥ 0")

        try:
            self.regularizer()

        except ValueError as exc:
            raise ConfigError("regularizer", self.regularizer_kind, str(exc)) from exc

    def sigma_schedule(self) -> SigmaSchedule:
        """Agenda de σ descrita pelos campos `sigma_*`."""
        return SigmaSchedule(
            initial=self.sigma_initial,
            mode=self.sigma_mode,
            decay_rate=self.sigma_decay_rate,
            step_delta=self.sigma_step_delta,
            floor=self.sigma_floor,
        )

    def regularizer(self) -> RegularizerSpec:
        """Regularizador sobre as portas (λ2 vai para o decaimento de pesos)."""
        return RegularizerSpec(
            kind=self.regularizer_kind,
            lambda1=self.regularizer_lambda1,
            sigma=self.sigma_initial,
            sigma_schedule=self.sigma_schedule(),
            lambda_schedule=self.regularizer_lambda_schedule,
        )

    def lr_schedule(self) -> MultiStepLR:
        """Agenda da taxa de aprendizado."""
        return MultiStepLR(self.train_lr, self.train_milestones, self.train_lr_gamma)


def dotted_key(name: str) -> str:
    """`regularizer_kind` → `regularizer.kind`; nomes sem `_` ficam iguais."""
    return name.replace("_", ".", 1)


_FIELD_BY_KEY: dict[str, str] = {dotted_key(f.name): f.name for f in fields(RunConfig)}
_HINTS: dict[str, Any] = get_type_hints(RunConfig)


def _parse_optional_float(text: str) -> float | None:
    return None if text.lower() in ("none", "") else float(text)


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(item) for item in text.split(",") if item.strip())


def _parse_steps(text: str) -> tuple[tuple[int, float], ...]:
    """`"120:5e-4,200:1e-3"` → `((120, 5e-4), (200, 1e-3))`."""
    steps = []
    for item in filter(str.strip, text.split(",")):
        epoch, _, value = item.partition(":")
        steps.append((int(epoch), float(value)))

    return tuple(steps)


_PARSERS: dict[Any, Callable[[str], Any]] = {
    int: int,
    float: float,
    str: str,
    float | None: _parse_optional_float,
    tuple[int, ...]: _parse_ints,
    tuple[tuple[int, float], ...]: _parse_steps,
    GateKind: GateKind,
    RegularizerKind: RegularizerKind,
    SigmaMode: SigmaMode,
}


def parse_value(key: str, text: str) -> Any:
    """Converte o texto de uma chave pontuada para o tipo do campo.

    Args:
        key (str): Chave pontuada (ex.: `"regularizer.lambda1"`).
        text (str): Valor como texto.

    Returns:
        Any: O valor convertido.

    Raises:
        ConfigError: Se a chave for desconhecida ou o valor inválido.
    """
    name = _FIELD_BY_KEY.get(key)
    if name is None:
        raise ConfigError(key, text, "chave desconhecida")

    try:
        return _PARSERS[_HINTS[name]](text.strip())

    except ValueError as exc:
        raise ConfigError(key, text, str(exc)) from exc


def parse_config_text(text: str) -> dict[str, Any]:
    """Lê texto `chave=valor`, ignorando linhas em branco e comentários `#`.

    Returns:
        dict[str, Any]: Valores convertidos, indexados pelo nome do campo.

    Raises:
        ConfigError: Se alguma linha for inválida.
    """
    values: dict[str, Any] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue

        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"linha {number}", line, "esperado chave=valor")

        key = key.strip()
        values[_FIELD_BY_KEY.get(key, key)] = parse_value(key, value)

    return values


def load_config_file(path: Path) -> dict[str, Any]:
    """Lê um arquivo de configuração (ver `parse_config_text`)."""
    return parse_config_text(path.read_text(encoding="utf-8"))


def _format_value(value: Any) -> str:
    if isinstance(value, StrEnum):
        return value.value

    if isinstance(value, tuple):
        return ",".join(
            f"{item[0]}:{item[1]!r}" if isinstance(item, tuple) else str(item)
            for item in value
        )

    if value is None:
        return "none"

    return repr(value) if isinstance(value, float) else str(value)


def config_to_text(config: RunConfig) -> str:
    """Serializa a configuração em `chave=valor`, lido por `parse_config_text`."""
    return "".join(
        f"{dotted_key(f.name)}={_format_value(getattr(config, f.name))}\n"
        for f in fields(RunConfig)
    )


def resolve_config(
    *layers: Mapping[str, Any] | None, base: RunConfig | None = None
) -> RunConfig:
    """Aplica camadas de sobrescrita sobre `base`, na ordem dada.

    Camadas vazias ou `None` são ignoradas.

    Args:
        *layers (Mapping[str, Any] | None): Sobrescritas por nome de campo.
        base (RunConfig | None): Configuração inicial; padrões se `None`.

    Returns:
        RunConfig: A configuração efetiva.

    Raises:
        ConfigError: Se algum campo for desconhecido ou inválido.
    """
    config = base or RunConfig()
    for layer in layers:
        if not layer:
            continue

        unknown = set(layer) - set(_HINTS)
        if unknown:
            name = sorted(unknown)[0]
            raise ConfigError(dotted_key(name), layer[name], "chave desconhecida")

        config = dataclasses.replace(config, **dict(layer))

    return config


def data_dir(flag: str | None = None) -> Path:
    """Pasta do MNIST: flag `--data`, variável `SLIM_DATA_DIR` ou `./data`."""
    if flag:
        return Path(flag)

    env = os.environ.get(DATA_DIR_ENV)
    return Path(env) if env else DEFAULT_DATA_DIR


def write_config(config: RunConfig, directory: Path) -> Path:
    """Grava a configuração efetiva em `config.txt` na pasta da execução."""
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / CONFIG_FILENAME
    path.write_text(config_to_text(config), encoding="utf-8")
    logger.debug("[CLI] Configuração gravada em %s", path)
    return path
