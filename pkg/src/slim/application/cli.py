"""Ponto de entrada `slim`: treino, poda, ajuste fino, varredura, avaliação e relatório.

Uso:
    slim train --preset bounded_l1 --out runs/bounded_l1
    slim prune runs/bounded_l1/checkpoint.slim
    slim finetune runs/bounded_l1/pruned.slim
    slim sweep runs/l1/checkpoint.slim --thresholds 0,1e-5,1e-4,1e-3
    slim eval runs/bounded_l1/finetuned.slim
    slim report runs
"""

from __future__ import annotations


import argparse
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from slim.application.commands import (
    LOG_NAME,
    cmd_eval,
    cmd_finetune,
    cmd_prune,
    cmd_report,
    cmd_sweep,
    cmd_train,
    config_from_checkpoint,
    load_datasets,
)
from slim.data import (
    RunConfig,
    data_dir,
    load_checkpoint,
    load_config_file,
    preset_overrides,
    resolve_config,
)
from slim.errors import NonFiniteLossError, SlimError
from slim.logging import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DIVERGED = 2


def _parse_thresholds(text: str) -> list[float]:
    return [float(item) for item in text.split(",") if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    """Monta o parser com um subcomando por etapa do experimento."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Arquivo chave=valor")
    common.add_argument("--preset", help="Preset nomeado (ex.: bounded_l1)")
    common.add_argument("--seed", type=int, help="Semente")
    common.add_argument("--threshold", type=float, help="Limiar de poda")
    common.add_argument("--out", help="Pasta da execução")
    common.add_argument("--epochs", type=int, help="Épocas de treino")
    common.add_argument("--data", help="Pasta do MNIST (ou SLIM_DATA_DIR)")
    common.add_argument("--verbose", action="store_true", help="Log em nível DEBUG")

    parser = argparse.ArgumentParser(
        prog="slim", description="Poda estruturada com portas exponenciais"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", parents=[common], help="Treina uma rede")
    train.add_argument("--resume", action="store_true", help="Continua do checkpoint")

    for name, text in (
        ("prune", "Poda um checkpoint treinado"),
        ("finetune", "Ajusta uma rede podada"),
        ("eval", "Erro de teste de um checkpoint"),
    ):
        command = sub.add_parser(name, parents=[common], help=text)
        command.add_argument("checkpoint", type=Path)

    sweep = sub.add_parser("sweep", parents=[common], help="Varre limiares de poda")
    sweep.add_argument("checkpoint", type=Path)
    sweep.add_argument(
        "--thresholds",
        type=_parse_thresholds,
        default=[],
        help="Limiares separados por vírgula",
    )
    sweep.add_argument("--finetune-epochs", type=int, default=0)

    report = sub.add_parser("report", parents=[common], help="Consolida as execuções")
    report.add_argument("runs", type=Path)

    return parser


def resolve_args(args: argparse.Namespace, base: RunConfig | None = None) -> RunConfig:
    """Aplica preset, arquivo e flags, nessa ordem, sobre `base`.

    Raises:
        ConfigError: Se algum valor for inválido.
    """
    flags: dict[str, Any] = {
        "seed": args.seed,
        "prune_threshold": args.threshold,
        "out": args.out,
        "train_epochs": args.epochs,
    }
    return resolve_config(
        preset_overrides(args.preset) if args.preset else None,
        load_config_file(args.config) if args.config else None,
        {key: value for key, value in flags.items() if value is not None},
        base=base,
    )


def _checkpoint_config(args: argparse.Namespace) -> RunConfig:
    return resolve_args(args, config_from_checkpoint(load_checkpoint(args.checkpoint)))


def run(args: argparse.Namespace) -> None:
    """Executa o subcomando já analisado."""
    data = data_dir(args.data)
    match args.command:
        case "train":
            config = resolve_args(args)
            setup_logging(
                logging.DEBUG if args.verbose else logging.INFO,
                log_file=Path(config.out) / LOG_NAME,
            )
            cmd_train(config, load_datasets(config, data), resume=args.resume)

        case "prune":
            config = _checkpoint_config(args)
            test = load_datasets(config, data)[1] if data.exists() else None
            outcome = cmd_prune(args.checkpoint, config, test)
            print(outcome.report.signature)

        case "finetune":
            config = _checkpoint_config(args)
            cmd_finetune(args.checkpoint, config, load_datasets(config, data))

        case "sweep":
            config = _checkpoint_config(args)
            datasets = load_datasets(config, data) if args.thresholds else None
            cmd_sweep(
                args.checkpoint,
                config,
                args.thresholds,
                datasets,
                finetune_epochs=args.finetune_epochs,
            )

        case "eval":
            config = resolve_args(args)
            _, test = load_datasets(config, data)
            result = cmd_eval(args.checkpoint, test)
            print(f"{100.0 * result.error:.2f}")

        case "report":
            cmd_report(args.runs, Path(args.out) if args.out else None)


def main(argv: Sequence[str] | None = None) -> int:
    """Ponto de entrada da CLI.

    Args:
        argv (Sequence[str] | None): Argumentos; `sys.argv` se `None`.

    Returns:
        int: 0 em caso de sucesso, 2 se a perda divergir e 1 para os demais
            erros.
    """
    args = build_parser().parse_args(argv)
    setup_logging(logging.DEBUG if args.verbose else logging.INFO)

    try:
        run(args)

    except NonFiniteLossError as exc:
        logger.error("[CLI] %s: %s", type(exc).__name__, exc)
        return EXIT_DIVERGED

    except (SlimError, OSError) as exc:
        logger.error("[CLI] %s: %s", type(exc).__name__, exc)
        return EXIT_ERROR

    return EXIT_OK
