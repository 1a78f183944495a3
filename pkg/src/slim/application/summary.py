"""Resumo por execução (`summary.json`) e relatório consolidado em Markdown e CSV."""

from __future__ import annotations


import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import TypedDict

logger = logging.getLogger(__name__)

SUMMARY_FILENAME = "summary.json"
REPORT_MD = "report.md"
REPORT_CSV = "report.csv"

REPORT_HEADER: tuple[str, ...] = (
    "run",
    "method",
    "lambda",
    "signature",
    "error_pct",
    "pruning_rate",
)


class SummaryPayload(TypedDict):
    """Payload JSON do resumo de uma execução."""

    run: str
    method: str
    gate_kind: str
    lambda1: float
    lambda2: float
    stage: str
    signature: str | None
    error_pct: float | None
    pruning_rate: float | None


def write_summary(summary: SummaryPayload, directory: Path) -> Path:
    """Grava `summary.json` na pasta da execução."""
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / SUMMARY_FILENAME
    path.write_text(json.dumps(summary, indent=2, ensure_ascii=False), encoding="utf-8")
    return path


def read_summary(directory: Path) -> SummaryPayload | None:
    """Lê `summary.json`; `None` se não existir."""
    path = directory / SUMMARY_FILENAME
    if not path.exists():
        return None

    return json.loads(path.read_text(encoding="utf-8"))


def update_summary(directory: Path, **fields: object) -> SummaryPayload:
    """Atualiza campos do resumo existente (ou de um resumo vazio) e grava.

    Args:
        directory (Path): Pasta da execução.
        **fields (object): Campos de `SummaryPayload` a sobrescrever.

    Returns:
        SummaryPayload: O resumo gravado.
    """
    summary = read_summary(directory) or {
        "run": directory.name,
        "method": "",
        "gate_kind": "",
        "lambda1": 0.0,
        "lambda2": 0.0,
        "stage": "",
        "signature": None,
        "error_pct": None,
        "pruning_rate": None,
    }
    summary.update(fields)  # type: ignore[typeddict-item]
    write_summary(summary, directory)
    return summary


@dataclass(frozen=True)
class ReportRow:
    """Linha do relatório consolidado, copiada do resumo sem recálculo."""

    run: str
    method: str
    lambda_: float
    signature: str
    error_pct: float | None
    pruning_rate: float | None

    @staticmethod
    def from_summary(summary: SummaryPayload) -> ReportRow:
        """Monta a linha a partir do resumo de uma execução."""
        # ℓ2 só tem λ2.
        strength = summary["lambda1"] or summary["lambda2"]
        return ReportRow(
            run=summary["run"],
            method=summary["method"],
            lambda_=strength,
            signature=summary["signature"] or "",
            error_pct=summary["error_pct"],
            pruning_rate=summary["pruning_rate"],
        )

    def cells(self) -> list[str]:
        """Campos formatados, na ordem de `REPORT_HEADER`."""
        return [
            self.run,
            self.method,
            f"{self.lambda_:g}",
            self.signature,
            "" if self.error_pct is None else f"{self.error_pct:.2f}",
            "" if self.pruning_rate is None else f"{self.pruning_rate:.4f}",
        ]


def collect_rows(root: Path) -> tuple[list[ReportRow], list[str]]:
    """Lê o resumo de cada subpasta de `root`, em ordem alfabética.

    Args:
        root (Path): Pasta que contém as pastas das execuções.

    Returns:
        tuple[list[ReportRow], list[str]]: As linhas e os nomes das pastas sem
            resumo.
    """
    rows: list[ReportRow] = []
    missing: list[str] = []
    for directory in sorted(p for p in root.iterdir() if p.is_dir()):
        summary = read_summary(directory)
        if summary is None:
            logger.warning("[CLI] Execução sem resumo: %s", directory.name)
            missing.append(directory.name)
            continue

        rows.append(ReportRow.from_summary(summary))

    return rows, missing


def render_markdown(rows: list[ReportRow], missing: list[str]) -> str:
    """Tabela Markdown com as mesmas colunas do CSV, mais as execuções ausentes."""
    lines = [
        "| " + " | ".join(REPORT_HEADER) + " |",
        "|" + "---|" * len(REPORT_HEADER),
    ]
    lines += ["| " + " | ".join(row.cells()) + " |" for row in rows]
    if missing:
        lines += ["", "Execuções sem resumo: " + ", ".join(missing)]

    return "\n".join(lines) + "\n"


def write_report(root: Path, out: Path | None = None) -> tuple[Path, Path]:
    """Grava `report.md` e `report.csv` consolidando as execuções de `root`.

    Args:
        root (Path): Pasta com as execuções.
        out (Path | None): Pasta de saída; `root` se `None`.

    Returns:
        tuple[Path, Path]: Caminhos do Markdown e do CSV.
    """
    out = out or root
    out.mkdir(parents=True, exist_ok=True)
    rows, missing = collect_rows(root)

    md_path = out / REPORT_MD
    md_path.write_text(render_markdown(rows, missing), encoding="utf-8")

    csv_path = out / REPORT_CSV
    with csv_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(REPORT_HEADER)
        writer.writerows(row.cells() for row in rows)

    logger.info("[CLI] Relatório com %d execuções em %s", len(rows), out)
    return md_path, csv_path
