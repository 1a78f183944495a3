"""Leitura do MNIST no formato IDX (big-endian), bruto ou compactado com gzip."""

from __future__ import annotations


import gzip
import logging
import struct
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from slim.errors import FormatError, LengthError

logger = logging.getLogger(__name__)

IMAGES_MAGIC = 2051
LABELS_MAGIC = 2049
MNIST_MEAN = 0.1307
MNIST_STD = 0.3081

_GZIP_MAGIC = b"\x1f\x8b"

TRAIN_IMAGES = "train-images-idx3-ubyte"
TRAIN_LABELS = "train-labels-idx1-ubyte"
TEST_IMAGES = "t10k-images-idx3-ubyte"
TEST_LABELS = "t10k-labels-idx1-ubyte"


@dataclass(frozen=True)
class Dataset:
    """Imagens normalizadas `[N, 1, 28, 28]` (float32) e rótulos `[N]` (int64)."""

    images: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        """Valida que imagens e rótulos têm o mesmo tamanho.

        Raises:
            ValueError: Se os tamanhos divergirem.
        """
        if len(self.images) != len(self.labels):
            raise ValueError(
                f"{len(self.images)} imagens para {len(self.labels)} rótulos"
            )

    def __len__(self) -> int:
        """Número de amostras."""
        return len(self.labels)

    def batches(
        self,
        batch_size: int,
        rng: np.random.Generator | None = None,
        *,
        shuffle: bool = False,
    ) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """Percorre o conjunto em lotes; o último pode ser menor.

        Args:
            batch_size (int): Tamanho do lote.
            rng (np.random.Generator | None): Gerador usado no embaralhamento.
            shuffle (bool): Se `True`, embaralha a ordem a cada chamada.

        Yields:
            tuple[np.ndarray, np.ndarray]: Imagens e rótulos do lote.

        Raises:
            ValueError: Se `shuffle` for pedido sem gerador.
        """
        if shuffle and rng is None:
            raise ValueError("Embaralhamento exige um gerador")

        order = rng.permutation(len(self)) if shuffle else np.arange(len(self))
        for start in range(0, len(self), batch_size):
            index = order[start : start + batch_size]
            yield self.images[index], self.labels[index]

    def subset(self, n: int) -> Dataset:
        """As primeiras `n` amostras (todas se `n ≤ 0` ou maior que o conjunto)."""
        if n <= 0 or n >= len(self):
            return self

        return Dataset(self.images[:n], self.labels[:n])


def normalize(pixels: np.ndarray) -> np.ndarray:
    """`(pixel/255 − 0.1307)/0.3081`, em float32."""
    scaled = pixels.astype(np.float32) / np.float32(255.0)
    return (scaled - np.float32(MNIST_MEAN)) / np.float32(MNIST_STD)


def _read_bytes(path: Path) -> bytes:
    raw = path.read_bytes()
    if raw[:2] == _GZIP_MAGIC:
        return gzip.decompress(raw)

    return raw


def _header(raw: bytes, count: int, what: str) -> tuple[int, ...]:
    size = 4 * count
    if len(raw) < size:
        raise LengthError(f"{what} (cabeçalho)", size, len(raw))

    return struct.unpack(f">{count}I", raw[:size])


def parse_idx_images(raw: bytes, what: str = "imagens IDX") -> np.ndarray:
    """Decodifica um arquivo IDX de imagens (magic 2051).

    Args:
        raw (bytes): Conteúdo já descompactado.
        what (str): Nome usado nas mensagens de erro.

    Returns:
        np.ndarray: Pixels `uint8` no formato `[N, rows, cols]`.

    Raises:
        FormatError: Se o magic não for 2051.
        LengthError: Se o arquivo for menor ou maior que o declarado.
    """
    magic, *_ = _header(raw, 1, what)
    if magic != IMAGES_MAGIC:
        raise FormatError(f"{what} (magic)", IMAGES_MAGIC, magic)

    _, n, rows, cols = _header(raw, 4, what)
    expected = 16 + n * rows * cols
    if len(raw) != expected:
        raise LengthError(what, expected, len(raw))

    return np.frombuffer(raw, dtype=np.uint8, offset=16).reshape(n, rows, cols)


def parse_idx_labels(raw: bytes, what: str = "rótulos IDX") -> np.ndarray:
    """Decodifica um arquivo IDX de rótulos (magic 2049).

    Args:
        raw (bytes): Conteúdo já descompactado.
        what (str): Nome usado nas mensagens de erro.

    Returns:
        np.ndarray: Rótulos `int64` `[N]`.

    Raises:
        FormatError: Se o magic não for 2049.
        LengthError: Se o arquivo for menor ou maior que o declarado.
    """
    magic, *_ = _header(raw, 1, what)
    if magic != LABELS_MAGIC:
        raise FormatError(f"{what} (magic)", LABELS_MAGIC, magic)

    _, n = _header(raw, 2, what)
    expected = 8 + n
    if len(raw) != expected:
        raise LengthError(what, expected, len(raw))

    return np.frombuffer(raw, dtype=np.uint8, offset=8).astype(np.int64)


def _find(directory: Path, stem: str) -> Path:
    for name in (stem, f"{stem}.gz"):
        path = directory / name
        if path.exists():
            return path

    raise FileNotFoundError(f"Arquivo MNIST ausente em {directory}: {stem}[.gz]")


def load_split(directory: Path, images: str, labels: str) -> Dataset:
    """Lê um par de arquivos IDX (imagens e rótulos) e normaliza as imagens.

    Raises:
        FileNotFoundError: Se algum arquivo não existir.
        FormatError: Se algum magic for inválido.
        LengthError: Se algum arquivo estiver truncado.
    """
    images_path = _find(directory, images)
    labels_path = _find(directory, labels)
    pixels = parse_idx_images(_read_bytes(images_path), images_path.name)
    targets = parse_idx_labels(_read_bytes(labels_path), labels_path.name)
    data = normalize(pixels)[:, np.newaxis, :, :]
    return Dataset(np.ascontiguousarray(data), targets)


def load_mnist(directory: Path | str) -> tuple[Dataset, Dataset]:
    """Carrega os conjuntos de treino e teste do MNIST.

    Args:
        directory (Path | str): Pasta com os quatro arquivos IDX.

    Returns:
        tuple[Dataset, Dataset]: Treino (60000) e teste (10000).
    """
    directory = Path(directory)
    train = load_split(directory, TRAIN_IMAGES, TRAIN_LABELS)
    test = load_split(directory, TEST_IMAGES, TEST_LABELS)
    logger.info(
        "[DADOS] MNIST carregado de %s: %d treino, %d teste",
        directory,
        len(train),
        len(test),
    )
    return train, test
