"""Fixtures compartilhadas e verificação de gradiente por diferenças finitas."""

from __future__ import annotations


import gzip
import os
import struct
from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest

from slim.data import Dataset
from slim.data.mnist import (
    IMAGES_MAGIC,
    LABELS_MAGIC,
    TEST_IMAGES,
    TEST_LABELS,
    TRAIN_IMAGES,
    TRAIN_LABELS,
)
from slim.model import GateKind
from slim.network import NetworkGraph, build_lenet5_caffe
from slim.tensor import Tensor

# Larguras da LeNet reduzida usada nos testes rápidos.
MICRO_WIDTHS: tuple[int, int, int] = (6, 8, 16)
FD_EPSILON = 1e-6


def numeric_grad(
    fn: Callable[[], float], array: np.ndarray, eps: float = FD_EPSILON
) -> np.ndarray:
    """Gradiente por diferenças centrais; `fn` lê `array`, alterado in-place."""
    grad = np.zeros_like(array)
    for index in np.ndindex(array.shape):
        original = array[index]
        array[index] = original + eps
        plus = fn()
        array[index] = original - eps
        minus = fn()
        array[index] = original
        grad[index] = (plus - minus) / (2.0 * eps)

    return grad


def rel_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """`‖a − n‖ / max(‖a‖ + ‖n‖, 1e-12)`."""
    diff = np.linalg.norm(analytic - numeric)
    return float(diff / max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12))


def check_op_gradients(
    op: Callable[..., Tensor],
    *arrays: np.ndarray,
    rng: np.random.Generator,
) -> list[float]:
    """Compara o backward de `op` com diferenças finitas, para cada operando.

    A saída é reduzida a escalar por uma soma ponderada com pesos aleatórios.

    Returns:
        list[float]: O erro relativo de cada operando.
    """
    tensors = [Tensor(a, requires_grad=True) for a in arrays]
    out = op(*tensors)
    weights = rng.standard_normal(out.shape)
    (out * Tensor(weights)).sum().backward()

    def fn() -> float:
        return float(np.sum(op(*[Tensor(a.copy()) for a in arrays]).data * weights))

    return [
        rel_error(tensor.grad, numeric_grad(fn, array))
        for tensor, array in zip(tensors, arrays)
    ]


@pytest.fixture
def rng() -> np.random.Generator:
    """Gerador semeado."""
    return np.random.default_rng(1234)


@pytest.fixture
def micro_lenet() -> NetworkGraph:
    """LeNet5-Caffe com larguras reduzidas e portas exponenciais."""
    return build_lenet5_caffe(GateKind.EXPONENTIAL, widths=MICRO_WIDTHS, seed=7)


def make_dataset(
    n: int, seed: int = 0, shape: tuple[int, ...] = (1, 28, 28)
) -> Dataset:
    """Conjunto sintético: imagens gaussianas e rótulos em `[0, 10)`."""
    gen = np.random.default_rng(seed)
    images = gen.standard_normal((n, *shape)).astype(np.float32)
    labels = gen.integers(0, 10, size=n).astype(np.int64)
    return Dataset(images, labels)


def idx_images(pixels: np.ndarray) -> bytes:
    """Arquivo IDX de imagens `[N, rows, cols]`."""
    header = struct.pack(">4I", IMAGES_MAGIC, *pixels.shape)
    return header + pixels.astype(np.uint8).tobytes()


def idx_labels(labels: np.ndarray) -> bytes:
    """Arquivo IDX de rótulos `[N]`."""
    header = struct.pack(">2I", LABELS_MAGIC, labels.size)
    return header + labels.astype(np.uint8).tobytes()


def write_mnist_dir(directory: Path, n_train: int, n_test: int, seed: int = 0) -> Path:
    """Grava um MNIST sintético (arquivos `.gz`) com o layout oficial."""
    gen = np.random.default_rng(seed)
    directory.mkdir(parents=True, exist_ok=True)
    for n, images, labels in (
        (n_train, TRAIN_IMAGES, TRAIN_LABELS),
        (n_test, TEST_IMAGES, TEST_LABELS),
    ):
        pixels = gen.integers(0, 256, size=(n, 28, 28))
        targets = gen.integers(0, 10, size=n)
        (directory / f"{images}.gz").write_bytes(gzip.compress(idx_images(pixels)))
        (directory / f"{labels}.gz").write_bytes(gzip.compress(idx_labels(targets)))

    return directory


@pytest.fixture
def datasets() -> tuple[Dataset, Dataset]:
    """Treino e teste sintéticos pequenos."""
    return make_dataset(48, seed=1), make_dataset(32, seed=2)


@pytest.fixture(scope="session")
def mnist_dir() -> Path:
    """Pasta do MNIST; o teste é pulado sem `SLIM_DATA_DIR`."""
    value = os.environ.get("SLIM_DATA_DIR")
    if not value:
        pytest.skip("SLIM_DATA_DIR não definido")

    return Path(value)
