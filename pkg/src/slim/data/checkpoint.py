"""Checkpoints: byte de versão, manifesto JSON prefixado pelo tamanho e blobs brutos.

Layout do arquivo:

    [versão: 1 byte][tamanho do manifesto: uint64 LE][manifesto JSON][blobs]

O manifesto descreve a rede (descritor do codec), metadados da execução e uma
tabela de tensores com nome, formato, tipo, deslocamento, tamanho e SHA-256 de
cada blob. Os blobs são arrays little-endian contíguos, na ordem da tabela.
"""

from __future__ import annotations


import hashlib
import json
import logging
import os
import struct
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, TypedDict

import numpy as np

from slim.errors import FormatError, HashError, LengthError, VersionError
from slim.network import NetworkGraph, decode, encode
from slim.network.codec import GraphPayload

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
_LENGTH = struct.Struct("<Q")
_HEADER_SIZE = 1 + _LENGTH.size

# Prefixo dos tensores auxiliares (ex.: buffers de momento) no arquivo.
EXTRA_PREFIX = "extra/"


class TensorEntry(TypedDict):
    """Entrada da tabela de tensores do manifesto."""

    name: str
    shape: list[int]
    dtype: str
    offset: int
    length: int
    sha256: str


class ManifestPayload(TypedDict):
    """Manifesto completo do checkpoint."""

    version: int
    graph: GraphPayload
    meta: dict[str, Any]
    tensors: list[TensorEntry]


@dataclass
class Checkpoint:
    """Conteúdo de um checkpoint carregado."""

    net: NetworkGraph
    meta: dict[str, Any] = field(default_factory=dict)
    extra: dict[str, np.ndarray] = field(default_factory=dict)


def _little_endian(array: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(array, dtype=array.dtype.newbyteorder("<"))


def serialize(
    net: NetworkGraph,
    meta: dict[str, Any] | None = None,
    extra: dict[str, np.ndarray] | None = None,
) -> bytes:
    """Serializa rede, metadados e tensores auxiliares para bytes.

    Args:
        net (NetworkGraph): A rede.
        meta (dict[str, Any] | None): Metadados serializáveis em JSON (época,
            semente, regularizador, métricas, estado dos geradores).
        extra (dict[str, np.ndarray] | None): Tensores auxiliares por nome.

    Returns:
        bytes: O conteúdo do arquivo.
    """
    graph, tensors = encode(net)
    named = dict(tensors)
    named.update({f"{EXTRA_PREFIX}{k}": v for k, v in (extra or {}).items()})

    table: list[TensorEntry] = []
    blobs: list[bytes] = []
    offset = 0
    for name, array in named.items():
        blob = _little_endian(array).tobytes()
        table.append(
            {
                "name": name,
                "shape": list(array.shape),
                "dtype": _little_endian(array).dtype.str,
                "offset": offset,
                "length": len(blob),
                "sha256": hashlib.sha256(blob).hexdigest(),
            }
        )
        blobs.append(blob)
        offset += len(blob)

    manifest: ManifestPayload = {
        "version": CHECKPOINT_VERSION,
        "graph": graph,
        "meta": meta or {},
        "tensors": table,
    }
    header = json.dumps(manifest, indent=1, sort_keys=True).encode()
    return b"".join(
        [bytes([CHECKPOINT_VERSION]), _LENGTH.pack(len(header)), header, *blobs]
    )


def _read_entry(body: bytes, entry: TensorEntry) -> np.ndarray:
    try:
        name = entry["name"]
        blob = body[entry["offset"] : entry["offset"] + entry["length"]]
        digest = hashlib.sha256(blob).hexdigest()
        if digest != entry["sha256"]:
            raise HashError(name, entry["sha256"], digest)

        array = np.frombuffer(blob, dtype=np.dtype(entry["dtype"]))
        return array.reshape(entry["shape"]).astype(array.dtype.newbyteorder("="))

    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError("tensor do checkpoint", "entrada válida", str(exc)) from exc


def deserialize(raw: bytes) -> Checkpoint:
    """Reconstrói o checkpoint a partir dos bytes do arquivo.

    Args:
        raw (bytes): Conteúdo do arquivo.

    Returns:
        Checkpoint: Rede, metadados e tensores auxiliares.

    Raises:
        VersionError: Se o byte de versão não for suportado.
        LengthError: Se o arquivo estiver truncado ou com bytes sobrando.
        FormatError: Se o manifesto não for JSON válido ou não descrever uma
            rede consistente com os tensores.
        HashError: Se algum blob não conferir com seu SHA-256.
    """
    if len(raw) < _HEADER_SIZE:
        raise LengthError("cabeçalho do checkpoint", _HEADER_SIZE, len(raw))

    if raw[0] != CHECKPOINT_VERSION:
        raise VersionError(CHECKPOINT_VERSION, raw[0])

    (size,) = _LENGTH.unpack_from(raw, 1)
    if len(raw) < _HEADER_SIZE + size:
        raise LengthError("manifesto do checkpoint", _HEADER_SIZE + size, len(raw))

    try:
        manifest: ManifestPayload = json.loads(raw[_HEADER_SIZE : _HEADER_SIZE + size])

    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError("manifesto do checkpoint", "JSON", str(exc)) from exc

    body = raw[_HEADER_SIZE + size :]
    try:
        declared = sum(entry["length"] for entry in manifest["tensors"])

    except (KeyError, TypeError) as exc:
        raise FormatError(
            "manifesto do checkpoint", "tabela de tensores", repr(exc)
        ) from exc

    if len(body) != declared:
        raise LengthError("blobs do checkpoint", declared, len(body))

    tensors: dict[str, np.ndarray] = {}
    extra: dict[str, np.ndarray] = {}
    for entry in manifest["tensors"]:
        array = _read_entry(body, entry)
        name = entry["name"]
        if name.startswith(EXTRA_PREFIX):
            extra[name.removeprefix(EXTRA_PREFIX)] = array

        else:
            tensors[name] = array

    try:
        return Checkpoint(decode(manifest["graph"], tensors), manifest["meta"], extra)

    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError("grafo do checkpoint", "descritor válido", str(exc)) from exc


def save_checkpoint(
    net: NetworkGraph,
    path: Path | str,
    meta: dict[str, Any] | None = None,
    extra: dict[str, np.ndarray] | None = None,
) -> Path:
    """Grava o checkpoint de forma atômica (arquivo temporário e `os.replace`).

    Args:
        net (NetworkGraph): A rede.
        path (Path | str): Destino.
        meta (dict[str, Any] | None): Metadados da execução.
        extra (dict[str, np.ndarray] | None): Tensores auxiliares.

    Returns:
        Path: O caminho gravado.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = serialize(net, meta, extra)
    handle = tempfile.NamedTemporaryFile(
        dir=path.parent, prefix=f".{path.name}.", delete=False
    )
    temp = Path(handle.name)
    try:
        with handle:
            handle.write(raw)

        os.replace(temp, path)

    except BaseException:
        temp.unlink(missing_ok=True)
        raise

    logger.info("[CHECKPOINT] Gravado %s (%d bytes)", path, len(raw))
    return path


def load_checkpoint(path: Path | str) -> Checkpoint:
    """Lê um checkpoint gravado por `save_checkpoint`.

    Raises:
        VersionError: Se a versão não for suportada.
        LengthError: Se o arquivo estiver truncado.
        FormatError: Se o manifesto for inválido.
        HashError: Se algum tensor estiver corrompido.
    """
    path = Path(path)
    checkpoint = deserialize(path.read_bytes())
    logger.debug("[CHECKPOINT] Lido %s", path)
    return checkpoint
