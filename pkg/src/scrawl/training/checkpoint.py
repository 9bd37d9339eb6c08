"""Versioned binary checkpoints.

Layout, all integers little-endian ``u32``::

    b"SCRAWLCK" | version | header length | header (canonical text, UTF-8)
    | record count | records

Each record is a length-prefixed UTF-8 name, the rank, one extent per axis
and the raw float32 data. Records are sorted by name. Model tensors and
batch-norm statistics use their parameter names; optimizer accumulators are
stored as ``opt/<name>/sq_grad`` and ``opt/<name>/sq_delta``. Equal
checkpoints always encode to identical bytes.
"""

from dataclasses import dataclass
import logging
from pathlib import Path
import struct
import tomllib
from typing import Any

import numpy as np
from pydantic import ValidationError

from ..config import canonical
from ..corpus.vocabulary import Vocabulary
from ..models.config import RunConfig
from ..network.params import ModelParams
from ..numerics.tensor import ShapeError
from .optim import AdadeltaState

log = logging.getLogger(__name__)

MAGIC = b"SCRAWLCK"
FORMAT_VERSION = 1
OPT_PREFIX = "opt/"

_U32 = struct.Struct("<I")
_FLOAT = np.dtype("<f4")


class CheckpointError(ValueError):
    """Raised for unreadable checkpoints or tensors that do not fit the model."""


@dataclass(frozen=True)
class Checkpoint:
    """Everything needed to resume training or run inference."""

    config: RunConfig
    vocabulary: Vocabulary
    params: ModelParams
    optimizer: AdadeltaState
    epoch: int
    seed: int

    def header(self) -> dict[str, Any]:
        return {
            "format": {"version": FORMAT_VERSION},
            "config": self.config.model_table(),
            "vocabulary": {"chars": self.vocabulary.chars},
            "state": {"epoch": self.epoch, "seed": self.seed},
        }

    def records(self) -> dict[str, np.ndarray]:
        arrays = self.params.named_arrays()
        for name in self.optimizer.names():
            arrays[f"{OPT_PREFIX}{name}/sq_grad"] = self.optimizer.sq_grad[name]
            arrays[f"{OPT_PREFIX}{name}/sq_delta"] = self.optimizer.sq_delta[name]
        return dict(sorted(arrays.items()))


def encode_checkpoint(checkpoint: Checkpoint) -> bytes:
    header = canonical.dumps(checkpoint.header()).encode("utf-8")
    records = checkpoint.records()
    parts = [MAGIC, _U32.pack(FORMAT_VERSION), _U32.pack(len(header)), header, _U32.pack(len(records))]
    for name, array in records.items():
        encoded = name.encode("utf-8")
        parts.append(_U32.pack(len(encoded)))
        parts.append(encoded)
        parts.append(_U32.pack(array.ndim))
        parts.extend(_U32.pack(extent) for extent in array.shape)
        parts.append(np.ascontiguousarray(array, dtype=_FLOAT).tobytes())
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes, source: str) -> None:
        self.data = data
        self.pos = 0
        self.source = source

    def take(self, size: int, what: str) -> bytes:
        chunk = self.data[self.pos : self.pos + size]
        if len(chunk) < size:
            raise CheckpointError(f"{self.source}: truncated while reading {what}")
        self.pos += size
        return chunk

    def u32(self, what: str) -> int:
        return _U32.unpack(self.take(_U32.size, what))[0]

    def text(self, size: int, what: str) -> str:
        try:
            return self.take(size, what).decode("utf-8")
        except UnicodeDecodeError as err:
            raise CheckpointError(f"{self.source}: {what} is not UTF-8") from err


def _read_records(reader: _Reader) -> dict[str, np.ndarray]:
    arrays: dict[str, np.ndarray] = {}
    for index in range(reader.u32("the record count")):
        name = reader.text(reader.u32(f"the name of record {index}"), f"the name of record {index}")
        rank = reader.u32(f"the rank of {name}")
        shape = tuple(reader.u32(f"the extents of {name}") for _ in range(rank))
        count = int(np.prod(shape, dtype=np.int64))
        raw = reader.take(count * _FLOAT.itemsize, f"the data of {name}")
        if name in arrays:
            raise CheckpointError(f"{reader.source}: tensor {name!r} appears twice")
        arrays[name] = np.frombuffer(raw, dtype=_FLOAT).reshape(shape).astype(np.float32)
    if reader.pos != len(reader.data):
        raise CheckpointError(f"{reader.source}: {len(reader.data) - reader.pos} trailing bytes")
    return arrays


def _split_optimizer(
    arrays: dict[str, np.ndarray], params: ModelParams, source: str
) -> AdadeltaState:
    sq_grad, sq_delta = {}, {}
    for name in params:
        for key, table in (("sq_grad", sq_grad), ("sq_delta", sq_delta)):
            record = f"{OPT_PREFIX}{name}/{key}"
            value = arrays.pop(record, None)
            if value is None:
                raise CheckpointError(f"{source}: tensor {record!r} is missing")
            if value.shape != params[name].shape:
                raise CheckpointError(
                    f"{source}: tensor {record!r} has shape {value.shape}, expected {params[name].shape}"
                )
            table[name] = value
    leftover = sorted(n for n in arrays if n.startswith(OPT_PREFIX))
    if leftover:
        raise CheckpointError(f"{source}: tensor {leftover[0]!r} is not part of this model")
    return AdadeltaState(sq_grad, sq_delta)


def decode_checkpoint(
    data: bytes, source: str = "<bytes>", config: RunConfig | None = None
) -> Checkpoint:
    """Decode checkpoint bytes.

    :param config: Validate the tensors against this configuration instead
        of the one recorded in the header.
    :raises CheckpointError: For a bad magic number, an unknown version,
        truncation, or tensors that do not fit the configuration.
    """
    reader = _Reader(data, source)
    if reader.take(len(MAGIC), "the magic number") != MAGIC:
        raise CheckpointError(f"{source}: not a scrawl checkpoint")
    version = reader.u32("the format version")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{source}: unsupported format version {version}")
    header_text = reader.text(reader.u32("the header length"), "the header")
    try:
        header = canonical.loads(header_text)
        recorded = RunConfig.from_dict(header["config"])
        vocabulary = Vocabulary(header["vocabulary"]["chars"])
        epoch = int(header["state"]["epoch"])
        seed = int(header["state"]["seed"])
    except (tomllib.TOMLDecodeError, KeyError, TypeError, ValueError, ValidationError) as err:
        raise CheckpointError(f"{source}: invalid header: {err}") from err

    arrays = _read_records(reader)
    used = config if config is not None else recorded
    model_arrays = {n: a for n, a in arrays.items() if not n.startswith(OPT_PREFIX)}
    try:
        params = ModelParams.from_arrays(model_arrays, used, len(vocabulary))
    except ShapeError as err:
        raise CheckpointError(f"{source}: {err}") from err
    optimizer = _split_optimizer(
        {n: a for n, a in arrays.items() if n.startswith(OPT_PREFIX)}, params, source
    )
    return Checkpoint(used, vocabulary, params, optimizer, epoch, seed)


def save_checkpoint(path: Path | str, checkpoint: Checkpoint) -> Path:
    """Write ``checkpoint``; the file appears under its final name only once complete."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    partial = path.with_name(f".{path.name}.partial")
    partial.write_bytes(encode_checkpoint(checkpoint))
    partial.replace(path)
    log.debug("Saved checkpoint %s (epoch %d)", path, checkpoint.epoch)
    return path


def load_checkpoint(path: Path | str, config: RunConfig | None = None) -> Checkpoint:
    """Read a checkpoint file; see :func:`decode_checkpoint`."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as err:
        raise CheckpointError(f"cannot read checkpoint {path}: {err.strerror}") from err
    return decode_checkpoint(data, str(path), config)
