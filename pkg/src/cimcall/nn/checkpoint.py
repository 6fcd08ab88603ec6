from __future__ import annotations

import json
import logging
import struct
from pathlib import Path

import numpy as np

from cimcall.nn.exceptions import CheckpointError
from cimcall.nn.models import ModelShape, NetworkModel, QuantSpec
from cimcall.nn.network import build_layers

_log = logging.getLogger(__name__)

MAGIC = b"CIMNET"
VERSION = 1

_HEADER = struct.Struct("<6sHII")


def _descriptors(model: NetworkModel) -> list[dict]:
    layers = []
    for layer in build_layers(model):
        desc = layer.describe()
        desc["tensors"] = [
            {"name": name, "shape": list(model.params[name].shape)}
            for name in layer.parameter_names
        ]
        layers.append(desc)
    return layers


def save_checkpoint(model: NetworkModel, path: Path) -> Path:
    """Write layer descriptors as JSON followed by little-endian float32 tensors.

    Layout: magic ``CIMNET``, u16 version, u32 descriptor count, u32 JSON byte
    length, the JSON document, then every tensor in descriptor order.
    """
    path = Path(path)
    descriptors = _descriptors(model)
    document = {
        "layers": descriptors,
        "shape": vars(model.shape),
        "activation": model.activation,
        "input_range": model.input_range,
        "quant": model.quant.model_dump(),
        "weight_scales": model.weight_scales,
    }
    encoded = json.dumps(document, sort_keys=True).encode()

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as fh:
            fh.write(_HEADER.pack(MAGIC, VERSION, len(descriptors), len(encoded)))
            fh.write(encoded)
            for desc in descriptors:
                for tensor in desc["tensors"]:
                    value = model.params[tensor["name"]]
                    fh.write(np.ascontiguousarray(value, dtype="<f4").tobytes())
    except OSError as exc:
        _log.error("Failed to write checkpoint %s: %s", path, exc)
        raise CheckpointError(issue=str(exc), path=str(path)) from exc

    _log.info(
        "Saved checkpoint with %d parameters to %s", model.parameter_count(), path
    )
    return path


def load_checkpoint(path: Path) -> NetworkModel:
    """Read a checkpoint written by ``save_checkpoint``.

    Raises:
        FileNotFoundError: If ``path`` does not exist.
        CheckpointError: If the file is not a valid checkpoint.
    """
    path = Path(path)
    data = path.read_bytes()
    if len(data) < _HEADER.size:
        raise CheckpointError(issue="truncated header", path=str(path))

    magic, version, count, doc_len = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise CheckpointError(issue=f"bad magic {magic!r}", path=str(path))
    if version != VERSION:
        raise CheckpointError(issue=f"unsupported version {version}", path=str(path))

    offset = _HEADER.size
    try:
        document = json.loads(data[offset : offset + doc_len])
    except ValueError as exc:
        raise CheckpointError(
            issue=f"bad descriptor block: {exc}", path=str(path)
        ) from exc
    offset += doc_len

    if len(document["layers"]) != count:
        raise CheckpointError(issue="descriptor count mismatch", path=str(path))

    params: dict[str, np.ndarray] = {}
    for desc in document["layers"]:
        for tensor in desc["tensors"]:
            shape = tuple(tensor["shape"])
            size = int(np.prod(shape))
            if offset + 4 * size > len(data):
                raise CheckpointError(issue="truncated tensor data", path=str(path))
            values = np.frombuffer(data, dtype="<f4", count=size, offset=offset)
            params[tensor["name"]] = values.astype(np.float64).reshape(shape)
            offset += 4 * size

    try:
        model = NetworkModel(
            params=params,
            shape=ModelShape(**document["shape"]),
            activation=document["activation"],
            input_range=document["input_range"],
            quant=QuantSpec(**document["quant"]),
            weight_scales=document["weight_scales"],
        )
    except Exception as exc:
        raise CheckpointError(
            issue=f"inconsistent checkpoint: {exc}", path=str(path)
        ) from exc

    _log.info("Loaded checkpoint from %s", path)
    return model
