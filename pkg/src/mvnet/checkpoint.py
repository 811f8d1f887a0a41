"""Single-file model container: a JSON header followed by raw little-endian
float64 tensor bytes. Round trips are bit-exact."""

from __future__ import annotations

import json
import struct
from collections import OrderedDict

import numpy as np

from .config import config_from_dict, config_to_dict
from .features import PAD_TOKEN, UNK_TOKEN, Vocabulary
from .model import MvnModel

MAGIC = b"MVNCKPT1"
FORMAT_VERSION = 1


class CheckpointError(RuntimeError):
    """Unreadable or inconsistent checkpoint file."""


def save_checkpoint(path, model: MvnModel) -> None:
    header = {
        "format_version": FORMAT_VERSION,
        "config": config_to_dict(model.config),
        "num_classes": model.num_classes,
        "vocab": model.vocab.tokens,
        "tensors": [{"name": name, "shape": list(array.shape)}
                    for name, array in model.params.items()],
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(MAGIC)
        handle.write(struct.pack("<Q", len(blob)))
        handle.write(blob)
        for array in model.params.values():
            handle.write(np.ascontiguousarray(array, dtype="<f8").tobytes())


def load_checkpoint(path) -> MvnModel:
    with open(path, "rb") as handle:
        magic = handle.read(len(MAGIC))
        if magic != MAGIC:
            raise CheckpointError(f"{path}: not a model checkpoint")
        (header_len,) = struct.unpack("<Q", handle.read(8))
        try:
            header = json.loads(handle.read(header_len).decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CheckpointError(f"{path}: corrupt header: {exc}") from None
        if header.get("format_version") != FORMAT_VERSION:
            raise CheckpointError(f"{path}: unsupported format version "
                                  f"{header.get('format_version')!r}")
        params: "OrderedDict[str, np.ndarray]" = OrderedDict()
        for entry in header["tensors"]:
            shape = tuple(int(s) for s in entry["shape"])
            count = int(np.prod(shape, dtype=np.int64))
            raw = handle.read(count * 8)
            if len(raw) != count * 8:
                raise CheckpointError(f"{path}: truncated tensor {entry['name']!r}")
            params[entry["name"]] = (np.frombuffer(raw, dtype="<f8")
                                     .astype(np.float64).reshape(shape))
    tokens = header["vocab"]
    if len(tokens) < 2 or tokens[0] != PAD_TOKEN or tokens[1] != UNK_TOKEN:
        raise CheckpointError(f"{path}: vocabulary lacks reserved entries")
    vocab = Vocabulary(tokens=list(tokens),
                       index={t: i for i, t in enumerate(tokens)})
    config = config_from_dict(header["config"])
    return MvnModel(config, vocab, int(header["num_classes"]), params)
