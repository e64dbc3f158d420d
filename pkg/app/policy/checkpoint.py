"""Checkpoint container for the trainable rewriter.

Layout::

    8 bytes   magic b"RRRCKPT\\0"
    4 bytes   header length N, uint32 little-endian
    N bytes   UTF-8 JSON header {version, V, d, max_len, vocab, arrays: [{name, group, shape}]}
    ...       each array in header order, float64 little-endian, C order

``group`` is ``policy`` or ``value``; the value group is present only when the
rewriter carries a value network.
"""

import json
import logging
import struct
from pathlib import Path

import numpy as np

from ..errors import ArtifactIOError, MissingArtifactError
from .model import PolicyParams, RewriterPolicy, ValueParams
from .vocab import Vocab

logger = logging.getLogger(__name__)

MAGIC = b"RRRCKPT\0"
VERSION = 1
_DTYPE = np.dtype("<f8")


def _entries(policy: RewriterPolicy):
    groups = [("policy", policy.params)]
    if policy.value is not None:
        groups.append(("value", policy.value))
    for group, store in groups:
        for name, array in store.items():
            yield group, name, array


def save_checkpoint(policy: RewriterPolicy, path) -> Path:
    checkpoint_path = Path(path)
    entries = list(_entries(policy))
    header = {
        "version": VERSION,
        "V": policy.params.vocab_size,
        "d": policy.params.dim,
        "max_len": policy.max_len,
        "vocab": policy.vocab.tokens,
        "arrays": [{"name": name, "group": group, "shape": list(array.shape)} for group, name, array in entries],
    }
    encoded = json.dumps(header, ensure_ascii=False).encode("utf-8")
    try:
        checkpoint_path.parent.mkdir(parents=True, exist_ok=True)
        with open(checkpoint_path, "wb") as handle:
            handle.write(MAGIC)
            handle.write(struct.pack("<I", len(encoded)))
            handle.write(encoded)
            for _, _, array in entries:
                handle.write(np.ascontiguousarray(array, dtype=_DTYPE).tobytes())
    except OSError as e:
        raise ArtifactIOError(checkpoint_path, f"cannot write checkpoint: {e}") from e
    logger.info(f"Saved checkpoint V={header['V']} d={header['d']} to {checkpoint_path}")
    return checkpoint_path


def load_checkpoint(path) -> RewriterPolicy:
    checkpoint_path = Path(path)
    if not checkpoint_path.is_file():
        raise MissingArtifactError(checkpoint_path, "checkpoint")
    try:
        data = checkpoint_path.read_bytes()
    except OSError as e:
        raise ArtifactIOError(checkpoint_path, f"cannot read checkpoint: {e}") from e

    if data[: len(MAGIC)] != MAGIC:
        raise ArtifactIOError(checkpoint_path, "not a rewriter checkpoint")
    offset = len(MAGIC)
    try:
        (header_len,) = struct.unpack_from("<I", data, offset)
        offset += 4
        header = json.loads(data[offset : offset + header_len].decode("utf-8"))
    except (struct.error, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ArtifactIOError(checkpoint_path, f"corrupt checkpoint header: {e}") from e
    offset += header_len
    if header.get("version") != VERSION:
        raise ArtifactIOError(checkpoint_path, f"unsupported checkpoint version {header.get('version')}")

    groups = {"policy": {}, "value": {}}
    for entry in header["arrays"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        end = offset + count * _DTYPE.itemsize
        if end > len(data):
            raise ArtifactIOError(checkpoint_path, f"truncated array {entry['group']}.{entry['name']}")
        array = np.frombuffer(data, dtype=_DTYPE, count=count, offset=offset).reshape(shape)
        groups[entry["group"]][entry["name"]] = array.astype(np.float64)
        offset = end
    if offset != len(data):
        raise ArtifactIOError(checkpoint_path, f"{len(data) - offset} trailing bytes after arrays")

    try:
        params = PolicyParams(groups["policy"])
        value = ValueParams(groups["value"]) if groups["value"] else None
        policy = RewriterPolicy(Vocab(header["vocab"]), params, max_len=header["max_len"], value=value)
    except (KeyError, ValueError) as e:
        raise ArtifactIOError(checkpoint_path, f"inconsistent checkpoint: {e}") from e
    if params.vocab_size != header["V"] or params.dim != header["d"]:
        raise ArtifactIOError(checkpoint_path, "array shapes disagree with header V/d")
    logger.info(f"Loaded checkpoint V={header['V']} d={header['d']} from {checkpoint_path}")
    return policy
