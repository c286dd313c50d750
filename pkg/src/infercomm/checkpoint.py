"""Checkpoint files: parameters plus optimizer moments, bit-exact round trip.

Layout (all integers little-endian):

    bytes 0..7    magic  b"ICMCKPT\\x01"  (last byte = format version)
    bytes 8..11   uint32 header length H
    bytes 12..12+H  UTF-8 JSON header:
        store_version  int
        meta           free-form string/number map (experiment, phase, ...)
        entries        [{name, shape}, ...]   order fixes the payload order
        optimizers     [{id, kind, t, names}, ...]
    payload       float64 little-endian, no padding:
        for each entry: values
        for each optimizer, for each of its names: Adam m then v
        (sgd optimizers contribute no payload)

Loading reproduces the exact bytes on save, so save->load->save is stable.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigurationError
from .params import ParameterStore

MAGIC = b"ICMCKPT\x01"


def save_checkpoint(
    path: str | Path,
    store: ParameterStore,
    meta: dict[str, Any],
    optimizers: dict[str, Any] | None = None,
) -> None:
    optimizers = optimizers or {}
    header: dict[str, Any] = {
        "store_version": store.version,
        "meta": meta,
        "entries": [{"name": n, "shape": list(e.shape)} for n, e in store.entries.items()],
        "optimizers": [],
    }
    payload = bytearray()
    for name in store.entries:
        payload += store.values(name).astype("<f8").tobytes()
    for opt_id, opt in optimizers.items():
        state = opt.state_dict() if hasattr(opt, "state_dict") else opt
        names = list(state["moments"])
        header["optimizers"].append(
            {"id": opt_id, "kind": state["kind"], "t": state["t"], "names": names}
        )
        for name in names:
            m, v = state["moments"][name]
            payload += np.asarray(m).astype("<f8").tobytes()
            payload += np.asarray(v).astype("<f8").tobytes()

    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(bytes(payload))


def load_checkpoint(path: str | Path) -> tuple[ParameterStore, dict[str, Any], dict[str, dict]]:
    """Returns (store, meta, optimizer states keyed by id)."""
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise ConfigurationError(f"{path}: not a checkpoint file (bad magic)")
    (hlen,) = struct.unpack("<I", raw[8:12])
    header = json.loads(raw[12 : 12 + hlen].decode("utf-8"))
    offset = 12 + hlen

    def read_array(shape: tuple[int, ...]) -> np.ndarray:
        nonlocal offset
        size = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(raw, dtype="<f8", count=size, offset=offset).reshape(shape)
        offset += size * 8
        return np.array(arr, dtype=np.float64)

    store = ParameterStore()
    shapes: dict[str, tuple[int, ...]] = {}
    for item in header["entries"]:
        shape = tuple(item["shape"])
        shapes[item["name"]] = shape
        store.add(item["name"], read_array(shape))
    store.version = int(header["store_version"])

    opt_states: dict[str, dict] = {}
    for opt in header["optimizers"]:
        moments = {}
        for name in opt["names"]:
            m = read_array(shapes[name])
            v = read_array(shapes[name])
            moments[name] = (m, v)
        opt_states[opt["id"]] = {"kind": opt["kind"], "t": opt["t"], "moments": moments}
    if offset != len(raw):
        raise ConfigurationError(f"{path}: {len(raw) - offset} trailing bytes")
    return store, header["meta"], opt_states
