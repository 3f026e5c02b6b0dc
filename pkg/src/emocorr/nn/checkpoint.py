"""Self-describing checkpoint files with bit-exact round trips.

Layout: a zip archive holding ``meta.json`` (format version, variant tag,
dimensions) plus one ``<name>.npy`` entry per parameter tensor, every tensor
stored as little-endian float64 (``<f8``). All zip timestamps are pinned so
identical parameters always serialize to identical bytes.
"""

from __future__ import annotations

import io
import json
import zipfile

import numpy as np

from ..errors import ConfigurationError
from .model import LstmLayerParams, ModelDims, ModelParams, ModelVariant

FORMAT_VERSION = 1
_EPOCH = (1980, 1, 1, 0, 0, 0)  # earliest timestamp zip can represent


def _npy_bytes(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    np.lib.format.write_array(buf, np.ascontiguousarray(arr, dtype="<f8"))
    return buf.getvalue()


def save_checkpoint(params: ModelParams, path) -> None:
    params.validate()
    meta = {
        "format_version": FORMAT_VERSION,
        "variant": params.variant.value,
        "dims": {
            "vocab_size": params.dims.vocab_size,
            "embed_dim": params.dims.embed_dim,
            "conv_dim": params.dims.conv_dim,
            "lstm1_dim": params.dims.lstm1_dim,
            "lstm2_dim": params.dims.lstm2_dim,
            "num_classes": params.dims.num_classes,
        },
        "tensors": [name for name, _ in params.named_arrays()],
    }
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as zf:
        info = zipfile.ZipInfo("meta.json", date_time=_EPOCH)
        zf.writestr(info, json.dumps(meta, sort_keys=True, indent=2) + "\n")
        for name, arr in params.named_arrays():
            info = zipfile.ZipInfo(name + ".npy", date_time=_EPOCH)
            zf.writestr(info, _npy_bytes(arr))


def load_checkpoint(path) -> ModelParams:
    with zipfile.ZipFile(path) as zf:
        meta = json.loads(zf.read("meta.json").decode())
        if meta.get("format_version") != FORMAT_VERSION:
            raise ConfigurationError(
                f"unsupported checkpoint format version: {meta.get('format_version')}"
            )
        tensors = {}
        for name in meta["tensors"]:
            with zf.open(name + ".npy") as fh:
                tensors[name] = np.lib.format.read_array(fh)
    dims = ModelDims(**meta["dims"])
    variant = ModelVariant(meta["variant"])
    params = ModelParams(
        variant=variant,
        dims=dims,
        embedding=tensors["embedding"],
        conv_w=tensors["conv_w"],
        conv_b=tensors["conv_b"],
        lstm1=LstmLayerParams(tensors["lstm1.w_x"], tensors["lstm1.w_h"],
                              tensors["lstm1.b"]),
        lstm2=LstmLayerParams(tensors["lstm2.w_x"], tensors["lstm2.w_h"],
                              tensors["lstm2.b"]),
        out_w=tensors["out_w"],
        out_b=tensors["out_b"],
        stack_w=tensors.get("stack_w"),
        stack_b=tensors.get("stack_b"),
    )
    params.validate()
    return params
