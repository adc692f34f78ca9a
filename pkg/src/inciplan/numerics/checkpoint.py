"""Model checkpoint file: JSON header line + raw little-endian float64 arrays."""

from __future__ import annotations

import json

import numpy as np

from inciplan.numerics.tensor import NumericsError, Tensor

CHECKPOINT_FORMAT_VERSION = 1


def save_params(path, params: dict[str, Tensor], meta: dict | None = None) -> None:
    """Write parameters in manifest order after a one-line JSON header."""
    manifest = [{"name": k, "shape": list(v.shape)} for k, v in params.items()]
    header = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "manifest": manifest,
        "meta": meta or {},
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        for value in params.values():
            fh.write(np.ascontiguousarray(value.data, dtype="<f8").tobytes())


def load_params(path) -> tuple[dict[str, np.ndarray], dict]:
    """Read back (arrays keyed by name, meta)."""
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode())
        if header.get("format_version") != CHECKPOINT_FORMAT_VERSION:
            raise NumericsError(
                f"unsupported checkpoint format_version: {header.get('format_version')!r}"
            )
        arrays: dict[str, np.ndarray] = {}
        for entry in header["manifest"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            buf = fh.read(count * 8)
            if len(buf) != count * 8:
                raise NumericsError(f"checkpoint truncated at array {entry['name']!r}")
            arrays[entry["name"]] = np.frombuffer(buf, dtype="<f8").reshape(shape).copy()
    return arrays, header.get("meta", {})


def restore_params(params: dict[str, Tensor], arrays: dict[str, np.ndarray]) -> None:
    """Copy loaded arrays into live parameters, validating shapes."""
    missing = set(params) - set(arrays)
    if missing:
        raise NumericsError(f"checkpoint missing parameters: {sorted(missing)}")
    for key, p in params.items():
        arr = arrays[key]
        if arr.shape != p.shape:
            raise NumericsError(
                f"checkpoint shape mismatch for {key!r}: {arr.shape} vs {p.shape}"
            )
        p.data = arr.astype(p.data.dtype)
