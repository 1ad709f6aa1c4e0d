"""File formats for latent tensors and trajectories.

A latent tensor file is a single JSON header line
``{"dims": [L, d], "dtype": "f32le"}`` followed by a newline and L*d
little-endian float32 values in row-major order. A trajectory is a
directory of such files plus a ``manifest.json`` listing the timesteps.

All writers go through a temp-file-plus-rename so partially written
outputs are never observed.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

__all__ = [
    "atomic_write_bytes",
    "atomic_write_text",
    "write_json",
    "read_json",
    "write_latents",
    "read_latents",
    "save_trajectory",
    "load_trajectory",
]

_HEADER_DTYPE = "f32le"


def atomic_write_bytes(path, data: bytes) -> None:
    """Write bytes to path via a temp file and rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def write_json(path, obj) -> None:
    """Serialize obj as deterministic JSON (sorted keys, fixed separators)."""
    atomic_write_text(path, json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=1) + "\n")


def read_json(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _check_latents(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"latent tensor must be 2-D, got shape {arr.shape}")
    L, d = arr.shape
    if L < 1 or d < 3:
        raise ValueError(f"latent tensor needs L >= 1 patches and d >= 3 dims, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("latent tensor contains non-finite values")
    return arr


def write_latents(path, arr: np.ndarray) -> None:
    """Write an (L, d) array as a header line plus packed float32 rows."""
    arr = _check_latents(arr)
    header = json.dumps({"dims": [int(arr.shape[0]), int(arr.shape[1])], "dtype": _HEADER_DTYPE})
    payload = header.encode("ascii") + b"\n" + np.ascontiguousarray(arr, dtype="<f4").tobytes()
    atomic_write_bytes(path, payload)


def read_latents(path) -> np.ndarray:
    """Read a latent tensor file, validating header and payload length."""
    with open(path, "rb") as f:
        raw = f.read()
    nl = raw.find(b"\n")
    if nl < 0:
        raise ValueError(f"{path}: missing header line")
    try:
        header = json.loads(raw[:nl].decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ValueError(f"{path}: malformed header: {e}") from e
    if not isinstance(header, dict) or header.get("dtype") != _HEADER_DTYPE:
        raise ValueError(f"{path}: unsupported header {header!r}")
    dims = header.get("dims")
    if (
        not isinstance(dims, list)
        or len(dims) != 2
        or not all(isinstance(v, int) and v > 0 for v in dims)
    ):
        raise ValueError(f"{path}: bad dims {dims!r}")
    L, d = dims
    body = raw[nl + 1:]
    if len(body) != L * d * 4:
        raise ValueError(f"{path}: expected {L * d * 4} payload bytes, found {len(body)}")
    arr = np.frombuffer(body, dtype="<f4").reshape(L, d).astype(np.float64)
    return _check_latents(arr)


def save_trajectory(dirpath, traj: np.ndarray) -> Path:
    """Write a (T+1, L, d) trajectory as one file per step plus a manifest.

    Returns the manifest path.
    """
    traj = np.asarray(traj, dtype=np.float64)
    if traj.ndim != 3:
        raise ValueError(f"trajectory must be (T+1, L, d), got shape {traj.shape}")
    dirpath = Path(dirpath)
    dirpath.mkdir(parents=True, exist_ok=True)
    steps = []
    for t in range(traj.shape[0]):
        name = f"t{t:03d}.lt"
        write_latents(dirpath / name, traj[t])
        steps.append({"t": t, "file": name})
    manifest = {
        "T": traj.shape[0] - 1,
        "dims": [int(traj.shape[1]), int(traj.shape[2])],
        "steps": steps,
    }
    path = dirpath / "manifest.json"
    write_json(path, manifest)
    return path


def load_trajectory(manifest_path) -> np.ndarray:
    """Read a trajectory manifest back into a (T+1, L, d) array."""
    manifest_path = Path(manifest_path)
    manifest = read_json(manifest_path)
    try:
        T = manifest["T"]
        steps = manifest["steps"]
    except (TypeError, KeyError) as e:
        raise ValueError(f"{manifest_path}: malformed manifest") from e
    if not isinstance(T, int) or T < 0 or len(steps) != T + 1:
        raise ValueError(f"{manifest_path}: manifest lists {len(steps)} steps for T={T}")
    by_t = {}
    for step in steps:
        by_t[step["t"]] = manifest_path.parent / step["file"]
    if sorted(by_t) != list(range(T + 1)):
        raise ValueError(f"{manifest_path}: timesteps not contiguous from 0 to {T}")
    frames = [read_latents(by_t[t]) for t in range(T + 1)]
    shapes = {f.shape for f in frames}
    if len(shapes) != 1:
        raise ValueError(f"{manifest_path}: mixed tensor shapes {sorted(shapes)}")
    return np.stack(frames)
