"""
Snapshots of graph states and profile curves.

A snapshot is one JSON header line followed by a JSON payload. The header carries the format
version, the payload length in bytes and its SHA-256; the payload lists the node values in
row-major order. JSON writes floats with their shortest round-tripping representation, so a
load reproduces every double bitwise.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any
from typing import Dict
from typing import Union

import numpy as np
from loguru import logger

from warpflow.counterflow.curve import ProfileCurve
from warpflow.geometry.catalog import build_pair
from warpflow.geometry.grid import Chart
from warpflow.geometry.grid import Grid
from warpflow.graphflow.state import GraphState
from warpflow.utils.exceptions import CorruptSnapshotError
from warpflow.utils.exceptions import SnapshotVersionError

SNAPSHOT_FORMAT = "warpflow-snapshot"
SNAPSHOT_VERSION = 1
GRAPH_STATE = "graph-state"
PROFILE_CURVE = "profile-curve"

Snapshot = Union[GraphState, ProfileCurve]


def grid_to_dict(grid: Grid) -> Dict[str, Any]:
    return {
        "chart": grid.chart.value,
        "shape": list(grid.shape),
        "spacing": list(grid.spacing),
        "origin": list(grid.origin),
        "periodic": list(grid.periodic),
    }


def grid_from_dict(d: Dict[str, Any]) -> Grid:
    return Grid(
        chart=Chart(d["chart"]),
        shape=tuple(int(n) for n in d["shape"]),
        spacing=tuple(float(h) for h in d["spacing"]),
        origin=tuple(float(o) for o in d["origin"]),
        periodic=tuple(bool(p) for p in d["periodic"]),
    )


def _describe(obj: Snapshot):
    if isinstance(obj, GraphState):
        header = {
            "kind": GRAPH_STATE,
            "base": obj.base.to_config(),
            "warp": obj.warp.to_config(),
            "grid": grid_to_dict(obj.grid),
            "policy": obj.policy.value,
            "t": obj.t,
        }
        payload = obj.u.ravel(order="C").tolist()
    elif isinstance(obj, ProfileCurve):
        header = {"kind": PROFILE_CURVE, "n": obj.n, "t": obj.t}
        payload = {"r": obj.r.tolist(), "u": obj.u.tolist()}
    else:
        raise TypeError(f"Cannot snapshot objects of type {type(obj)}")
    return header, payload


def dumps_snapshot(obj: Snapshot) -> bytes:
    header, payload = _describe(obj)
    body = json.dumps(payload, allow_nan=False).encode("utf-8")
    header = {
        "format": SNAPSHOT_FORMAT,
        "version": SNAPSHOT_VERSION,
        **header,
        "length": len(body),
        "sha256": hashlib.sha256(body).hexdigest(),
    }
    return json.dumps(header).encode("utf-8") + b"\n" + body


def loads_snapshot(data: bytes) -> Snapshot:
    head, sep, body = data.partition(b"\n")
    try:
        header = json.loads(head.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise CorruptSnapshotError(f"unreadable snapshot header: {err}") from err
    if not isinstance(header, dict) or header.get("format") != SNAPSHOT_FORMAT:
        raise CorruptSnapshotError("not a warpflow snapshot")
    if header.get("version") != SNAPSHOT_VERSION:
        raise SnapshotVersionError(
            f"snapshot version {header.get('version')} != supported version {SNAPSHOT_VERSION}"
        )
    if not sep or len(body) != header.get("length"):
        raise CorruptSnapshotError(
            f"payload has {len(body)} bytes, the header announces {header.get('length')}"
        )
    if hashlib.sha256(body).hexdigest() != header.get("sha256"):
        raise CorruptSnapshotError("payload checksum mismatch")
    payload = json.loads(body.decode("utf-8"))

    if header["kind"] == GRAPH_STATE:
        base, warp = build_pair(header["base"], header["warp"])
        grid = grid_from_dict(header["grid"])
        u = np.array(payload, dtype=np.float64)
        if u.size != grid.size:
            raise CorruptSnapshotError(f"{u.size} node values for a grid of {grid.size} nodes")
        return GraphState(
            base=base,
            warp=warp,
            grid=grid,
            u=u.reshape(grid.shape, order="C"),
            t=header["t"],
            policy=header["policy"],
        )
    elif header["kind"] == PROFILE_CURVE:
        return ProfileCurve(
            r=np.array(payload["r"], dtype=np.float64),
            u=np.array(payload["u"], dtype=np.float64),
            n=int(header["n"]),
            t=header["t"],
        )
    else:
        raise CorruptSnapshotError(f"Unknown snapshot kind: {header['kind']}")


def save_snapshot(obj: Snapshot, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(exist_ok=True, parents=True)
    path.write_bytes(dumps_snapshot(obj))
    logger.debug(f"Saved snapshot t={obj.t:.6g} to {path}")
    return path


def load_snapshot(path: Union[str, Path]) -> Snapshot:
    path = Path(path)
    try:
        return loads_snapshot(path.read_bytes())
    except (CorruptSnapshotError, SnapshotVersionError) as err:
        raise type(err)(f"{path}: {err}") from err


def snapshot_name(t: float, index: int) -> str:
    return f"snapshot_{index:04d}_t{t:.6f}.json"
