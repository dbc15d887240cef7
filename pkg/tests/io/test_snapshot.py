import json
import tempfile
from pathlib import Path
from unittest import TestCase

import numpy as np
from parameterized import parameterized

from warpflow.counterflow.curve import ProfileCurve
from warpflow.geometry.base import HyperbolicPolar
from warpflow.geometry.warp import CoshRadial
from warpflow.graphflow.state import BoundaryPolicy
from warpflow.graphflow.state import GraphState
from warpflow.io.snapshot import dumps_snapshot
from warpflow.io.snapshot import load_snapshot
from warpflow.io.snapshot import loads_snapshot
from warpflow.io.snapshot import save_snapshot
from warpflow.io.snapshot import snapshot_name
from warpflow.utils.exceptions import CorruptSnapshotError
from warpflow.utils.exceptions import SnapshotVersionError


def disc_state() -> GraphState:
    base = HyperbolicPolar()
    grid = base.make_grid([16, 16], 2.0)
    rng = np.random.default_rng(3)
    return GraphState(base, CoshRadial(), grid, rng.normal(size=grid.shape) / 3, t=0.1 + 0.2)


class TestSnapshot(TestCase):
    def test_graph_state_is_restored_bitwise(self):
        state = disc_state()
        with tempfile.TemporaryDirectory() as tmp:
            path = save_snapshot(state, Path(tmp) / "nested" / snapshot_name(state.t, 3))
            restored = load_snapshot(path)
        self.assertEqual(restored.u.tobytes(), state.u.tobytes())
        self.assertEqual(restored.t, state.t)
        self.assertEqual(restored.grid, state.grid)
        self.assertEqual(restored.policy, BoundaryPolicy.dirichlet)
        self.assertEqual(restored.base.to_config(), state.base.to_config())
        self.assertEqual(restored.warp.to_config(), state.warp.to_config())

    def test_profile_curve_is_restored_bitwise(self):
        curve = ProfileCurve.geodesic_sphere(1.3, 33, n=3)
        curve = curve.evolve(curve.r, curve.u, 0.7)
        restored = loads_snapshot(dumps_snapshot(curve))
        self.assertEqual(restored.r.tobytes(), curve.r.tobytes())
        self.assertEqual(restored.u.tobytes(), curve.u.tobytes())
        self.assertEqual((restored.n, restored.t), (curve.n, curve.t))

    def test_name(self):
        self.assertEqual(snapshot_name(0.25, 7), "snapshot_0007_t0.250000.json")

    def test_rejects_other_objects(self):
        with self.assertRaises(TypeError):
            dumps_snapshot(np.zeros(3))


class TestCorruptSnapshot(TestCase):
    def setUp(self):
        self.data = dumps_snapshot(disc_state())

    def _with_header(self, **changes) -> bytes:
        head, _, body = self.data.partition(b"\n")
        header = {**json.loads(head), **changes}
        return json.dumps(header).encode() + b"\n" + body

    @parameterized.expand(
        [
            ("truncated", lambda d: d[:-10]),
            ("flipped", lambda d: d[:-2] + bytes([d[-2] ^ 1]) + d[-1:]),
            ("no_header", lambda d: b"\x00\x01" + d),
            ("empty", lambda d: b""),
        ]
    )
    def test_corrupt(self, _, mangle):
        with self.assertRaises(CorruptSnapshotError):
            loads_snapshot(mangle(self.data))

    def test_other_format(self):
        with self.assertRaises(CorruptSnapshotError):
            loads_snapshot(self._with_header(format="npz"))

    def test_version_mismatch(self):
        with self.assertRaises(SnapshotVersionError):
            loads_snapshot(self._with_header(version=2))

    def test_path_in_message(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "broken.json"
            path.write_bytes(self.data[:-1])
            with self.assertRaises(CorruptSnapshotError) as ctx:
                load_snapshot(path)
        self.assertIn("broken.json", str(ctx.exception))
