import json
import math
import tempfile
from pathlib import Path
from unittest import mock
from unittest import TestCase

import numpy as np
from omegaconf import OmegaConf
from parameterized import parameterized

from warpflow.geometry.base import FlatTorus
from warpflow.utils.config import print_config
from warpflow.utils.exceptions import catch_exception_as_warning
from warpflow.utils.functional import maybe_instantiate
from warpflow.utils.functional import to_container
from warpflow.utils.functional import to_jsonable
from warpflow.utils.reporting import indexed_output_file
from warpflow.utils.reporting import JsonReporter
from warpflow.utils.resolvers import register_resolvers


class TestFunctional(TestCase):
    @parameterized.expand(
        [
            ("nan", math.nan, "nan"),
            ("inf", -math.inf, "-inf"),
            ("numpy_int", np.int64(3), 3),
            ("numpy_bool", np.bool_(True), True),
            ("array", np.array([1.5, np.inf]), [1.5, "inf"]),
            ("nested", {1: (np.float32(0.5),)}, {"1": [0.5]}),
        ]
    )
    def test_to_jsonable(self, _, value, expected):
        self.assertEqual(to_jsonable(value), expected)
        json.dumps(to_jsonable(value), allow_nan=False)

    def test_maybe_instantiate(self):
        torus = maybe_instantiate({"_target_": "warpflow.geometry.base.FlatTorus"})
        self.assertIsInstance(torus, FlatTorus)
        self.assertIs(maybe_instantiate(torus), torus)

    def test_to_container(self):
        self.assertEqual(to_container(None), {})
        self.assertEqual(to_container(OmegaConf.create({"a": "${b}", "b": 1})), {"a": 1, "b": 1})

    def test_catch_exception_as_warning(self):
        @catch_exception_as_warning
        def fails():
            raise RuntimeError("boom")

        self.assertIsNone(fails())


class TestReporting(TestCase):
    def test_indexed_output_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            first = indexed_output_file(Path(tmp) / "sub" / "report.json")
            self.assertEqual(first.name, "0_report.json")
            first.write_text("{}")
            second = indexed_output_file(Path(tmp) / "sub" / "report.json")
            self.assertEqual(second.name, "1_report.json")

    def test_json_reporter(self):
        with tempfile.TemporaryDirectory() as tmp:
            reporter = JsonReporter(output_dir=tmp, verbose=True)
            path = reporter._process_results({"margin": -math.inf, "records": [1, 2]})
            self.assertEqual(json.loads(path.read_text()), {"margin": "-inf", "records": [1, 2]})
        self.assertIsNone(JsonReporter()._process_results({"a": 1}))

    def test_resolvers_are_registered_once(self):
        register_resolvers()
        register_resolvers()
        conf = OmegaConf.create({"rev": "${git_hash_short:}"})
        self.assertIsInstance(conf.rev, str)


class TestPrintConfig(TestCase):
    def test_sections_follow_the_run_order(self):
        conf = OmegaConf.create(
            {
                "print_config": True,
                "scenario": {"name": "t", "flow": {"horizon": 1.0}, "base": {"kind": "flat-torus"}},
            }
        )
        with mock.patch("warpflow.utils.config.rich.print") as printed:
            print_config(conf)
        tree = printed.call_args[0][0]
        self.assertEqual([str(c.label) for c in tree.children], ["run", "base", "flow"])
