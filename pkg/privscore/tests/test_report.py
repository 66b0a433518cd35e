#!/usr/bin/python3.9

# Copyright 2026 The privscore developers

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# <!-- SPDX-License-Identifier: Apache 2.0 -->
# <!-- SPDX-ArtifactOfProjectName: privscore -->
# <!-- SPDX-FileType: Source code -->

import os
import tempfile
import unittest

import numpy as np
import pandas as pd

from privscore.report import ChartRow, chart_rows, psc_chart, read_json, write_frame, write_json


class TestReport(unittest.TestCase):
    def test_json_of_numpy_values(self):
        document = {"a": np.float64(0.5), "b": np.int64(3), "c": np.array([1.0, np.nan]), "d": (1, 2),
                    "e": pd.DataFrame({"x": [1.0]})}
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "doc.json")
            write_json(document, path)
            self.assertEqual(read_json(path), {"a": 0.5, "b": 3, "c": [1.0, None], "d": [1, 2], "e": [{"x": 1.0}]})

    def test_frame_keeps_full_precision(self):
        frame = pd.DataFrame({"x": [0.1 + 0.2, 1 / 3]})
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "frame.csv")
            write_frame(frame, path)
            np.testing.assert_array_equal(pd.read_csv(path)["x"].to_numpy(), frame["x"].to_numpy())

    def test_chart_rows(self):
        record = {"ps": -0.67, "delta_g": 0.1, "delta_x": -0.4, "gamma_1": -0.25, "gamma_2": -0.12,
                  "ci_lower": -0.9, "ci_upper": -0.55, "gamma_1_lower": -0.39, "gamma_1_upper": -0.1,
                  "gamma_2_lower": float("nan"), "gamma_2_upper": float("nan")}
        rows = chart_rows(record, ["A->STEM", "A->Lead"], 2)
        self.assertEqual([row.label for row in rows], ["PS", "global intercept", "individual intercept",
                                                        "A->STEM", "A->Lead"])
        self.assertEqual(rows[0], ChartRow("PS", -0.67, -0.9, -0.55))
        self.assertIsNone(rows[1].lower)
        self.assertIsNone(rows[4].upper)

    def test_chart_is_reproducible(self):
        rows = [ChartRow("PS", -0.67, -0.9, -0.55), ChartRow("A->STEM", -0.25), ChartRow("A->Lead", 0.12)]
        with tempfile.TemporaryDirectory() as directory:
            first, second = os.path.join(directory, "a.svg"), os.path.join(directory, "b.svg")
            psc_chart(rows, first, "individual amina")
            psc_chart(rows, second, "individual amina")
            with open(first) as f, open(second) as g:
                content = f.read()
                self.assertEqual(content, g.read())
        self.assertIn("-0.670000", content)
        self.assertIn("<svg", content)


if __name__ == "__main__":
    unittest.main()
