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

import glob
import os
import shutil
import tempfile
import unittest

import numpy as np
import pandas as pd

from privscore.cli import EXIT_INPUT, EXIT_OK, build_parser, explain, main
from privscore.config.run_config import SIMULATION_COLUMNS, SIMULATION_DAG
from privscore.config.test_config import TEST_AMINA_RUN_DIR
from privscore.dataset import write_csv
from privscore.errors import InputError
from privscore.report import read_json
from privscore.scm import ScmSpec, sample_frame, simulation_table


class TestAudit(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.directory = tempfile.mkdtemp()
        cls.data = os.path.join(cls.directory, "data.csv")
        write_csv(simulation_table(sample_frame(ScmSpec("SC", 150, 8))), cls.data, with_ids=True)
        cls.out = os.path.join(cls.directory, "run")
        cls.code = main(cls.arguments(cls.out) + ["--svg"])

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.directory)

    @classmethod
    def arguments(cls, out):
        return ["audit", "--data", cls.data, "--dag", SIMULATION_DAG, "--columns", SIMULATION_COLUMNS,
                "--id-column", "id", "--model", "logistic", "--bootstrap", "20", "--seed", "2", "--out", out]

    def test_outputs(self):
        self.assertEqual(self.code, EXIT_OK)
        for name in ("psc.csv", "warped.csv", "subgroup.json", "describe.json", "regression.json",
                     "regression.txt", "run.json"):
            self.assertTrue(os.path.exists(os.path.join(self.out, name)), name)
        self.assertEqual(len(glob.glob(os.path.join(self.out, "chart_*.svg"))), 12)

    def test_psc_table(self):
        frame = pd.read_csv(os.path.join(self.out, "psc.csv"), dtype={"id": str})
        self.assertEqual(len(frame), 30)
        for column in ("id", "ps", "delta0", "delta_g", "delta_x", "gamma_1", "gamma_2", "ci_lower", "ci_upper",
                       "gamma_1_lower", "gamma_2_upper", "alpha", "B"):
            self.assertIn(column, frame)
        total = frame["delta0"] + frame["gamma_1"] + frame["gamma_2"]
        np.testing.assert_allclose(total.to_numpy(), frame["ps"].to_numpy(), atol=1e-12)
        self.assertTrue((frame["B"] == 20).all())

    def test_run_document(self):
        run = read_json(os.path.join(self.out, "run.json"))
        self.assertEqual(run["arrows"], [["A", "X1"], ["A", "X2"]])
        self.assertEqual(run["config"]["model_kind"], "logistic")
        self.assertEqual(len(run["ids"]), 30)

    def test_reproducible(self):
        again = os.path.join(self.directory, "again")
        self.assertEqual(main(self.arguments(again)), EXIT_OK)
        with open(os.path.join(self.out, "psc.csv")) as f, open(os.path.join(again, "psc.csv")) as g:
            self.assertEqual(f.read(), g.read())

    def test_explain_audit_row(self):
        frame = pd.read_csv(os.path.join(self.out, "psc.csv"), dtype={"id": str})
        record, rows = explain(self.out, frame["id"].iloc[0])
        self.assertAlmostEqual(rows[0].value, frame["ps"].iloc[0], places=12)
        self.assertEqual(rows[3].label, "A->X1")


class TestExplain(unittest.TestCase):
    def test_stored_run(self):
        record, rows = explain(TEST_AMINA_RUN_DIR, "amina")
        self.assertAlmostEqual(record["ps"], -0.67, places=12)
        self.assertEqual([row.label for row in rows], ["PS", "global intercept", "individual intercept",
                                                        "A->STEM", "A->Lead"])
        self.assertEqual((rows[0].lower, rows[0].upper), (-0.9, -0.55))
        self.assertAlmostEqual(sum(row.value for row in rows[1:]), record["ps"], places=12)

    def test_unknown_id(self):
        with self.assertRaises(InputError) as context:
            explain(TEST_AMINA_RUN_DIR, "carol")
        self.assertIn("amina", str(context.exception))

    def test_command(self):
        with tempfile.TemporaryDirectory() as directory:
            code = main(["explain", "--run", TEST_AMINA_RUN_DIR, "--id", "amina", "--out", directory])
            self.assertEqual(code, EXIT_OK)
            document = read_json(os.path.join(directory, "explain_amina.json"))
            self.assertTrue(os.path.exists(os.path.join(directory, "explain_amina.svg")))
        self.assertEqual(len(document["bars"]), 5)
        self.assertEqual(main(["explain", "--run", TEST_AMINA_RUN_DIR, "--id", "carol"]), EXIT_INPUT)


class TestCommands(unittest.TestCase):
    def test_simulate(self):
        with tempfile.TemporaryDirectory() as directory:
            code = main(["simulate", "--scenario", "sc", "--n", "200", "--iters", "1", "--bootstrap", "0",
                         "--model", "logistic", "--out", directory])
            self.assertEqual(code, EXIT_OK)
            metrics = pd.read_csv(os.path.join(directory, "metrics.csv"))
            sample = pd.read_csv(os.path.join(directory, "sample.csv"))
            document = read_json(os.path.join(directory, "metrics.json"))
        self.assertEqual(set(metrics["metric"]), {"bias", "mse"})
        self.assertEqual(len(sample), 200)
        self.assertEqual(document["config"]["scenario"], "SC")

    def test_pfi(self):
        with tempfile.TemporaryDirectory() as directory:
            data = os.path.join(directory, "data.csv")
            write_csv(simulation_table(sample_frame(ScmSpec("SC", 120, 3))), data)
            code = main(["pfi", "--data", data, "--dag", SIMULATION_DAG, "--columns", SIMULATION_COLUMNS,
                         "--model", "logistic", "--repeats", "2", "--out", directory])
            self.assertEqual(code, EXIT_OK)
            importances = pd.read_csv(os.path.join(directory, "pfi.csv"))
        self.assertEqual(importances["feature"].tolist(), ["A", "C", "X1", "X2"])
        self.assertTrue((importances["importance"] >= 0).all())

    def test_missing_data(self):
        with tempfile.TemporaryDirectory() as directory:
            code = main(["audit", "--data", os.path.join(directory, "absent.csv"), "--dag", SIMULATION_DAG,
                         "--columns", SIMULATION_COLUMNS, "--out", directory])
        self.assertEqual(code, EXIT_INPUT)

    def test_missing_dag(self):
        with tempfile.TemporaryDirectory() as directory:
            data = os.path.join(directory, "data.csv")
            write_csv(simulation_table(sample_frame(ScmSpec("SC", 100, 4))), data, with_ids=True)
            code = main(["audit", "--data", data, "--dag", os.path.join(directory, "absent.json"),
                         "--columns", SIMULATION_COLUMNS, "--id-column", "id", "--model", "logistic",
                         "--out", os.path.join(directory, "run")])
        self.assertEqual(code, EXIT_INPUT)

    def test_invalid_flag_value(self):
        with tempfile.TemporaryDirectory() as directory:
            code = main(["simulate", "--alpha", "2", "--out", directory])
        self.assertEqual(code, EXIT_INPUT)

    def test_parser(self):
        args = build_parser().parse_args(["audit", "--data", "d.csv", "--dag", "g.json", "--no-reuse-tuning"])
        self.assertIs(args.reuse_tuning, False)
        self.assertIsNone(args.seed)


if __name__ == "__main__":
    unittest.main()
