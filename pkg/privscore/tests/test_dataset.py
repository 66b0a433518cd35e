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

from privscore.config.test_config import (TEST_TOY_CSV, TEST_TOY_COLUMNS, TEST_BAD_BINARY_CSV, TEST_HMDA_RAW,
                                          TEST_LAWSCHOOL_RAW)
from privscore.dataset import (ColumnSpec, DatasetTable, apply_recipe, describe, load_column_specs, load_csv,
                               load_raw_csv, split, write_csv)
from privscore.errors import InputError
from privscore.scm import ScmSpec, sample_frame, simulation_table


class TestLoadCsv(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.specs = load_column_specs(TEST_TOY_COLUMNS)

    def test_roles(self):
        table = load_csv(TEST_TOY_CSV, self.specs)
        self.assertEqual(table.n, 3)
        self.assertEqual(table.pa, "A")
        self.assertEqual(table.target, "Y")
        self.assertEqual(table.confounders, ["C"])
        self.assertEqual(table.features, ["X1", "X2"])
        self.assertEqual(table.predictors, ["A", "C", "X1", "X2"])
        self.assertEqual(table.frame["C"].tolist(), [31.5, 22.0, 40.125])

    def test_non_binary_value_names_cell(self):
        with self.assertRaises(InputError) as context:
            load_csv(TEST_BAD_BINARY_CSV, self.specs)
        self.assertIn("row 2", str(context.exception))
        self.assertIn("X2", str(context.exception))

    def test_unknown_column(self):
        specs = [spec for spec in self.specs if spec.name != "C"]
        with self.assertRaises(InputError) as context:
            load_csv(TEST_TOY_CSV, specs)
        self.assertIn("'C'", str(context.exception))

    def test_parse_failure_names_cell(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "bad.csv")
            with open(path, "w") as f:
                f.write("A,C,X1,X2,Y\n1,abc,3.0,1,0\n")
            with self.assertRaises(InputError) as context:
                load_csv(path, self.specs)
        self.assertIn("row 1", str(context.exception))
        self.assertIn("'C'", str(context.exception))

    def test_missing_rows_rejected(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "missing.csv")
            with open(path, "w") as f:
                f.write("A,C,X1,X2,Y\n1,20,3.0,1,0\n0,NA,2.0,0,1\n1,25,,1,1\n0,30,4.0,0,0\n")
            with self.assertLogs(level="WARNING"):
                table = load_csv(path, self.specs)
        self.assertEqual(table.n, 2)
        self.assertEqual(table.ids, ["1", "4"])

    def test_non_finite_rows_rejected(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "infinite.csv")
            with open(path, "w") as f:
                f.write("A,C,X1,X2,Y\n1,20,3.0,1,0\n0,inf,2.0,0,1\n1,25,-Inf,1,1\n0,NAN,1.0,0,0\n"
                        "1,1e999,2.5,1,0\n0,30,4.0,0,0\n")
            with self.assertLogs(level="WARNING"):
                table = load_csv(path, self.specs)
        self.assertEqual(table.n, 2)
        self.assertEqual(table.ids, ["1", "6"])
        self.assertTrue(np.isfinite(table.frame.to_numpy(dtype=float)).all())

    def test_ignore_columns_dropped(self):
        specs = self.specs[:1] + [ColumnSpec("C", "numeric", "ignore")] + self.specs[2:]
        table = load_csv(TEST_TOY_CSV, specs)
        self.assertEqual(table.names, ["A", "X1", "X2", "Y"])

    def test_missing_file(self):
        with self.assertRaises(InputError):
            load_csv("no/such/file.csv", self.specs)

    def test_two_pa_columns(self):
        frame = pd.DataFrame({"A": [0.0, 1.0], "B": [1.0, 0.0], "Y": [0.0, 1.0]})
        specs = [ColumnSpec("A", "binary", "pa"), ColumnSpec("B", "binary", "pa"), ColumnSpec("Y", "binary", "target")]
        with self.assertRaises(InputError):
            DatasetTable(frame, specs)

    def test_unknown_kind(self):
        with self.assertRaises(InputError):
            ColumnSpec("A", "ordinal", "pa")

    def test_round_trip(self):
        table = simulation_table(sample_frame(ScmSpec("SC", 50, 3)))
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "table.csv")
            write_csv(table, path)
            reloaded = load_csv(path, table.columns)
        for name in table.names:
            np.testing.assert_array_equal(reloaded.frame[name].to_numpy(), table.frame[name].to_numpy())


class TestRecipes(unittest.TestCase):
    def test_hmda(self):
        with self.assertLogs(level="WARNING"):
            table = apply_recipe(load_raw_csv(TEST_HMDA_RAW), "hmda")
        self.assertEqual(table.n, 3)
        self.assertEqual(table.ids, ["1", "2", "6"])
        first = table.row(0)
        self.assertEqual(first["action"], 1.0)
        self.assertEqual(first["race"], 1.0)
        self.assertEqual(first["debt"], 1.0)
        self.assertEqual(first["purpose"], 1.0)
        self.assertEqual(first["age"], 0.0)
        self.assertEqual(first["sex"], 1.0)
        self.assertEqual(first["amount"], 85000.0)
        second = table.row(1)
        self.assertEqual([second[name] for name in ("action", "race", "debt", "purpose", "age", "sex")],
                         [0.0, 0.0, 0.0, 0.0, 1.0, 0.0])

    def test_lawschool(self):
        with self.assertLogs(level="WARNING"):
            table = apply_recipe(load_raw_csv(TEST_LAWSCHOOL_RAW), "lawschool")
        self.assertEqual(table.n, 3)
        first = table.row(0)
        self.assertEqual((first["race"], first["ugpa"], first["lsat"], first["pass_bar"]), (0.0, 2.0, 21.0, 0.0))
        self.assertEqual(table.frame["race"].tolist(), [0.0, 1.0, 1.0])

    def test_lawschool_gender(self):
        raw = pd.DataFrame({"gender": ["Female", "male", "other", "1"], "ugpa": ["2.0", "3.5", "3.1", "3.3"],
                            "lsat": ["21.0", "40.0", "33.0", "35.0"], "pass_bar": ["0", "1", "1", "0"]})
        with self.assertLogs(level="WARNING"):
            table = apply_recipe(raw, "lawschool_gender")
        self.assertEqual(table.pa, "gender")
        self.assertEqual(table.target, "pass_bar")
        self.assertEqual(table.ids, ["1", "2", "4"])
        self.assertEqual(table.frame["gender"].tolist(), [0.0, 1.0, 1.0])
        self.assertEqual(table.frame["lsat"].tolist(), [21.0, 40.0, 35.0])

    def test_idempotent(self):
        raw = load_raw_csv(TEST_LAWSCHOOL_RAW)
        once = apply_recipe(raw, "lawschool")
        twice = apply_recipe(once, "lawschool")
        pd.testing.assert_frame_equal(once.frame, twice.frame)

        encoded = once.frame.astype(str)
        again = apply_recipe(encoded, "lawschool")
        pd.testing.assert_frame_equal(once.frame, again.frame)

    def test_hmda_idempotent_on_encoded_frame(self):
        table = apply_recipe(load_raw_csv(TEST_HMDA_RAW), "hmda")
        again = apply_recipe(table.frame.astype(str), "hmda")
        pd.testing.assert_frame_equal(table.frame, again.frame)

    def test_missing_source_column(self):
        raw = load_raw_csv(TEST_LAWSCHOOL_RAW).drop(columns=["lsat"])
        with self.assertRaises(InputError) as context:
            apply_recipe(raw, "lawschool")
        self.assertIn("lsat", str(context.exception))

    def test_fuzzed_rows_satisfy_specs(self):
        rng = np.random.default_rng(11)
        races = ["White", "Black or African American", "Asian", "Race Not Available", "Joint"]
        dtis = ["<20%", "20%-<30%", "30%-<36%", "36", "41", "50%-60%", ">60%", "Exempt", "NA"]
        ages = ["<25", "25-34", "35-44", "45-54", "55-64", "65-74", ">74", "8888"]
        sexes = ["Male", "Female", "Joint", "Sex Not Available"]
        n = 200
        raw = pd.DataFrame({
            "action_taken": rng.choice(["1", "2", "3", "4", "5", "6", "7", "8"], n),
            "derived_race": rng.choice(races, n),
            "debt_to_income_ratio": rng.choice(dtis, n),
            "loan_purpose": rng.choice(["1", "2", "31", "32", "4", "5"], n),
            "applicant_age": rng.choice(ages, n),
            "derived_sex": rng.choice(sexes, n),
            "loan_amount": rng.choice(["85000", "125000", "0", "NA", "305000"], n),
            })
        table = apply_recipe(raw, "hmda")
        for spec in table.binary_columns:
            self.assertTrue(set(table.frame[spec.name].unique()) <= {0.0, 1.0})
        self.assertTrue((table.frame["amount"] > 0).all())


class TestSplit(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.table = simulation_table(sample_frame(ScmSpec("SC", 1000, 1)))

    def test_sizes(self):
        small = self.table.take(range(10))
        indices = split(small, 0.8, 7)
        self.assertEqual(len(indices.train), 8)
        self.assertEqual(len(indices.test), 2)
        self.assertEqual(len(split(self.table, 0.8, 7).train), 800)

    def test_deterministic(self):
        first, second = split(self.table, 0.8, 5), split(self.table, 0.8, 5)
        np.testing.assert_array_equal(first.train, second.train)
        np.testing.assert_array_equal(first.test, second.test)

    def test_partition(self):
        for n, fraction, seed in [(2, 0.5, 0), (7, 0.3, 1), (100, 0.8, 2), (1000, 0.99, 3)]:
            indices = split(self.table.take(range(n)), fraction, seed)
            self.assertEqual(len(np.intersect1d(indices.train, indices.test)), 0)
            np.testing.assert_array_equal(np.sort(np.concatenate([indices.train, indices.test])), np.arange(n))

    def test_too_small(self):
        with self.assertRaises(InputError):
            split(self.table.take([0]), 0.8, 0)


class TestDescribe(unittest.TestCase):
    def test_groups(self):
        table = load_csv(TEST_TOY_CSV, load_column_specs(TEST_TOY_COLUMNS))
        summary = describe(table)
        self.assertEqual(sorted(summary["group"].unique()), ["A=0", "A=1", "all"])
        row = summary[(summary["group"] == "A=1") & (summary["column"] == "C")].iloc[0]
        self.assertEqual(row["n"], 2)
        self.assertAlmostEqual(row["mean"], 31.0625, places=12)


if __name__ == "__main__":
    unittest.main()
