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

import dataclasses
import unittest

import numpy as np
import pandas as pd
import statsmodels.api as sm

from privscore.analytics import (INTERCEPT, format_regression, pfi, pfi_all, psc_importance, regress_ps,
                                 subgroup_summary)
from privscore.dag import CausalDag
from privscore.dataset import split
from privscore.errors import InputError, SingularDesignError
from privscore.models import FittedPredictor
from privscore.privilege import build_worlds, estimate_ps_frame
from privscore.psc import PscResult
from privscore.scm import ScmSpec, sample_frame, simulation_table

NODES = ["A", "C", "X1", "X2", "Y"]


def without_input(model, position):
    coefficients = list(model.parameters["coefficients"])
    coefficients[position] = 0.0
    parameters = {"intercept": model.parameters["intercept"], "coefficients": coefficients}
    return FittedPredictor(model.kind, model.feature_names, parameters)


class TestPfi(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        table = simulation_table(sample_frame(ScmSpec("SC", 400, 17)))
        indices = split(table, 0.75, 17)
        cls.train, cls.test = table.take(indices.train), table.take(indices.test)
        # C only enters through the models, which ignore it
        dag = CausalDag(NODES, [("A", "X1"), ("A", "X2"), ("A", "Y"), ("X1", "Y"), ("X2", "Y")], "A", "Y")
        worlds = build_worlds(cls.train, dag, "logistic")
        cls.worlds = dataclasses.replace(worlds, real_model=without_input(worlds.real_model, 1),
                                         warped_model=without_input(worlds.warped_model, 1))
        cls.reference = estimate_ps_frame(cls.worlds, cls.test.frame)["ps"].to_numpy()

    def test_ignored_feature(self):
        self.assertEqual(pfi(self.worlds, self.test, self.reference, "C", repeats=3, seed=1), 0.0)

    def test_used_feature(self):
        self.assertGreater(pfi(self.worlds, self.test, self.reference, "X1", repeats=3, seed=1), 0.0)

    def test_deterministic(self):
        first = pfi(self.worlds, self.test, self.reference, "A", repeats=2, seed=5)
        second = pfi(self.worlds, self.test, self.reference, "A", repeats=2, seed=5)
        self.assertEqual(first, second)

    def test_all_features(self):
        importances = pfi_all(self.worlds, self.test, repeats=1)
        self.assertEqual(importances["feature"].tolist(), ["A", "C", "X1", "X2"])
        self.assertEqual(importances.set_index("feature").loc["C", "importance"], 0.0)

    def test_bad_arguments(self):
        with self.assertRaises(InputError):
            pfi(self.worlds, self.test, self.reference, "X9")
        with self.assertRaises(InputError):
            pfi(self.worlds, self.test, self.reference, "C", repeats=0)


class TestSummaries(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.results = pd.DataFrame({
            "id": ["a", "b", "c", "d"],
            "ps": [-0.4, -0.2, 0.1, 0.3],
            "delta0": [-0.1, 0.0, 0.1, 0.2],
            "delta_g": [0.05, 0.05, 0.05, 0.05],
            "delta_x": [-0.15, -0.05, 0.05, 0.15],
            "gamma_1": [-0.2, -0.1, 0.0, 0.1],
            "gamma_2": [-0.1, -0.1, 0.0, 0.0],
            "gamma_1_lower": [-0.5, -0.5, -0.5, -0.5],
            "gamma_1_upper": [0.5, 0.5, 0.5, 0.5],
            })

    def test_importance(self):
        importance = psc_importance(self.results)
        self.assertEqual(list(importance.index), ["ps", "delta_g", "delta_x", "gamma_1", "gamma_2"])
        self.assertAlmostEqual(importance["ps"], 0.25, places=12)
        self.assertAlmostEqual(importance["gamma_2"], 0.05, places=12)

    def test_importance_of_results(self):
        results = [PscResult((0.1, -0.3), 0.05, -0.2, -0.15, -0.35), PscResult((0.3, 0.1), 0.05, 0.0, 0.05, 0.45)]
        importance = psc_importance(results)
        self.assertAlmostEqual(importance["gamma_1"], 0.2, places=12)
        self.assertAlmostEqual(importance["delta_x"], 0.1, places=12)

    def test_subgroup(self):
        mask = np.array([True, True, False, False])
        summary = subgroup_summary(self.results, mask, 0.05, "A=0")
        self.assertEqual(summary.n, 2)
        self.assertEqual(summary.label, "A=0")
        table = summary.table.set_index("component")
        self.assertEqual(list(table.index), ["ps", "delta_g", "delta_x", "gamma_1", "gamma_2"])
        self.assertAlmostEqual(table.loc["ps", "mean"], -0.3, places=12)
        self.assertAlmostEqual(table.loc["ps", "lower"], -0.39, places=12)
        self.assertAlmostEqual(table.loc["ps", "upper"], -0.21, places=12)

    def test_empty_subgroup(self):
        with self.assertRaises(InputError):
            subgroup_summary(self.results, np.zeros(4, dtype=bool), label="nobody")


class TestRegression(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.table = simulation_table(sample_frame(ScmSpec("SC", 200, 6)))

    def test_matches_ols(self):
        frame = self.table.frame
        ps = np.random.default_rng(1).normal(size=self.table.n) + 0.3 * frame["A"].to_numpy()
        summary = regress_ps(self.table, ps, ["A", "C", "X2"])
        reference = sm.OLS(ps, sm.add_constant(frame[["A", "C", "X2"]].to_numpy())).fit()
        coefficients = summary.coefficients.set_index("name")
        self.assertEqual(list(coefficients.index), [INTERCEPT, "A", "C", "X2"])
        np.testing.assert_allclose(coefficients["estimate"].to_numpy(), reference.params, atol=1e-10)
        np.testing.assert_allclose(coefficients["std_error"].to_numpy(), reference.bse, rtol=1e-8)
        np.testing.assert_allclose(coefficients["p_value"].to_numpy(), reference.pvalues, rtol=1e-6, atol=1e-14)
        self.assertEqual(summary.df_resid, self.table.n - 4)
        self.assertFalse(summary.zero_variance)

    def test_exact_fit(self):
        ps = 1.0 + 2.0 * self.table.frame["X2"].to_numpy()
        with self.assertLogs(level="WARNING"):
            summary = regress_ps(self.table, ps, ["X2"])
        self.assertTrue(summary.zero_variance)
        np.testing.assert_allclose(summary.coefficients["estimate"].to_numpy(), [1.0, 2.0], atol=1e-10)
        text = format_regression(summary)
        self.assertIn("NA", text)
        self.assertIn(INTERCEPT, text)

    def test_format(self):
        frame = self.table.frame
        ps = 5.0 * frame["A"].to_numpy() + np.random.default_rng(2).normal(scale=0.01, size=self.table.n)
        text = format_regression(regress_ps(self.table, ps, ["A"]))
        self.assertIn("Pr(>|t|)", text)
        self.assertIn("<0.0001", text)
        self.assertIn(f"on {self.table.n - 2} degrees of freedom", text)

    def test_singular(self):
        table = self.table.with_frame(self.table.frame.assign(X2=self.table.frame["A"]))
        with self.assertRaises(SingularDesignError):
            regress_ps(table, np.zeros(table.n), ["A", "X2"])

    def test_too_few_rows(self):
        table = self.table.take([0, 1])
        with self.assertRaises(InputError):
            regress_ps(table, np.zeros(2), ["A", "C"])


if __name__ == "__main__":
    unittest.main()
