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

import unittest

import numpy as np

from privscore.errors import InputError
from privscore.scm import (ScmSpec, sample_frame, sample_paired, simulation_table, true_components, true_ps)

REAL = ["A", "C", "X1", "X2", "Y"]


class TestSampling(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.frame = sample_frame(ScmSpec("SC", 100000, 42))

    def test_deterministic(self):
        first = sample_frame(ScmSpec("SM", 50, 9))
        second = sample_frame(ScmSpec("SM", 50, 9))
        self.assertTrue(first.equals(second))

    def test_marginals(self):
        self.assertAlmostEqual(self.frame["A"].mean(), 0.69, delta=0.01)
        self.assertAlmostEqual(self.frame["C"].mean(), 9.76 * 3.64, delta=0.3)
        self.assertTrue(0.70 <= self.frame["Y"].mean() <= 0.79)
        self.assertTrue(0.39 <= self.frame["X2"].mean() <= 0.49)
        self.assertTrue((self.frame["X1"] > 0).all())

    def test_advantaged_twins_are_identical(self):
        advantaged = self.frame[self.frame["A"] == 1.0]
        for name in REAL:
            np.testing.assert_array_equal(advantaged[name].to_numpy(), advantaged[f"{name}_F"].to_numpy())
        np.testing.assert_array_equal(advantaged["true_delta"].to_numpy(), np.zeros(len(advantaged)))
        self.assertTrue((self.frame["A_F"] == 1.0).all())

    def test_disadvantaged_are_underprivileged(self):
        # the direct effect of the PA dominates in this scenario
        disadvantaged = self.frame[self.frame["A"] == 0.0]
        self.assertLess(disadvantaged["true_delta"].mean(), 0.0)

    def test_null_scenario_has_no_privilege(self):
        frame = sample_frame(ScmSpec("NULL", 500, 1))
        np.testing.assert_array_equal(frame["true_delta"].to_numpy(), np.zeros(len(frame)))

    def test_true_ps_of_pairs(self):
        for sample in sample_paired(ScmSpec("SC", 25, 5)):
            self.assertAlmostEqual(true_ps(sample.real_row, sample.find_row, "SC"), sample.true_delta, places=12)

    def test_simulation_table(self):
        table = simulation_table(self.frame.head(10))
        self.assertEqual(table.names, REAL)
        self.assertEqual(table.features, ["X1", "X2"])

    def test_unknown_scenario(self):
        with self.assertRaises(InputError):
            ScmSpec("XX", 10, 0)


class TestTrueComponents(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.frame = sample_frame(ScmSpec("SC", 300, 8))
        cls.train, cls.test = np.arange(200), np.arange(200, 300)

    def check_additive(self, route):
        truth = true_components(self.frame, self.train, self.test, route, "SC")
        total = truth["delta0"] + truth["gamma_1"] + truth["gamma_2"]
        np.testing.assert_allclose(total.to_numpy(), truth["ps"].to_numpy(), atol=1e-12)
        np.testing.assert_allclose((truth["delta_g"] + truth["delta_x"]).to_numpy(), truth["delta0"].to_numpy(),
                                   atol=1e-12)
        self.assertEqual(len(truth), 100)

    def test_real_route_adds_up(self):
        self.check_additive("real")

    def test_warped_route_adds_up(self):
        self.check_additive("warped")

    def test_advantaged_rows_have_no_contributions(self):
        truth = true_components(self.frame, self.train, self.test, "real", "SC")
        advantaged = (self.frame["A"].to_numpy()[self.test] == 1.0)
        np.testing.assert_array_equal(truth["gamma_1"].to_numpy()[advantaged], 0.0)
        np.testing.assert_array_equal(truth["gamma_2"].to_numpy()[advantaged], 0.0)

    def test_unknown_route(self):
        with self.assertRaises(InputError):
            true_components(self.frame, self.train, self.test, "sideways")


if __name__ == "__main__":
    unittest.main()
