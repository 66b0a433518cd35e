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

"""Shared vocabulary and constants of the privscore package."""

ROLE = {
        "pa": "pa",
        "confounder": "confounder",
        "feature": "feature",
        "target": "target",
        "ignore": "ignore",
        }

KIND = {
        "binary": "binary",
        "numeric": "numeric",
        }

# GLM family used to warp a feature of the given kind
FAMILY = {
        "binary": "binomial_logit",
        "numeric": "gamma_log",
        }

MODEL_KIND = {
        "logistic": "logistic",
        "random_forest": "random_forest",
        "constant": "constant",
        }

ROUTE = {
        "real": "real",
        "warped": "warped",
        }

# where the training means of the two world models are evaluated
MEAN_AT = {
        "real": "real",
        "warped": "warped",
        }

TARGET_WARP = {
        "mean_shift": "mean_shift",
        "coupling": "coupling",
        }

QUANTILES_OVER = {
        "iterations": "iterations",
        "individuals": "individuals",
        }

MISSING_TOKENS = frozenset(["", "NA", "N/A", "NaN", "nan", "NAN", "-nan", "inf", "-inf", "Inf", "-Inf", "null", "NULL",
                            "None"])

# probability clamp for predictions
EPSILON = 1e-12

MAX_EXACT_PLAYERS = 8
MIN_BOOTSTRAP = 20
MAX_REPLICATE_ATTEMPTS = 3

GLM_MAX_ITERATIONS = 100
GLM_TOLERANCE = 1e-10

MODEL_FORMAT = "privscore-model"
MODEL_FORMAT_VERSION = 1

# random-forest random-search space, inclusive bounds
RF_SEARCH_SPACE = {
        "n_estimators": (100, 500),
        "max_depth": (2, 20),
        "min_samples_leaf": (1, 20),
        "max_features": (0.3, 1.0),
        }

# retune hyperparameters inside every bootstrap replicate only for budgets this small
RETUNE_MAX_EVALUATIONS = 5

# Structural assignments of the simulation scenarios. Gamma variables are
# parameterised by shape and scale = scale_factor * exp(linear predictor),
# binary variables by a probit (standard-normal CDF) linear predictor.
SCENARIO = {
        "SC": {
            "pa_probability": 0.69,
            "confounder": {"shape": 9.76, "scale_factor": 3.64, "intercept": 0.0, "pa": 0.0},
            "amount": {"dispersion": 0.74, "intercept": 7.9, "pa": 0.175, "confounder": 0.005},
            "saving": {"intercept": 4.0, "pa": -1.25, "confounder": -0.1},
            "risk": {"intercept": 0.9, "confounder": 0.1, "pa": 1.75, "saving": -0.7, "amount": -0.001},
            },
        "SM": {
            "pa_probability": 0.69,
            "confounder": {"shape": 10.0, "scale_factor": 2.0, "intercept": 0.1, "pa": 0.8},
            "amount": {"dispersion": 0.74, "intercept": 7.9, "pa": 0.175, "confounder": 0.005},
            "saving": {"intercept": 4.0, "pa": -1.25, "confounder": -0.1},
            "risk": {"intercept": 0.9, "confounder": 0.1, "pa": 1.75, "saving": -0.7, "amount": -0.001},
            },
        "NULL": {
            "pa_probability": 0.69,
            "confounder": {"shape": 9.76, "scale_factor": 3.64, "intercept": 0.0, "pa": 0.0},
            "amount": {"dispersion": 0.74, "intercept": 7.9, "pa": 0.0, "confounder": 0.005},
            "saving": {"intercept": 4.0, "pa": 0.0, "confounder": -0.1},
            "risk": {"intercept": 0.9, "confounder": 0.1, "pa": 0.0, "saving": -0.7, "amount": -0.001},
            },
        }

# column names of the simulated data
SIMULATION_COLUMNS = {
        "pa": "A",
        "confounder": "C",
        "amount": "X1",
        "saving": "X2",
        "risk": "Y",
        }

ADVANTAGED_LEVEL = 1.0
