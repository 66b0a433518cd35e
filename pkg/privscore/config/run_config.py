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

# config/run_config.py

import json
import logging
import os
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

from ..core_model import MEAN_AT, MIN_BOOTSTRAP, MODEL_KIND, QUANTILES_OVER, ROUTE, SCENARIO, TARGET_WARP
from ..errors import InputError
from ..models import TuningBudget

# Base directory for the package
BASE_DIR = os.path.dirname(os.path.dirname(__file__))

# Bundled DAGs and column specs
RESOURCE_DIR = os.path.join(BASE_DIR, 'resources')

SIMULATION_DAG = os.path.join(RESOURCE_DIR, "simulation_dag.json")
SIMULATION_COLUMNS = os.path.join(RESOURCE_DIR, "simulation_columns.json")
MORTGAGE_DAG = os.path.join(RESOURCE_DIR, "mortgage_dag.json")
LAWSCHOOL_DAG = os.path.join(RESOURCE_DIR, "lawschool_dag.json")
LAWSCHOOL_GENDER_DAG = os.path.join(RESOURCE_DIR, "lawschool_gender_dag.json")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    model_kind: str = MODEL_KIND["random_forest"]
    evaluations: int = 25
    folds: int = 3
    bootstrap: int = 100
    alpha: float = 0.1
    table_alpha: float = 0.05
    split: float = 0.8
    route: str = ROUTE["real"]
    out: str = "privscore-out"
    workers: int = 1
    scenario: str = "SC"
    n: int = 1000
    iterations: int = 50
    quantiles_over: str = QUANTILES_OVER["iterations"]
    reuse_tuning: Optional[bool] = None
    mean_at: str = MEAN_AT["real"]
    target_warp: str = TARGET_WARP["coupling"]
    pfi_repeats: int = 5
    svg: bool = False

    @property
    def budget(self) -> TuningBudget:
        return TuningBudget(self.evaluations, self.folds, self.seed)

    def override(self, **flags) -> "RunConfig":
        """Copy with every flag that is not None replacing its key."""
        known = {field.name for field in fields(self)}
        unknown = [name for name in flags if name not in known]
        if unknown:
            raise InputError(f"unknown configuration keys {', '.join(unknown)}")
        return replace(self, **{name: value for name, value in flags.items() if value is not None})

    def validate(self) -> "RunConfig":
        def check(condition, message):
            if not condition:
                logging.error(f"Invalid configuration: {message}")
                raise InputError(f"invalid configuration: {message}")

        check(self.model_kind in (MODEL_KIND["logistic"], MODEL_KIND["random_forest"]),
              f"model_kind '{self.model_kind}'")
        check(self.evaluations >= 1, f"evaluations {self.evaluations} < 1")
        check(self.folds >= 2, f"folds {self.folds} < 2")
        check(self.bootstrap == 0 or self.bootstrap >= MIN_BOOTSTRAP,
              f"bootstrap {self.bootstrap} must be 0 or at least {MIN_BOOTSTRAP}")
        check(0.0 < self.alpha < 1.0, f"alpha {self.alpha} outside (0, 1)")
        check(0.0 < self.table_alpha < 0.5, f"table_alpha {self.table_alpha} outside (0, 0.5)")
        check(0.0 < self.split < 1.0, f"split {self.split} outside (0, 1)")
        check(self.route in ROUTE, f"route '{self.route}'")
        check(self.workers >= 1 or self.workers == -1, f"workers {self.workers}")
        check(self.scenario in SCENARIO, f"scenario '{self.scenario}'")
        check(self.n >= 2, f"n {self.n} < 2")
        check(self.iterations >= 1, f"iterations {self.iterations} < 1")
        check(self.quantiles_over in QUANTILES_OVER, f"quantiles_over '{self.quantiles_over}'")
        check(self.mean_at in MEAN_AT, f"mean_at '{self.mean_at}'")
        check(self.target_warp in TARGET_WARP, f"target_warp '{self.target_warp}'")
        check(self.pfi_repeats >= 1, f"pfi_repeats {self.pfi_repeats} < 1")
        return self

    def to_dict(self):
        return asdict(self)


def load_run_config(path) -> RunConfig:
    if not os.path.exists(path):
        logging.error(f"Configuration file not found: {path}")
        raise InputError(f"configuration file not found: {path}")

    with open(path, "r") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as e:
            raise InputError(f"{path}: invalid JSON: {e}")
    if not isinstance(document, dict):
        raise InputError(f"{path}: expected a JSON object")

    logging.info(f"Loaded configuration {path}")
    return RunConfig().override(**document)
