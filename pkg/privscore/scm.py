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

"""Coupled real/FiND sampling from the simulation scenarios and the true-value oracle.

Every individual draws one vector of five uniforms (for A, C, X1, X2 and Y)
which is reused in both worlds. Gamma variables are inverse-CDF transforms of
their uniform, binary variables compare their uniform with a probit
probability, so the FiND twin differs from the real row only through A.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List

import numpy as np
import pandas as pd
from scipy import stats

from .core_model import SCENARIO, SIMULATION_COLUMNS, ADVANTAGED_LEVEL, ROUTE
from .dataset import ColumnSpec, DatasetTable
from .errors import InputError
from .psc import shapley_subset

_A, _C, _X1, _X2, _Y = (SIMULATION_COLUMNS[key] for key in ("pa", "confounder", "amount", "saving", "risk"))

SIMULATION_SPECS = [
        ColumnSpec(_A, "binary", "pa"),
        ColumnSpec(_C, "numeric", "confounder"),
        ColumnSpec(_X1, "numeric", "feature"),
        ColumnSpec(_X2, "binary", "feature"),
        ColumnSpec(_Y, "binary", "target"),
        ]

# privilege arrows of the simulation DAG, in column order
SIMULATION_ARROWS = (_X1, _X2)


@dataclass(frozen=True)
class ScmSpec:
    scenario: str = "SC"
    n: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.scenario not in SCENARIO:
            raise InputError(f"unknown scenario '{self.scenario}', expected one of {', '.join(SCENARIO)}")
        if self.n < 1:
            raise InputError(f"sample size must be at least 1, got {self.n}")


@dataclass(frozen=True)
class PairedSample:
    real_row: Dict[str, float]
    find_row: Dict[str, float]
    true_pi: float
    true_psi: float
    true_delta: float


def risk_index(params, a, c, x1, x2):
    risk = params["risk"]
    return risk["intercept"] + risk["confounder"] * c + risk["pa"] * a + risk["saving"] * x2 + risk["amount"] * x1


def true_probability(scenario, a, c, x1, x2):
    return stats.norm.cdf(risk_index(SCENARIO[scenario], a, c, x1, x2))


def _world(params, a, u):
    confounder = params["confounder"]
    c = stats.gamma.ppf(u[:, 1], confounder["shape"],
                        scale=confounder["scale_factor"] * np.exp(confounder["intercept"] + confounder["pa"] * a))

    amount = params["amount"]
    shape = 1.0 / amount["dispersion"]
    mean = np.exp(amount["intercept"] + amount["pa"] * a + amount["confounder"] * c)
    x1 = stats.gamma.ppf(u[:, 2], shape, scale=mean / shape)

    saving = params["saving"]
    x2 = (u[:, 3] < stats.norm.cdf(saving["intercept"] + saving["pa"] * a + saving["confounder"] * c)).astype(float)

    pi = stats.norm.cdf(risk_index(params, a, c, x1, x2))
    y = (u[:, 4] < pi).astype(float)
    return c, x1, x2, y, pi


def sample_frame(spec: ScmSpec) -> pd.DataFrame:
    """Real columns, their `_F` FiND twins and the oracle columns, one row per individual."""
    params = SCENARIO[spec.scenario]
    u = np.random.default_rng(spec.seed).random((spec.n, 5))

    a = (u[:, 0] < params["pa_probability"]).astype(float)
    c, x1, x2, y, pi = _world(params, a, u)
    a_f = np.full(spec.n, ADVANTAGED_LEVEL)
    c_f, x1_f, x2_f, y_f, psi = _world(params, a_f, u)

    logging.debug(f"Sampled {spec.n} coupled individuals from scenario {spec.scenario} with seed {spec.seed}")
    return pd.DataFrame({
        _A: a, _C: c, _X1: x1, _X2: x2, _Y: y,
        f"{_A}_F": a_f, f"{_C}_F": c_f, f"{_X1}_F": x1_f, f"{_X2}_F": x2_f, f"{_Y}_F": y_f,
        "true_pi": pi, "true_psi": psi, "true_delta": pi - psi,
        })


def sample_paired(spec: ScmSpec) -> List[PairedSample]:
    frame = sample_frame(spec)
    real = [_A, _C, _X1, _X2, _Y]
    samples = []
    for record in frame.to_dict("records"):
        samples.append(PairedSample(
            {name: record[name] for name in real},
            {name: record[f"{name}_F"] for name in real},
            record["true_pi"], record["true_psi"], record["true_delta"]))
    return samples


def true_ps(real_row, find_row, scenario="SC") -> float:
    params = SCENARIO[scenario]
    real = risk_index(params, real_row[_A], real_row[_C], real_row[_X1], real_row[_X2])
    find = risk_index(params, ADVANTAGED_LEVEL, find_row[_C], find_row[_X1], find_row[_X2])
    return float(stats.norm.cdf(real) - stats.norm.cdf(find))


def simulation_table(frame: pd.DataFrame) -> DatasetTable:
    return DatasetTable(frame[[spec.name for spec in SIMULATION_SPECS]], SIMULATION_SPECS)


def true_components(frame: pd.DataFrame, train_index, test_index, route="real", scenario="SC") -> pd.DataFrame:
    """True PS and contributions of the test rows.

    The true real-world model is the generating probit with the real PA, the
    true warped-world model is the same probit with the PA at the advantaged
    level, and the true warp swaps in the coupled FiND values of the features
    whose arrow is in the coalition.
    """
    if route not in ROUTE:
        raise InputError(f"unknown route '{route}'")

    def pi(rows, a, x1, x2):
        return true_probability(scenario, a, rows[_C].to_numpy(), x1, x2)

    train = frame.iloc[np.asarray(train_index)]
    test = frame.iloc[np.asarray(test_index)]
    a = test[_A].to_numpy()
    advantaged = np.full(len(test), ADVANTAGED_LEVEL)
    real = {_X1: test[_X1].to_numpy(), _X2: test[_X2].to_numpy()}
    find = {_X1: test[f"{_X1}_F"].to_numpy(), _X2: test[f"{_X2}_F"].to_numpy()}

    def coalition_values(S):
        return [find[name] if j in S else real[name] for j, name in enumerate(SIMULATION_ARROWS)]

    model_a = a if route == ROUTE["real"] else advantaged
    base = pi(test, model_a, real[_X1], real[_X2])

    def value(S):
        return base - pi(test, model_a, *coalition_values(S))

    gamma = shapley_subset(value, len(SIMULATION_ARROWS))

    ps = test["true_delta"].to_numpy()
    train_real = true_probability(scenario, train[_A].to_numpy(), train[_C].to_numpy(),
                                  train[_X1].to_numpy(), train[_X2].to_numpy())
    train_fair = true_probability(scenario, np.full(len(train), ADVANTAGED_LEVEL), train[_C].to_numpy(),
                                  train[_X1].to_numpy(), train[_X2].to_numpy())
    delta_g = float(np.mean(train_real - train_fair))

    if route == ROUTE["real"]:
        delta0 = pi(test, a, find[_X1], find[_X2]) - test["true_psi"].to_numpy()
    else:
        delta0 = pi(test, a, real[_X1], real[_X2]) - pi(test, advantaged, real[_X1], real[_X2])

    result = pd.DataFrame({
        "ps": ps,
        "delta0": delta0,
        "delta_g": np.full(len(test), delta_g),
        "delta_x": delta0 - delta_g,
        })
    for j in range(len(SIMULATION_ARROWS)):
        result[f"gamma_{j + 1}"] = gamma[j]
    result.index = test.index
    return result
