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

"""Residual-based warping into the warped world.

Each PA-descendant feature gets a GLM on its DAG parents. A feature is warped
by keeping its residual while its parents move to the warped world with the
PA at the advantaged level: binary features shift by the change of the fitted
mean, gamma features keep their quantile under the fitted gamma law.
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List

import numpy as np
import pandas as pd
from scipy import stats

from .core_model import FAMILY, KIND, TARGET_WARP
from .dag import CausalDag
from .dataset import DatasetTable
from .errors import InputError
from .models import FittedGlm, fit_glm

Coalition = FrozenSet[int]


def full_coalition(k) -> Coalition:
    return frozenset(range(k))


@dataclass(frozen=True)
class Warper:
    dag: CausalDag
    models: Dict[str, FittedGlm]
    target_model: FittedGlm
    kinds: Dict[str, str]
    target_warp: str = TARGET_WARP["coupling"]

    @property
    def advantaged_level(self):
        return self.dag.advantaged_level

    @property
    def k(self):
        return self.dag.arrows.k

    @property
    def order(self) -> List[str]:
        return self.dag.warp_order()


def fit_warper(train: DatasetTable, dag: CausalDag, target_warp=TARGET_WARP["coupling"]) -> Warper:
    if target_warp not in TARGET_WARP:
        raise InputError(f"unknown target warp '{target_warp}'")

    models, kinds = {}, {}
    for feature in dag.warp_order():
        kinds[feature] = train.kind(feature)
        models[feature] = fit_glm(train, feature, dag.parents(feature), FAMILY[kinds[feature]])

    target_model = fit_glm(train, dag.target, dag.parents(dag.target), FAMILY[KIND["binary"]])
    logging.info(f"Fitted warper with feature models {list(models)} and target model on {dag.parents(dag.target)}")
    return Warper(dag, models, target_model, kinds, target_warp)


def _gamma_quantile_map(x, mu_real, mu_warped, dispersion):
    ratio = x * mu_warped / mu_real
    if not np.isfinite(dispersion) or dispersion <= 0:
        return np.where(mu_warped == mu_real, x, ratio)

    shape = 1.0 / dispersion
    with np.errstate(all="ignore"):
        u = stats.gamma.cdf(x, shape, scale=mu_real / shape)
        warped = stats.gamma.ppf(u, shape, scale=mu_warped / shape)
    # saturated tails lose the quantile; the ratio is the same map in closed form
    saturated = ~np.isfinite(warped) | (u <= 0.0) | (u >= 1.0)
    warped = np.where(saturated, ratio, warped)
    return np.where(mu_warped == mu_real, x, warped)


def _fitted_means(model: FittedGlm, real: pd.DataFrame, counterfactual: pd.DataFrame):
    return model.mean(real), model.mean(counterfactual)


def warp_frame(warper: Warper, frame: pd.DataFrame, S: Iterable[int] = None) -> pd.DataFrame:
    """Move the rows of `frame` to the world without the privilege arrows in `S` (all arrows by default)."""
    S = full_coalition(warper.k) if S is None else frozenset(S)
    pa = warper.dag.pa
    missing = [node for node in warper.dag.nodes if node != warper.dag.target and node not in frame.columns]
    if missing:
        logging.error(f"Rows to warp lack DAG columns {missing}")
        raise InputError(f"rows to warp lack DAG column(s) {', '.join(missing)}")
    out = frame.copy()
    counterfactual = frame.copy()
    counterfactual[pa] = warper.advantaged_level

    for feature in warper.order:
        if warper.dag.arrow_of(feature) not in S:
            continue
        model = warper.models[feature]
        mu_real, mu_warped = _fitted_means(model, frame, counterfactual)
        x = frame[feature].to_numpy(dtype=float)
        if warper.kinds[feature] == KIND["binary"]:
            warped = x + (mu_warped - mu_real)
        else:
            warped = _gamma_quantile_map(x, mu_real, mu_warped, model.dispersion)
        out[feature] = warped
        counterfactual[feature] = warped
    return out


def warp_row(warper: Warper, row, S: Iterable[int] = None) -> pd.Series:
    return warp_frame(warper, pd.DataFrame([dict(row)]), S).iloc[0]


def warp_target(warper: Warper, frame: pd.DataFrame, warped: pd.DataFrame) -> np.ndarray:
    """Soft labels of the warped world from the real target and the target GLM."""
    target = warper.dag.target
    counterfactual = warped.copy()
    counterfactual[warper.dag.pa] = warper.advantaged_level
    mu_real, mu_warped = _fitted_means(warper.target_model, frame, counterfactual)
    y = frame[target].to_numpy(dtype=float)
    shift = mu_warped - mu_real

    if warper.target_warp == TARGET_WARP["coupling"]:
        with np.errstate(divide="ignore", invalid="ignore"):
            up = y + (1.0 - y) * shift / (1.0 - mu_real)
            down = y * mu_warped / mu_real
        soft = np.where(shift > 0, up, np.where(shift < 0, down, y))
    else:
        soft = y + shift
    return np.clip(soft, 0.0, 1.0)


def warp_training_set(warper: Warper, train: DatasetTable) -> DatasetTable:
    warped = warp_frame(warper, train.frame)
    warped[warper.dag.target] = warp_target(warper, train.frame, warped)
    logging.info(f"Warped {train.n} training rows")
    return train.with_frame(warped, check_binary=False)


def warped_columns(warper: Warper, real: pd.DataFrame, warped: pd.DataFrame) -> pd.DataFrame:
    """Real columns followed by `_w` columns of every warped feature and the target."""
    export = real.copy()
    for name in warper.order + [warper.dag.target]:
        if name in warped:
            export[f"{name}_w"] = warped[name].to_numpy()
    return export
