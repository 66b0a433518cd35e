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

"""Privilege scores, the pair of world models and bootstrap intervals."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from .core_model import MEAN_AT, MODEL_KIND, TARGET_WARP, MIN_BOOTSTRAP, MAX_REPLICATE_ATTEMPTS, \
    RETUNE_MAX_EVALUATIONS
from .dag import CausalDag
from .dataset import DatasetTable
from .errors import InputError, PrivscoreError
from .models import FittedPredictor, TuningBudget, fit_classifier, predict_many
from .warp import Warper, fit_warper, warp_frame, warp_training_set


@dataclass(frozen=True)
class WorldModels:
    real_model: FittedPredictor
    warped_model: FittedPredictor
    warper: Warper
    train_mean_real: float
    train_mean_warped: float
    mean_at: str = MEAN_AT["real"]

    @property
    def dag(self) -> CausalDag:
        return self.warper.dag

    @property
    def tuning(self) -> Dict[str, Optional[Dict]]:
        return {"real": self.real_model.hyperparameters, "warped": self.warped_model.hyperparameters}


@dataclass(frozen=True)
class PsEstimate:
    delta_hat: float
    pred_real: float
    pred_warped: float


@dataclass(frozen=True)
class BootstrapInterval:
    lower: float
    upper: float
    alpha: float
    replicates: Tuple[float, ...]

    @classmethod
    def from_replicates(cls, replicates, alpha):
        replicates = np.asarray(replicates, dtype=float)
        if len(replicates) == 0:
            raise InputError("no bootstrap replicates to build an interval from")
        lower, upper = empirical_quantiles(replicates, [alpha / 2.0, 1.0 - alpha / 2.0])
        return cls(float(lower), float(upper), float(alpha), tuple(float(r) for r in replicates))


def empirical_quantiles(values, probabilities, axis=0):
    """Linearly interpolated order-statistic quantiles (type 7)."""
    return np.quantile(np.asarray(values, dtype=float), probabilities, axis=axis, method="linear")


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")


def build_worlds(train: DatasetTable, dag: CausalDag, model_kind=MODEL_KIND["random_forest"],
                 budget: Optional[TuningBudget] = None, mean_at=MEAN_AT["real"],
                 target_warp=TARGET_WARP["coupling"], tuning: Optional[Dict] = None) -> WorldModels:
    """Fit the warper, warp the training set and fit pi-hat (real) and phi-hat (warped).

    `tuning` maps "real"/"warped" to forest hyperparameters to reuse instead of searching.
    """
    if mean_at not in MEAN_AT:
        raise InputError(f"unknown training-mean mode '{mean_at}'")
    budget = budget or TuningBudget()
    tuning = tuning or {}
    dag = dag.validate(train)

    warper = fit_warper(train, dag, target_warp)
    warped = warp_training_set(warper, train)

    predictors = train.predictors
    real_model = fit_classifier(train, train.target, predictors, model_kind, budget,
                                hyperparameters=tuning.get("real"))
    warped_model = fit_classifier(warped, train.target, predictors, model_kind, budget,
                                  hyperparameters=tuning.get("warped"))

    train_mean_real = float(np.mean(predict_many(real_model, train.frame)))
    at = train.frame if mean_at == MEAN_AT["real"] else warped.frame
    train_mean_warped = float(np.mean(predict_many(warped_model, at)))
    logging.info(f"Built world models ({model_kind}) with training means {train_mean_real:.4f} / "
                 f"{train_mean_warped:.4f}")
    return WorldModels(real_model, warped_model, warper, train_mean_real, train_mean_warped, mean_at)


def estimate_ps_frame(worlds: WorldModels, frame: pd.DataFrame) -> pd.DataFrame:
    warped = warp_frame(worlds.warper, frame)
    pred_real = predict_many(worlds.real_model, frame)
    pred_warped = predict_many(worlds.warped_model, warped)
    return pd.DataFrame({"pred_real": pred_real, "pred_warped": pred_warped, "ps": pred_real - pred_warped},
                        index=frame.index)


def estimate_ps(worlds: WorldModels, row) -> PsEstimate:
    estimate = estimate_ps_frame(worlds, pd.DataFrame([dict(row)])).iloc[0]
    return PsEstimate(float(estimate["ps"]), float(estimate["pred_real"]), float(estimate["pred_warped"]))


# bootstrap

def _run_replicate(train: DatasetTable, replicate: Callable, seed: int, b: int):
    for attempt in range(MAX_REPLICATE_ATTEMPTS):
        rng = np.random.default_rng([seed, b, attempt])
        sample = train.take(rng.integers(0, train.n, train.n))
        try:
            return replicate(sample)
        except (PrivscoreError, ValueError, np.linalg.LinAlgError) as e:
            logging.warning(f"Bootstrap replicate {b} attempt {attempt + 1} failed: {e}")
    logging.warning(f"Skipping bootstrap replicate {b} after {MAX_REPLICATE_ATTEMPTS} failed attempts")
    return None


def run_bootstrap(train: DatasetTable, replicate: Callable, B: int, seed: int, workers: int = 1) -> List:
    """Run `replicate` on B resamples of `train`; results keep replicate order, failed ones are dropped."""
    results = Parallel(n_jobs=workers)(delayed(_run_replicate)(train, replicate, seed, b) for b in range(B))
    survivors = [result for result in results if result is not None]
    if not survivors:
        raise InputError(f"all {B} bootstrap replicates failed")
    if len(survivors) < B:
        logging.warning(f"{B - len(survivors)} of {B} bootstrap replicates were skipped")
    return survivors


@dataclass(frozen=True)
class ReplicateSet:
    """Replicate values of shape (replicates, rows, components)."""
    names: Tuple[str, ...]
    values: np.ndarray

    @property
    def B(self):
        return self.values.shape[0]

    def component(self, name) -> np.ndarray:
        return self.values[:, :, self.names.index(name)]

    def intervals(self, alpha) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
        _check_alpha(alpha)
        lower, upper = empirical_quantiles(self.values, [alpha / 2.0, 1.0 - alpha / 2.0], axis=0)
        return {name: (lower[:, j], upper[:, j]) for j, name in enumerate(self.names)}

    def interval(self, name, row, alpha) -> BootstrapInterval:
        return BootstrapInterval.from_replicates(self.component(name)[:, row], alpha)

    @classmethod
    def from_frames(cls, frames: Sequence[pd.DataFrame], names: Sequence[str]):
        return cls(tuple(names), np.stack([frame[list(names)].to_numpy(dtype=float) for frame in frames]))


def resolve_tuning(worlds: WorldModels, budget: TuningBudget, reuse_tuning: Optional[bool]):
    """Tuned hyperparameters to reuse in every replicate, or None to retune per replicate."""
    if reuse_tuning is None:
        reuse_tuning = budget.evaluations > RETUNE_MAX_EVALUATIONS
    return worlds.tuning if reuse_tuning else None


def replicate_tuning(train: DatasetTable, dag: CausalDag, model_kind=MODEL_KIND["random_forest"],
                     budget: Optional[TuningBudget] = None, mean_at=MEAN_AT["real"],
                     target_warp=TARGET_WARP["coupling"], reuse_tuning: Optional[bool] = None,
                     worlds: Optional[WorldModels] = None):
    """Hyperparameters for the bootstrap replicates of a run on `train`.

    Forests tuned with more than RETUNE_MAX_EVALUATIONS evaluations are tuned
    once on the whole training set (or taken from `worlds`) and reused.
    """
    budget = budget or TuningBudget()
    if model_kind != MODEL_KIND["random_forest"]:
        return None
    if reuse_tuning is None:
        reuse_tuning = budget.evaluations > RETUNE_MAX_EVALUATIONS
    if not reuse_tuning:
        return None
    if worlds is None:
        logging.info("Tuning the world models once for all bootstrap replicates")
        worlds = build_worlds(train, dag, model_kind, budget, mean_at, target_warp)
    return resolve_tuning(worlds, budget, True)


def bootstrap_ps_frame(train: DatasetTable, dag: CausalDag, frame: pd.DataFrame, B: int, seed: int,
                       model_kind=MODEL_KIND["random_forest"], budget: Optional[TuningBudget] = None,
                       workers: int = 1, mean_at=MEAN_AT["real"], target_warp=TARGET_WARP["coupling"],
                       tuning: Optional[Dict] = None, reuse_tuning: Optional[bool] = None,
                       worlds: Optional[WorldModels] = None) -> ReplicateSet:
    if B < MIN_BOOTSTRAP:
        raise InputError(f"bootstrap needs at least {MIN_BOOTSTRAP} replicates, got {B}")
    if tuning is None:
        tuning = replicate_tuning(train, dag, model_kind, budget, mean_at, target_warp, reuse_tuning, worlds)

    def replicate(sample):
        worlds = build_worlds(sample, dag, model_kind, budget, mean_at, target_warp, tuning)
        return estimate_ps_frame(worlds, frame)

    frames = run_bootstrap(train, replicate, B, seed, workers)
    return ReplicateSet.from_frames(frames, ["pred_real", "pred_warped", "ps"])


def bootstrap_ps(train: DatasetTable, dag: CausalDag, row, B: int, alpha: float, seed: int,
                 model_kind=MODEL_KIND["random_forest"], budget: Optional[TuningBudget] = None,
                 workers: int = 1, **options) -> BootstrapInterval:
    _check_alpha(alpha)
    replicates = bootstrap_ps_frame(train, dag, pd.DataFrame([dict(row)]), B, seed, model_kind, budget,
                                    workers, **options)
    return replicates.interval("ps", 0, alpha)


def variance_identity_check(pred_real, pred_warped) -> float:
    """Residual of var(pi - phi) = var(pi) + var(phi) - 2 cov(pi, phi) over bootstrap replicates."""
    pred_real = np.asarray(pred_real, dtype=float)
    pred_warped = np.asarray(pred_warped, dtype=float)
    if len(pred_real) < 2 or len(pred_real) != len(pred_warped):
        raise InputError("variance identity needs at least two paired replicates")
    covariance = np.cov(pred_real, pred_warped, ddof=1)
    decomposed = covariance[0, 0] + covariance[1, 1] - 2.0 * covariance[0, 1]
    return float(abs(np.var(pred_real - pred_warped, ddof=1) - decomposed))
