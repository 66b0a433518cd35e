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

"""Privilege score contributions: Shapley shares of the PS per privilege arrow.

Players are the privilege arrows. The value of a coalition S is how much the
real-world prediction changes when the arrows in S are warped away,
v(S) = pi(x) - pi(x_S), or the same with the warped-world model. Contributions
plus the intercepts add up to the PS exactly.
"""

import logging
from dataclasses import dataclass
from itertools import combinations, permutations
from math import factorial
from typing import Callable, Dict, FrozenSet, Optional, Tuple

import numpy as np
import pandas as pd

from .core_model import MAX_EXACT_PLAYERS, MEAN_AT, MIN_BOOTSTRAP, MODEL_KIND, ROUTE, TARGET_WARP
from .dag import CausalDag
from .dataset import DatasetTable
from .errors import InputError, TooManyPlayersError
from .models import TuningBudget, predict_many
from .privilege import ReplicateSet, build_worlds, replicate_tuning, run_bootstrap
from .warp import warp_frame

DEFAULT_SAMPLES = 1000
BACKGROUND_ROWS = 500


@dataclass(frozen=True)
class PscResult:
    gamma: Tuple[float, ...]
    delta_g: float
    delta_xtilde: float
    delta0: float
    ps: float
    route: str = ROUTE["real"]

    @property
    def k(self):
        return len(self.gamma)


@dataclass(frozen=True)
class StandardShapleyResult:
    eta0: float
    eta: Tuple[float, ...]
    feature_names: Tuple[str, ...]


# Shapley computation over k players; value functions map a frozenset of
# player indices to a number or to an array of per-row numbers

def _cached(value_fn):
    cache = {}

    def value(S):
        if S not in cache:
            cache[S] = np.asarray(value_fn(S), dtype=float)
        return cache[S]
    return value


def _check_players(k):
    if k > MAX_EXACT_PLAYERS:
        logging.error(f"Exact Shapley enumeration over {k} players refused")
        raise TooManyPlayersError(f"exact Shapley values are limited to {MAX_EXACT_PLAYERS} players, got {k}; "
                                  f"use shapley_sampled instead")


def shapley_order(value_fn: Callable[[FrozenSet[int]], float], k: int) -> np.ndarray:
    """Average marginal contribution of each player over all k! orderings."""
    _check_players(k)
    value = _cached(value_fn)
    if k == 0:
        return np.zeros(0)
    totals = [0.0] * k
    for ordering in permutations(range(k)):
        coalition = frozenset()
        for j in ordering:
            joined = coalition | {j}
            totals[j] = totals[j] + (value(joined) - value(coalition))
            coalition = joined
    return np.array([total / factorial(k) for total in totals])


def shapley_subset(value_fn: Callable[[FrozenSet[int]], float], k: int) -> np.ndarray:
    """Weighted marginal contributions over the subsets of the other players."""
    _check_players(k)
    value = _cached(value_fn)
    if k == 0:
        return np.zeros(0)
    gamma = []
    for j in range(k):
        others = [i for i in range(k) if i != j]
        total = 0.0
        for size in range(k):
            weight = factorial(size) * factorial(k - size - 1) / factorial(k)
            for subset in combinations(others, size):
                S = frozenset(subset)
                total = total + weight * (value(S | {j}) - value(S))
        gamma.append(total)
    return np.array(gamma)


def shapley_sampled(value_fn: Callable[[FrozenSet[int]], float], k: int, samples: int = DEFAULT_SAMPLES,
                    seed: int = 0) -> np.ndarray:
    """Shapley values estimated from `samples` uniformly random orderings."""
    if samples < 1:
        raise InputError(f"samples must be at least 1, got {samples}")
    value = _cached(value_fn)
    if k == 0:
        return np.zeros(0)
    rng = np.random.default_rng(seed)
    totals = [0.0] * k
    for _ in range(samples):
        coalition = frozenset()
        for j in rng.permutation(k):
            j = int(j)
            joined = coalition | {j}
            totals[j] = totals[j] + (value(joined) - value(coalition))
            coalition = joined
    return np.array([total / samples for total in totals])


def shapley(value_fn, k, samples=DEFAULT_SAMPLES, seed=0) -> np.ndarray:
    if k <= MAX_EXACT_PLAYERS:
        return shapley_subset(value_fn, k)
    logging.info(f"Sampling Shapley values over {k} players with {samples} orderings")
    return shapley_sampled(value_fn, k, samples, seed)


# value functions

def _one_row(row):
    return pd.DataFrame([dict(row)])


def _coalition_rows(warper, frame, S, cache=None):
    if not S:
        return frame
    if cache is None:
        return warp_frame(warper, frame, S)
    if S not in cache:
        cache[S] = warp_frame(warper, frame, S)
    return cache[S]


def _value(model, worlds, rows, S, at_real=None, cache=None):
    frame = rows if isinstance(rows, pd.DataFrame) else _one_row(rows)
    S = frozenset(S)
    if not S:
        values = np.zeros(len(frame))
    else:
        if at_real is None:
            at_real = predict_many(model, frame)
        values = at_real - predict_many(model, _coalition_rows(worlds.warper, frame, S, cache))
    return values if isinstance(rows, pd.DataFrame) else float(values[0])


def value_v(worlds, rows, S, at_real=None, cache=None):
    """pi(x) - pi(x_S) for one row (a float) or every row of a frame (an array).

    `at_real` holds pi(x) when already known; `cache` keeps the warped rows per coalition.
    """
    return _value(worlds.real_model, worlds, rows, S, at_real, cache)


def value_vtilde(worlds, rows, S, at_real=None, cache=None):
    """phi(x) - phi(x_S), the warped-world counterpart of value_v."""
    return _value(worlds.warped_model, worlds, rows, S, at_real, cache)


def compose(pred_real, pred_warped, pred_real_at_warped, pred_warped_at_real, train_mean_real,
            train_mean_warped, gamma, route=ROUTE["real"]) -> Dict[str, np.ndarray]:
    """Intercepts and PS from the predictions of both models and the contributions."""
    if route == ROUTE["real"]:
        local_real, local_warped = pred_real_at_warped, pred_warped
    elif route == ROUTE["warped"]:
        local_real, local_warped = pred_real, pred_warped_at_real
    else:
        raise InputError(f"unknown route '{route}'")
    delta_g = train_mean_real - train_mean_warped
    delta_x = (local_real - train_mean_real) - (local_warped - train_mean_warped)
    delta0 = local_real - local_warped
    return {"ps": pred_real - pred_warped, "delta0": delta0, "delta_g": delta_g,
            "delta_x": delta_x, "gamma": gamma}


def psc_from_predictions(pred_real: float, pred_warped: float, coalition_predictions: Dict[FrozenSet[int], float],
                         train_mean_real: float, train_mean_warped: float, k: int,
                         route=ROUTE["real"], pred_warped_at_real: Optional[float] = None) -> PscResult:
    """PSCs from stored predictions.

    `coalition_predictions[S]` is the prediction of the route's model at x_S for
    every non-empty S; on the real route that model is pi-hat, so the entry for
    all arrows is pi-hat(x-tilde). The warped route also needs phi-hat(x).
    """
    if route == ROUTE["real"]:
        at_real = pred_real
    elif pred_warped_at_real is None:
        raise InputError("the warped route needs the warped-world prediction at the real row")
    else:
        at_real = pred_warped_at_real

    def value(S):
        return at_real - coalition_predictions[S] if S else 0.0

    gamma = shapley(value, k)
    pred_real_at_warped = coalition_predictions[frozenset(range(k))] if k else pred_real
    parts = compose(pred_real, pred_warped, pred_real_at_warped, pred_warped_at_real,
                    train_mean_real, train_mean_warped, gamma, route)
    return PscResult(tuple(float(g) for g in gamma), float(parts["delta_g"]), float(parts["delta_x"]),
                     float(parts["delta0"]), float(parts["ps"]), route)


def psc_frame(worlds, frame: pd.DataFrame, route=ROUTE["real"], samples=DEFAULT_SAMPLES,
              seed=0) -> pd.DataFrame:
    """PS, intercepts and contributions of every row of `frame`."""
    if route not in ROUTE:
        raise InputError(f"unknown route '{route}'")
    warper = worlds.warper
    k = warper.k
    full = frozenset(range(k))
    if route == ROUTE["real"]:
        model, value_fn = worlds.real_model, value_v
    else:
        model, value_fn = worlds.warped_model, value_vtilde

    warped = {}
    at_real = predict_many(model, frame)

    def value(S):
        return value_fn(worlds, frame, S, at_real, warped)

    gamma = shapley(value, k, samples, seed)

    x_tilde = _coalition_rows(warper, frame, full, warped)
    pred_real = predict_many(worlds.real_model, frame)
    pred_warped = predict_many(worlds.warped_model, x_tilde)
    pred_real_at_warped = predict_many(worlds.real_model, x_tilde)
    pred_warped_at_real = predict_many(worlds.warped_model, frame)
    parts = compose(pred_real, pred_warped, pred_real_at_warped, pred_warped_at_real,
                    worlds.train_mean_real, worlds.train_mean_warped, gamma, route)

    result = pd.DataFrame({
        "pred_real": pred_real,
        "pred_warped": pred_warped,
        "ps": parts["ps"],
        "delta0": parts["delta0"],
        "delta_g": parts["delta_g"],
        "delta_x": parts["delta_x"],
        }, index=frame.index)
    for j in range(k):
        result[f"gamma_{j + 1}"] = gamma[j]
    result["route"] = route
    return result


def psc(worlds, row, route=ROUTE["real"]) -> PscResult:
    record = psc_frame(worlds, _one_row(row), route).iloc[0]
    k = worlds.warper.k
    return PscResult(tuple(float(record[f"gamma_{j + 1}"]) for j in range(k)), float(record["delta_g"]),
                     float(record["delta_x"]), float(record["delta0"]), float(record["ps"]), route)


def component_names(k):
    return ["ps", "delta0", "delta_g", "delta_x"] + [f"gamma_{j + 1}" for j in range(k)]


def bootstrap_psc_frame(train: DatasetTable, dag: CausalDag, frame: pd.DataFrame, B: int, seed: int,
                        model_kind=MODEL_KIND["random_forest"], budget: Optional[TuningBudget] = None,
                        workers: int = 1, route=ROUTE["real"], mean_at=MEAN_AT["real"],
                        target_warp=TARGET_WARP["coupling"], tuning: Optional[Dict] = None,
                        reuse_tuning: Optional[bool] = None, worlds=None):
    """Replicates of the predictions, PS, intercepts and contributions of every row of `frame`."""
    if B < MIN_BOOTSTRAP:
        raise InputError(f"bootstrap needs at least {MIN_BOOTSTRAP} replicates, got {B}")
    if tuning is None:
        tuning = replicate_tuning(train, dag, model_kind, budget, mean_at, target_warp, reuse_tuning, worlds)

    names = ["pred_real", "pred_warped"] + component_names(dag.arrows.k)

    def replicate(sample):
        worlds = build_worlds(sample, dag, model_kind, budget, mean_at, target_warp, tuning)
        return psc_frame(worlds, frame, route)

    frames = run_bootstrap(train, replicate, B, seed, workers)
    return ReplicateSet.from_frames(frames, names)


def bootstrap_psc(train: DatasetTable, dag: CausalDag, row, B: int, alpha: float, seed: int, **options):
    """Per-component bootstrap intervals for one individual."""
    replicates = bootstrap_psc_frame(train, dag, _one_row(row), B, seed, **options)
    return {name: replicates.interval(name, 0, alpha) for name in replicates.names}


# standard interventional Shapley values of the PS over the model inputs

def interventional_shapley(predict: Callable[[np.ndarray], np.ndarray], x: np.ndarray, background: np.ndarray,
                           samples: int = DEFAULT_SAMPLES, seed: int = 0) -> np.ndarray:
    """Shapley values of predict(x) with absent inputs drawn from the background rows."""
    x = np.asarray(x, dtype=float)
    background = np.asarray(background, dtype=float)
    if len(background) == 0:
        raise InputError("background sample is empty")
    p = len(x)

    def value(S):
        data = background.copy()
        for j in S:
            data[:, j] = x[j]
        return float(np.mean(predict(data)))

    return shapley(value, p, samples, seed)


def default_background(train: DatasetTable, seed: int = 0, rows: int = BACKGROUND_ROWS) -> DatasetTable:
    if train.n <= rows:
        return train
    positions = np.sort(np.random.default_rng(seed).choice(train.n, size=rows, replace=False))
    return train.take(positions)


def standard_shapley(worlds, row, background: Optional[DatasetTable] = None, samples: int = DEFAULT_SAMPLES,
                     seed: int = 0, train: Optional[DatasetTable] = None) -> StandardShapleyResult:
    """eta_j = beta_j - beta-tilde_j: Shapley values of pi-hat at x minus those of phi-hat at x-tilde.

    Contributions of phi-hat use the warped background; eta_0 is the difference of the background means.
    """
    if background is None:
        if train is None:
            raise InputError("standard Shapley values need a background sample or the training set")
        background = default_background(train, seed)
    names = list(worlds.real_model.feature_names)
    frame = _one_row(row)
    real_row = frame[names].to_numpy(dtype=float)[0]
    warped_row = warp_frame(worlds.warper, frame)[names].to_numpy(dtype=float)[0]
    real_background = background.frame[names]
    warped_background = warp_frame(worlds.warper, background.frame)[names]

    def predict_real(data):
        return predict_many(worlds.real_model, pd.DataFrame(data, columns=names))

    def predict_warped(data):
        return predict_many(worlds.warped_model, pd.DataFrame(data, columns=names))

    beta = interventional_shapley(predict_real, real_row, real_background.to_numpy(dtype=float), samples, seed)
    beta_tilde = interventional_shapley(predict_warped, warped_row, warped_background.to_numpy(dtype=float),
                                        samples, seed)
    eta0 = float(np.mean(predict_real(real_background.to_numpy(dtype=float)))
                 - np.mean(predict_warped(warped_background.to_numpy(dtype=float))))
    return StandardShapleyResult(eta0, tuple(float(e) for e in beta - beta_tilde), tuple(names))
