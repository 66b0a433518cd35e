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

"""Simulation study: estimate PS and PSCs on simulated data and score them against the truth."""

import logging
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from .config.run_config import SIMULATION_DAG, RunConfig
from .core_model import QUANTILES_OVER
from .dag import load_dag
from .dataset import split
from .privilege import build_worlds, empirical_quantiles
from .psc import bootstrap_psc_frame, psc_frame
from .scm import SIMULATION_ARROWS, ScmSpec, sample_frame, simulation_table, true_components

METRICS = ["bias", "mse", "coverage", "width"]


def study_components():
    return ["ps", "delta_g", "delta_x"] + [f"gamma_{j + 1}" for j in range(len(SIMULATION_ARROWS))]


def iteration_seeds(seed: int, iterations: int) -> List[int]:
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(iterations)]


def run_iteration(config: RunConfig, seed: int, workers: Optional[int] = None) -> pd.DataFrame:
    """Estimates, truth and interval bounds of every test individual of one simulated data set."""
    frame = sample_frame(ScmSpec(config.scenario, config.n, seed))
    table = simulation_table(frame)
    indices = split(table, config.split, seed)
    train, test = table.take(indices.train), table.take(indices.test)
    dag = load_dag(SIMULATION_DAG).validate(train)
    budget = config.budget
    workers = config.workers if workers is None else workers

    worlds = build_worlds(train, dag, config.model_kind, budget, config.mean_at, config.target_warp)
    estimates = psc_frame(worlds, test.frame, config.route)
    truth = true_components(frame, indices.train, indices.test, config.route, config.scenario)

    result = pd.DataFrame(index=range(test.n))
    for name in study_components():
        result[f"{name}_hat"] = estimates[name].to_numpy()
        result[f"{name}_true"] = truth[name].to_numpy()

    if config.bootstrap:
        replicates = bootstrap_psc_frame(train, dag, test.frame, config.bootstrap, seed, config.model_kind,
                                         budget, workers, config.route, config.mean_at,
                                         config.target_warp, reuse_tuning=config.reuse_tuning, worlds=worlds)
        intervals = replicates.intervals(config.alpha)
        for name in study_components():
            result[f"{name}_lower"], result[f"{name}_upper"] = intervals[name]
    return result


def _errors(frame: pd.DataFrame, name) -> pd.DataFrame:
    """Per-individual error terms whose means are the metrics."""
    error = frame[f"{name}_hat"] - frame[f"{name}_true"]
    terms = pd.DataFrame({"bias": error, "mse": error ** 2})
    if f"{name}_lower" in frame:
        lower, upper, true = frame[f"{name}_lower"], frame[f"{name}_upper"], frame[f"{name}_true"]
        terms["coverage"] = ((lower <= true) & (true <= upper)).astype(float)
        terms["width"] = upper - lower
    return terms


def score_iteration(frame: pd.DataFrame, components: Sequence[str] = None) -> pd.DataFrame:
    """Bias, MSE, coverage and interval width of every component over the test individuals."""
    components = study_components() if components is None else components
    records = []
    for name in components:
        means = _errors(frame, name).mean()
        records.append({"component": name, **{metric: float(means[metric]) for metric in means.index}})
    return pd.DataFrame.from_records(records)


def aggregate_metrics(iterations: Sequence[pd.DataFrame], quantiles_over=QUANTILES_OVER["iterations"],
                      components: Sequence[str] = None) -> pd.DataFrame:
    """Mean, 5% and 95% quantiles of every metric.

    Over `iterations` the quantiles range over per-iteration metrics; over
    `individuals` they range over the pooled per-individual error terms.
    """
    components = study_components() if components is None else components
    records = []
    for name in components:
        if quantiles_over == QUANTILES_OVER["iterations"]:
            population = pd.DataFrame([_errors(frame, name).mean() for frame in iterations])
        else:
            population = pd.concat([_errors(frame, name) for frame in iterations], ignore_index=True)
        for metric in [m for m in METRICS if m in population]:
            values = population[metric].to_numpy(dtype=float)
            q05, q95 = empirical_quantiles(values, [0.05, 0.95])
            records.append({"component": name, "metric": metric, "mean": float(np.mean(values)),
                            "q05": float(q05), "q95": float(q95)})
    return pd.DataFrame.from_records(records, columns=["component", "metric", "mean", "q05", "q95"])


def _logged_iteration(config: RunConfig, m: int, seed: int, workers: int) -> pd.DataFrame:
    logging.info(f"Simulation iteration {m + 1}/{config.iterations} (scenario {config.scenario}, seed {seed})")
    return run_iteration(config, seed, workers)


def run_simulation(config: RunConfig):
    """All iterations of a simulation study; returns the metrics report and the per-iteration scores.

    Iterations run on `config.workers` processes, each bootstrapping serially.
    """
    config.validate()
    seeds = iteration_seeds(config.seed, config.iterations)
    if config.iterations > 1:
        outer, inner = config.workers, 1
    else:
        outer, inner = 1, config.workers
    iterations = Parallel(n_jobs=outer)(
        delayed(_logged_iteration)(config, m, seed, inner) for m, seed in enumerate(seeds))

    scores = []
    for m, frame in enumerate(iterations):
        score = score_iteration(frame)
        score.insert(0, "iteration", m + 1)
        scores.append(score)
    report = aggregate_metrics(iterations, config.quantiles_over)
    return report, pd.concat(scores, ignore_index=True)
