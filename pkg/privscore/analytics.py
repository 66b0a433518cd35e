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

"""Global views on privilege scores: permutation importance, subgroup summaries, audit regression."""

import logging
import re
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd
import statsmodels.api as sm
from scipy import stats

from .dataset import DatasetTable
from .errors import InputError, SingularDesignError
from .models import dependent_columns
from .privilege import empirical_quantiles, estimate_ps_frame
from .psc import PscResult

INTERCEPT = "(Intercept)"


@dataclass(frozen=True)
class RegressionSummary:
    coefficients: pd.DataFrame
    n: int
    df_resid: int
    residual_variance: float
    zero_variance: bool = False


@dataclass(frozen=True)
class SubgroupSummary:
    label: str
    n: int
    alpha: float
    table: pd.DataFrame


def pfi(worlds, test: DatasetTable, reference_ps, feature, repeats: int = 5, seed: int = 0) -> float:
    """Mean squared change of the PS when `feature` is permuted over the test rows."""
    if repeats < 1:
        raise InputError(f"repeats must be at least 1, got {repeats}")
    if feature not in test.names:
        raise InputError(f"unknown feature '{feature}'")
    reference = np.asarray(reference_ps, dtype=float)
    rng = np.random.default_rng(seed)
    values = test.frame[feature].to_numpy()

    errors = []
    for _ in range(repeats):
        permuted = test.frame.copy()
        permuted[feature] = values[rng.permutation(len(values))]
        ps = estimate_ps_frame(worlds, permuted)["ps"].to_numpy()
        errors.append(np.mean((ps - reference) ** 2))
    return float(np.mean(errors))


def pfi_all(worlds, test: DatasetTable, features: Optional[Sequence[str]] = None, repeats: int = 5,
            seed: int = 0) -> pd.DataFrame:
    features = test.predictors if features is None else list(features)
    reference = estimate_ps_frame(worlds, test.frame)["ps"].to_numpy()
    importances = [pfi(worlds, test, reference, feature, repeats, seed) for feature in features]
    logging.info(f"Permutation importances over {len(features)} features with {repeats} repeats")
    return pd.DataFrame({"feature": features, "importance": importances})


def _components_frame(results) -> pd.DataFrame:
    if isinstance(results, pd.DataFrame):
        frame = results
    else:
        results = list(results)
        if not results:
            raise InputError("no results to summarise")
        frame = pd.DataFrame([_result_record(result) for result in results])
    if len(frame) == 0:
        raise InputError("no results to summarise")
    contributions = [c for c in frame.columns if re.fullmatch(r"gamma_\d+", str(c))]
    names = ["ps", "delta_g", "delta_x"] + sorted(contributions, key=lambda c: int(c.split("_")[1]))
    return frame[names].astype(float)


def _result_record(result: PscResult):
    record = {"ps": result.ps, "delta_g": result.delta_g, "delta_x": result.delta_xtilde}
    for j, gamma in enumerate(result.gamma):
        record[f"gamma_{j + 1}"] = gamma
    return record


def psc_importance(results) -> pd.Series:
    """Mean absolute value of every component."""
    return _components_frame(results).abs().mean()


def subgroup_summary(results, group_filter=None, alpha: float = 0.05, label: str = "all") -> SubgroupSummary:
    """Mean, (alpha, 1 - alpha) quantiles and importance of every component in a group.

    `group_filter` is a boolean mask over the rows of `results`.
    """
    frame = _components_frame(results)
    if group_filter is not None:
        frame = frame[np.asarray(group_filter, dtype=bool)]
    if len(frame) == 0:
        logging.error(f"Subgroup '{label}' is empty")
        raise InputError(f"subgroup '{label}' is empty")

    lower, upper = empirical_quantiles(frame.to_numpy(), [alpha, 1.0 - alpha], axis=0)
    table = pd.DataFrame({
        "component": frame.columns,
        "mean": frame.mean().to_numpy(),
        "lower": lower,
        "upper": upper,
        "importance": frame.abs().mean().to_numpy(),
        })
    return SubgroupSummary(label, int(len(frame)), float(alpha), table)


def regress_ps(test: DatasetTable, ps, regressors: Sequence[str]) -> RegressionSummary:
    """OLS of the PS on the regressors with an intercept and classical standard errors."""
    regressors = list(regressors)
    y = np.asarray(ps, dtype=float)
    names = [INTERCEPT] + regressors
    X = np.column_stack([np.ones(len(y))] + [test.frame[name].to_numpy(dtype=float) for name in regressors])
    n, p = X.shape
    if n <= p:
        raise InputError(f"regression needs more rows than parameters ({n} <= {p})")

    dependent = dependent_columns(X, names)
    if dependent:
        logging.error(f"Audit regression design is rank deficient in {dependent}")
        raise SingularDesignError("ps", dependent)

    result = sm.OLS(y, X).fit()
    estimates = np.asarray(result.params, dtype=float)
    df_resid = n - p
    residuals = y - X @ estimates
    ssr = float(residuals @ residuals)
    sigma2 = ssr / df_resid
    zero_variance = ssr <= 1e-20 * max(1.0, float(y @ y))

    if zero_variance:
        se = np.zeros(p)
        t_values = np.full(p, np.nan)
        p_values = np.full(p, np.nan)
        logging.warning("Audit regression fits exactly; t and p values are undefined")
    else:
        se = np.asarray(result.bse, dtype=float)
        t_values = estimates / se
        p_values = 2.0 * stats.t.sf(np.abs(t_values), df_resid)

    coefficients = pd.DataFrame({
        "name": names,
        "estimate": estimates,
        "std_error": se,
        "t_value": t_values,
        "p_value": p_values,
        })
    return RegressionSummary(coefficients, int(n), int(df_resid), float(0.0 if zero_variance else sigma2),
                             bool(zero_variance))


def _cell(value, p_value=False):
    if not np.isfinite(value):
        return "NA"
    if p_value and value < 1e-4:
        return "<0.0001"
    return f"{value:.4f}"


def format_regression(summary: RegressionSummary) -> str:
    header = ["", "Estimate", "Std. Error", "t value", "Pr(>|t|)"]
    rows = [header]
    for record in summary.coefficients.itertuples(index=False):
        rows.append([record.name, _cell(record.estimate), _cell(record.std_error), _cell(record.t_value),
                     _cell(record.p_value, p_value=True)])
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = [" ".join([row[0].ljust(widths[0])] + [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])])
             for row in rows]
    lines.append("")
    lines.append(f"Residual standard error: {_cell(np.sqrt(summary.residual_variance))} on "
                 f"{summary.df_resid} degrees of freedom")
    return "\n".join(lines) + "\n"
