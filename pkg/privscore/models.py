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

"""Classifiers for the two world models and GLMs for warping."""

import json
import logging
import warnings
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import statsmodels.api as sm
from scipy import linalg, stats
from scipy.special import expit, logit
from sklearn.ensemble import RandomForestClassifier
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import log_loss
from sklearn.model_selection import KFold, ParameterSampler

from .core_model import (EPSILON, FAMILY, MODEL_KIND, MODEL_FORMAT, MODEL_FORMAT_VERSION, RF_SEARCH_SPACE,
                         GLM_MAX_ITERATIONS, GLM_TOLERANCE)
from .errors import ComputationError, InputError, SingularDesignError


@dataclass(frozen=True)
class TuningBudget:
    evaluations: int = 25
    folds: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.evaluations < 1:
            raise InputError(f"tuning evaluations must be at least 1, got {self.evaluations}")
        if self.folds < 2:
            raise InputError(f"tuning folds must be at least 2, got {self.folds}")


@dataclass(frozen=True)
class FittedPredictor:
    kind: str
    feature_names: Tuple[str, ...]
    parameters: Dict = field(default_factory=dict)
    estimator: object = field(default=None, compare=False, repr=False)

    @property
    def hyperparameters(self) -> Optional[Dict]:
        return self.parameters.get("hyperparameters")


@dataclass(frozen=True)
class FittedGlm:
    family: str
    response: str
    parents: Tuple[str, ...]
    coefficients: np.ndarray
    dispersion: float
    converged: bool = True

    def linear_predictor(self, frame: pd.DataFrame) -> np.ndarray:
        # column by column, so a row's value never depends on the other rows
        eta = np.full(len(frame), self.coefficients[0])
        for coefficient, parent in zip(self.coefficients[1:], self.parents):
            eta = eta + coefficient * frame[parent].to_numpy(dtype=float)
        return eta

    def mean(self, frame: pd.DataFrame) -> np.ndarray:
        eta = self.linear_predictor(frame)
        if self.family == FAMILY["binary"]:
            return expit(eta)
        return np.exp(eta)


def _matrix(frame, feature_names):
    absent = [name for name in feature_names if name not in frame]
    if absent:
        logging.error(f"Missing feature columns {absent}")
        raise InputError(f"missing feature column '{absent[0]}'")
    return np.column_stack([np.asarray(frame[name], dtype=float) for name in feature_names]) \
        if feature_names else np.zeros((len(frame), 0))


def dependent_columns(X: np.ndarray, names: Sequence[str]):
    """Names of the columns a pivoted QR finds linearly dependent on the others."""
    if X.shape[1] == 0:
        return []
    _, R, pivots = linalg.qr(X, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(R))
    tolerance = max(X.shape) * np.finfo(float).eps * 1e3 * (diagonal[0] if len(diagonal) else 0.0)
    rank = int(np.sum(diagonal > tolerance))
    if X.shape[0] < X.shape[1]:
        rank = min(rank, X.shape[0])
    return [names[i] for i in pivots[rank:]]


# classifiers

def _soft_label_rows(X, y, weights):
    """Two weighted copies of every row: class 1 with weight y, class 0 with weight 1 - y."""
    X2 = np.vstack([X, X])
    y2 = np.concatenate([np.ones(len(y)), np.zeros(len(y))])
    w2 = np.concatenate([weights * y, weights * (1.0 - y)])
    keep = w2 > 0
    return X2[keep], y2[keep], w2[keep]


def _canonical_order(X, y, weights):
    keys = [weights, y] + [X[:, j] for j in reversed(range(X.shape[1]))]
    return np.lexsort(keys)


def _forest(hyperparameters, seed):
    return RandomForestClassifier(
            n_estimators=int(hyperparameters["n_estimators"]),
            max_depth=int(hyperparameters["max_depth"]),
            min_samples_leaf=int(hyperparameters["min_samples_leaf"]),
            max_features=float(hyperparameters["max_features"]),
            random_state=seed,
            n_jobs=1)


def _search_space():
    low, high = RF_SEARCH_SPACE["max_features"]
    return {
            "n_estimators": stats.randint(RF_SEARCH_SPACE["n_estimators"][0], RF_SEARCH_SPACE["n_estimators"][1] + 1),
            "max_depth": stats.randint(RF_SEARCH_SPACE["max_depth"][0], RF_SEARCH_SPACE["max_depth"][1] + 1),
            "min_samples_leaf": stats.randint(RF_SEARCH_SPACE["min_samples_leaf"][0],
                                              RF_SEARCH_SPACE["min_samples_leaf"][1] + 1),
            "max_features": stats.uniform(low, high - low),
            }


def tune_forest(X, y, weights, budget: TuningBudget):
    """Random search over the forest hyperparameters scored by k-fold weighted log-loss.

    Folds split the original rows, so both soft-label copies of a row land in
    the same fold.
    """
    n = len(y)
    if budget.folds > n:
        raise InputError(f"cannot run {budget.folds}-fold cross-validation on {n} rows")

    candidates = list(ParameterSampler(_search_space(), n_iter=budget.evaluations, random_state=budget.seed))
    folds = list(KFold(n_splits=budget.folds, shuffle=True, random_state=budget.seed).split(np.arange(n)))

    best, best_score = None, np.inf
    for candidate in candidates:
        scores = []
        for train_rows, test_rows in folds:
            X_train, y_train, w_train = _soft_label_rows(X[train_rows], y[train_rows], weights[train_rows])
            X_test, y_test, w_test = _soft_label_rows(X[test_rows], y[test_rows], weights[test_rows])
            if len(np.unique(y_train)) < 2:
                p = np.full(len(y_test), np.average(y_train, weights=w_train))
            else:
                forest = _forest(candidate, budget.seed).fit(X_train, y_train, sample_weight=w_train)
                p = forest.predict_proba(X_test)[:, list(forest.classes_).index(1.0)]
            p = np.clip(p, EPSILON, 1.0 - EPSILON)
            scores.append(log_loss(y_test, p, sample_weight=w_test, labels=[0.0, 1.0]))
        score = float(np.mean(scores))
        logging.debug(f"Forest candidate {candidate}: CV log-loss {score:.6f}")
        if score < best_score:
            best, best_score = candidate, score

    best = {key: (float(value) if key == "max_features" else int(value)) for key, value in best.items()}
    logging.info(f"Chose forest hyperparameters {best} with CV log-loss {best_score:.6f}")
    return best, best_score


def constant_log_loss(y, weights=None) -> float:
    """Weighted log-loss of predicting the weighted mean of the soft labels."""
    y = np.asarray(y, dtype=float)
    weights = np.ones(len(y)) if weights is None else np.asarray(weights, dtype=float)
    p = np.clip(np.average(y, weights=weights), EPSILON, 1.0 - EPSILON)
    _, y2, w2 = _soft_label_rows(np.zeros((len(y), 0)), y, weights)
    return float(log_loss(y2, np.full(len(y2), p), sample_weight=w2, labels=[0.0, 1.0]))


def _constant(feature_names, value):
    value = float(np.clip(value, EPSILON, 1.0 - EPSILON))
    return FittedPredictor(MODEL_KIND["constant"], tuple(feature_names), {"value": value})


def fit_classifier(table, target, features: Sequence[str], kind=MODEL_KIND["random_forest"],
                   budget: Optional[TuningBudget] = None, weights=None,
                   hyperparameters: Optional[Dict] = None) -> FittedPredictor:
    """Fit a probability model of `target` (hard or soft labels in [0, 1]) on `features`.

    Random forests are tuned by random search unless `hyperparameters` are given.
    """
    budget = budget or TuningBudget()
    frame = getattr(table, "frame", table)
    features = tuple(features)
    X = _matrix(frame, features)
    y = np.asarray(frame[target], dtype=float)
    weights = np.ones(len(y)) if weights is None else np.asarray(weights, dtype=float)

    if np.any((y < 0) | (y > 1)) or not np.all(np.isfinite(y)):
        raise InputError(f"target '{target}' must lie in [0, 1]")
    if np.any(weights < 0):
        raise InputError("weights must be non-negative")

    positive, negative = np.sum(weights * y), np.sum(weights * (1.0 - y))
    if positive <= 0 or negative <= 0:
        value = 1.0 if negative <= 0 else 0.0
        logging.warning(f"Target '{target}' is degenerate; fitting a constant predictor {value:g}")
        return _constant(features, value)

    if kind == MODEL_KIND["logistic"]:
        X2, y2, w2 = _soft_label_rows(X, y, weights)
        model = LogisticRegression(penalty=None, solver="newton-cholesky", tol=1e-10, max_iter=100)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            model.fit(X2, y2, sample_weight=w2)
        for warning in caught:
            logging.warning(f"Logistic fit of '{target}': {warning.message}")
        parameters = {"intercept": float(model.intercept_[0]), "coefficients": [float(b) for b in model.coef_[0]]}
        return FittedPredictor(kind, features, parameters)

    if kind == MODEL_KIND["random_forest"]:
        order = _canonical_order(X, y, weights)
        X, y, weights = X[order], y[order], weights[order]
        if hyperparameters is None:
            hyperparameters, score = tune_forest(X, y, weights, budget)
        else:
            score = None
            logging.debug(f"Reusing forest hyperparameters {hyperparameters}")
        X2, y2, w2 = _soft_label_rows(X, y, weights)
        forest = _forest(hyperparameters, budget.seed).fit(X2, y2, sample_weight=w2)
        parameters = {"hyperparameters": dict(hyperparameters), "cv_log_loss": score}
        return FittedPredictor(kind, features, parameters, _ForestEstimator(forest))

    raise InputError(f"unknown model kind '{kind}'")


class _ForestEstimator:
    def __init__(self, forest):
        self.forest = forest
        self._positive = list(forest.classes_).index(1.0)

    def positive_probability(self, X):
        return self.forest.predict_proba(X)[:, self._positive]

    def trees(self):
        documents = []
        for tree in self.forest.estimators_:
            state = tree.tree_
            value = state.value[:, 0, :]
            totals = value.sum(axis=1)
            documents.append({
                "children_left": state.children_left.tolist(),
                "children_right": state.children_right.tolist(),
                "feature": state.feature.tolist(),
                "threshold": state.threshold.tolist(),
                "positive_fraction": (value[:, self._positive] / np.where(totals > 0, totals, 1.0)).tolist(),
                })
        return documents


class _TreeEnsemble:
    """A forest restored from its per-tree arrays."""

    def __init__(self, trees):
        self._trees = [{key: np.asarray(value) for key, value in tree.items()} for tree in trees]

    def positive_probability(self, X):
        # forests split on float32 features
        X = np.asarray(X, dtype=np.float32)
        rows = np.arange(len(X))
        total = np.zeros(len(X))
        for tree in self._trees:
            left, right = tree["children_left"], tree["children_right"]
            node = np.zeros(len(X), dtype=int)
            internal = left[node] != -1
            while internal.any():
                go_left = X[rows, np.maximum(tree["feature"][node], 0)] <= tree["threshold"][node]
                step = np.where(go_left, left[node], right[node])
                node = np.where(internal, step, node)
                internal = left[node] != -1
            total += tree["positive_fraction"][node]
        return total / len(self._trees)

    def trees(self):
        return [{key: value.tolist() for key, value in tree.items()} for tree in self._trees]


def predict_many(model: FittedPredictor, frame) -> np.ndarray:
    X = _matrix(frame, model.feature_names)
    if model.kind == MODEL_KIND["constant"]:
        p = np.full(len(X), model.parameters["value"])
    elif model.kind == MODEL_KIND["logistic"]:
        coefficients = np.asarray(model.parameters["coefficients"], dtype=float)
        eta = np.full(len(X), model.parameters["intercept"])
        for j, coefficient in enumerate(coefficients):
            eta = eta + coefficient * X[:, j]
        p = expit(eta)
    elif model.kind == MODEL_KIND["random_forest"]:
        p = model.estimator.positive_probability(X)
    else:
        raise InputError(f"unknown model kind '{model.kind}'")
    return np.clip(p, EPSILON, 1.0 - EPSILON)


def predict_proba(model: FittedPredictor, row) -> float:
    return float(predict_many(model, pd.DataFrame([dict(row)]))[0])


def model_to_json(model: FittedPredictor) -> Dict:
    document = {
            "format": MODEL_FORMAT,
            "version": MODEL_FORMAT_VERSION,
            "kind": model.kind,
            "feature_names": list(model.feature_names),
            }
    if model.kind == MODEL_KIND["random_forest"]:
        document["hyperparameters"] = model.hyperparameters
        document["trees"] = model.estimator.trees()
    else:
        document.update(model.parameters)
    return document


def model_from_json(document) -> FittedPredictor:
    if document.get("format") != MODEL_FORMAT:
        raise InputError(f"not a {MODEL_FORMAT} document")
    if document.get("version") != MODEL_FORMAT_VERSION:
        raise InputError(f"unsupported model document version {document.get('version')}")

    kind = document["kind"]
    features = tuple(document["feature_names"])
    if kind == MODEL_KIND["constant"]:
        return FittedPredictor(kind, features, {"value": float(document["value"])})
    if kind == MODEL_KIND["logistic"]:
        coefficients = [float(b) for b in document["coefficients"]]
        if len(coefficients) != len(features):
            raise InputError("logistic model needs one coefficient per feature")
        return FittedPredictor(kind, features, {"intercept": float(document["intercept"]),
                                                "coefficients": coefficients})
    if kind == MODEL_KIND["random_forest"]:
        parameters = {"hyperparameters": document.get("hyperparameters"), "cv_log_loss": None}
        return FittedPredictor(kind, features, parameters, _TreeEnsemble(document["trees"]))
    raise InputError(f"unknown model kind '{kind}'")


def load_model(path) -> FittedPredictor:
    with open(path, "r") as f:
        return model_from_json(json.load(f))


# generalised linear models for warping

_FAMILIES = {
        FAMILY["binary"]: lambda: sm.families.Binomial(),
        FAMILY["numeric"]: lambda: sm.families.Gamma(link=sm.families.links.Log()),
        }


def fit_glm(table, response, parents: Sequence[str], family) -> FittedGlm:
    if family not in _FAMILIES:
        raise InputError(f"unknown GLM family '{family}'")
    frame = getattr(table, "frame", table)
    parents = tuple(parents)
    y = np.asarray(frame[response], dtype=float)
    X = np.column_stack([np.ones(len(y)), _matrix(frame, parents)])

    if family == FAMILY["numeric"] and np.any(y <= 0):
        count = int(np.sum(y <= 0))
        logging.error(f"Gamma response '{response}' has {count} non-positive values")
        raise InputError(f"gamma response '{response}' must be strictly positive; {count} values are not")

    if np.all(y == y[0]):
        c = y[0]
        intercept = logit(np.clip(c, EPSILON, 1.0 - EPSILON)) if family == FAMILY["binary"] else np.log(c)
        logging.warning(f"Response '{response}' is constant; fitting an intercept-only GLM")
        coefficients = np.zeros(len(parents) + 1)
        coefficients[0] = intercept
        return FittedGlm(family, response, parents, coefficients, 0.0 if family == FAMILY["numeric"] else 1.0)

    dependent = dependent_columns(X, ("(Intercept)",) + parents)
    if dependent:
        logging.error(f"Singular design for '{response}': dependent columns {dependent}")
        raise SingularDesignError(response, dependent)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            result = sm.GLM(y, X, family=_FAMILIES[family]()).fit(
                    method="IRLS", maxiter=GLM_MAX_ITERATIONS, tol=GLM_TOLERANCE, rtol=GLM_TOLERANCE)
        except Exception as e:
            logging.error(f"GLM fit of '{response}' failed: {e}")
            raise ComputationError(f"GLM fit of '{response}' on {', '.join(parents) or 'intercept'} failed: {e}")
    for warning in caught:
        logging.warning(f"GLM fit of '{response}': {warning.message}")

    coefficients = np.asarray(result.params, dtype=float)
    if not np.all(np.isfinite(coefficients)):
        raise ComputationError(f"GLM fit of '{response}' produced non-finite coefficients")
    converged = bool(getattr(result, "converged", True))
    if not converged:
        logging.warning(f"GLM fit of '{response}' did not converge in {GLM_MAX_ITERATIONS} iterations")
    dispersion = float(result.scale) if family == FAMILY["numeric"] else 1.0
    logging.debug(f"GLM {family} '{response}' ~ {parents}: {coefficients}")
    return FittedGlm(family, response, parents, coefficients, dispersion, converged)
