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

"""Tabular data with role annotations: ingestion, encoding recipes and splitting."""

import json
import logging
import os
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from .core_model import ROLE, KIND, MISSING_TOKENS, ADVANTAGED_LEVEL
from .errors import InputError


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str
    role: str

    def __post_init__(self):
        if self.kind not in KIND:
            raise InputError(f"column '{self.name}': unknown kind '{self.kind}'")
        if self.role not in ROLE:
            raise InputError(f"column '{self.name}': unknown role '{self.role}'")


@dataclass(frozen=True)
class SplitIndices:
    train: np.ndarray
    test: np.ndarray
    seed: int


class DatasetTable:
    """An immutable table of float columns, each annotated with a ColumnSpec.

    Warped tables carry fractional values in binary columns, so the binary
    check can be switched off for them.
    """

    def __init__(self, frame: pd.DataFrame, columns: Sequence[ColumnSpec],
                 advantaged_level: float = ADVANTAGED_LEVEL, ids: Optional[Sequence[str]] = None,
                 check_binary: bool = True):
        columns = [spec for spec in columns if spec.role != ROLE["ignore"]]
        names = [spec.name for spec in columns]

        missing = [name for name in names if name not in frame.columns]
        if missing:
            logging.error(f"Table is missing columns {missing}")
            raise InputError(f"table is missing columns {', '.join(missing)}")

        for role in (ROLE["pa"], ROLE["target"]):
            count = sum(1 for spec in columns if spec.role == role)
            if count != 1:
                logging.error(f"Expected exactly one '{role}' column, found {count}")
                raise InputError(f"expected exactly one '{role}' column, found {count}")

        if len(frame) < 1:
            raise InputError("table has no rows")

        self._columns = list(columns)
        self._frame = frame[names].astype(float).reset_index(drop=True)
        self.advantaged_level = float(advantaged_level)
        if ids is None:
            ids = [str(i + 1) for i in range(len(self._frame))]
        self._ids = [str(i) for i in ids]
        if len(self._ids) != len(self._frame):
            raise InputError("number of ids does not match number of rows")

        if check_binary:
            for spec in self.binary_columns:
                values = self._frame[spec.name].to_numpy()
                bad = np.flatnonzero((values != 0.0) & (values != 1.0))
                if len(bad):
                    row = int(bad[0])
                    logging.error(f"Non-binary value {values[row]} in binary column '{spec.name}' at row {row + 1}")
                    raise InputError(f"row {row + 1}, column '{spec.name}': value {values[row]} is not 0 or 1")

    def __len__(self):
        return len(self._frame)

    def __repr__(self):
        return f"<DatasetTable n={self.n} columns={self.names}>"

    @property
    def n(self):
        return len(self._frame)

    @property
    def frame(self) -> pd.DataFrame:
        # callers must not modify the returned frame
        return self._frame

    @property
    def columns(self) -> List[ColumnSpec]:
        return list(self._columns)

    @property
    def names(self) -> List[str]:
        return [spec.name for spec in self._columns]

    @property
    def ids(self) -> List[str]:
        return list(self._ids)

    def spec(self, name) -> ColumnSpec:
        for spec in self._columns:
            if spec.name == name:
                return spec
        raise KeyError(f"no column named '{name}'")

    def kind(self, name):
        return self.spec(name).kind

    def _with_role(self, role):
        return [spec.name for spec in self._columns if spec.role == role]

    @property
    def pa(self):
        return self._with_role(ROLE["pa"])[0]

    @property
    def target(self):
        return self._with_role(ROLE["target"])[0]

    @property
    def confounders(self):
        return self._with_role(ROLE["confounder"])

    @property
    def features(self):
        return self._with_role(ROLE["feature"])

    @property
    def predictors(self):
        """Model inputs: every column but the target, in column order."""
        return [name for name in self.names if name != self.target]

    @property
    def binary_columns(self):
        return [spec for spec in self._columns if spec.kind == KIND["binary"]]

    def row(self, i) -> pd.Series:
        return self._frame.iloc[i]

    def take(self, positions) -> "DatasetTable":
        positions = np.asarray(positions, dtype=int)
        frame = self._frame.iloc[positions].reset_index(drop=True)
        ids = [self._ids[i] for i in positions]
        return DatasetTable(frame, self._columns, self.advantaged_level, ids, check_binary=False)

    def with_frame(self, frame, check_binary=False) -> "DatasetTable":
        return DatasetTable(frame, self._columns, self.advantaged_level, self._ids, check_binary=check_binary)


def load_column_specs(path) -> List[ColumnSpec]:
    if not os.path.exists(path):
        logging.error(f"Column spec file not found: {path}")
        raise InputError(f"column spec file not found: {path}")

    with open(path, "r") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as e:
            raise InputError(f"{path}: invalid JSON: {e}")

    if not isinstance(document, dict):
        raise InputError(f"{path}: expected an object mapping column name to {{kind, role}}")

    specs = []
    for name, entry in document.items():
        try:
            specs.append(ColumnSpec(name, entry["kind"], entry["role"]))
        except (KeyError, TypeError):
            raise InputError(f"{path}: column '{name}' needs 'kind' and 'role'")
    return specs


def _is_missing(cell):
    return cell.strip() in MISSING_TOKENS


def load_raw_csv(path) -> pd.DataFrame:
    """Read a CSV with every cell as a string, for encoding recipes."""
    if not os.path.exists(path):
        logging.error(f"Data file not found: {path}")
        raise InputError(f"data file not found: {path}")

    logging.info(f"Loading raw data {path}")
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        logging.error(f"Could not parse {path}: {e}")
        raise InputError(f"{path}: {e}")


def _parse_frame(raw: pd.DataFrame, specs: Sequence[ColumnSpec], source, id_column=None):
    used = [spec for spec in specs if spec.role != ROLE["ignore"]]
    names = [spec.name for spec in used]

    known = {spec.name for spec in specs}
    if id_column is not None:
        known.add(id_column)
    unknown = [name for name in raw.columns if name not in known]
    if unknown:
        logging.error(f"{source}: unknown columns {unknown}")
        raise InputError(f"{source}: unknown column '{unknown[0]}'")
    absent = [name for name in names if name not in raw.columns]
    if absent:
        logging.error(f"{source}: missing columns {absent}")
        raise InputError(f"{source}: missing column '{absent[0]}'")
    if id_column is not None and id_column not in raw.columns:
        raise InputError(f"{source}: missing id column '{id_column}'")

    cells = raw[names].astype(str)
    missing = cells.apply(lambda column: column.map(_is_missing)).any(axis=1).to_numpy()
    if missing.any():
        logging.warning(f"{source}: rejected {int(missing.sum())} rows with missing values")

    parsed = {name: [] for name in names}
    kept = []
    for i, record in enumerate(cells.itertuples(index=False, name=None)):
        if missing[i]:
            continue
        kept.append(i)
        for name, cell in zip(names, record):
            try:
                parsed[name].append(float(cell))
            except ValueError:
                logging.error(f"{source}: cannot parse '{cell}' at row {i + 1}, column '{name}'")
                raise InputError(f"{source}: row {i + 1}, column '{name}': cannot parse '{cell}' as a number")

    frame = pd.DataFrame(parsed, columns=names)
    finite = np.isfinite(frame.to_numpy(dtype=float)).all(axis=1)
    if not finite.all():
        logging.warning(f"{source}: rejected {int((~finite).sum())} rows with non-finite values")
        frame = frame[finite].reset_index(drop=True)
        kept = [i for i, ok in zip(kept, finite) if ok]

    if not kept:
        raise InputError(f"{source}: no rows left after removing missing values")
    if id_column is not None:
        ids = raw[id_column].astype(str).iloc[kept].tolist()
    else:
        ids = [str(i + 1) for i in kept]

    for spec in used:
        if spec.kind != KIND["binary"]:
            continue
        values = frame[spec.name].to_numpy()
        bad = np.flatnonzero((values != 0.0) & (values != 1.0))
        if len(bad):
            row = kept[int(bad[0])]
            logging.error(f"{source}: non-binary value at row {row + 1}, column '{spec.name}'")
            raise InputError(f"{source}: row {row + 1}, column '{spec.name}': value {values[bad[0]]} is not 0 or 1")

    return frame, ids


def load_csv(path, specs: Sequence[ColumnSpec], id_column=None,
             advantaged_level=ADVANTAGED_LEVEL) -> DatasetTable:
    raw = load_raw_csv(path)
    frame, ids = _parse_frame(raw, specs, path, id_column)
    table = DatasetTable(frame, specs, advantaged_level, ids)
    logging.info(f"Loaded {table.n} rows with columns {table.names} from {path}")
    return table


def write_csv(table: DatasetTable, path, with_ids=False):
    frame = table.frame
    if with_ids:
        frame = frame.copy()
        frame.insert(0, "id", table.ids)
    frame.to_csv(path, index=False, float_format="%.17g")


def split(table: DatasetTable, fraction: float, seed: int) -> SplitIndices:
    n = table.n
    if n < 2:
        logging.error(f"Cannot split a table with {n} rows")
        raise InputError(f"cannot split a table with {n} rows")
    if not 0.0 < fraction < 1.0:
        raise InputError(f"split fraction must lie in (0, 1), got {fraction}")

    n_train = int(min(max(round(fraction * n), 1), n - 1))
    order = np.random.default_rng(seed).permutation(n)
    return SplitIndices(np.sort(order[:n_train]), np.sort(order[n_train:]), seed)


def describe(table: DatasetTable, by: Optional[str] = None) -> pd.DataFrame:
    """Per-group n, mean and std of every column; groups are all rows plus each level of `by`."""
    by = table.pa if by is None else by
    frame = table.frame
    groups = [("all", frame)]
    for level in sorted(frame[by].unique()):
        groups.append((f"{by}={level:g}", frame[frame[by] == level]))

    records = []
    for label, group in groups:
        for name in table.names:
            values = group[name]
            records.append({
                "group": label,
                "column": name,
                "n": int(len(values)),
                "mean": float(values.mean()),
                "std": float(values.std(ddof=1)) if len(values) > 1 else 0.0,
                })
    return pd.DataFrame.from_records(records, columns=["group", "column", "n", "mean", "std"])


# encoding recipes

def _hmda_action(cell):
    return 1.0 if cell.strip() == "1" else 0.0


def _hmda_race(cell):
    value = cell.strip()
    if value in MISSING_TOKENS or value in ("Race Not Available", "Free Form Text Only"):
        return None
    return 1.0 if value == "White" else 0.0


_DTI_LOW = ("<20%", "20%-<30%", "30%-<36%")


def _hmda_debt(cell):
    value = cell.strip()
    if value in MISSING_TOKENS or value == "Exempt":
        return None
    if value in _DTI_LOW:
        return 1.0
    try:
        return 1.0 if float(value) < 36.0 else 0.0
    except ValueError:
        # range codes at or above 36%
        return 0.0


def _hmda_purpose(cell):
    value = cell.strip()
    if value in MISSING_TOKENS:
        return None
    return 1.0 if value == "1" else 0.0


def _hmda_sex(cell):
    return {"Male": 1.0, "Female": 0.0}.get(cell.strip())


def _hmda_age_above_62(cell):
    return {"Yes": 1.0, "No": 0.0}.get(cell.strip())


def _hmda_age(cell):
    value = cell.strip()
    if value in MISSING_TOKENS or value == "8888":
        return None
    if value == "<25":
        return 0.0
    if value == ">74":
        return 1.0
    if "-" in value:
        low, high = value.split("-", 1)
        try:
            low, high = float(low), float(high)
        except ValueError:
            return None
        if high <= 62:
            return 0.0
        if low > 62:
            return 1.0
        return None
    try:
        return 1.0 if float(value) > 62 else 0.0
    except ValueError:
        return None


def _positive(cell):
    try:
        value = float(cell)
    except ValueError:
        return None
    return value if value > 0 else None


def _number(cell):
    try:
        return float(cell)
    except ValueError:
        return None


def _lawschool_race(cell):
    value = cell.strip()
    if value in MISSING_TOKENS:
        return None
    if value in ("0", "1", "0.0", "1.0"):
        return float(value)
    return 0.0 if value.lower() == "black" else 1.0


def _lawschool_gender(cell):
    value = cell.strip()
    if value in ("0", "1", "0.0", "1.0"):
        return float(value)
    return {"male": 1.0, "female": 0.0}.get(value.lower())


def _binary(cell):
    value = cell.strip()
    if value in ("0", "1", "0.0", "1.0"):
        return float(value)
    return None


HMDA_COLUMNS = [
        ColumnSpec("race", "binary", "pa"),
        ColumnSpec("sex", "binary", "confounder"),
        ColumnSpec("age", "binary", "confounder"),
        ColumnSpec("amount", "numeric", "feature"),
        ColumnSpec("debt", "binary", "feature"),
        ColumnSpec("purpose", "binary", "feature"),
        ColumnSpec("action", "binary", "target"),
        ]

LAWSCHOOL_COLUMNS = [
        ColumnSpec("race", "binary", "pa"),
        ColumnSpec("ugpa", "numeric", "feature"),
        ColumnSpec("lsat", "numeric", "feature"),
        ColumnSpec("pass_bar", "binary", "target"),
        ]

LAWSCHOOL_GENDER_COLUMNS = [
        ColumnSpec("gender", "binary", "pa"),
        ColumnSpec("ugpa", "numeric", "feature"),
        ColumnSpec("lsat", "numeric", "feature"),
        ColumnSpec("pass_bar", "binary", "target"),
        ]


def _hmda_encoders(raw):
    age = ("applicant_age_above_62", _hmda_age_above_62) if "applicant_age_above_62" in raw.columns \
        else ("applicant_age", _hmda_age)
    return {
            "race": ("derived_race", _hmda_race),
            "sex": ("derived_sex", _hmda_sex),
            "age": age,
            "amount": ("loan_amount", _positive),
            "debt": ("debt_to_income_ratio", _hmda_debt),
            "purpose": ("loan_purpose", _hmda_purpose),
            "action": ("action_taken", _hmda_action),
            }


def _lawschool_encoders(raw):
    return {
            "race": ("race", _lawschool_race),
            "ugpa": ("ugpa", _positive),
            "lsat": ("lsat", _positive),
            "pass_bar": ("pass_bar", _binary),
            }


def _lawschool_gender_encoders(raw):
    return {
            "gender": ("gender", _lawschool_gender),
            "ugpa": ("ugpa", _positive),
            "lsat": ("lsat", _positive),
            "pass_bar": ("pass_bar", _binary),
            }


RECIPES = {
        "hmda": (HMDA_COLUMNS, _hmda_encoders),
        "lawschool": (LAWSCHOOL_COLUMNS, _lawschool_encoders),
        "lawschool_gender": (LAWSCHOOL_GENDER_COLUMNS, _lawschool_gender_encoders),
        }


def recipe_columns(recipe) -> List[ColumnSpec]:
    if recipe not in RECIPES:
        raise InputError(f"unknown recipe '{recipe}', expected one of {', '.join(RECIPES)}")
    return list(RECIPES[recipe][0])


def apply_recipe(raw, recipe: str, id_column=None) -> DatasetTable:
    """Encode a raw frame (or re-validate an encoded table) with one of the RECIPES."""
    specs = recipe_columns(recipe)
    encoders_for = RECIPES[recipe][1]
    names = [spec.name for spec in specs]

    if isinstance(raw, DatasetTable):
        if raw.names != names:
            raise InputError(f"table columns {raw.names} do not match recipe '{recipe}' columns {names}")
        return DatasetTable(raw.frame, specs, raw.advantaged_level, raw.ids)

    encoders = encoders_for(raw)
    renamed = {source for source, _ in encoders.values()} - set(names)
    already_encoded = renamed and all(name in raw.columns for name in names) \
        and not any(source in raw.columns for source in renamed)
    if already_encoded:
        # passes values through, validating them as the recipe output
        encoders = {name: (name, _number) for name in names}
        for spec in specs:
            if spec.kind == KIND["binary"]:
                encoders[spec.name] = (spec.name, _binary)

    absent = sorted({source for source, _ in encoders.values() if source not in raw.columns})
    if absent:
        logging.error(f"Recipe '{recipe}' is missing source columns {absent}")
        raise InputError(f"recipe '{recipe}': missing source column '{absent[0]}'")

    cells = {source: raw[source].astype(str).tolist() for source, _ in encoders.values()}
    raw_ids = raw[id_column].astype(str).tolist() if id_column else None

    columns = {name: [] for name in names}
    ids = []
    rejected = 0
    for i in range(len(raw)):
        record = {}
        for name, (source, encode) in encoders.items():
            value = encode(cells[source][i])
            if value is None:
                break
            record[name] = value
        if len(record) < len(names):
            rejected += 1
            continue
        for name in names:
            columns[name].append(record[name])
        ids.append(raw_ids[i] if raw_ids else str(i + 1))

    if rejected:
        logging.warning(f"Recipe '{recipe}': rejected {rejected} of {len(raw)} rows with missing or unusable codes")
    if not ids:
        raise InputError(f"recipe '{recipe}': no usable rows")

    table = DatasetTable(pd.DataFrame(columns, columns=names), specs, ADVANTAGED_LEVEL, ids)
    logging.info(f"Recipe '{recipe}' produced {table.n} rows")
    return table
