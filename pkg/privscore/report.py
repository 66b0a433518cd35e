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

"""Writers for run outputs: CSV tables, JSON documents and per-individual SVG charts."""

import json
import logging
import math
from typing import List, NamedTuple, Optional, Sequence

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

FLOAT_FORMAT = "%.17g"
CHART_DECIMALS = 6

# deterministic element ids; text stays text
SVG_STYLE = {"svg.hashsalt": "privscore", "svg.fonttype": "none"}


class ChartRow(NamedTuple):
    label: str
    value: float
    lower: Optional[float] = None
    upper: Optional[float] = None


def _plain(value):
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return [_plain(item) for item in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, pd.DataFrame):
        return [_plain(record) for record in value.to_dict("records")]
    return value


def write_json(document, path):
    with open(path, "w") as f:
        json.dump(_plain(document), f, indent=2)
        f.write("\n")
    logging.info(f"Wrote {path}")


def read_json(path):
    with open(path, "r") as f:
        return json.load(f)


def write_frame(frame: pd.DataFrame, path):
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logging.info(f"Wrote {path}")


def chart_rows(record, labels: Sequence[str], k: int) -> List[ChartRow]:
    """PS first, then the two intercepts and the contributions, with interval bounds where present."""
    components = [("ps", "PS"), ("delta_g", "global intercept"), ("delta_x", "individual intercept")]
    components += [(f"gamma_{j + 1}", labels[j]) for j in range(k)]

    def bound(name, side):
        column = ("ci" if name == "ps" else name) + f"_{side}"
        value = record.get(column)
        if value is None or (isinstance(value, float) and math.isnan(value)):
            return None
        return float(value)

    return [ChartRow(label, float(record[name]), bound(name, "lower"), bound(name, "upper"))
            for name, label in components]


def psc_chart(rows: Sequence[ChartRow], path, title=""):
    """Horizontal bar chart with the first row on top and interval whiskers."""
    with plt.rc_context(SVG_STYLE):
        _draw_chart(rows, path, title)


def _draw_chart(rows, path, title):
    figure, axis = plt.subplots(figsize=(7, 0.6 * len(rows) + 1.2))
    positions = np.arange(len(rows))[::-1]
    values = [row.value for row in rows]
    colours = ["#4c72b0" if i == 0 else ("#dd8452" if value < 0 else "#55a868")
               for i, value in enumerate(values)]
    axis.barh(positions, values, color=colours)

    for position, row in zip(positions, rows):
        if row.lower is not None and row.upper is not None:
            axis.plot([row.lower, row.upper], [position, position], color="black", linewidth=1)
        axis.text(row.value, position, f" {row.value:.{CHART_DECIMALS}f} ", va="center",
                  ha="left" if row.value >= 0 else "right", fontsize=8)

    axis.axvline(0.0, color="grey", linewidth=0.8)
    axis.set_yticks(positions)
    axis.set_yticklabels([row.label for row in rows])
    axis.set_xlabel("contribution to the privilege score")
    if title:
        axis.set_title(title)
    figure.tight_layout()
    figure.savefig(path, format="svg", metadata={"Date": None})
    plt.close(figure)
    logging.info(f"Wrote {path}")
