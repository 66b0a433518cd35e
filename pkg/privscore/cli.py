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

"""Command-line entry point: simulate, audit, explain and pfi."""

import argparse
import logging
import os
import sys

import numpy as np
import pandas as pd

from .analytics import format_regression, pfi_all, regress_ps, subgroup_summary
from .config.run_config import RunConfig, load_run_config
from .dag import load_dag
from .dataset import apply_recipe, describe, load_column_specs, load_csv, load_raw_csv, split, RECIPES
from .errors import InputError
from .privilege import build_worlds
from .psc import bootstrap_psc_frame, component_names, psc_frame
from .report import chart_rows, psc_chart, read_json, write_frame, write_json
from .scm import ScmSpec, sample_frame
from .study import iteration_seeds, run_simulation
from .warp import warp_frame, warp_target, warped_columns

CHART_COUNT = 6

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2


def _config(args) -> RunConfig:
    config = load_run_config(args.config) if args.config else RunConfig()
    flags = {
            "seed": args.seed,
            "model_kind": args.model,
            "evaluations": args.evaluations,
            "folds": args.folds,
            "bootstrap": args.bootstrap,
            "alpha": args.alpha,
            "out": args.out,
            "workers": args.workers,
            "route": args.route,
            "mean_at": args.mean_at,
            "target_warp": args.target_warp,
            "reuse_tuning": args.reuse_tuning,
            }
    for name in ("scenario", "n", "iterations", "quantiles_over", "table_alpha", "split", "svg", "pfi_repeats"):
        if hasattr(args, name):
            flags[name] = getattr(args, name)
    return config.override(**flags).validate()


def _prepare_out(config: RunConfig):
    os.makedirs(config.out, exist_ok=True)
    return config.out


def _load_table(args):
    if args.recipe:
        return apply_recipe(load_raw_csv(args.data), args.recipe, args.id_column)
    if not args.columns:
        raise InputError("audit needs --columns or --recipe to type the data columns")
    return load_csv(args.data, load_column_specs(args.columns), args.id_column)


def cmd_simulate(args) -> int:
    config = _config(args)
    out = _prepare_out(config)

    sample = sample_frame(ScmSpec(config.scenario, config.n, iteration_seeds(config.seed, 1)[0]))
    write_frame(sample[["A", "C", "X1", "X2", "Y", "true_pi", "true_psi", "true_delta"]],
                os.path.join(out, "sample.csv"))

    report, scores = run_simulation(config)
    write_frame(report, os.path.join(out, "metrics.csv"))
    write_frame(scores, os.path.join(out, "iterations.csv"))
    write_json({"config": config.to_dict(), "metrics": report}, os.path.join(out, "metrics.json"))
    logging.info(f"Simulation finished: {config.iterations} iterations of scenario {config.scenario}")
    return EXIT_OK


def _run_document(config, dag, table, ids):
    return {
            "config": config.to_dict(),
            "pa": dag.pa,
            "target": dag.target,
            "arrows": [list(arrow) for arrow in dag.arrows.arrows],
            "labels": [child for _, child in dag.arrows.arrows],
            "columns": [{"name": spec.name, "kind": spec.kind, "role": spec.role} for spec in table.columns],
            "alpha": config.alpha,
            "B": config.bootstrap,
            "route": config.route,
            "ids": ids,
            }


def cmd_audit(args) -> int:
    config = _config(args)
    table = _load_table(args)
    dag = load_dag(args.dag).validate(table)
    out = _prepare_out(config)

    indices = split(table, config.split, config.seed)
    train, test = table.take(indices.train), table.take(indices.test)
    budget = config.budget
    worlds = build_worlds(train, dag, config.model_kind, budget, config.mean_at, config.target_warp)
    k = dag.arrows.k

    result = psc_frame(worlds, test.frame, config.route)
    result.insert(0, "id", test.ids)
    if config.bootstrap:
        replicates = bootstrap_psc_frame(train, dag, test.frame, config.bootstrap, config.seed, config.model_kind,
                                         budget, config.workers, config.route, config.mean_at,
                                         config.target_warp, reuse_tuning=config.reuse_tuning, worlds=worlds)
        intervals = replicates.intervals(config.alpha)
        for name in component_names(k):
            lower, upper = intervals[name]
            prefix = "ci" if name == "ps" else name
            result[f"{prefix}_lower"] = lower
            result[f"{prefix}_upper"] = upper
    result["alpha"] = config.alpha
    result["B"] = config.bootstrap
    write_frame(result, os.path.join(out, "psc.csv"))

    warped = warp_frame(worlds.warper, test.frame)
    warped[dag.target] = warp_target(worlds.warper, test.frame, warped)
    export = warped_columns(worlds.warper, test.frame, warped)
    export.insert(0, "id", test.ids)
    write_frame(export, os.path.join(out, "warped.csv"))

    pa = test.frame[dag.pa].to_numpy()
    groups = [("all", None), (f"{dag.pa}=0", pa == 0), (f"{dag.pa}=1", pa == 1)]
    summaries = []
    for label, mask in groups:
        if mask is not None and not mask.any():
            logging.warning(f"No test rows in subgroup {label}")
            continue
        summary = subgroup_summary(result, mask, config.table_alpha, label)
        summaries.append({"group": label, "n": summary.n, "alpha": summary.alpha, "components": summary.table})
    write_json({"labels": [child for _, child in dag.arrows.arrows], "groups": summaries},
               os.path.join(out, "subgroup.json"))
    write_json({"groups": describe(table)}, os.path.join(out, "describe.json"))

    regression = regress_ps(test, result["ps"].to_numpy(), test.predictors)
    write_json({"n": regression.n, "df_resid": regression.df_resid,
                "residual_variance": regression.residual_variance, "zero_variance": regression.zero_variance,
                "coefficients": regression.coefficients}, os.path.join(out, "regression.json"))
    with open(os.path.join(out, "regression.txt"), "w") as f:
        f.write(format_regression(regression))

    write_json(_run_document(config, dag, table, test.ids), os.path.join(out, "run.json"))

    if config.svg:
        order = np.argsort(result["ps"].to_numpy(), kind="stable")
        chosen = sorted(set(order[:CHART_COUNT].tolist()) | set(order[-CHART_COUNT:].tolist()))
        labels = [f"{pa_}->{child}" for pa_, child in dag.arrows.arrows]
        for i in chosen:
            record = result.iloc[i].to_dict()
            psc_chart(chart_rows(record, labels, k), os.path.join(out, f"chart_{record['id']}.svg"),
                      f"individual {record['id']}")

    logging.info(f"Audit finished: {test.n} test rows, {k} privilege arrows, outputs in {out}")
    return EXIT_OK


def explain(run_dir, row_id):
    """The PSC record and chart rows of one individual of an audit run."""
    psc_path = os.path.join(run_dir, "psc.csv")
    run_path = os.path.join(run_dir, "run.json")
    for path in (psc_path, run_path):
        if not os.path.exists(path):
            logging.error(f"Audit output not found: {path}")
            raise InputError(f"audit output not found: {path}")

    run = read_json(run_path)
    frame = pd.read_csv(psc_path, dtype={"id": str})
    matches = frame[frame["id"] == str(row_id)]
    if matches.empty:
        available = ", ".join(frame["id"].tolist())
        logging.error(f"Unknown id '{row_id}'")
        raise InputError(f"unknown id '{row_id}'; available ids: {available}")

    record = matches.iloc[0].to_dict()
    labels = [f"{pa}->{child}" for pa, child in run["arrows"]]
    rows = chart_rows(record, labels, len(labels))
    return record, rows


def cmd_explain(args) -> int:
    record, rows = explain(args.run, args.id)
    out = args.out or args.run
    os.makedirs(out, exist_ok=True)
    document = {"id": str(record["id"]), "bars": [row._asdict() for row in rows], "record": record}
    write_json(document, os.path.join(out, f"explain_{record['id']}.json"))
    psc_chart(rows, os.path.join(out, f"explain_{record['id']}.svg"), f"individual {record['id']}")
    return EXIT_OK


def cmd_pfi(args) -> int:
    config = _config(args)
    table = _load_table(args)
    dag = load_dag(args.dag).validate(table)
    out = _prepare_out(config)

    indices = split(table, config.split, config.seed)
    train, test = table.take(indices.train), table.take(indices.test)
    worlds = build_worlds(train, dag, config.model_kind, config.budget, config.mean_at, config.target_warp)
    importances = pfi_all(worlds, test, repeats=config.pfi_repeats, seed=config.seed)
    write_frame(importances, os.path.join(out, "pfi.csv"))
    write_json({"repeats": config.pfi_repeats, "importances": importances}, os.path.join(out, "pfi.json"))
    return EXIT_OK


def _upper(value):
    return value.upper()


def _add_common(parser):
    parser.add_argument("--config", help="JSON run configuration; flags override its keys")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--bootstrap", type=int, help="bootstrap replicates B (0 skips intervals)")
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--model", choices=["logistic", "random_forest"])
    parser.add_argument("--evaluations", type=int, help="random-search evaluations")
    parser.add_argument("--folds", type=int, help="cross-validation folds")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--route", choices=["real", "warped"])
    parser.add_argument("--mean-at", dest="mean_at", choices=["real", "warped"])
    parser.add_argument("--target-warp", dest="target_warp", choices=["mean_shift", "coupling"])
    parser.add_argument("--reuse-tuning", dest="reuse_tuning", action=argparse.BooleanOptionalAction,
                        default=None)


def _add_data(parser):
    parser.add_argument("--data", required=True, help="CSV data file")
    parser.add_argument("--dag", required=True, help="JSON DAG file")
    parser.add_argument("--columns", help="JSON column spec file")
    parser.add_argument("--recipe", choices=sorted(RECIPES))
    parser.add_argument("--id-column", dest="id_column")
    parser.add_argument("--split", type=float, help="training fraction")


def build_parser():
    parser = argparse.ArgumentParser(prog="privscore", description="Privilege scores and their contributions")
    parser.add_argument("--verbose", action="store_true")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="simulation study with known true privilege scores")
    _add_common(simulate)
    simulate.add_argument("--scenario", type=_upper, choices=["SC", "SM", "NULL"])
    simulate.add_argument("--n", type=int)
    simulate.add_argument("--iters", dest="iterations", type=int)
    simulate.add_argument("--split", type=float)
    simulate.add_argument("--quantiles-over", dest="quantiles_over", choices=["iterations", "individuals"])
    simulate.set_defaults(handler=cmd_simulate)

    audit = commands.add_parser("audit", help="privilege scores and contributions of a data set")
    _add_common(audit)
    _add_data(audit)
    audit.add_argument("--table-alpha", dest="table_alpha", type=float)
    audit.add_argument("--svg", action="store_true", default=None)
    audit.set_defaults(handler=cmd_audit)

    explain_parser = commands.add_parser("explain", help="record and chart of one individual of an audit run")
    explain_parser.add_argument("--run", required=True, help="audit output directory")
    explain_parser.add_argument("--id", required=True)
    explain_parser.add_argument("--out")
    explain_parser.set_defaults(handler=cmd_explain)

    pfi = commands.add_parser("pfi", help="permutation feature importance of the privilege scores")
    _add_common(pfi)
    _add_data(pfi)
    pfi.add_argument("--repeats", dest="pfi_repeats", type=int)
    pfi.set_defaults(handler=cmd_pfi)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(format='%(levelname)s:%(message)s', level=logging.DEBUG if args.verbose else logging.INFO)

    try:
        return args.handler(args)
    except (InputError, FileNotFoundError) as e:
        logging.error(f"{e}")
        return EXIT_INPUT
    except Exception as e:
        logging.error(f"{type(e).__name__}: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
