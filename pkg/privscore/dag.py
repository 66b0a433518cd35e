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

import json
import logging
import os
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import networkx as nx

from .core_model import ROLE, ADVANTAGED_LEVEL
from .errors import DagError, InputError, PartialWarpingError


@dataclass(frozen=True)
class PrivilegeArrowSet:
    arrows: Tuple[Tuple[str, str], ...]

    @property
    def k(self):
        return len(self.arrows)

    @property
    def children(self):
        return [child for _, child in self.arrows]

    def labels(self):
        return [f"{pa}->{child}" for pa, child in self.arrows]


class CausalDag:
    def __init__(self, nodes: Sequence[str], edges: Sequence[Tuple[str, str]], pa: str, target: str,
                 advantaged_level: float = ADVANTAGED_LEVEL):
        self.graph = nx.DiGraph()
        self.graph.add_nodes_from(nodes)
        self._order = {node: i for i, node in enumerate(nodes)}

        for edge in edges:
            if len(edge) != 2:
                raise DagError(f"edge {edge} must have exactly two endpoints")
            parent, child = edge
            for node in (parent, child):
                if node not in self._order:
                    logging.error(f"Edge {parent}->{child} refers to unknown node '{node}'")
                    raise DagError(f"edge {parent}->{child} refers to unknown node '{node}'")
            self.graph.add_edge(parent, child)

        for role, node in (("pa", pa), ("target", target)):
            if node not in self._order:
                logging.error(f"DAG {role} '{node}' is not a node")
                raise DagError(f"{role} '{node}' is not a node of the DAG")

        self.pa = pa
        self.target = target
        self.advantaged_level = float(advantaged_level)

    def __repr__(self):
        return f"<CausalDag pa={self.pa} target={self.target} edges={self.edges}>"

    @property
    def nodes(self) -> List[str]:
        return sorted(self.graph.nodes, key=self._order.get)

    @property
    def edges(self) -> List[Tuple[str, str]]:
        return sorted(self.graph.edges, key=lambda edge: (self._order[edge[0]], self._order[edge[1]]))

    def parents(self, node) -> List[str]:
        return sorted(self.graph.predecessors(node), key=self._order.get)

    def pa_descendants(self) -> List[str]:
        """Descendants of the PA other than the target, in column order."""
        return sorted(nx.descendants(self.graph, self.pa) - {self.target}, key=self._order.get)

    @cached_property
    def arrows(self) -> PrivilegeArrowSet:
        children = [child for child in self.graph.successors(self.pa) if child != self.target]
        return PrivilegeArrowSet(tuple((self.pa, child) for child in sorted(children, key=self._order.get)))

    def privilege_arrows(self) -> PrivilegeArrowSet:
        return self.arrows

    @cached_property
    def _arrow_index(self):
        index = {}
        for j, (_, child) in enumerate(self.arrows.arrows):
            for node in nx.descendants(self.graph, child) | {child}:
                index.setdefault(node, j)
        return index

    def arrow_of(self, feature) -> Optional[int]:
        """Index of the privilege arrow a PA-descendant feature is warped with."""
        return self._arrow_index.get(feature)

    @cached_property
    def _warp_order(self):
        descendants = set(self.pa_descendants())
        subgraph = self.graph.subgraph(descendants)
        return list(nx.lexicographical_topological_sort(subgraph, key=self._order.get))

    def warp_order(self) -> List[str]:
        return list(self._warp_order)

    def validate(self, table) -> "CausalDag":
        """Check the DAG against a DatasetTable and return a copy ordered by its columns."""
        try:
            cycle = nx.find_cycle(self.graph)
        except nx.NetworkXNoCycle:
            cycle = None
        if cycle:
            path = " -> ".join([edge[0] for edge in cycle] + [cycle[-1][1]])
            logging.error(f"DAG has a cycle: {path}")
            raise DagError(f"DAG has a cycle: {path}")

        nodes = set(self.graph.nodes)
        columns = table.names
        for node in self.nodes:
            if node not in columns:
                logging.error(f"DAG node '{node}' has no column")
                raise DagError(f"DAG node '{node}' has no column in the table")
        for column in columns:
            if column not in nodes:
                logging.error(f"Column '{column}' is not a DAG node")
                raise DagError(f"column '{column}' is not a node of the DAG")

        if self.pa != table.pa:
            raise DagError(f"DAG pa '{self.pa}' does not match table pa column '{table.pa}'")
        if self.target != table.target:
            raise DagError(f"DAG target '{self.target}' does not match table target column '{table.target}'")
        if self.advantaged_level != table.advantaged_level:
            raise DagError(f"DAG advantaged level {self.advantaged_level:g} does not match the table's "
                           f"{table.advantaged_level:g}")

        children = list(self.graph.successors(self.target))
        if children:
            raise DagError(f"target '{self.target}' must not have children, found {', '.join(children)}")

        ordered = CausalDag(columns, self.edges, self.pa, self.target, self.advantaged_level)

        for node in ordered.pa_descendants():
            role = table.spec(node).role
            if role != ROLE["feature"]:
                logging.error(f"Column '{node}' with role '{role}' descends from the PA '{self.pa}'")
                raise DagError(f"column '{node}' with role '{role}' descends from the PA '{self.pa}'; "
                               f"only features may")

        for node in ordered.pa_descendants():
            reached_by = [f"{pa}->{child}" for pa, child in ordered.arrows.arrows
                          if node == child or node in nx.descendants(ordered.graph, child)]
            if len(reached_by) > 1:
                logging.error(f"Feature '{node}' descends from privilege arrows {reached_by}")
                raise PartialWarpingError(f"feature '{node}' descends from more than one privilege arrow "
                                          f"({', '.join(reached_by)}); partial warping is not supported")

        logging.info(f"Validated DAG with {ordered.arrows.k} privilege arrows {ordered.arrows.labels()}")
        return ordered


def validate(dag: CausalDag, table) -> CausalDag:
    return dag.validate(table)


def privilege_arrows(dag: CausalDag) -> PrivilegeArrowSet:
    return dag.arrows


def warp_order(dag: CausalDag) -> List[str]:
    return dag.warp_order()


def load_dag(path) -> CausalDag:
    if not os.path.exists(path):
        logging.error(f"DAG file not found: {path}")
        raise InputError(f"DAG file not found: {path}")

    logging.info(f"Loading DAG {path}")
    with open(path, "r") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as e:
            raise InputError(f"{path}: invalid JSON: {e}")

    try:
        return CausalDag(document["nodes"], [tuple(edge) for edge in document["edges"]],
                         document["pa"], document["target"],
                         document.get("advantaged_level", ADVANTAGED_LEVEL))
    except KeyError as e:
        logging.error(f"{path}: missing key {e}")
        raise InputError(f"{path}: missing key {e}")
