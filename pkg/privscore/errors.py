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


class PrivscoreError(Exception):
    """Base class of all errors raised by privscore."""


class InputError(PrivscoreError, ValueError):
    """Bad input: files, schemas, cell values, DAGs or configuration."""


class DagError(InputError):
    pass


class PartialWarpingError(DagError):
    """A feature descends from more than one privilege arrow."""


class TooManyPlayersError(InputError):
    pass


class ComputationError(PrivscoreError, RuntimeError):
    """A model fit or numerical procedure failed."""


class SingularDesignError(ComputationError):
    def __init__(self, response, columns):
        self.response = response
        self.columns = tuple(columns)
        super().__init__(f"singular design for '{response}': linearly dependent columns {', '.join(self.columns)}")
