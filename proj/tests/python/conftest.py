# Copyright 2026 The qcostnas authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Locates the built extension and python package for the smoke tests.

QCOSTNAS_PYMODULE_DIR (set by ctest) points at the directory holding the
built _core extension; without it, the default CMake build tree is probed.
"""

import os
import sys
from pathlib import Path

_here = Path(__file__).resolve()
_repo = _here.parents[2]

_candidates = []
if "QCOSTNAS_PYMODULE_DIR" in os.environ:
    _candidates.append(Path(os.environ["QCOSTNAS_PYMODULE_DIR"]))
_candidates.append(_repo / "build" / "bindings")

for _dir in _candidates:
    if _dir.is_dir() and any(_dir.glob("_core*")):
        sys.path.insert(0, str(_dir))
        break

sys.path.insert(0, str(_repo / "python"))
