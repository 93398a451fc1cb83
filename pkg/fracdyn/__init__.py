# Copyright 2019 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Fractional calculus, Picard solvers and existence certificates."""
import logging

from .frac_core import caputo_derivative, caputo_l1, mittag_leffler, rl_derivative, rl_integral
from .paths import SampledPath, TimeGrid
from .state import FracOrder, StateVec
from .utils import CertificationError, ContractError, ConvergenceError
from .volterra import IVProblem, SolveReport, existence_delta, picard_solve, uniqueness_delta

logging.getLogger(__name__).addHandler(logging.NullHandler())
