# SPDX-License-Identifier: Apache-2.0
#
# irsmimo: uplink simulator for IRS-aided multi-cell massive MIMO
# Copyright (C) 2026 The irsmimo authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Python bindings for the irsmimo simulator core."""

from ._core import (
    ConfigError,
    NumericalError,
    __version__,
    bessel_j0,
    config_digest,
    describe_config,
    distortion_factor,
    parse_csv,
    preset_names,
    qos_crossing,
    run_config,
    run_preset,
    validate,
)

CSV_TERMS = ("DS", "BU", "CA", "MUI", "PC", "DAC", "TRF", "RRF", "ADC", "NS")

__all__ = [
    "CSV_TERMS",
    "ConfigError",
    "NumericalError",
    "__version__",
    "bessel_j0",
    "config_digest",
    "describe_config",
    "distortion_factor",
    "parse_csv",
    "preset_names",
    "qos_crossing",
    "run_config",
    "run_preset",
    "validate",
]
