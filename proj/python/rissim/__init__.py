# SPDX-License-Identifier: Apache-2.0
"""Link-level simulator for CSI-RS based complex channel reporting and
binary-phase RIS optimization (Hadamard and OMP sweeps)."""

from rissim._core import *  # noqa: F401,F403
from rissim._core import __version__  # noqa: F401
