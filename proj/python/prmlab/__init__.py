"""Weighted candidate selection and test-time policy adaptation.

The compiled core exposes the full pipeline: step-score aggregation, sigmoid
weighting, the selection strategies (PASS1, MV, BOM, SCRM), the policy-gradient
test-time updaters, the synthetic world, and the experiment harness.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
