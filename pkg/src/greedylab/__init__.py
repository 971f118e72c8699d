"""Greedy approximation laboratory: dictionary pursuits, thresholding greedy
sums, and estimators for greedy-type basis constants on finite models."""

from .errors import CapacityError, GreedyLabError, InvalidInput
from .kernels import BACKEND
from .spaces import (SpaceSpec, c0, dsum, eval_norm, indicator, kt, lp,
                     parse_space, project, verify_space_axioms)

__version__ = "0.1.0"
