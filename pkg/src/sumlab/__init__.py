"""sumlab: exact computations with delta-discretized subsets of [0, 1].

Covering numbers and regularity (Frostman / Katz-Tao) constants, structured
subset extraction, branching-function decompositions, sum-product expansion
measurement against an optimal adversarial pair set, explicit sharpness
constructions, and executable proof traces of the scale-selection arguments.
"""

from .errors import HypothesisError, InputError, SumlabError
from .exact import ExactPos
from .gridset import (
    DyadicInterval,
    GridSet,
    PairSet,
    ScaleParams,
    branching_between,
    covering_number,
    diameter,
    make_grid_set,
    renormalize,
    restrict,
)
from .regularity import (
    RegularityReport,
    frostman_constant,
    katz_tao_constant,
    max_window_count,
    regularity_report,
)

__version__ = "0.1.0"

__all__ = [
    "DyadicInterval",
    "ExactPos",
    "GridSet",
    "HypothesisError",
    "InputError",
    "PairSet",
    "RegularityReport",
    "ScaleParams",
    "SumlabError",
    "branching_between",
    "covering_number",
    "diameter",
    "frostman_constant",
    "katz_tao_constant",
    "make_grid_set",
    "max_window_count",
    "regularity_report",
    "renormalize",
    "restrict",
]
