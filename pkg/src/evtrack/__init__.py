"""Belief-function fusion (Dempster, PCR5) and target type tracking simulation."""

__version__ = "0.1.0"

from .belief import BBA, discount, make_bba, parse_bba, vacuous
from .errors import (
    CapacityError,
    EvtrackError,
    FrameMismatchError,
    SequencingError,
    TotalConflictError,
    ValidationError,
)
from .fusion import ConflictReport, Rule, combine, conjunctive, dempster, fold, pcr5, total_conflict
from .hyperpower import HyperProposition, enumerate_hyper_power_set, parse_hyper
from .propositions import Frame, Proposition, make_frame
from .tracker import (
    ConfusionMatrix,
    Criterion,
    Declaration,
    TrackerState,
    classifier_c1,
    classifier_c2,
    decide,
    init_tracker,
    observation_bba,
    step,
)
