"""Coordination protocols over shared resources and the board."""

from .sifting import (
    MeasurementEntry,
    MeasurementRecord,
    sift,
    sift_subsets,
    usable_rounds,
)
from .source import (
    AVOIDANCE_PAIRS,
    AvoidanceConfig,
    AvoidancePolicy,
    EntanglementSource,
    SourceMode,
)
from .walks import (
    StepOutcome,
    admissible_configs,
    avoidance_step,
    controlled_step,
    coordinated_step,
    enumerate_avoidance_outcomes,
    ghz_coordinated_step,
    ghz_sifted_step,
    independent_step,
    measure_pair,
)

__all__ = [
    "AVOIDANCE_PAIRS",
    "AvoidanceConfig",
    "AvoidancePolicy",
    "EntanglementSource",
    "MeasurementEntry",
    "MeasurementRecord",
    "SourceMode",
    "StepOutcome",
    "admissible_configs",
    "avoidance_step",
    "controlled_step",
    "coordinated_step",
    "enumerate_avoidance_outcomes",
    "ghz_coordinated_step",
    "ghz_sifted_step",
    "independent_step",
    "measure_pair",
    "sift",
    "sift_subsets",
    "usable_rounds",
]
