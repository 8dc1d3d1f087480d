"""Eavesdropper detection and Byzantine robot identification."""

from ..protocols.sifting import sift
from .byzantine import (
    STATED_GUESS_BASIS_MATCH,
    TICKS_PER_STEP,
    ByzantineSpec,
    ByzantineStepResult,
    ByzantineStrategy,
    MoveRecord,
    byzantine_match_probability,
    byzantine_walk_step,
    identify_byzantine,
)
from .eavesdrop import (
    DEFAULT_SAMPLE_SIZE,
    DEFAULT_THRESHOLD,
    BasisMode,
    DetectionReport,
    EveStrategy,
    Verdict,
    detection_probability,
    draw_schedule,
    estimate_qber,
    honest_sift,
    parse_schedule,
    run_detection_round,
    run_detection_rounds,
)

__all__ = [
    "DEFAULT_SAMPLE_SIZE",
    "DEFAULT_THRESHOLD",
    "STATED_GUESS_BASIS_MATCH",
    "TICKS_PER_STEP",
    "BasisMode",
    "ByzantineSpec",
    "ByzantineStepResult",
    "ByzantineStrategy",
    "DetectionReport",
    "EveStrategy",
    "MoveRecord",
    "Verdict",
    "byzantine_match_probability",
    "byzantine_walk_step",
    "detection_probability",
    "draw_schedule",
    "estimate_qber",
    "honest_sift",
    "identify_byzantine",
    "parse_schedule",
    "run_detection_round",
    "run_detection_rounds",
    "sift",
]
