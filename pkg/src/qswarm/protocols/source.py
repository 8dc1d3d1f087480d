"""
Entanglement sources.

A source emits two resources per step, |Phi1> and |Phi2>; robot i holds
qubit i of each, and its first bit comes from |Phi1>.
"""

from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ProtocolError
from ..qsim import MAX_QUBITS, Basis, Bell, EntangledResource, StateSpec
from ..utils.logger import get_logger

logger = get_logger(__name__)


class SourceMode(Enum):
    EPR_PAIR = "epr"
    GHZ = "ghz"
    PRODUCT_DIRECTIVE = "directive"
    AVOIDANCE_PAIR = "avoidance"


class AvoidanceConfig(Enum):
    """Pair configurations for collision avoidance: (|Phi1>, |Phi2>)."""

    PHI_PSI = "config1"
    PSI_PHI = "config2"


AVOIDANCE_PAIRS = {
    AvoidanceConfig.PHI_PSI: (Bell.PHI_PLUS, Bell.PSI_PLUS),
    AvoidanceConfig.PSI_PHI: (Bell.PSI_PLUS, Bell.PHI_PLUS),
}


class AvoidancePolicy(Enum):
    """How the avoidance source picks the pair configuration each step."""

    SAFE = "safe"
    RANDOM = "random"
    CONFIG1 = "config1"
    CONFIG2 = "config2"


ResourcePair = Tuple[EntangledResource, EntangledResource]


class EntanglementSource:
    """
    Central entity emitting the per-step resource pairs.
    """

    def __init__(
        self,
        mode: SourceMode,
        width: int = 2,
        directives: Optional[Sequence[Tuple[str, str]]] = None,
        avoidance_policy: AvoidancePolicy = AvoidancePolicy.SAFE,
        rng: Optional[np.random.Generator] = None,
    ):
        """
        Initialize a source.

        Args:
            mode: What the source emits
            width: Qubits per resource (one per robot)
            directives: Per-step bitstring pairs for PRODUCT_DIRECTIVE mode;
                the schedule repeats when exhausted
            avoidance_policy: Configuration policy for AVOIDANCE_PAIR mode
            rng: Generator for the source's own choices

        Raises:
            ProtocolError: If the width or directive schedule is invalid
        """
        if not 2 <= width <= MAX_QUBITS:
            raise ProtocolError(f"Resource width must be in [2, {MAX_QUBITS}], got {width}")
        if mode in (SourceMode.EPR_PAIR, SourceMode.AVOIDANCE_PAIR) and width != 2:
            raise ProtocolError(f"{mode.value} sources emit 2-qubit pairs, got width {width}")
        self.mode = mode
        self.width = width
        self.avoidance_policy = avoidance_policy
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.directives: List[Tuple[str, str]] = []
        if mode is SourceMode.PRODUCT_DIRECTIVE:
            if not directives:
                raise ProtocolError("A directive source needs a non-empty schedule")
            for step, pair in enumerate(directives):
                if len(pair) != 2:
                    raise ProtocolError(f"Directive {step} must hold two bitstrings, got {pair!r}")
                for bits in pair:
                    if len(bits) != width or any(ch not in "01" for ch in bits):
                        raise ProtocolError(
                            f"Directive {step} bitstring {bits!r} does not match width {width}"
                        )
                self.directives.append((pair[0], pair[1]))
        self.emitted = 0
        self.last_config: Optional[AvoidanceConfig] = None

    @classmethod
    def epr_pair(cls) -> "EntanglementSource":
        return cls(SourceMode.EPR_PAIR)

    @classmethod
    def ghz(cls, n: int) -> "EntanglementSource":
        return cls(SourceMode.GHZ, width=n)

    @classmethod
    def product_directive(cls, schedule: Sequence[Tuple[str, str]]) -> "EntanglementSource":
        width = len(schedule[0][0]) if schedule and schedule[0] else 0
        return cls(SourceMode.PRODUCT_DIRECTIVE, width=width, directives=schedule)

    @classmethod
    def avoidance_pair(
        cls,
        policy: AvoidancePolicy = AvoidancePolicy.SAFE,
        rng: Optional[np.random.Generator] = None,
    ) -> "EntanglementSource":
        return cls(SourceMode.AVOIDANCE_PAIR, avoidance_policy=policy, rng=rng)

    def emit(
        self, basis: Basis = Basis.Z, config: Optional[AvoidanceConfig] = None
    ) -> ResourcePair:
        """
        Emit the two resources for one step.

        Args:
            basis: Basis the source prepares GHZ resources in
            config: Avoidance configuration to emit; chosen by the policy
                when omitted

        Returns:
            The pair (|Phi1>, |Phi2>)
        """
        step = self.emitted
        if self.mode is SourceMode.EPR_PAIR:
            specs = (StateSpec.bell(Bell.PHI_PLUS), StateSpec.bell(Bell.PHI_PLUS))
        elif self.mode is SourceMode.GHZ:
            spec = StateSpec.ghz(self.width, basis)
            specs = (spec, spec)
        elif self.mode is SourceMode.PRODUCT_DIRECTIVE:
            first, second = self.directives[step % len(self.directives)]
            specs = (StateSpec.product(first), StateSpec.product(second))
        else:
            if config is None:
                config = self._policy_config()
            self.last_config = config
            first_bell, second_bell = AVOIDANCE_PAIRS[config]
            specs = (StateSpec.bell(first_bell), StateSpec.bell(second_bell))

        self.emitted += 1
        pair = (
            EntangledResource.prepare(2 * step, specs[0], label="phi1"),
            EntangledResource.prepare(2 * step + 1, specs[1], label="phi2"),
        )
        logger.debug(f"Source emitted step {step} ({self.mode.value})")
        return pair

    def _policy_config(self) -> AvoidanceConfig:
        if self.avoidance_policy is AvoidancePolicy.CONFIG1:
            return AvoidanceConfig.PHI_PSI
        if self.avoidance_policy is AvoidancePolicy.CONFIG2:
            return AvoidanceConfig.PSI_PHI
        return self.choose_config(list(AvoidanceConfig))

    def choose_config(self, candidates: Sequence[AvoidanceConfig]) -> AvoidanceConfig:
        """Uniform choice among candidate configurations, from the source's stream."""
        if not candidates:
            raise ProtocolError("No avoidance configuration to choose from")
        return candidates[int(self.rng.integers(len(candidates)))]
