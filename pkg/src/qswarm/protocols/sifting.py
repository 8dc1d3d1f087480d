"""
Measurement records and basis sifting.

After measuring, parties publish their bases on an authenticated channel. A
round is valid for a group of parties when they all used the source's basis.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Union

from ..errors import ProtocolError
from ..qsim import Basis


@dataclass(frozen=True)
class MeasurementEntry:
    round: int
    basis: Basis
    outcome: Optional[int]
    norm_drift: float = 0.0


@dataclass
class MeasurementRecord:
    """One party's (round, basis, outcome) log."""

    party: str
    entries: List[MeasurementEntry] = field(default_factory=list)

    def log(self, round_index: int, basis: Basis, outcome: Optional[int]) -> None:
        self.entries.append(MeasurementEntry(round_index, basis, outcome))

    def bases(self) -> List[Basis]:
        return [entry.basis for entry in self.entries]

    def outcome(self, round_index: int) -> Optional[int]:
        return self.entries[round_index].outcome

    def __len__(self) -> int:
        return len(self.entries)


BasisLog = Union[Sequence[Basis], MeasurementRecord]


def _as_bases(log: BasisLog) -> List[Basis]:
    return log.bases() if isinstance(log, MeasurementRecord) else list(log)


def _check_logs(records: Mapping[str, BasisLog]) -> Dict[str, List[Basis]]:
    logs = {party: _as_bases(log) for party, log in records.items()}
    lengths = {len(log) for log in logs.values()}
    if len(lengths) > 1:
        detail = ", ".join(f"{party}={len(log)}" for party, log in sorted(logs.items()))
        raise ProtocolError(f"Basis logs have different lengths: {detail}")
    return logs


def sift(records: Mapping[str, BasisLog]) -> List[int]:
    """
    Rounds in which every party used the same basis.

    Args:
        records: Party -> basis log (or full measurement record)

    Returns:
        Valid round indices, ascending

    Raises:
        ProtocolError: If the logs have different lengths
    """
    logs = _check_logs(records)
    if not logs:
        return []
    rounds = len(next(iter(logs.values())))
    return [i for i in range(rounds) if len({log[i] for log in logs.values()}) == 1]


def sift_subsets(
    records: Mapping[str, BasisLog], source: str = "c"
) -> Dict[FrozenSet[str], List[int]]:
    """
    Group rounds by the maximal set of robots sharing the source's basis.

    A round stored under the set of all robots is valid for everyone; a round
    stored under a smaller set is usable by that subset only. Rounds where no
    robot matched the source are dropped.

    Args:
        records: Party -> basis log, including the source
        source: Name of the source party

    Returns:
        Robot subset -> round indices, ascending

    Raises:
        ProtocolError: For ragged logs or a missing source log
    """
    logs = _check_logs(records)
    if source not in logs:
        raise ProtocolError(f"Source party '{source}' has no basis log")
    robots = sorted(party for party in logs if party != source)
    subsets: Dict[FrozenSet[str], List[int]] = {}
    for i, source_basis in enumerate(logs[source]):
        matching = frozenset(r for r in robots if logs[r][i] == source_basis)
        if matching:
            subsets.setdefault(matching, []).append(i)
    return subsets


def usable_rounds(
    subsets: Mapping[FrozenSet[str], Iterable[int]], parties: Iterable[str]
) -> List[int]:
    """
    Rounds a group of robots can use together.

    Args:
        subsets: Output of sift_subsets
        parties: Robots that want to share results

    Returns:
        Round indices whose matching set contains every requested robot
    """
    wanted = frozenset(parties)
    rounds: List[int] = []
    for subset, indices in subsets.items():
        if wanted <= subset:
            rounds.extend(indices)
    return sorted(rounds)
