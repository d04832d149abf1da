"""Communication accounting shared by both parallel engines.

An "entry" is one 8-byte (index, value)-style unit: a sparse label push,
one slot of a pulled label vector, or one point-to-point merge message.
The core-record OR-reduce moves bitsets, so it is tracked in bits on its
round record and in modeled_bytes, not in the entry totals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

ENTRY_BYTES = 8


@dataclass
class RoundStats:
    phase: str  # "core", "init", "labels", "merge"
    entries_pushed: int = 0
    entries_pulled: int = 0
    bits_pushed: int = 0
    bits_pulled: int = 0

    @property
    def bytes(self) -> int:
        return ENTRY_BYTES * (self.entries_pushed + self.entries_pulled) + (
            self.bits_pushed + self.bits_pulled + 7
        ) // 8


@dataclass
class CommMetrics:
    rounds: int = 0
    entries_pushed: int = 0
    entries_pulled: int = 0
    modeled_bytes: int = 0
    per_round: list[RoundStats] = field(default_factory=list)

    def record(self, stats: RoundStats) -> None:
        self.per_round.append(stats)
        self.entries_pushed += stats.entries_pushed
        self.entries_pulled += stats.entries_pulled
        self.modeled_bytes += stats.bytes
        if stats.phase in ("labels", "merge"):
            self.rounds += 1

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "entries_pushed": self.entries_pushed,
            "entries_pulled": self.entries_pulled,
            "modeled_bytes": self.modeled_bytes,
            "per_round": [
                {
                    "phase": r.phase,
                    "entries_pushed": r.entries_pushed,
                    "entries_pulled": r.entries_pulled,
                    "bits_pushed": r.bits_pushed,
                    "bits_pulled": r.bits_pulled,
                }
                for r in self.per_round
            ],
        }
