"""
Transcript - ordered message log between verifier and prover.

Rounds are logical indices: every verifier-initiated exchange opens a new
round and the prover's reply shares it. Counters are updated with each
message and snapshotted into the message so a JSONL replay shows them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Sequence

TO_PROVER = "verifier->prover"
TO_VERIFIER = "prover->verifier"

COUNTER_KEYS = ("quantum_states", "dits_to_prover", "dits_to_verifier", "messages", "rounds")


@dataclass
class Message:
    round: int
    direction: str
    kind: str
    payload: Dict[str, Any]
    counters: Dict[str, int]

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "direction": self.direction,
            "kind": self.kind,
            "payload": self.payload,
            "counters": self.counters,
        }


@dataclass
class Transcript:
    phase: str = "localising"
    messages: List[Message] = field(default_factory=list)
    counters: Dict[str, int] = field(default_factory=lambda: {k: 0 for k in COUNTER_KEYS})

    def _record(self, direction: str, kind: str, payload: Dict[str, Any], new_round: bool) -> Message:
        if new_round:
            self.counters["rounds"] += 1
        self.counters["messages"] += 1
        msg = Message(self.counters["rounds"], direction, kind, payload, dict(self.counters))
        self.messages.append(msg)
        return msg

    def send_states(self, vertices: Sequence[int]) -> None:
        """One quantum message per vertex, all in the preparation round."""
        first = True
        for v in vertices:
            self.counters["quantum_states"] += 1
            self._record(TO_PROVER, "state", {"vertex": v, "phase": self.phase}, new_round=first)
            first = False

    def send_delta(self, vertex: int, delta: Sequence[int]) -> None:
        self.counters["dits_to_prover"] += len(delta)
        self._record(TO_PROVER, "delta", {"vertex": vertex, "delta": list(delta)}, new_round=True)

    def receive_outcome(self, vertex: int, outcome: int) -> None:
        last = self.messages[-1] if self.messages else None
        if last is None or last.kind != "delta" or last.payload["vertex"] != vertex:
            raise RuntimeError(f"Outcome for vertex {vertex} arrived without its measurement vector")
        self.counters["dits_to_verifier"] += 1
        self._record(TO_VERIFIER, "outcome", {"vertex": vertex, "b": int(outcome)}, new_round=False)

    def receive_measurements(self, kind: str, wires: Sequence[int], dits: Sequence[int]) -> None:
        self.counters["dits_to_verifier"] += len(dits)
        self._record(
            TO_VERIFIER, kind, {"wires": list(wires), "b": [int(x) for x in dits]}, new_round=True
        )

    def send_correction(self, dits: Sequence[int]) -> None:
        self.counters["dits_to_prover"] += len(dits)
        self._record(TO_PROVER, "correction", {"r": [int(x) for x in dits]}, new_round=False)

    def outcomes(self) -> Dict[int, int]:
        return {m.payload["vertex"]: m.payload["b"] for m in self.messages if m.kind == "outcome"}

    def deltas(self) -> Dict[int, List[int]]:
        return {m.payload["vertex"]: m.payload["delta"] for m in self.messages if m.kind == "delta"}

    def extend(self, other: "Transcript") -> None:
        """Append another transcript's messages, renumbering rounds and counters after ours."""
        base = dict(self.counters)
        for msg in other.messages:
            snapshot = {key: base[key] + msg.counters[key] for key in COUNTER_KEYS}
            self.messages.append(
                Message(msg.round + base["rounds"], msg.direction, msg.kind, msg.payload, snapshot)
            )
        for key in COUNTER_KEYS:
            self.counters[key] += other.counters[key]

    def to_jsonl(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as fh:
            for msg in self.messages:
                fh.write(json.dumps(msg.to_dict(), sort_keys=True) + "\n")
        return path
