"""
Hybrid Orchestrator - localised preparation of every logical wire followed by the ABE phase.

Each data wire and each Toffoli resource is prepared by one localising
instance whose pattern outputs the signed-polynomial encoding of the wire,
padded by the verifier's one-time pad and repeated once per copy of the
amplification code (a repetition code of length d1 by default). The settled
copy-0 lines become the ABE register and the instance keys its Pauli key.

Provides:
- plan / HybridPlan / HybridStrategy (random frames, logical-shift attacks)
- run_hybrid on the statevector or Pauli-frame backend
- count_communication, monolithic_count, scaling_circuit, scaling_fit,
  scaling_series, d1_series
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from rich.console import Console

from abe_phase import (
    AbeSession,
    LogicalCircuit,
    LogicalGate,
    ToffoliRound,
    ideal_distribution,
    run_logical_circuit,
)
from amplification import AmplificationCode, code_from_name
from config import (
    DEFAULT_D1,
    DEFAULT_D2,
    DEFAULT_QUDIT_DIMENSION,
    STATE_TOLERANCE,
    TRAP_SUBSET_SIZE,
    VERBOSE_SESSIONS,
)
from fk_localising import Indicator
from graph_constructions import TrapAssignment, dotted_complete_size
from pauli_frame import EpsilonBudget, PauliFrame, epsilon_budget
from qudit_algebra import PauliOp, check_prime
from signed_poly_code import Accept, CodeParams, PauliKey, SignKey
from statevector import StateVector, check_ceiling
from transcript import COUNTER_KEYS, Transcript
from wire_instances import InstanceOutcome, WireInstance, compile_input, compile_resource, run_instance

console = Console()


@dataclass
class HybridPlan:
    circuit: LogicalCircuit
    params: CodeParams
    sign_key: SignKey
    inputs: Tuple[int, ...]
    amplification: AmplificationCode
    d1: int
    d2: int
    instances: List[WireInstance]

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def physical_sites(self) -> int:
        return self.circuit.total_wires * self.params.m

    def instance_of(self, wire: int) -> Tuple[int, int]:
        """(instance index, block) holding logical wire `wire`."""
        for index, instance in enumerate(self.instances):
            if wire in instance.wires:
                return index, instance.wires.index(wire)
        raise ValueError(f"No instance prepares wire {wire}")

    def budget(self) -> Optional[EpsilonBudget]:
        if self.d2 < 1:
            return None
        return epsilon_budget(self.d1, self.d2, 1.0 / TRAP_SUBSET_SIZE)


def plan(
    circuit: LogicalCircuit,
    d1: int = DEFAULT_D1,
    d2: int = DEFAULT_D2,
    d: int = DEFAULT_QUDIT_DIMENSION,
    rng: Optional[np.random.Generator] = None,
    inputs: Optional[Sequence[int]] = None,
    amplification: str = "repetition",
    sign_key: Optional[SignKey] = None,
) -> HybridPlan:
    """Compile one localising instance per data wire and per Toffoli resource.

    The repetition code has length d1; d1 <= 1 means no amplification.
    """
    check_prime(d)
    if d == 2:
        raise ValueError("The hybrid protocol needs an odd prime dimension")
    if d1 < 0:
        raise ValueError(f"d1 must be non-negative, got {d1}")
    params = CodeParams(d, d2)
    rng = rng if rng is not None else np.random.default_rng()
    sign_key = sign_key or SignKey.random(params.m, rng)
    inputs = tuple(int(a) % d for a in (inputs if inputs is not None else [0] * circuit.n_wires))
    if len(inputs) != circuit.n_wires:
        raise ValueError(f"Circuit has {circuit.n_wires} wires, got {len(inputs)} inputs")
    code = code_from_name(amplification, d1)
    instances = [compile_input(params, sign_key, a, w, code) for w, a in enumerate(inputs)]
    instances.extend(
        compile_resource(params, sign_key, circuit.resource_wires(j), code) for j in range(circuit.toffoli_count)
    )
    return HybridPlan(circuit, params, sign_key, inputs, code, d1, d2, instances)


@dataclass(frozen=True)
class HybridStrategy:
    """Pauli frames per localising instance, plus Paulis on ABE sites before final measurement."""

    localising: Mapping[int, PauliFrame] = field(default_factory=dict)
    final: Mapping[int, PauliOp] = field(default_factory=dict)

    @classmethod
    def honest(cls) -> "HybridStrategy":
        return cls()

    @classmethod
    def random(
        cls,
        hybrid_plan: HybridPlan,
        footprint: int,
        rng: np.random.Generator,
        targets: int = 1,
        final_attacks: int = 0,
    ) -> "HybridStrategy":
        """`targets` instances attacked with the given footprint, and `final_attacks` random physical Paulis."""
        d = hybrid_plan.d
        n = len(hybrid_plan.instances)
        chosen = rng.choice(n, size=min(targets, n), replace=False)
        localising = {
            int(i): PauliFrame.random(hybrid_plan.instances[int(i)].skeleton, d, footprint, rng)
            for i in sorted(chosen)
        }
        sites = rng.choice(hybrid_plan.physical_sites, size=min(final_attacks, hybrid_plan.physical_sites), replace=False)
        final = {}
        for s in sorted(int(x) for x in sites):
            p = PauliOp.random(d, 1, rng, with_phase=False)
            if not p.is_identity():
                final[s] = p
        return cls(localising, final)

    @classmethod
    def logical_shift(
        cls, hybrid_plan: HybridPlan, wire: int, rng: np.random.Generator, power: int = 1
    ) -> "HybridStrategy":
        """Guess the sign key and shift every copy of every site of `wire` by X^{power·k'_i}.

        The syndrome copies agree and no trap is touched, so the attack goes
        through exactly when the guess k' equals ±k.
        """
        index, block = hybrid_plan.instance_of(wire)
        instance = hybrid_plan.instances[index]
        g = instance.skeleton
        guess = SignKey.random(hybrid_plan.params.m, rng)
        exps = {
            g.gadgets[instance.line(block, i, c)].bottom: (power * s, 0)
            for i, s in enumerate(guess.signs)
            for c in range(instance.copies)
        }
        return cls({index: PauliFrame.from_exponents(hybrid_plan.d, exps)})

    def validate(self, hybrid_plan: HybridPlan) -> None:
        for index, frame in self.localising.items():
            if not 0 <= index < len(hybrid_plan.instances):
                raise ValueError(f"No localising instance {index} in this plan")
            if frame.d != hybrid_plan.d:
                raise ValueError(f"Frame for instance {index} is at d={frame.d}, plan is at d={hybrid_plan.d}")
        for site, p in self.final.items():
            if not 0 <= site < hybrid_plan.physical_sites:
                raise ValueError(f"Final attack on site {site} outside the register")
            if p.n_sites != 1 or p.d != hybrid_plan.d:
                raise ValueError(f"Final attack on site {site} must be a single-site Pauli at d={hybrid_plan.d}")


@dataclass
class CommReport:
    quantum_states: int = 0
    dits_to_prover: int = 0
    dits_to_verifier: int = 0
    messages: int = 0
    rounds: int = 0
    per_phase: Dict[str, Dict[str, int]] = field(default_factory=dict)

    @classmethod
    def from_phases(cls, phases: Mapping[str, Mapping[str, int]]) -> "CommReport":
        report = cls(per_phase={name: dict(c) for name, c in phases.items()})
        for counters in phases.values():
            for key in COUNTER_KEYS:
                setattr(report, key, getattr(report, key) + counters.get(key, 0))
        return report

    def to_dict(self) -> dict:
        return {key: getattr(self, key) for key in COUNTER_KEYS} | {"per_phase": self.per_phase}


@dataclass
class HybridResult:
    outcome: Dict[int, Optional[int]]
    indicator1: Indicator
    indicator2: Indicator
    comm: CommReport
    transcript: Transcript
    ideal: Optional[Tuple[int, ...]]
    wrong: bool
    instances: List[InstanceOutcome] = field(default_factory=list)
    rounds: List[ToffoliRound] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.indicator1 is Indicator.ACC and self.indicator2 is Indicator.ACC

    @property
    def accepted_and_wrong(self) -> bool:
        return self.accepted and self.wrong

    def to_dict(self) -> dict:
        return {
            "outcome": {str(w): v for w, v in self.outcome.items()},
            "indicator1": self.indicator1.value,
            "indicator2": self.indicator2.value,
            "ideal": list(self.ideal) if self.ideal is not None else None,
            "wrong": self.wrong,
            "comm": self.comm.to_dict(),
        }


def _concat(ops: Sequence[PauliOp], d: int) -> PauliOp:
    return PauliOp(
        d,
        tuple(x for op in ops for x in op.x_exps),
        tuple(z for op in ops for z in op.z_exps),
    )


def ideal_outcome(circuit: LogicalCircuit, inputs: Sequence[int], d: int) -> Optional[Tuple[int, ...]]:
    """The outcome string when the ideal circuit is deterministic, else None."""
    probs = ideal_distribution(circuit, inputs, d)
    index = int(np.argmax(probs))
    if probs[index] < 1 - STATE_TOLERANCE:
        return None
    return tuple(int(v) for v in np.unravel_index(index, [d] * circuit.n_wires))


def _padded_register(outcomes: Sequence[InstanceOutcome], d: int) -> StateVector:
    check_ceiling(d, sum(o.register.n_sites for o in outcomes))
    state = StateVector(d, 0, np.array([1.0 + 0j]))
    for o in outcomes:
        state = state.tensor(o.register)
    return state


def run_hybrid(
    hybrid_plan: HybridPlan,
    strategy: Optional[HybridStrategy] = None,
    rng: Optional[np.random.Generator] = None,
    backend: str = "statevector",
    assignments: Optional[Mapping[int, TrapAssignment]] = None,
) -> HybridResult:
    """Localise every instance, settle it, then run the circuit on the settled register.

    `assignments` pins the trap placement of chosen instances instead of drawing it.
    """
    strategy = strategy or HybridStrategy.honest()
    strategy.validate(hybrid_plan)
    rng = rng if rng is not None else np.random.default_rng()
    if backend not in ("statevector", "frame"):
        raise ValueError(f"Unknown backend {backend!r}")
    circuit, d = hybrid_plan.circuit, hybrid_plan.d
    if backend == "frame" and not circuit.is_clifford():
        raise ValueError("The frame backend only runs Clifford-only logical circuits")

    assignments = assignments or {}
    outcomes = [
        run_instance(instance, strategy.localising.get(i), rng, backend, assignments.get(i))
        for i, instance in enumerate(hybrid_plan.instances)
    ]
    transcript = Transcript(phase="hybrid")
    phases = {name: {key: 0 for key in COUNTER_KEYS} for name in ("localising", "settling")}
    for o in outcomes:
        transcript.extend(o.run.transcript)
        transcript.extend(o.transcript)
        for key in COUNTER_KEYS:
            phases["localising"][key] += o.run.transcript.counters[key]
            phases["settling"][key] += o.transcript.counters[key]
    indicator1 = Indicator.ACC if all(o.accepted and o.syndrome_silent for o in outcomes) else Indicator.REJ

    key = PauliKey(_concat([o.key for o in outcomes], d))
    ideal = ideal_outcome(circuit, hybrid_plan.inputs, d)
    abe_transcript = Transcript(phase="abe")
    if backend == "statevector":
        session = AbeSession(
            hybrid_plan.params, hybrid_plan.sign_key, _padded_register(outcomes, d), key, abe_transcript
        )
    else:
        if any(o.residual is None for o in outcomes):
            raise RuntimeError("A localised wire left the Pauli frame; rerun on the statevector backend")
        session = AbeSession.frame(
            hybrid_plan.params,
            hybrid_plan.sign_key,
            key,
            _concat([o.residual for o in outcomes], d),
            ideal_values=list(ideal) if ideal is not None else None,
            transcript=abe_transcript,
        )
    for j in range(circuit.toffoli_count):
        # Σ_C ω^{ABC}|E(C)> -> |E(AB)>
        session.apply_logical(LogicalGate("F", (circuit.resource_wires(j)[2],), power=3))
    abe = run_logical_circuit(session, circuit, rng, strategy.final)
    transcript.extend(abe.transcript)
    phases["abe"] = dict(abe.transcript.counters)

    values = abe.values()
    if backend == "frame":
        wrong = any(
            isinstance(shift, Accept) and shift.value != 0
            for shift in (session.logical_shift(w) for w in range(circuit.n_wires))
        )
    else:
        wrong = _statevector_wrong(values, circuit, hybrid_plan.inputs, d, ideal)
    if VERBOSE_SESSIONS:
        console.log(
            f"[dim]hybrid run: {len(outcomes)} instances, {indicator1.value}/{abe.indicator.value}[/dim]"
        )
    return HybridResult(
        values, indicator1, abe.indicator, CommReport.from_phases(phases), transcript, ideal, wrong,
        outcomes, list(abe.rounds),
    )


def _statevector_wrong(
    values: Mapping[int, Optional[int]],
    circuit: LogicalCircuit,
    inputs: Sequence[int],
    d: int,
    ideal: Optional[Tuple[int, ...]],
) -> bool:
    """An accepted outcome is wrong when the ideal circuit gives it probability zero."""
    if any(v is None for v in values.values()):
        return False
    observed = tuple(values[w] for w in range(circuit.n_wires))
    if ideal is not None:
        return observed != ideal
    probs = ideal_distribution(circuit, inputs, d)
    return float(probs[np.ravel_multi_index(observed, [d] * circuit.n_wires)]) < STATE_TOLERANCE


# ---------------------------------------------------------------------------
# Communication accounting and scaling
# ---------------------------------------------------------------------------


def _instance_counts(instance: WireInstance) -> Tuple[Dict[str, int], Dict[str, int]]:
    g = instance.skeleton
    vertices = g.vertex_count
    measured = vertices - len(g.output_vertices)
    localising = {
        "quantum_states": vertices,
        "dits_to_prover": 3 * measured,
        "dits_to_verifier": measured,
        "messages": vertices + 2 * measured,
        "rounds": 1 + measured,
    }
    reports = [n for n in (len(instance.phase_lines), len(instance.syndrome_lines)) if n]
    settling = {
        "quantum_states": 0,
        "dits_to_prover": 0,
        "dits_to_verifier": sum(reports),
        "messages": len(reports),
        "rounds": len(reports),
    }
    return localising, settling


def count_communication(hybrid_plan: HybridPlan) -> CommReport:
    """Exact message counts from the construction alone."""
    phases = {name: {key: 0 for key in COUNTER_KEYS} for name in ("localising", "settling")}
    for instance in hybrid_plan.instances:
        for name, counts in zip(("localising", "settling"), _instance_counts(instance)):
            for key in COUNTER_KEYS:
                phases[name][key] += counts[key]
    m = hybrid_plan.params.m
    toffolis = hybrid_plan.circuit.toffoli_count
    wires = hybrid_plan.circuit.n_wires
    phases["abe"] = {
        "quantum_states": 0,
        "dits_to_prover": 3 * toffolis,
        "dits_to_verifier": 3 * m * toffolis + m * wires,
        "messages": 2 * toffolis + wires,
        "rounds": toffolis + wires,
    }
    return CommReport.from_phases(phases)


def monolithic_count(m_prime: int) -> int:
    """Quantum states of a single dotted-complete graph holding all m' computation vertices."""
    return dotted_complete_size(m_prime)


def scaling_circuit(n: int) -> LogicalCircuit:
    """Circuit of size n (gates plus wires): 3n/4 wires and n/4 Toffolis on consecutive triples."""
    if n < 4 or n % 4:
        raise ValueError(f"Scaling size must be a positive multiple of 4, got {n}")
    wires = 3 * n // 4
    gates = tuple(LogicalGate("TOFFOLI", (3 * j, 3 * j + 1, 3 * j + 2)) for j in range(n // 4))
    return LogicalCircuit(wires, gates)


def scaling_fit(ns: Sequence[float], counts: Sequence[float]) -> float:
    """Least-squares slope of log(count) against log(n)."""
    if len(ns) != len(counts):
        raise ValueError("Grid and counts differ in length")
    if len(ns) < 3:
        raise ValueError(f"A scaling fit needs at least 3 grid points, got {len(ns)}")
    if min(ns) <= 0 or min(counts) <= 0:
        raise ValueError("Scaling fit needs positive sizes and counts")
    slope, _ = np.polyfit(np.log(np.asarray(ns, dtype=float)), np.log(np.asarray(counts, dtype=float)), 1)
    return float(slope)


def scaling_series(
    grid: Sequence[int],
    d1: int = DEFAULT_D1,
    d2: int = DEFAULT_D2,
    d: int = DEFAULT_QUDIT_DIMENSION,
) -> List[dict]:
    """Hybrid and monolithic quantum-state counts per circuit size."""
    rows = []
    for n in grid:
        hybrid_plan = plan(scaling_circuit(n), d1, d2, d, rng=np.random.default_rng(n))
        comm = count_communication(hybrid_plan)
        rows.append(
            {
                "n": n,
                "instances": len(hybrid_plan.instances),
                "hybrid_states": comm.quantum_states,
                "hybrid_dits": comm.dits_to_prover + comm.dits_to_verifier,
                "monolithic_states": monolithic_count(n),
            }
        )
    return rows


def d1_series(
    n: int,
    d1_grid: Sequence[int],
    d2: int = DEFAULT_D2,
    d: int = DEFAULT_QUDIT_DIMENSION,
) -> List[dict]:
    """Hybrid counts of the size-n scaling circuit per repetition length d1."""
    rows = []
    for d1 in d1_grid:
        hybrid_plan = plan(scaling_circuit(n), d1, d2, d, rng=np.random.default_rng(n))
        comm = count_communication(hybrid_plan)
        budget = hybrid_plan.budget()
        rows.append(
            {
                "d1": d1,
                "copies": hybrid_plan.amplification.block_length,
                "hybrid_states": comm.quantum_states,
                "hybrid_dits": comm.dits_to_prover + comm.dits_to_verifier,
                "epsilon": budget.eps if budget is not None else None,
            }
        )
    return rows
