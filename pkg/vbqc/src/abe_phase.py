"""
ABE Phase - logical circuits on signed-polynomial-encoded, Pauli-padded wires.

The prover holds every wire as a block of m physical qudits under the
verifier's Pauli key. Clifford gates are applied transversally in public and
the verifier updates the key; logical Paulis never touch the register.
Toffoli gates are teleported through pre-shared resource blocks: the prover
reports the measured blocks (b̃), the verifier decodes them and returns the
correction dits (r̃) that select the Clifford correction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from rich.console import Console

from config import MIN_LEAKAGE_SAMPLES_PER_BIN, SIGMA_MULTIPLIER, VERBOSE_SESSIONS
from fk_localising import Indicator
from mbqc_pattern import GraphRegister
from qudit_algebra import GateSpec, PauliOp, conjugate_circuit, gate_matrix, pauli_matrix, pauli_mul
from signed_poly_code import (
    Accept,
    CodeParams,
    DecodeResult,
    PauliKey,
    Reject,
    SignKey,
    codeword_set,
    decoding_circuit,
    detect_and_decode,
    encode_quantum,
    logical_cx,
    logical_cz,
    logical_f,
    logical_s,
    logical_x,
    logical_z,
    update_pauli_key,
)
from statevector import (
    DensityMatrix,
    StateVector,
    apply_gate,
    apply_local_density,
    apply_pauli,
    basis_vector,
    check_ceiling,
    partial_trace,
    plus_state,
)
from transcript import Transcript

console = Console()

LOGICAL_ARITY = {"CX": 2, "CZ": 2, "F": 1, "S": 1, "Z": 1, "X": 1, "TOFFOLI": 3}


@dataclass(frozen=True)
class LogicalGate:
    kind: str
    wires: Tuple[int, ...]
    power: int = 1

    def __post_init__(self) -> None:
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))
        if kind not in LOGICAL_ARITY:
            raise ValueError(f"Unknown logical gate {self.kind!r}")
        if len(self.wires) != LOGICAL_ARITY[kind]:
            raise ValueError(f"{kind} acts on {LOGICAL_ARITY[kind]} wire(s), got {self.wires}")
        if len(set(self.wires)) != len(self.wires):
            raise ValueError(f"Gate wires must be distinct: {self.wires}")


@dataclass(frozen=True)
class LogicalCircuit:
    """Data wires 0..n_wires-1; the j-th Toffoli consumes resource wires n_wires+3j..n_wires+3j+2."""

    n_wires: int
    gates: Tuple[LogicalGate, ...] = ()

    def __post_init__(self) -> None:
        if self.n_wires < 1:
            raise ValueError("A logical circuit needs at least one wire")
        object.__setattr__(self, "gates", tuple(self.gates))
        for gate in self.gates:
            if any(not 0 <= w < self.n_wires for w in gate.wires):
                raise ValueError(f"Gate {gate.kind} uses wires {gate.wires} outside 0..{self.n_wires - 1}")

    @property
    def toffoli_count(self) -> int:
        return sum(1 for g in self.gates if g.kind == "TOFFOLI")

    @property
    def total_wires(self) -> int:
        return self.n_wires + 3 * self.toffoli_count

    @property
    def size(self) -> int:
        """t + n: gate count plus wire count."""
        return len(self.gates) + self.n_wires

    def resource_wires(self, j: int) -> Tuple[int, int, int]:
        base = self.n_wires + 3 * j
        return (base, base + 1, base + 2)

    def is_clifford(self) -> bool:
        return self.toffoli_count == 0

    def to_json(self) -> dict:
        return {
            "wires": self.n_wires,
            "gates": [
                {"gate": g.kind, "wires": list(g.wires), **({"power": g.power} if g.power != 1 else {})}
                for g in self.gates
            ],
        }

    @classmethod
    def from_json(cls, data) -> "LogicalCircuit":
        if isinstance(data, (str, Path)):
            data = json.loads(Path(data).read_text(encoding="utf-8"))
        if isinstance(data, list):
            gates = data
            n_wires = 1 + max((w for g in gates for w in g["wires"]), default=0)
        else:
            gates = data["gates"]
            n_wires = int(data["wires"])
        return cls(
            n_wires,
            tuple(LogicalGate(g["gate"], tuple(g["wires"]), int(g.get("power", 1))) for g in gates),
        )


@dataclass
class ToffoliRound:
    targets: Tuple[int, int, int]
    resource: Tuple[int, int, int]
    measured: List[int]
    decoded: Tuple[int, int, int]
    correction: Tuple[int, int, int]
    accepted: bool


@dataclass
class AbeOutcome:
    results: Dict[int, DecodeResult]
    rounds: List[ToffoliRound]
    indicator: Indicator
    transcript: Transcript

    def values(self) -> Dict[int, Optional[int]]:
        return {w: r.value if isinstance(r, Accept) else None for w, r in self.results.items()}


def toffoli_state(d: int) -> StateVector:
    """Toffoli·|+0>|+0>|0> = (1/d) Σ_{a,b} |a, b, ab>."""
    start = StateVector.from_local_states(d, [plus_state(d), plus_state(d), basis_vector(d, 0)])
    return apply_gate(start, GateSpec("TOFFOLI", (0, 1, 2)))


def encoded_toffoli_state(params: CodeParams, key: SignKey) -> StateVector:
    d, m = params.d, params.m
    check_ceiling(d, 3 * m)
    if m == 1:
        # codewords are the single dit k·a
        state = toffoli_state(d)
        for site in range(3):
            state = apply_gate(state, GateSpec("MUL", (site,), weight=key.signs[0] % d))
        return state
    encoded = [encode_quantum(a, params, key).amps for a in range(d)]
    amps = np.zeros(d ** (3 * m), dtype=complex)
    for a in range(d):
        for b in range(d):
            amps += np.kron(np.kron(encoded[a], encoded[b]), encoded[(a * b) % d])
    return StateVector(d, 3 * m, amps / d)


def encoded_inputs(circuit: LogicalCircuit, inputs: Sequence[int], params: CodeParams, key: SignKey) -> StateVector:
    """Plaintext register: encoded data wires followed by encoded Toffoli resources."""
    if len(inputs) != circuit.n_wires:
        raise ValueError(f"Circuit has {circuit.n_wires} wires, got {len(inputs)} inputs")
    check_ceiling(params.d, circuit.total_wires * params.m)
    state = StateVector(params.d, 0, np.array([1.0 + 0j]))
    for a in inputs:
        state = state.tensor(encode_quantum(a, params, key))
    for _ in range(circuit.toffoli_count):
        state = state.tensor(encoded_toffoli_state(params, key))
    return state


def _no_fresh_sites(label):
    raise RuntimeError(f"The ABE register has no site {label!r}")


class AbeSession:
    """Prover register plus the verifier's key for one ABE phase.

    With a statevector the register is simulated in full. Without one the
    session runs in frame mode: it tracks only the Pauli deviation from the
    honest register, which Clifford-only circuits keep Pauli.
    """

    def __init__(
        self,
        params: CodeParams,
        sign_key: SignKey,
        padded: Optional[StateVector],
        key: PauliKey,
        transcript: Optional[Transcript] = None,
        residual: Optional[PauliOp] = None,
        ideal_values: Optional[Sequence[Optional[int]]] = None,
    ):
        n_sites = key.n_sites
        if n_sites % params.m:
            raise ValueError(f"{n_sites} sites do not split into blocks of {params.m}")
        if padded is not None and padded.n_sites != n_sites:
            raise ValueError("Pauli key and register disagree on the number of sites")
        self.params = params
        self.sign_key = sign_key
        self.d = params.d
        self.n_sites = n_sites
        m = params.m
        self.blocks: Dict[int, Tuple[int, ...]] = {
            w: tuple(range(w * m, (w + 1) * m)) for w in range(n_sites // m)
        }
        self.register = (
            None
            if padded is None
            else GraphRegister(self.d, nx.Graph(), _no_fresh_sites, padded, list(range(n_sites)))
        )
        self.residual = residual if residual is not None else PauliOp.identity(self.d, n_sites)
        self.ideal_values = list(ideal_values) if ideal_values is not None else None
        self.key = key
        self.transcript = transcript or Transcript(phase="abe")
        self.rounds: List[ToffoliRound] = []
        self.rejected = False

    @classmethod
    def padded(
        cls,
        params: CodeParams,
        sign_key: SignKey,
        plaintext: StateVector,
        key: PauliKey,
        transcript: Optional[Transcript] = None,
    ) -> "AbeSession":
        """Session whose register holds key·plaintext."""
        return cls(params, sign_key, apply_pauli(plaintext, key.op), key, transcript)

    @classmethod
    def frame(
        cls,
        params: CodeParams,
        sign_key: SignKey,
        key: PauliKey,
        residual: PauliOp,
        ideal_values: Optional[Sequence[Optional[int]]] = None,
        transcript: Optional[Transcript] = None,
    ) -> "AbeSession":
        """Register-free session: the prover holds residual·key·plaintext."""
        return cls(params, sign_key, None, key, transcript, residual, ideal_values)

    @property
    def frame_mode(self) -> bool:
        return self.register is None

    def apply_physical(self, gates: Sequence[GateSpec]) -> None:
        if self.frame_mode:
            self.residual = conjugate_circuit(gates, self.residual)
        else:
            for gate in gates:
                self.register.apply_global(gate)
        self.key = update_pauli_key(self.key, gates)

    def attack(self, site: int, pauli: PauliOp) -> None:
        """A prover deviation: hits the register, the key does not follow."""
        if self.frame_mode:
            xs = [0] * self.n_sites
            zs = [0] * self.n_sites
            xs[site], zs[site] = pauli.x_exps[0], pauli.z_exps[0]
            self.residual = pauli_mul(PauliOp(self.d, tuple(xs), tuple(zs)), self.residual)
        else:
            self.register.apply_global(GateSpec("PAULI", (site,), pauli=pauli))

    def logical_shift(self, w: int) -> DecodeResult:
        """How the tracked deviation moves the decoded value of wire w (frame mode)."""
        shift = [self.residual.x_exps[s] for s in self.blocks[w]]
        return detect_and_decode(shift, self.params, self.sign_key)

    def apply_logical(self, gate: LogicalGate) -> None:
        params, d = self.params, self.d
        blocks = [self.blocks[w] for w in gate.wires]
        kind = gate.kind
        if kind == "CX":
            self.apply_physical(logical_cx(blocks[0], blocks[1], gate.power % d))
        elif kind == "CZ":
            self.apply_physical(logical_cz(params, blocks[0], blocks[1], gate.power))
        elif kind == "F":
            for _ in range(gate.power % 4):
                self.apply_physical(logical_f(params, blocks[0]))
        elif kind == "S":
            for _ in range(gate.power % d):
                gates, fix = logical_s(params, self.sign_key, blocks[0], self.n_sites)
                self.apply_physical(gates)
                self.key = self.key.absorb_logical(fix)
        elif kind == "Z":
            self.key = self.key.absorb_logical(
                logical_z(params, self.sign_key, blocks[0], self.n_sites, gate.power)
            )
        elif kind == "X":
            self.key = self.key.absorb_logical(
                logical_x(params, self.sign_key, blocks[0], self.n_sites, gate.power)
            )
        else:
            raise ValueError("Toffoli gates are teleported, use teleport_toffoli")

    def measure_wire(self, w: int, rng: np.random.Generator) -> Tuple[DecodeResult, List[int]]:
        block = self.blocks[w]
        if self.frame_mode:
            raw = self._frame_outcomes(w, rng)
        else:
            raw = [self.register.measure_z(s, rng) for s in block]
        unpadded = [(b - self.key.x_key(s)) % self.d for s, b in zip(block, raw)]
        result = detect_and_decode(unpadded, self.params, self.sign_key)
        if isinstance(result, Reject):
            self.rejected = True
        return result, raw

    def _frame_outcomes(self, w: int, rng: np.random.Generator) -> List[int]:
        """A random codeword of the wire's value, padded by the key, shifted by the deviation."""
        known = self.ideal_values[w] if self.ideal_values and w < len(self.ideal_values) else None
        value = int(rng.integers(self.d)) if known is None else known
        words = sorted(codeword_set(value, self.params, self.sign_key))
        word = words[int(rng.integers(len(words)))]
        return [
            (c + self.key.x_key(s) + self.residual.x_exps[s]) % self.d
            for c, s in zip(word, self.blocks[w])
        ]

    def teleport_toffoli(
        self, targets: Sequence[int], resource: Sequence[int], rng: np.random.Generator
    ) -> ToffoliRound:
        if self.frame_mode:
            raise ValueError("Toffoli teleportation needs the statevector register")
        t1, t2, t3 = targets
        r1, r2, r3 = resource
        if len(set(targets) | set(resource)) != 6:
            raise ValueError(f"Toffoli teleportation needs six distinct wires, got {targets} and {resource}")
        d = self.d
        self.apply_logical(LogicalGate("CX", (r1, t1), power=d - 1))
        self.apply_logical(LogicalGate("CX", (r2, t2), power=d - 1))
        self.apply_logical(LogicalGate("CX", (t3, r3)))
        self.apply_logical(LogicalGate("F", (t3,)))
        decoded, measured, accepted = [], [], True
        for w in (t1, t2, t3):
            result, raw = self.measure_wire(w, rng)
            measured.extend(raw)
            accepted = accepted and isinstance(result, Accept)
            decoded.append(result.value if isinstance(result, Accept) else 0)
        self.transcript.receive_measurements("toffoli_outcomes", [t1, t2, t3], measured)
        m1, m2, m3 = decoded
        self.transcript.send_correction((m1, m2, m3))
        self.apply_logical(LogicalGate("X", (r1,), power=m1))
        self.apply_logical(LogicalGate("X", (r2,), power=m2))
        if m2:
            self.apply_logical(LogicalGate("CX", (r1, r3), power=m2))
        if m1:
            self.apply_logical(LogicalGate("CX", (r2, r3), power=m1))
        self.apply_logical(LogicalGate("X", (r3,), power=-m1 * m2))
        self.apply_logical(LogicalGate("Z", (r3,), power=-m3))
        if m3:
            self.apply_logical(LogicalGate("CZ", (r1, r2), power=m3))
        for t, r in zip(targets, resource):
            self.blocks[t] = self.blocks[r]
        round_ = ToffoliRound(
            tuple(targets), tuple(resource), measured, tuple(decoded), (m1, m2, m3), accepted
        )
        self.rounds.append(round_)
        return round_

    def logical_density(self, wires: Sequence[int]) -> DensityMatrix:
        """Verifier-side view: unpad, decode every block, keep the logical site of each."""
        if self.frame_mode:
            raise ValueError("A frame-mode session holds no register")
        labels = [s for w in wires for s in self.blocks[w]]
        rho = self.register.finish_density(labels)
        undo = self.key.op.restrict(labels).inverse()
        for i in range(len(labels)):
            local = undo.restrict([i])
            if not local.is_identity():
                rho = apply_local_density(rho, pauli_matrix(local), (i,))
        m = self.params.m
        for i, _ in enumerate(wires):
            for gate in decoding_circuit(self.params, self.sign_key, range(i * m, (i + 1) * m)):
                local = gate.shifted({s: j for j, s in enumerate(gate.sites)})
                rho = apply_local_density(rho, gate_matrix(local, self.d), gate.sites)
        return partial_trace(rho, [i * m for i in range(len(wires))])


def run_logical_circuit(
    session: AbeSession,
    circuit: LogicalCircuit,
    rng: np.random.Generator,
    attacks: Optional[Mapping[int, PauliOp]] = None,
) -> AbeOutcome:
    """Apply the circuit, let the prover deviate before measuring, then detect and decode every wire."""
    j = 0
    for gate in circuit.gates:
        if gate.kind == "TOFFOLI":
            session.teleport_toffoli(gate.wires, circuit.resource_wires(j), rng)
            j += 1
        else:
            session.apply_logical(gate)
    for site, pauli in (attacks or {}).items():
        session.attack(site, pauli)
    results: Dict[int, DecodeResult] = {}
    for w in range(circuit.n_wires):
        results[w], raw = session.measure_wire(w, rng)
        session.transcript.receive_measurements("final_outcomes", [w], raw)
    rejected = session.rejected or any(not r.accepted for r in session.rounds)
    indicator = Indicator.REJ if rejected else Indicator.ACC
    if VERBOSE_SESSIONS:
        console.log(f"[dim]ABE phase: {len(session.rounds)} Toffoli rounds, {indicator.value}[/dim]")
    return AbeOutcome(results, list(session.rounds), indicator, session.transcript)


def ideal_distribution(circuit: LogicalCircuit, inputs: Sequence[int], d: int) -> np.ndarray:
    """Outcome distribution of the unencoded circuit, indexed by the wire values (wire 0 most significant)."""
    state = StateVector.basis(d, list(inputs))
    for gate in circuit.gates:
        kind = gate.kind
        if kind in ("X", "Z"):
            spec = GateSpec(
                "PAULI",
                gate.wires,
                pauli=PauliOp(d, (gate.power if kind == "X" else 0,), (gate.power if kind == "Z" else 0,)),
            )
        else:
            spec = GateSpec(kind, gate.wires, power=gate.power)
        state = apply_gate(state, spec)
    return np.abs(state.amps) ** 2


def teleport_random_input(d: int, rng: np.random.Generator) -> Tuple[float, ToffoliRound]:
    """Teleport Toffoli on a random unencoded 3-qudit input under a random key; fidelity with direct Toffoli."""
    params = CodeParams(d, 0)
    psi = StateVector.random(d, 3, rng)
    session = AbeSession.padded(
        params, SignKey.trivial(1), psi.tensor(toffoli_state(d)), PauliKey.random(d, 6, rng)
    )
    round_ = session.teleport_toffoli((0, 1, 2), (3, 4, 5), rng)
    rho = session.logical_density([0, 1, 2])
    target = apply_gate(psi, GateSpec("TOFFOLI", (0, 1, 2)))
    fidelity = float(np.real(target.amps.conj() @ rho.matrix @ target.amps))
    return fidelity, round_


# ---------------------------------------------------------------------------
# Correction leakage
# ---------------------------------------------------------------------------


@dataclass
class LeakageReport:
    samples: int
    bins: int
    tv_uniform: float
    max_z_uniform: float
    tv_between: Optional[float] = None
    max_z_between: Optional[float] = None
    sufficient: bool = True
    notes: List[str] = field(default_factory=list)

    def passed(self, sigmas: float = SIGMA_MULTIPLIER) -> bool:
        ok = self.max_z_uniform <= sigmas
        if self.max_z_between is not None:
            ok = ok and self.max_z_between <= sigmas
        return ok and self.sufficient

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "bins": self.bins,
            "tv_uniform": self.tv_uniform,
            "max_z_uniform": self.max_z_uniform,
            "tv_between": self.tv_between,
            "max_z_between": self.max_z_between,
            "sufficient": self.sufficient,
        }


def _histogram(samples: Sequence[Tuple[int, ...]], d: int, width: int) -> np.ndarray:
    counts = np.zeros(d ** width)
    for sample in samples:
        index = 0
        for dit in sample:
            index = index * d + int(dit) % d
        counts[index] += 1
    return counts


def distribution_check(
    samples: Sequence[Tuple[int, ...]],
    d: int,
    other: Optional[Sequence[Tuple[int, ...]]] = None,
) -> LeakageReport:
    """Uniformity of dit tuples, and agreement with a second ensemble when given."""
    if not samples:
        raise ValueError("No samples to check")
    width = len(samples[0])
    bins = d ** width
    n = len(samples)
    counts = _histogram(samples, d, width)
    p = 1.0 / bins
    freq = counts / n
    sigma = np.sqrt(p * (1 - p) / n)
    report = LeakageReport(
        samples=n,
        bins=bins,
        tv_uniform=float(0.5 * np.abs(freq - p).sum()),
        max_z_uniform=float(np.abs(freq - p).max() / sigma),
    )
    if n / bins < MIN_LEAKAGE_SAMPLES_PER_BIN:
        report.sufficient = False
        report.notes.append(f"only {n / bins:.1f} samples per bin")
    if other is not None:
        n2 = len(other)
        freq2 = _histogram(other, d, width) / n2
        pooled = (counts + freq2 * n2) / (n + n2)
        spread = np.sqrt(np.maximum(pooled * (1 - pooled), p * (1 - p)) * (1 / n + 1 / n2))
        report.tv_between = float(0.5 * np.abs(freq - freq2).sum())
        report.max_z_between = float((np.abs(freq - freq2) / spread).max())
        if n2 / bins < MIN_LEAKAGE_SAMPLES_PER_BIN:
            report.sufficient = False
            report.notes.append(f"only {n2 / bins:.1f} samples per bin in the second ensemble")
    return report


def correction_leakage_check(
    rounds: Sequence[ToffoliRound],
    d: int,
    other_rounds: Optional[Sequence[ToffoliRound]] = None,
) -> LeakageReport:
    """Statistical distance of the r̃ messages from uniform and between two ensembles."""
    other = [r.correction for r in other_rounds] if other_rounds is not None else None
    return distribution_check([r.correction for r in rounds], d, other)


def marginal_leakage_checks(
    rounds: Sequence[ToffoliRound],
    d: int,
    other_rounds: Optional[Sequence[ToffoliRound]] = None,
) -> List[LeakageReport]:
    """One report per r̃ dit; d bins each, so far fewer samples suffice than for the joint check."""
    reports = []
    for i in range(3):
        other = [(r.correction[i],) for r in other_rounds] if other_rounds is not None else None
        reports.append(distribution_check([(r.correction[i],) for r in rounds], d, other))
    return reports
