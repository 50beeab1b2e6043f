"""
FK Localising - the trap-based preparation protocol between verifier and prover.

The verifier prepares every vertex of a trapified pattern (pre-rotated
states, dummies in secret computational-basis states, padded outputs),
sends them to the prover, and then drives the measurements one vertex at a
time with padded measurement vectors δ. The prover keeps the output layer;
the verifier keeps the trap verdict and the one-time-pad key of the output.

Provides:
- VerifierSecrets / draw_secrets
- ProverStrategy (honest, Pauli attack, unitary attack with ancillas)
- prepare_vertex, delta_message, record_outcome
- run_localising on the statevector or Pauli-frame backend
- blindness_check by exhaustive secret enumeration or per-vertex pad enumeration
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from rich.console import Console

from config import (
    MAX_EXACT_ASSIGNMENTS,
    MAX_UNITARY_ATTACK_ANCILLAS,
    VERBOSE_SESSIONS,
    ZERO_BRANCH_TOLERANCE,
)
from mbqc_pattern import GraphRegister, MeasurementPattern, actual_angle, byproduct_exponents
from pauli_frame import FrameOutcome, PauliFrame, propagate_frame
from qudit_algebra import (
    AngleVector,
    Dit,
    GateSpec,
    PauliOp,
    adapt_angle_under_pauli,
    clock_matrix,
    compose_angles,
    gate_matrix,
    pauli_matrix,
    pauli_mul,
    rotation_matrix,
)
from statevector import (
    DensityMatrix,
    StateVector,
    apply_local,
    basis_vector,
    measurement_unitary,
    plus_state,
    outcome_probabilities,
    project_site,
)
from transcript import Transcript

console = Console()


class Indicator(str, Enum):
    ACC = "ACC"
    REJ = "REJ"


@dataclass(frozen=True)
class VerifierSecrets:
    theta: Mapping[int, AngleVector]
    r: Mapping[int, int]
    dummies: Mapping[int, int]
    assignment: Optional[object] = None


def draw_secrets(
    pattern: MeasurementPattern, rng: np.random.Generator, assignment: Optional[object] = None
) -> VerifierSecrets:
    """θ uniform over all vectors (zero on outputs), r uniform on every vertex, dummy values uniform."""
    d = pattern.d
    theta, r, dummies = {}, {}, {}
    for v in pattern.graph.vertices:
        role = pattern.roles[v]
        theta[v] = AngleVector.zero(d) if role == "output" else AngleVector.random(d, rng)
        r[v] = int(rng.integers(d))
        if role == "dummy":
            dummies[v] = int(rng.integers(d))
    return VerifierSecrets(theta, r, dummies, assignment)


Label = Hashable
FrameGate = Tuple[GateSpec, Sequence[Label]]


@dataclass(frozen=True)
class ProverStrategy:
    """What the prover does on top of the honest operations.

    Attack gates for a measured vertex act in its measurement frame (after
    the basis rotation, before projection); gates keyed on an output vertex
    act on the final register. Ancilla sites are labelled ("anc", i).
    """

    kind: str = "honest"
    pauli: Mapping[int, PauliOp] = field(default_factory=dict)
    gates: Mapping[int, Sequence[FrameGate]] = field(default_factory=dict)
    ancillas: int = 0

    @classmethod
    def honest(cls) -> "ProverStrategy":
        return cls()

    @classmethod
    def pauli_attack(cls, schedule: Mapping[int, PauliOp]) -> "ProverStrategy":
        return cls("pauli", dict(schedule))

    @classmethod
    def from_frame(cls, frame: PauliFrame) -> "ProverStrategy":
        return cls("pauli", dict(frame.attacks))

    @classmethod
    def unitary_attack(cls, gates: Mapping[int, Sequence[FrameGate]], ancillas: int = 0) -> "ProverStrategy":
        return cls("unitary", {}, {v: list(gs) for v, gs in gates.items()}, ancillas)

    def frame(self, d: int) -> PauliFrame:
        if self.kind == "unitary":
            raise ValueError("Unitary strategies have no Pauli frame")
        return PauliFrame(d, self.pauli)

    def validate(self, pattern: MeasurementPattern) -> None:
        if self.kind not in ("honest", "pauli", "unitary"):
            raise ValueError(f"Unknown prover strategy {self.kind!r}")
        vertices = set(pattern.graph.vertices)
        targets = set(self.pauli) | set(self.gates)
        if not targets <= vertices:
            raise ValueError(f"Strategy attacks vertices outside the graph: {sorted(targets - vertices)}")
        if self.kind == "honest" and targets:
            raise ValueError("An honest strategy carries no attacks")
        for v, p in self.pauli.items():
            if p.n_sites != 1 or p.d != pattern.d:
                raise ValueError(f"Pauli attack on vertex {v} must be single-site at d={pattern.d}")
        if self.ancillas > MAX_UNITARY_ATTACK_ANCILLAS:
            raise ValueError(
                f"At most {MAX_UNITARY_ATTACK_ANCILLAS} ancillas are supported, got {self.ancillas}"
            )
        ancilla_labels = {("anc", i) for i in range(self.ancillas)}
        for v, gate_list in self.gates.items():
            for gate, labels in gate_list:
                allowed = {v} | ancilla_labels
                used = {labels[s] for s in gate.sites}
                if not used <= allowed:
                    raise ValueError(f"Attack at vertex {v} touches sites {used - allowed} it does not hold")

    def frame_gates(self, v: int) -> List[FrameGate]:
        if v in self.pauli:
            return [(GateSpec("PAULI", (0,), pauli=self.pauli[v]), [v])]
        return list(self.gates.get(v, ()))


# ---------------------------------------------------------------------------
# Verifier-side computations
# ---------------------------------------------------------------------------


def prepare_vertex(v: int, pattern: MeasurementPattern, secrets: VerifierSecrets) -> np.ndarray:
    """Local state the verifier sends for vertex v."""
    d = pattern.d
    role = pattern.roles.get(v)
    if role not in ("computation", "trap", "dummy", "output"):
        raise ValueError(f"Vertex {v} has unknown role {role!r}")
    if role == "dummy":
        return basis_vector(d, secrets.dummies[v])
    # CZ with a dummy |d_j> applies Z^{d_j}; pre-correct it
    pre = sum(secrets.dummies[u] for u in pattern.graph.neighbors(v) if pattern.roles[u] == "dummy")
    state = clock_matrix(d, -pre) @ plus_state(d)
    if role == "output":
        return clock_matrix(d, secrets.r[v]) @ state
    return rotation_matrix(secrets.theta[v]) @ state


def delta_message(
    i: int, pattern: MeasurementPattern, secrets: VerifierSecrets, signals: Mapping[int, int]
) -> AngleVector:
    """δ_i = φ'_i + θ_i + (r_i, 0, 0)."""
    if pattern.roles[i] == "output":
        raise ValueError(f"Output vertex {i} is never measured")
    padded = compose_angles(actual_angle(i, pattern, signals), secrets.theta[i])
    return compose_angles(padded, AngleVector.pauli_z(pattern.d, secrets.r[i]))


def record_outcome(i: int, b: int, secrets: VerifierSecrets, d: int) -> int:
    return (Dit(b, d) - Dit(secrets.r[i], d)).value


def output_key(pattern: MeasurementPattern, secrets: VerifierSecrets, signals: Mapping[int, int]) -> PauliOp:
    """Pauli K with prover register = K·|ψ_c>: the r pad, the flow byproducts, then the known offsets."""
    d = pattern.d
    xs, zs = [], []
    for o in pattern.outputs:
        sx, sz = byproduct_exponents(o, pattern, signals)
        xs.append(-sx)
        zs.append(-sz)
    pad = PauliOp(d, (0,) * len(xs), tuple(secrets.r[o] for o in pattern.outputs))
    key = pauli_mul(pad, PauliOp(d, tuple(xs), tuple(zs)))
    if not pattern.offsets:
        return key
    offset = [pattern.offsets.get(o, (0, 0)) for o in pattern.outputs]
    return pauli_mul(key, PauliOp(d, tuple(x for x, _ in offset), tuple(z for _, z in offset)))


# ---------------------------------------------------------------------------
# Protocol run
# ---------------------------------------------------------------------------


@dataclass
class LocalisingResult:
    pattern: MeasurementPattern
    indicator: Indicator
    transcript: Transcript
    secrets: VerifierSecrets
    signals: Dict[int, int]
    key: Optional[PauliOp]
    register: Optional[Union[StateVector, DensityMatrix]] = None
    frame_outcome: Optional[FrameOutcome] = None
    peak_sites: int = 0

    @property
    def accepted(self) -> bool:
        return self.indicator is Indicator.ACC

    def decoded_output(self) -> Union[StateVector, DensityMatrix]:
        """Verifier-side pad removal applied to the prover's register."""
        if self.register is None or self.key is None:
            raise RuntimeError("This run kept no quantum register")
        undo = pauli_matrix(self.key.inverse())
        if isinstance(self.register, StateVector):
            return StateVector(self.register.d, self.register.n_sites, undo @ self.register.amps)
        return DensityMatrix(
            self.register.d, self.register.n_sites, undo @ self.register.matrix @ undo.conj().T
        )


def run_localising(
    pattern: MeasurementPattern,
    strategy: Optional[ProverStrategy] = None,
    rng: Optional[np.random.Generator] = None,
    backend: str = "statevector",
    secrets: Optional[VerifierSecrets] = None,
    forced: Optional[Mapping[int, int]] = None,
) -> LocalisingResult:
    strategy = strategy or ProverStrategy.honest()
    strategy.validate(pattern)
    rng = rng if rng is not None else np.random.default_rng()
    secrets = secrets or draw_secrets(pattern, rng)
    if backend == "statevector":
        return _run_statevector(pattern, strategy, rng, secrets, forced or {})
    if backend == "frame":
        if strategy.kind == "unitary":
            raise ValueError("Unitary attacks need the statevector backend")
        outcome = propagate_frame(strategy.frame(pattern.d), pattern)
        if outcome.is_pauli:
            return _run_frame(pattern, strategy, rng, secrets, outcome)
        # an X error met a non-Clifford vector; only the full register can follow it
        if VERBOSE_SESSIONS:
            console.log(f"[dim]frame fallback: non-Pauli effect at vertex {outcome.non_pauli[0]}[/dim]")
        result = _run_statevector(pattern, strategy, rng, secrets, forced or {})
        result.frame_outcome = outcome
        return result
    raise ValueError(f"Unknown backend {backend!r}")


def _run_statevector(
    pattern: MeasurementPattern,
    strategy: ProverStrategy,
    rng: np.random.Generator,
    secrets: VerifierSecrets,
    forced: Mapping[int, int],
) -> LocalisingResult:
    d = pattern.d
    transcript = Transcript()
    transcript.send_states(pattern.graph.vertices)
    register = GraphRegister(
        d,
        pattern.graph.graph,
        lambda v: prepare_vertex(v, pattern, secrets),
        classical={v: secrets.dummies[v] for v in pattern.vertices_with_role("dummy")},
    )
    for i in range(strategy.ancillas):
        register.add_site(("anc", i), basis_vector(d, 0))
    signals: Dict[int, int] = {}
    accepted = True
    for v in pattern.order:
        delta = delta_message(v, pattern, secrets, signals)
        transcript.send_delta(v, delta.as_tuple())
        b = register.measure(v, delta, rng, forced.get(v), strategy.frame_gates(v))
        transcript.receive_outcome(v, b)
        signals[v] = record_outcome(v, b, secrets, d)
        if pattern.roles[v] == "trap" and signals[v] != 0:
            accepted = False
    for o in pattern.outputs:
        for gate, labels in strategy.frame_gates(o):
            register.apply(gate, labels)
    labels = list(pattern.outputs)
    held = register.finish_density(labels) if strategy.ancillas else register.finish(labels)
    indicator = Indicator.ACC if accepted else Indicator.REJ
    if VERBOSE_SESSIONS:
        console.log(f"[dim]localising run: {len(pattern.order)} measurements, {indicator.value}[/dim]")
    return LocalisingResult(
        pattern,
        indicator,
        transcript,
        secrets,
        signals,
        output_key(pattern, secrets, signals),
        held,
        peak_sites=register.peak_sites,
    )


def _run_frame(
    pattern: MeasurementPattern,
    strategy: ProverStrategy,
    rng: np.random.Generator,
    secrets: VerifierSecrets,
    outcome: FrameOutcome,
) -> LocalisingResult:
    """Outcomes of an honest run are uniform except on traps; attacks shift them per the frame."""
    d = pattern.d
    transcript = Transcript()
    transcript.send_states(pattern.graph.vertices)
    signals: Dict[int, int] = {}
    for v in pattern.order:
        delta = delta_message(v, pattern, secrets, signals)
        transcript.send_delta(v, delta.as_tuple())
        honest = 0 if pattern.roles[v] == "trap" else int(rng.integers(d))
        reported = (honest + secrets.r[v] + outcome.signal_shifts.get(v, 0)) % d
        transcript.receive_outcome(v, reported)
        signals[v] = record_outcome(v, reported, secrets, d)
    indicator = Indicator.REJ if outcome.trap_fired else Indicator.ACC
    return LocalisingResult(
        pattern,
        indicator,
        transcript,
        secrets,
        signals,
        output_key(pattern, secrets, signals),
        frame_outcome=outcome,
    )


# ---------------------------------------------------------------------------
# Blindness
# ---------------------------------------------------------------------------


ViewBlocks = Dict[Tuple, np.ndarray]


def _same_skeleton(a: MeasurementPattern, b: MeasurementPattern) -> None:
    edges_a = {frozenset(e) for e in a.graph.graph.edges}
    edges_b = {frozenset(e) for e in b.graph.graph.edges}
    if (
        a.d != b.d
        or a.graph.vertices != b.graph.vertices
        or edges_a != edges_b
        or a.graph.inputs != b.graph.inputs
        or a.graph.outputs != b.graph.outputs
        or a.order != b.order
        or dict(a.roles) != dict(b.roles)
    ):
        raise ValueError("Blindness compares computations on one skeleton; the graphs differ")


def _block_distance(a: ViewBlocks, b: ViewBlocks) -> float:
    """Trace distance of two classical-quantum states given as key -> unnormalised block."""
    total = 0.0
    for key in set(a) | set(b):
        ma = a.get(key)
        mb = b.get(key)
        diff = (ma if ma is not None else 0) - (mb if mb is not None else 0)
        diff = np.atleast_2d(diff)
        total += np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2)).sum()
    return float(0.5 * total)


def _secret_space(pattern: MeasurementPattern) -> List[Tuple[str, int, List]]:
    d = pattern.d
    space = []
    for v in pattern.graph.vertices:
        role = pattern.roles[v]
        if role != "output":
            space.append(("theta", v, AngleVector.all_vectors(d)))
        space.append(("r", v, list(range(d))))
        if role == "dummy":
            space.append(("dummy", v, list(range(d))))
    return space


def secret_count(pattern: MeasurementPattern) -> int:
    return int(np.prod([len(values) for _, _, values in _secret_space(pattern)]))


def _iter_secrets(pattern: MeasurementPattern):
    space = _secret_space(pattern)
    zero = AngleVector.zero(pattern.d)
    for combo in itertools.product(*(values for _, _, values in space)):
        theta: Dict[int, AngleVector] = {v: zero for v in pattern.graph.vertices}
        r: Dict[int, int] = {}
        dummies: Dict[int, int] = {}
        for (kind, v, _), value in zip(space, combo):
            if kind == "theta":
                theta[v] = value
            elif kind == "r":
                r[v] = value
            else:
                dummies[v] = value
        yield VerifierSecrets(theta, r, dummies)


def prover_view(pattern: MeasurementPattern) -> ViewBlocks:
    """Honest-but-curious view: (δ's, outcomes) classical keys with the held output register.

    Averages over every secret exactly and branches over every outcome.
    """
    count = secret_count(pattern)
    if count > MAX_EXACT_ASSIGNMENTS:
        raise ValueError(f"{count} secret combinations are too many to enumerate; use method='pad'")
    d = pattern.d
    vertices = pattern.graph.vertices
    cz = gate_matrix(GateSpec("CZ", (0, 1)), d)
    blocks: ViewBlocks = {}
    weight = 1.0 / count
    for secrets in _iter_secrets(pattern):
        state = StateVector.from_local_states(d, [prepare_vertex(v, pattern, secrets) for v in vertices])
        for u, w in pattern.graph.graph.edges:
            state = apply_local(state, cz, (vertices.index(u), vertices.index(w)))
        _branch(pattern, secrets, state, list(vertices), {}, (), weight, blocks)
    return blocks


def _branch(
    pattern: MeasurementPattern,
    secrets: VerifierSecrets,
    state: StateVector,
    labels: List[int],
    signals: Dict[int, int],
    key: Tuple,
    weight: float,
    blocks: ViewBlocks,
) -> None:
    step = len(signals)
    if step == len(pattern.order):
        order = [labels.index(o) for o in pattern.outputs]
        held = state.permuted(order) if order else state
        block = weight * np.outer(held.amps, held.amps.conj())
        blocks[key] = blocks.get(key, 0) + block
        return
    v = pattern.order[step]
    delta = delta_message(v, pattern, secrets, signals)
    site = labels.index(v)
    rotated = apply_local(state, measurement_unitary(delta), (site,))
    probs = outcome_probabilities(rotated, site)
    rest = labels[:site] + labels[site + 1 :]
    for b, prob in enumerate(probs):
        if prob < ZERO_BRANCH_TOLERANCE:
            continue
        _, post = project_site(rotated, site, b)
        next_signals = dict(signals)
        next_signals[v] = record_outcome(v, b, secrets, pattern.d)
        next_key = key + (delta.as_tuple(), b)
        _branch(pattern, secrets, post, rest, next_signals, next_key, weight * prob, blocks)


def vertex_view(pattern: MeasurementPattern, v: int, phi: AngleVector) -> ViewBlocks:
    """Per-vertex pad view: δ key with the prepared state, averaged over θ_v, r_v and dummy values."""
    d = pattern.d
    role = pattern.roles[v]
    blocks: ViewBlocks = {}
    thetas = AngleVector.all_vectors(d)
    dummy_values = range(d) if role == "dummy" else [0]
    weight = 1.0 / (len(thetas) * d * len(dummy_values))
    for theta, r, dv in itertools.product(thetas, range(d), dummy_values):
        if role == "dummy":
            local = basis_vector(d, dv)
        else:
            local = rotation_matrix(theta) @ plus_state(d)
        delta = compose_angles(compose_angles(phi, theta), AngleVector.pauli_z(d, r))
        key = delta.as_tuple()
        blocks[key] = blocks.get(key, 0) + weight * np.outer(local, local.conj())
    return blocks


def _adapted_angles(pattern: MeasurementPattern, v: int) -> List[AngleVector]:
    d = pattern.d
    base = pattern.angles[v]
    return sorted(
        {adapt_angle_under_pauli(base, sx, sz) for sx in range(d) for sz in range(d)},
        key=lambda a: a.as_tuple(),
    )


def blindness_check(
    pattern_a: MeasurementPattern, pattern_b: MeasurementPattern, method: str = "exhaustive"
) -> float:
    """Trace distance between the prover's averaged views of two computations."""
    _same_skeleton(pattern_a, pattern_b)
    if method == "exhaustive":
        return _block_distance(prover_view(pattern_a), prover_view(pattern_b))
    if method != "pad":
        raise ValueError(f"Unknown blindness method {method!r}")
    worst = 0.0
    for v in pattern_a.order:
        views = [
            vertex_view(p, v, phi) for p in (pattern_a, pattern_b) for phi in _adapted_angles(p, v)
        ]
        reference = views[0]
        for other in views[1:]:
            worst = max(worst, _block_distance(reference, other))
    return worst
