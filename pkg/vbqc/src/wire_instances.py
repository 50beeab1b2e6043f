"""
Wire Instances - localising runs that output encoded, padded logical wires.

Every logical wire of the hybrid protocol (a data input, or the three wires
of one Toffoli resource) is prepared by a single localising instance on a
linked skeleton with line length two. Output line (block, site, copy) is
physical qudit `site` of the block, repeated once per copy of the
amplification code. Three kinds of line make up an instance:
- free lines output their input unchanged: the |+> of a free codeword entry
- fixed lines output |Σ W·x + t>: the CZ^W links from free lines carry the
  code's Lagrange weights and the quadratic angles add the constant t
- phase lines (resources only) pick up ω^{κ·T³} for a signed sum T of the
  block values and are then measured in the computational basis; their
  outcomes become Z key updates on the linked free lines

After the run the prover decodes the repetition copies, reports the
syndrome copies, and keeps the copy-0 lines as the ABE blocks.

Provides:
- LineRole / WireInstance, compile_input, compile_resource
- instance_skeleton, fixed_line_offset, cubic_phase_vector
- run_instance on the statevector or Pauli-frame backend, with settling
- frame_fidelity, the statevector cross-check against the frame prediction
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from rich.console import Console

from amplification import AmplificationCode, IdentityCode
from config import STATE_TOLERANCE, VERBOSE_SESSIONS
from fk_localising import LocalisingResult, ProverStrategy, draw_secrets, run_localising
from graph_constructions import (
    TrapAssignment,
    TrapifiedGraph,
    attach_gadgets,
    build_reduced,
    draw_assignment,
    reference_output,
    trapified_pattern,
)
from mbqc_pattern import MeasurementPattern, teleportation_step
from pauli_frame import PauliFrame, propagate_frame
from qudit_algebra import AngleVector, GateSpec, PauliOp, conjugate_circuit, identify_pauli, pauli_mul
from signed_poly_code import CodeParams, SignKey, field as prime_field
from statevector import StateVector, apply_gate, apply_pauli, fourier_matrix, measure_computational, state_fidelity
from transcript import Transcript

console = Console()

LINE_LENGTH = 2

# 6·ABC = (A+B+C)³ - (A+B)³ - (A+C)³ - (B+C)³ + A³ + B³ + C³
PHASE_TERMS: Tuple[Tuple[Tuple[int, ...], int], ...] = (
    ((0, 1, 2), 1),
    ((0, 1), -1),
    ((0, 2), -1),
    ((1, 2), -1),
    ((0,), 1),
    ((1,), 1),
    ((2,), 1),
)


@dataclass(frozen=True)
class LineRole:
    kind: str
    shift: int = 0
    cubic: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("free", "fixed", "phase"):
            raise ValueError(f"Unknown line kind {self.kind!r}")


@lru_cache(maxsize=None)
def instance_skeleton(lines: int) -> TrapifiedGraph:
    """Line length two; several lines are linked pairwise at their starts."""
    return attach_gadgets(build_reduced(LINE_LENGTH, lines, linked=lines > 1))


def _fixed_angles(d: int, shift: int) -> List[AngleVector]:
    return [AngleVector(d, -shift, 1, 0), AngleVector(d, 0, 1, 0), AngleVector(d, 0, 1, 0)]


@lru_cache(maxsize=None)
def fixed_line_offset(d: int) -> Tuple[int, int]:
    """(x, z) of the Pauli Q with fixed-line unitary Q·F⁻¹·Z^t."""
    unitary = np.eye(d, dtype=complex)
    # the gadget row vertex is measured at the zero vector
    for v in _fixed_angles(d, 0) + [AngleVector.zero(d)]:
        unitary = teleportation_step(v) @ unitary
    offset = identify_pauli(unitary @ fourier_matrix(d), d)
    if offset is None:
        raise RuntimeError(f"Fixed-line unitary at d={d} is not a Pauli times F⁻¹")
    return offset.x_exps[0], offset.z_exps[0]


def cubic_phase_vector(d: int, sign: int) -> AngleVector:
    """Vector whose rotation is ω^{sign·k³/6}; at d=3 the cubic term lives in ω_9 units."""
    if d == 3:
        return AngleVector(3, 0, 0, 2 * sign)
    if d < 5:
        raise ValueError(f"Cubic phase lines need an odd prime dimension, got d={d}")
    return AngleVector(d, 0, 0, sign * pow(6, -1, d))


def _lagrange_at(nodes: Sequence[int], x: int, d: int) -> List[int]:
    """L_i(x) for the Lagrange basis on `nodes` over GF(d)."""
    GF = prime_field(d)
    pts = GF([n % d for n in nodes])
    at = GF(x % d)
    coeffs = []
    for i in range(len(nodes)):
        value = GF(1)
        for j in range(len(nodes)):
            if j != i:
                value = value * (at - pts[j]) / (pts[i] - pts[j])
        coeffs.append(int(value))
    return coeffs


@dataclass(frozen=True)
class WireInstance:
    """Compiled localising instance for one data wire or one Toffoli resource."""

    kind: str
    wires: Tuple[int, ...]
    params: CodeParams
    code: AmplificationCode
    roles: Tuple[LineRole, ...]
    links: Mapping[Tuple[int, int], int] = field(default_factory=dict)
    value: Optional[int] = None

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def copies(self) -> int:
        return self.code.block_length

    @property
    def blocks(self) -> int:
        return len(self.wires)

    @property
    def line_count(self) -> int:
        return len(self.roles)

    @property
    def register_lines(self) -> int:
        return self.blocks * self.params.m * self.copies

    def line(self, block: int, site: int, copy: int = 0) -> int:
        return (block * self.params.m + site) * self.copies + copy

    @property
    def phase_lines(self) -> Tuple[int, ...]:
        return tuple(range(self.register_lines, self.line_count))

    @property
    def logical_lines(self) -> List[int]:
        return [self.line(b, i) for b in range(self.blocks) for i in range(self.params.m)]

    @property
    def syndrome_lines(self) -> List[int]:
        return [
            self.line(b, i, c)
            for b in range(self.blocks)
            for i in range(self.params.m)
            for c in range(1, self.copies)
        ]

    @property
    def skeleton(self) -> TrapifiedGraph:
        return instance_skeleton(self.line_count)

    def phase_targets(self, line: int) -> List[Tuple[int, int]]:
        """(free line, weight) pairs the phase line is linked to."""
        return sorted((a if b == line else b, w) for (a, b), w in self.links.items() if line in (a, b))

    def path_angles(self) -> List[AngleVector]:
        d = self.d
        zero = AngleVector.zero(d)
        angles: List[AngleVector] = []
        for role in self.roles:
            if role.kind == "free":
                angles.extend([zero] * 3)
            elif role.kind == "fixed":
                angles.extend(_fixed_angles(d, role.shift))
            else:
                angles.extend([zero, cubic_phase_vector(d, role.cubic), zero])
        return angles

    def offsets(self) -> Dict[int, Tuple[int, int]]:
        return {
            line: fixed_line_offset(self.d) for line, role in enumerate(self.roles) if role.kind == "fixed"
        }

    def pattern(self, assignment: TrapAssignment) -> MeasurementPattern:
        return trapified_pattern(
            self.skeleton, assignment, self.d, self.path_angles(), self.links, self.offsets()
        )

    def decode_gates(self) -> List[GateSpec]:
        return [
            gate
            for b in range(self.blocks)
            for i in range(self.params.m)
            for gate in self.code.decode_circuit([self.line(b, i, c) for c in range(self.copies)])
        ]


def _add_link(links: Dict[Tuple[int, int], int], a: int, b: int, weight: int, d: int) -> None:
    if a == b:
        raise ValueError(f"Line {a} cannot be linked to itself")
    pair = (min(a, b), max(a, b))
    total = (links.get(pair, 0) + weight) % d
    if total:
        links[pair] = total
    else:
        links.pop(pair, None)


def _place_copies(
    roles: List[Optional[LineRole]],
    links: Dict[Tuple[int, int], int],
    line,
    block: int,
    site: int,
    copies: int,
    d: int,
) -> None:
    """Copies of a free entry link to it with weight one; copies of a fixed entry repeat its links."""
    first = line(block, site, 0)
    for c in range(1, copies):
        target = line(block, site, c)
        if roles[first].kind == "free":
            roles[target] = LineRole("fixed", 0)
            _add_link(links, first, target, 1, d)
        else:
            roles[target] = roles[first]
            for (a, b), w in list(links.items()):
                if first in (a, b):
                    _add_link(links, a if b == first else b, target, w, d)


def compile_input(
    params: CodeParams,
    sign_key: SignKey,
    value: int,
    wire: int = 0,
    code: Optional[AmplificationCode] = None,
) -> WireInstance:
    """Instance outputting the signed codeword of `value`, its first p entries left free."""
    code = code or IdentityCode()
    d, m, p = params.d, params.m, params.p
    signs = [s % d for s in sign_key.signs]
    alphas = params.eval_points
    copies = code.block_length
    roles: List[Optional[LineRole]] = [None] * (m * copies)
    links: Dict[Tuple[int, int], int] = {}

    def line(block: int, site: int, copy: int) -> int:
        return (block * m + site) * copies + copy

    # f is fixed by f(0) = value and f(α_i) = k_i·x_i on the free entries
    nodes = [0] + [alphas[i] for i in range(p)]
    for i in range(m):
        if i < p:
            roles[line(0, i, 0)] = LineRole("free")
            continue
        weights = _lagrange_at(nodes, alphas[i], d)
        roles[line(0, i, 0)] = LineRole("fixed", signs[i] * weights[0] * value % d)
        for j in range(p):
            _add_link(links, line(0, j, 0), line(0, i, 0), signs[i] * weights[j + 1] * signs[j], d)
    for i in range(m):
        _place_copies(roles, links, line, 0, i, copies, d)
    return WireInstance("input", (wire,), params, code, tuple(roles), links, value % d)


def compile_resource(
    params: CodeParams,
    sign_key: SignKey,
    wires: Sequence[int] = (0, 1, 2),
    code: Optional[AmplificationCode] = None,
) -> WireInstance:
    """Instance outputting Σ ω^{ABC} |E(A), E(B), E(C)>; logical F⁻¹ on the third block gives the Toffoli resource."""
    code = code or IdentityCode()
    d, m, p = params.d, params.m, params.p
    if len(wires) != 3:
        raise ValueError(f"A Toffoli resource spans three wires, got {tuple(wires)}")
    signs = [s % d for s in sign_key.signs]
    alphas = params.eval_points
    copies = code.block_length
    register = 3 * m * copies
    roles: List[Optional[LineRole]] = [None] * (register + len(PHASE_TERMS))
    links: Dict[Tuple[int, int], int] = {}

    def line(block: int, site: int, copy: int) -> int:
        return (block * m + site) * copies + copy

    nodes = [alphas[i] for i in range(p + 1)]
    for block in range(3):
        for i in range(m):
            if i <= p:
                roles[line(block, i, 0)] = LineRole("free")
                continue
            weights = _lagrange_at(nodes, alphas[i], d)
            roles[line(block, i, 0)] = LineRole("fixed", 0)
            for j in range(p + 1):
                _add_link(links, line(block, j, 0), line(block, i, 0), signs[i] * weights[j] * signs[j], d)
        for i in range(m):
            _place_copies(roles, links, line, block, i, copies, d)
    # block value = Σ_j L_j(0)·k_j·x_j over the free entries
    value_weights = [w * signs[j] % d for j, w in enumerate(_lagrange_at(nodes, 0, d))]
    for t, (subset, sign) in enumerate(PHASE_TERMS):
        phase_line = register + t
        roles[phase_line] = LineRole("phase", cubic=sign)
        for block in subset:
            for j, w in enumerate(value_weights):
                _add_link(links, line(block, j, 0), phase_line, w, d)
    return WireInstance("resource", tuple(int(w) for w in wires), params, code, tuple(roles), links)


# ---------------------------------------------------------------------------
# Running and settling an instance
# ---------------------------------------------------------------------------


@dataclass
class InstanceOutcome:
    """An instance after the prover settled it into ABE blocks.

    `key` and `residual` cover the copy-0 lines only, block by block. The
    register is kept on the statevector backend, the residual on the frame
    backend.
    """

    instance: WireInstance
    run: LocalisingResult
    key: PauliOp
    syndrome_silent: bool
    transcript: Transcript
    register: Optional[StateVector] = None
    residual: Optional[PauliOp] = None

    @property
    def accepted(self) -> bool:
        return self.run.accepted


def frame_fidelity(result: LocalisingResult, residual: PauliOp, g: TrapifiedGraph) -> float:
    """Fidelity of a statevector run's register with residual·key·(honest output)."""
    expected = reference_output(g, result.secrets.assignment, result.pattern)
    expected = apply_pauli(apply_pauli(expected, result.key), residual)
    return state_fidelity(expected, result.register)


def _cross_check(result: LocalisingResult, residual: PauliOp, g: TrapifiedGraph) -> None:
    overlap = frame_fidelity(result, residual, g)
    if overlap < 1 - STATE_TOLERANCE:
        raise RuntimeError(
            f"Localised register deviates from the frame prediction (fidelity {overlap:.12f})"
        )


def _settle_register(
    instance: WireInstance,
    result: LocalisingResult,
    rng: np.random.Generator,
    transcript: Transcript,
) -> Tuple[PauliOp, StateVector, bool]:
    d = instance.d
    state = result.register
    labels = list(range(instance.line_count))
    key = result.key
    raw_phase = []
    for line in instance.phase_lines:
        raw, state = measure_computational(state, labels.index(line), rng)
        labels.remove(line)
        raw_phase.append(raw)
        y = (raw - key.x_exps[line]) % d
        zs = [0] * instance.line_count
        for target, w in instance.phase_targets(line):
            zs[target] = y * w
        key = pauli_mul(key, PauliOp(d, (0,) * instance.line_count, tuple(zs)))
    if raw_phase:
        transcript.receive_measurements("phase_outcomes", list(instance.phase_lines), raw_phase)
    decode = instance.decode_gates()
    for gate in decode:
        state = apply_gate(state, gate.shifted({s: labels.index(s) for s in gate.sites}))
    key = conjugate_circuit(decode, key)
    raw_syndrome = []
    for line in instance.syndrome_lines:
        raw, state = measure_computational(state, labels.index(line), rng)
        labels.remove(line)
        raw_syndrome.append(raw)
    if raw_syndrome:
        transcript.receive_measurements("syndrome_outcomes", instance.syndrome_lines, raw_syndrome)
    silent = all(
        (raw - key.x_exps[line]) % d == 0 for line, raw in zip(instance.syndrome_lines, raw_syndrome)
    )
    logical = instance.logical_lines
    register = state.permuted([labels.index(line) for line in logical])
    return key.restrict(logical), register, silent


def _settle_frame(
    instance: WireInstance, key: PauliOp, residual: PauliOp, transcript: Transcript
) -> Tuple[PauliOp, PauliOp, bool]:
    """Honest syndrome copies decode to |0>, so the report is key plus deviation."""
    d = instance.d
    decode = instance.decode_gates()
    key = conjugate_circuit(decode, key)
    residual = conjugate_circuit(decode, residual)
    syndrome = instance.syndrome_lines
    if syndrome:
        raw = [(key.x_exps[line] + residual.x_exps[line]) % d for line in syndrome]
        transcript.receive_measurements("syndrome_outcomes", syndrome, raw)
    silent = not any(residual.x_exps[line] for line in syndrome)
    logical = instance.logical_lines
    return key.restrict(logical), residual.restrict(logical), silent


def run_instance(
    instance: WireInstance,
    frame: Optional[PauliFrame] = None,
    rng: Optional[np.random.Generator] = None,
    backend: str = "statevector",
    assignment: Optional[TrapAssignment] = None,
) -> InstanceOutcome:
    """Localise one instance under `frame`, then settle it; a fixed `assignment` skips the draw."""
    rng = rng if rng is not None else np.random.default_rng()
    d = instance.d
    if backend == "frame" and instance.phase_lines:
        raise ValueError("Cubic phase lines need the statevector backend")
    frame = frame or PauliFrame.empty(d)
    g = instance.skeleton
    assignment = assignment or draw_assignment(g, rng)
    pattern = instance.pattern(assignment)
    strategy = ProverStrategy.from_frame(frame) if frame.attacks else ProverStrategy.honest()
    secrets = draw_secrets(pattern, rng, assignment)
    result = run_localising(pattern, strategy, rng, backend=backend, secrets=secrets)
    predicted = propagate_frame(frame, pattern)
    settling = Transcript(phase="settling")
    if result.register is None:
        key, residual, silent = _settle_frame(instance, result.key, predicted.residual, settling)
        outcome = InstanceOutcome(instance, result, key, silent, settling, residual=residual)
    else:
        if predicted.is_pauli:
            _cross_check(result, predicted.residual, g)
        key, register, silent = _settle_register(instance, result, rng, settling)
        outcome = InstanceOutcome(instance, result, key, silent, settling, register=register)
    if VERBOSE_SESSIONS:
        console.log(
            f"[dim]{instance.kind} instance {instance.wires}: {instance.line_count} lines, "
            f"{result.indicator.value}, syndrome {'silent' if silent else 'fired'}[/dim]"
        )
    return outcome
