"""
Pauli Frame Analysis - twirling, attack propagation and detection probabilities.

A Pauli attack is a per-vertex PauliOp applied by the prover in the
measurement frame of each vertex (after rotation, before projection), or
directly on an output vertex. Its effect on an honest run is fully
determined by classical bookkeeping:
- an X part shifts the reported outcome, so a trap fires iff its X exponent
  is non-zero
- a shifted signal on a computation vertex leaves a Pauli error on the
  vertices the flow corrects, which either shifts later outcomes or ends up
  on the output as the residual Pauli
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from rich.console import Console

from amplification import AmplificationCode, blocks_corrupt, code_from_name
from config import DEFAULT_SAMPLES, MAX_EXACT_ASSIGNMENTS, TRAP_SUBSET_SIZE, VERBOSE_SESSIONS
from graph_constructions import (
    TrapAssignment,
    TrapifiedGraph,
    all_assignments,
    draw_assignment,
    trapified_pattern,
)
from mbqc_pattern import MeasurementPattern
from qudit_algebra import (
    AngleVector,
    GateSpec,
    PauliOp,
    adapt_angle_under_pauli,
    all_paulis,
    conjugate_circuit,
    pauli_matrix,
    z_power_between,
)
from statevector import DensityMatrix

console = Console()


def twirl_sum(q: PauliOp, q2: PauliOp, rho: DensityMatrix) -> float:
    """Largest |entry| of Σ_P (P†QP) ρ (P†Q'P)† over the full Pauli group."""
    if q.n_sites != q2.n_sites or q.d != q2.d:
        raise ValueError("Q and Q' must act on the same register")
    if rho.d != q.d or rho.n_sites != q.n_sites:
        raise ValueError(
            f"State has {rho.n_sites} sites at d={rho.d}, Paulis act on {q.n_sites} sites at d={q.d}"
        )
    qm = pauli_matrix(q)
    q2m = pauli_matrix(q2)
    total = np.zeros_like(rho.matrix)
    for p in all_paulis(q.d, q.n_sites):
        pm = pauli_matrix(p)
        left = pm.conj().T @ qm @ pm
        right = pm.conj().T @ q2m @ pm
        total += left @ rho.matrix @ right.conj().T
    return float(np.abs(total).max())


@dataclass(frozen=True)
class PauliFrame:
    """Per-vertex single-site attack Paulis."""

    d: int
    attacks: Mapping[int, PauliOp]

    def __post_init__(self) -> None:
        for v, p in self.attacks.items():
            if p.n_sites != 1 or p.d != self.d:
                raise ValueError(f"Attack on vertex {v} must be a single-site Pauli at d={self.d}")

    @classmethod
    def empty(cls, d: int) -> "PauliFrame":
        return cls(d, {})

    @classmethod
    def from_exponents(cls, d: int, exps: Mapping[int, Tuple[int, int]]) -> "PauliFrame":
        return cls(d, {v: PauliOp(d, (x,), (z,)) for v, (x, z) in exps.items() if x % d or z % d})

    @classmethod
    def random(
        cls,
        g: TrapifiedGraph,
        d: int,
        footprint: int,
        rng: np.random.Generator,
        z_density: float = 0.5,
    ) -> "PauliFrame":
        """`footprint` X-type attacks on distinct primary vertices plus random Z noise elsewhere."""
        primaries = [v for members in g.partition for v in members]
        if footprint > len(primaries):
            raise ValueError(f"Footprint {footprint} exceeds the {len(primaries)} trapified vertices")
        hit = set(int(v) for v in rng.choice(primaries, size=footprint, replace=False))
        exps: Dict[int, Tuple[int, int]] = {}
        for v in sorted(g.graph.nodes):
            if v in hit:
                exps[v] = (int(rng.integers(1, d)), int(rng.integers(d)))
            elif v not in g.output_vertices and rng.random() < z_density:
                exps[v] = (0, int(rng.integers(1, d)))
        return cls.from_exponents(d, exps)

    def exponents(self, v: int) -> Tuple[int, int]:
        p = self.attacks.get(v)
        return (0, 0) if p is None else (p.x_exps[0], p.z_exps[0])

    def footprint(self, region: Optional[set] = None) -> int:
        """Sites in `region` (all sites by default) whose attack has an X or Y component."""
        return sum(
            1 for v, p in self.attacks.items() if p.x_exps[0] and (region is None or v in region)
        )

    def subset_footprints(self, g: TrapifiedGraph) -> List[int]:
        return [self.footprint(set(members)) for members in g.partition]


@dataclass(frozen=True)
class FrameOutcome:
    """Classical effect of a Pauli attack on an honest run.

    When an X error reaches a vertex measured at a non-Clifford vector the
    effect is no longer a Pauli: `non_pauli` names that vertex, propagation
    stops there and `residual` is None.
    """

    flips: Mapping[int, bool]
    residual: Optional[PauliOp]
    signal_shifts: Mapping[int, int]
    non_pauli: Tuple[int, ...] = ()

    @property
    def trap_fired(self) -> bool:
        return any(self.flips.values())

    @property
    def is_pauli(self) -> bool:
        return not self.non_pauli


def propagate_frame(frame: PauliFrame, pattern: MeasurementPattern) -> FrameOutcome:
    """Trap flips, output residual and per-vertex signal shifts of an attacked honest run."""
    d = pattern.d
    known = set(pattern.graph.vertices)
    unknown = [v for v in frame.attacks if v not in known]
    if unknown:
        raise ValueError(f"Attack on vertices outside the graph: {sorted(unknown)}")
    x_targets: Dict[int, List[int]] = {}
    z_targets: Dict[int, List[int]] = {}
    for v in pattern.graph.vertices:
        for u in pattern.dx[v]:
            x_targets.setdefault(u, []).append(v)
        for u in pattern.dz[v]:
            z_targets.setdefault(u, []).append(v)
    errors: Dict[int, List[int]] = {v: [0, 0] for v in pattern.graph.vertices}
    flips: Dict[int, bool] = {}
    shifts: Dict[int, int] = {}
    for v in pattern.order:
        role = pattern.roles[v]
        if role == "dummy":
            continue
        ex, ez = errors[v]
        ax, _ = frame.exponents(v)
        t = 0
        if ex or ez:
            base = pattern.angles[v]
            t = z_power_between(base, adapt_angle_under_pauli(base, ex, ez))
            if t is None:
                return FrameOutcome(flips, None, shifts, (v,))
        shift = (t + ax) % d
        shifts[v] = shift
        if role == "trap":
            flips[v] = shift != 0
            continue
        if not shift:
            continue
        for y in x_targets.get(v, ()):
            errors[y][0] += shift
        for y in z_targets.get(v, ()):
            errors[y][1] += pattern.signal_weight(v) * shift
    xs, zs = [], []
    for o in pattern.outputs:
        ax, az = frame.exponents(o)
        xs.append(errors[o][0] + ax)
        zs.append(errors[o][1] + az)
    return FrameOutcome(flips, PauliOp(d, tuple(xs), tuple(zs)), shifts)


# ---------------------------------------------------------------------------
# Detection probabilities
# ---------------------------------------------------------------------------


CorruptPredicate = Callable[[PauliFrame, TrapAssignment], bool]


def basis_frame(residual: PauliOp) -> PauliOp:
    """Residual as seen after the public Fourier gate on every output line."""
    return conjugate_circuit([GateSpec("F", (i,)) for i in range(residual.n_sites)], residual)


def residual_corrupts(
    g: TrapifiedGraph,
    d: int,
    code: AmplificationCode,
    path_angles: Optional[Sequence[AngleVector]] = None,
) -> CorruptPredicate:
    """Corruption judged on the propagated residual of each placement, decoded by `code`.

    A frame whose effect stops being Pauli counts as corrupting.
    """

    def corrupt(frame: PauliFrame, assignment: TrapAssignment) -> bool:
        outcome = propagate_frame(frame, trapified_pattern(g, assignment, d, path_angles))
        if not outcome.is_pauli:
            return True
        return blocks_corrupt(code, basis_frame(outcome.residual))

    return corrupt


@dataclass
class DetectionReport:
    mode: str
    p_bad: float
    p_silent: float
    bound: float
    footprint: int
    subset_footprints: List[int]
    c_prime: float
    d1: int
    samples: int = 0
    stderr: float = 0.0
    notes: List[str] = field(default_factory=list)

    def within_bound(self, sigmas: float = 4.0) -> bool:
        return self.p_bad <= self.bound + sigmas * self.stderr + 1e-12

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "p_bad": self.p_bad,
            "p_silent": self.p_silent,
            "bound": self.bound,
            "footprint": self.footprint,
            "subset_footprints": list(self.subset_footprints),
            "c_prime": self.c_prime,
            "d1": self.d1,
            "samples": self.samples,
            "stderr": self.stderr,
        }


def traps_silent(frame: PauliFrame, g: TrapifiedGraph, assignment: TrapAssignment) -> bool:
    for gamma, members in enumerate(g.partition):
        trap = members[assignment.trap_positions[gamma]]
        if frame.exponents(trap)[0]:
            return False
    return True


def assignment_count(g: TrapifiedGraph) -> int:
    return math.prod(len(m) * (len(m) - 1) for m in g.partition)


def accept_and_corrupt(
    frame: PauliFrame,
    g: TrapifiedGraph,
    mode: str = "exact",
    code: Optional[AmplificationCode] = None,
    corrupt: Optional[CorruptPredicate] = None,
    rng: Optional[np.random.Generator] = None,
    samples: int = DEFAULT_SAMPLES,
) -> DetectionReport:
    """Pr[every trap silent and the frame corrupts the output] over trap placements."""
    if mode not in ("exact", "mc"):
        raise ValueError(f"Unknown mode {mode!r}; expected 'exact' or 'mc'")
    sizes = {len(m) for m in g.partition}
    if sizes != {TRAP_SUBSET_SIZE}:
        raise ValueError(f"Every S_γ must have {TRAP_SUBSET_SIZE} members, got sizes {sorted(sizes)}")
    code = code or code_from_name("repetition", g.lines)
    corrupt = corrupt or residual_corrupts(g, frame.d, code)
    c_prime = 1.0 / TRAP_SUBSET_SIZE
    region = {v for members in g.partition for v in members}
    w = frame.footprint(region)
    report = DetectionReport(
        mode=mode,
        p_bad=0.0,
        p_silent=0.0,
        bound=(1 - c_prime) ** w,
        footprint=w,
        subset_footprints=frame.subset_footprints(g),
        c_prime=c_prime,
        d1=code.distance,
    )
    if mode == "exact" and assignment_count(g) > MAX_EXACT_ASSIGNMENTS:
        report.notes.append(
            f"{assignment_count(g)} assignments exceed {MAX_EXACT_ASSIGNMENTS}; sampled instead"
        )
        mode = report.mode = "mc"
    if mode == "exact":
        cases = all_assignments(g)
        silent = bad = 0
        for assignment in cases:
            if traps_silent(frame, g, assignment):
                silent += 1
                if corrupt(frame, assignment):
                    bad += 1
        report.p_silent = silent / len(cases)
        report.p_bad = bad / len(cases)
        report.samples = len(cases)
        return report
    rng = rng if rng is not None else np.random.default_rng()
    silent = bad = 0
    for _ in range(samples):
        assignment = draw_assignment(g, rng)
        if traps_silent(frame, g, assignment):
            silent += 1
            if corrupt(frame, assignment):
                bad += 1
    report.p_silent = silent / samples
    report.p_bad = bad / samples
    report.samples = samples
    report.stderr = math.sqrt(max(report.p_bad * (1 - report.p_bad), 1.0 / samples) / samples)
    if VERBOSE_SESSIONS:
        console.log(f"[dim]accept_and_corrupt: footprint {w}, p_bad {report.p_bad:.4f} over {samples} draws[/dim]")
    return report


@dataclass(frozen=True)
class EpsilonBudget:
    eps1: float
    eps2: float
    c: float
    inverse_c_power: float

    @property
    def eps(self) -> float:
        return self.eps1 + self.eps2

    def to_dict(self) -> dict:
        return {
            "eps1": self.eps1,
            "eps2": self.eps2,
            "eps": self.eps,
            "c": self.c,
            "inverse_c_power": self.inverse_c_power,
        }


def epsilon_budget(d1: int, d2: int, c_prime: float) -> EpsilonBudget:
    """ε₁ = √((1−c′)^d1), ε₂ = 2^−d2; also reports c = (1−c′)^−½ and 1/c^d1."""
    if d1 < 0:
        raise ValueError(f"d1 must be non-negative, got {d1}")
    if d2 < 1:
        raise ValueError(f"d2 must be at least 1, got {d2}")
    if not 0 < c_prime < 1:
        raise ValueError(f"c' must lie strictly between 0 and 1, got {c_prime}")
    eps1 = math.sqrt((1 - c_prime) ** d1)
    c = (1 - c_prime) ** -0.5
    return EpsilonBudget(eps1, 2.0 ** -d2, c, 1 / c ** d1)
