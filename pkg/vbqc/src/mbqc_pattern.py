"""
MBQC Pattern - open graphs, flows, measurement patterns and honest execution.

Execution builds the graph state lazily: a vertex is prepared when first
needed and its CZ edges are applied just before it is measured, so the live
register stays small on line-like graphs. Measured vertices are removed.

A pattern may also carry link vertices: degree-two vertices outside the
flow, measured before both neighbours at the quadratic vector of
link_angle(d, w). Measuring one leaves CZ^w between its neighbours, a fixed
local phase that link_compensation folds into the neighbours' vectors, and
the byproduct Z^{w·s} on both, so a link counts its signal with weight -w
in their Z corrections. Odd d only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from qudit_algebra import (
    AngleVector,
    GateSpec,
    PauliOp,
    adapt_angle_under_pauli,
    clock_matrix,
    gate_matrix,
    rotation_matrix,
)
from statevector import (
    DensityMatrix,
    StateVector,
    apply_local,
    check_ceiling,
    fourier_matrix,
    measure_computational,
    measurement_unitary,
    partial_trace,
    plus_state,
)


ROLES = ("computation", "trap", "dummy", "output")


@dataclass(frozen=True)
class OpenGraph:
    graph: nx.Graph
    inputs: Tuple[int, ...]
    outputs: Tuple[int, ...]

    def __post_init__(self) -> None:
        vertices = set(self.graph.nodes)
        if not set(self.inputs) <= vertices or not set(self.outputs) <= vertices:
            raise ValueError("Inputs and outputs must be graph vertices")
        if any(u == v for u, v in self.graph.edges):
            raise ValueError("Open graphs may not contain self-loops")

    @property
    def vertices(self) -> List[int]:
        return sorted(self.graph.nodes)

    def neighbors(self, v: int) -> List[int]:
        return sorted(self.graph.neighbors(v))

    def non_outputs(self) -> List[int]:
        outs = set(self.outputs)
        return [v for v in self.vertices if v not in outs]

    def induced(self, keep: Iterable[int]) -> "OpenGraph":
        keep = set(keep)
        sub = self.graph.subgraph(keep).copy()
        return OpenGraph(
            sub,
            tuple(v for v in self.inputs if v in keep),
            tuple(v for v in self.outputs if v in keep),
        )


@dataclass(frozen=True)
class Flow:
    """Flow map f: O^c -> I^c with the partial order stored as integer levels (x ⪯ y iff level x < level y)."""

    f: Mapping[int, int]
    levels: Mapping[int, int]

    def precedes(self, x: int, y: int) -> bool:
        return self.levels[x] < self.levels[y]


def verify_flow(g: OpenGraph, fl: Flow, exempt: Iterable[int] = ()) -> bool:
    """True iff F0-F2 hold for every non-output vertex outside `exempt`."""
    inputs = set(g.inputs)
    exempt = set(exempt)
    for x in g.non_outputs():
        if x in exempt:
            continue
        if x not in fl.f:
            raise ValueError(f"Flow map is not defined on non-output vertex {x}")
        fx = fl.f[x]
        if fx not in g.graph or fx in inputs:
            raise ValueError(f"Flow maps {x} to {fx}, outside the non-input vertices")
        missing = [v for v in (x, fx, *g.graph.neighbors(fx)) if v not in fl.levels]
        if missing:
            raise ValueError(f"Flow order has no level for vertices {missing}")
        if not g.graph.has_edge(x, fx):
            return False
        if not fl.precedes(x, fx):
            return False
        for y in g.graph.neighbors(fx):
            if y != x and not fl.precedes(x, y):
                return False
    return True


def dependencies_from_flow(
    g: OpenGraph, fl: Flow, links: Iterable[int] = ()
) -> Tuple[Dict[int, FrozenSet[int]], Dict[int, FrozenSet[int]]]:
    """Per-vertex sets of earlier vertices whose outcomes feed its X and Z corrections."""
    links = set(links)
    dx: Dict[int, set] = {v: set() for v in g.vertices}
    dz: Dict[int, set] = {v: set() for v in g.vertices}
    for e in links:
        for y in g.graph.neighbors(e):
            dz[y].add(e)
    for i in g.non_outputs():
        if i in links:
            continue
        fi = fl.f[i]
        dx[fi].add(i)
        for y in g.graph.neighbors(fi):
            if y != i:
                dz[y].add(i)
    return (
        {v: frozenset(s) for v, s in dx.items()},
        {v: frozenset(s) for v, s in dz.items()},
    )


@dataclass(frozen=True)
class MeasurementPattern:
    d: int
    graph: OpenGraph
    flow: Flow
    roles: Mapping[int, str]
    angles: Mapping[int, AngleVector]
    dx: Mapping[int, FrozenSet[int]]
    dz: Mapping[int, FrozenSet[int]]
    order: Tuple[int, ...]
    links: Mapping[int, int] = field(default_factory=dict)
    # known Pauli (x, z) each output carries on top of the intended state
    offsets: Mapping[int, Tuple[int, int]] = field(default_factory=dict)

    @property
    def outputs(self) -> Tuple[int, ...]:
        return self.graph.outputs

    def signal_weight(self, u: int) -> int:
        """Coefficient of u's signal in the corrections that depend on it."""
        return -self.links[u] if u in self.links else 1

    def effective_graph(self) -> OpenGraph:
        return self.graph.induced(v for v, r in self.roles.items() if r in ("computation", "output"))

    def vertices_with_role(self, role: str) -> List[int]:
        return [v for v in self.graph.vertices if self.roles[v] == role]


def _check_link_weight(d: int, w: int) -> int:
    if d == 2:
        raise ValueError("Link vertices need an odd prime dimension")
    if w % d == 0:
        raise ValueError(f"Link weight must be non-zero mod {d}")
    return w % d


def link_angle(d: int, w: int) -> AngleVector:
    """Vector (-b/2, b, 0) with b = 1/w; its Gauss sum leaves CZ^w and no fixed Z."""
    b = pow(_check_link_weight(d, w), -1, d)
    return AngleVector(d, -b * pow(2, -1, d), b, 0)


def link_compensation(d: int, w: int) -> AngleVector:
    """Rotation equal to the phase ω^{w·k²/2} a weight-w link leaves on each neighbour."""
    w = _check_link_weight(d, w)
    return AngleVector(d, -w * pow(2, -1, d), w, 0)


def _check_links(
    d: int, effective: OpenGraph, flow: Flow, links: Mapping[int, int], roles: Mapping[int, str]
) -> None:
    for e, w in links.items():
        _check_link_weight(d, w)
        if roles.get(e) != "computation":
            raise ValueError(f"Link vertex {e} must be a computation vertex")
        if e in effective.inputs or effective.graph.degree(e) != 2:
            raise ValueError(f"Link vertex {e} must join exactly two computation vertices")
        for y in effective.graph.neighbors(e):
            if y in links or not flow.precedes(e, y):
                raise ValueError(f"Link vertex {e} must be measured before its neighbour {y}")


def build_pattern(
    d: int,
    graph: OpenGraph,
    flow: Flow,
    angles: Optional[Mapping[int, AngleVector]] = None,
    roles: Optional[Mapping[int, str]] = None,
    links: Optional[Mapping[int, int]] = None,
    offsets: Optional[Mapping[int, Tuple[int, int]]] = None,
) -> MeasurementPattern:
    """Assemble a pattern; flow and dependencies live on the computation+output subgraph."""
    outputs = set(graph.outputs)
    roles = dict(roles) if roles is not None else {
        v: "output" if v in outputs else "computation" for v in graph.vertices
    }
    for v, role in roles.items():
        if role not in ROLES:
            raise ValueError(f"Unknown role {role!r} for vertex {v}")
        if (role == "output") != (v in outputs):
            raise ValueError(f"Vertex {v}: output role must coincide with the output set")
    if set(roles) != set(graph.vertices):
        raise ValueError("Every vertex needs a role")
    full_angles = {v: AngleVector.zero(d) for v in graph.vertices}
    for v, angle in (angles or {}).items():
        if roles[v] in ("trap", "dummy") and angle != AngleVector.zero(d):
            raise ValueError(f"Traps and dummies are measured at angle zero (vertex {v})")
        full_angles[v] = angle
    effective = graph.induced(v for v, r in roles.items() if r in ("computation", "output"))
    links = {e: w % d for e, w in (links or {}).items()}
    _check_links(d, effective, flow, links, roles)
    if not verify_flow(effective, flow, exempt=links):
        raise ValueError("Flow conditions F0-F2 fail on the computation subgraph")
    dx, dz = dependencies_from_flow(effective, flow, links)
    for v in graph.vertices:
        dx.setdefault(v, frozenset())
        dz.setdefault(v, frozenset())
    offsets = {o: (x % d, z % d) for o, (x, z) in (offsets or {}).items()}
    if not set(offsets) <= outputs:
        raise ValueError(f"Offsets on non-output vertices {sorted(set(offsets) - outputs)}")
    measured = [v for v in graph.vertices if v not in outputs]
    order = tuple(sorted(measured, key=lambda v: (flow.levels[v], v)))
    return MeasurementPattern(d, graph, flow, roles, full_angles, dx, dz, order, links, offsets)


def byproduct_exponents(v: int, pattern: MeasurementPattern, signals: Mapping[int, int]) -> Tuple[int, int]:
    missing = [u for u in (*pattern.dx[v], *pattern.dz[v]) if u not in signals]
    if missing:
        raise ValueError(f"Vertex {v} depends on unmeasured vertices {sorted(missing)}")
    sx = sum(signals[u] for u in pattern.dx[v]) % pattern.d
    sz = sum(pattern.signal_weight(u) * signals[u] for u in pattern.dz[v]) % pattern.d
    return sx, sz


def actual_angle(i: int, pattern: MeasurementPattern, signals: Mapping[int, int]) -> AngleVector:
    sx, sz = byproduct_exponents(i, pattern, signals)
    return adapt_angle_under_pauli(pattern.angles[i], sx, sz)


def output_correction(o: int, pattern: MeasurementPattern, signals: Mapping[int, int]) -> PauliOp:
    """The inverse of the byproduct X^-sx Z^-sz left on output vertex o."""
    sx, sz = byproduct_exponents(o, pattern, signals)
    return PauliOp(pattern.d, (-sx % pattern.d,), (-sz % pattern.d,)).inverse()


def teleportation_step(v: AngleVector) -> np.ndarray:
    """Unitary F·Rotation(v)† realised by measuring one vertex of a line at vector v."""
    return fourier_matrix(v.d) @ rotation_matrix(v).conj().T


class GraphRegister:
    """Live statevector over a graph state that is built on demand.

    Vertices listed in `classical` are prepared in the given computational
    basis state. They stay off the register until they are measured or
    acted on: a CZ with |x> is the phase Z^x on the other end, so their edges
    are applied as Z powers on live neighbours (or queued for later ones).
    """

    def __init__(
        self,
        d: int,
        graph: nx.Graph,
        prepare: Callable[[int], np.ndarray],
        initial: Optional[StateVector] = None,
        initial_labels: Sequence[Hashable] = (),
        classical: Optional[Mapping[Hashable, int]] = None,
    ):
        self.d = d
        self.graph = graph
        self.prepare = prepare
        self.classical: Dict[Hashable, int] = dict(classical or {})
        self.pending_z: Dict[Hashable, int] = {}
        if initial is None:
            self.state = StateVector(d, 0, np.array([1.0 + 0j]))
            self.labels: List[Hashable] = []
        else:
            if initial.n_sites != len(initial_labels):
                raise ValueError("Initial state and labels disagree on site count")
            self.state = initial
            self.labels = list(initial_labels)
        self.applied_edges: set = set()
        self.measured: set = set()
        self.peak_sites = len(self.labels)

    def site(self, label: Hashable) -> int:
        return self.labels.index(label)

    def add_site(self, label: Hashable, local: np.ndarray) -> None:
        if label in self.labels or label in self.measured:
            raise ValueError(f"Site {label!r} already exists")
        check_ceiling(self.d, len(self.labels) + 1)
        self.state = self.state.append_site(local)
        self.labels.append(label)
        self.peak_sites = max(self.peak_sites, len(self.labels))

    def attach(self, labels: Sequence[Hashable], state: StateVector) -> None:
        """Tensor a prepared multi-site state onto the register."""
        if state.n_sites != len(labels):
            raise ValueError("Attached state and labels disagree on site count")
        clash = [label for label in labels if label in self.labels or label in self.measured]
        if clash:
            raise ValueError(f"Sites {clash} already exist")
        check_ceiling(self.d, len(self.labels) + len(labels))
        self.state = self.state.tensor(state)
        self.labels.extend(labels)
        self.peak_sites = max(self.peak_sites, len(self.labels))

    def ensure_alive(self, v: Hashable) -> None:
        if v in self.measured:
            raise RuntimeError(f"Vertex {v!r} was already measured")
        if v not in self.labels:
            self.add_site(v, self.prepare(v))
            power = self.pending_z.pop(v, 0)
            if power % self.d:
                self.state = apply_local(self.state, clock_matrix(self.d, power), (self.site(v),))

    def _phase_from_classical(self, target: Hashable, power: int) -> None:
        if target in self.labels:
            self.state = apply_local(self.state, clock_matrix(self.d, power), (self.site(target),))
        elif target in self.measured:
            raise RuntimeError(f"Edge to {target!r} applied after it was measured")
        else:
            self.pending_z[target] = self.pending_z.get(target, 0) + power

    def ensure_entangled(self, v: Hashable) -> None:
        self.ensure_alive(v)
        if v not in self.graph:
            return
        cz = gate_matrix(GateSpec("CZ", (0, 1)), self.d)
        for u in sorted(self.graph.neighbors(v)):
            edge = frozenset((u, v))
            if edge in self.applied_edges:
                continue
            if u in self.classical or v in self.classical:
                # two basis states only pick up a global phase
                for c, q in ((u, v), (v, u)):
                    if c in self.classical and q not in self.classical:
                        self._phase_from_classical(q, self.classical[c])
            else:
                self.ensure_alive(u)
                self.state = apply_local(self.state, cz, (self.site(v), self.site(u)))
            self.applied_edges.add(edge)

    def apply(self, gate: GateSpec, labels: Sequence[Hashable]) -> None:
        """Apply a local gate whose sites index into `labels`."""
        for label in labels:
            self.ensure_entangled(label)
        sites = [self.site(labels[s]) for s in gate.sites]
        self.state = apply_local(self.state, gate_matrix(gate, self.d), sites)

    def measure(
        self,
        v: Hashable,
        angle: AngleVector,
        rng: np.random.Generator,
        forced: Optional[int] = None,
        frame_gates: Sequence[Tuple[GateSpec, Sequence[Hashable]]] = (),
    ) -> int:
        """Rotate v into the basis of `angle`, apply any gates acting in that frame, then project."""
        if v in self.classical and v not in self.labels and not frame_gates:
            return self._measure_classical(v, rng, forced)
        self.ensure_entangled(v)
        self.state = apply_local(self.state, measurement_unitary(angle), (self.site(v),))
        for gate, labels in frame_gates:
            self.apply(gate, labels)
        return self.measure_z(v, rng, forced)

    def _measure_classical(self, v: Hashable, rng: np.random.Generator, forced: Optional[int]) -> int:
        """A basis state overlaps every rotated basis vector with weight 1/d; it never joins the register."""
        if v in self.measured:
            raise RuntimeError(f"Vertex {v!r} was already measured")
        for u in sorted(self.graph.neighbors(v)) if v in self.graph else ():
            edge = frozenset((u, v))
            if edge in self.applied_edges:
                continue
            if u not in self.classical:
                self._phase_from_classical(u, self.classical[v])
            self.applied_edges.add(edge)
        self.pending_z.pop(v, None)
        self.measured.add(v)
        return int(rng.integers(self.d)) if forced is None else forced % self.d

    def measure_z(self, v: Hashable, rng: np.random.Generator, forced: Optional[int] = None) -> int:
        self.ensure_entangled(v)
        outcome, self.state = measure_computational(self.state, self.site(v), rng, forced)
        self.labels.remove(v)
        self.measured.add(v)
        return outcome

    def apply_global(self, gate: GateSpec) -> None:
        """Apply a gate whose sites are labels rather than positions."""
        local = gate.shifted({s: i for i, s in enumerate(gate.sites)})
        self.apply(local, list(gate.sites))

    def finish(self, labels: Sequence[Hashable]) -> StateVector:
        """Register restricted to `labels` (in that order); other live sites must be absent."""
        for label in labels:
            self.ensure_entangled(label)
        extra = [label for label in self.labels if label not in labels]
        if extra:
            raise RuntimeError(f"Register still holds sites {extra}; use finish_density")
        return self.state.permuted([self.site(label) for label in labels])

    def finish_density(self, labels: Sequence[Hashable]) -> DensityMatrix:
        for label in labels:
            self.ensure_entangled(label)
        order = list(labels) + [label for label in self.labels if label not in labels]
        state = self.state.permuted([self.site(label) for label in order])
        return partial_trace(state.to_density(), range(len(labels)))


def execute_pattern(
    pattern: MeasurementPattern,
    input_state: Optional[StateVector] = None,
    rng: Optional[np.random.Generator] = None,
    backend: str = "statevector",
    forced: Optional[Mapping[int, int]] = None,
) -> StateVector:
    """Honest execution; returns the corrected output register in pattern output order."""
    if backend != "statevector":
        raise ValueError(f"Pattern execution needs the statevector backend, got {backend!r}")
    rng = rng if rng is not None else np.random.default_rng()
    d = pattern.d
    inputs = pattern.graph.inputs
    if input_state is None:
        input_state = StateVector.plus(d, len(inputs))
    if input_state.n_sites != len(inputs):
        raise ValueError(f"Input state has {input_state.n_sites} sites, pattern has {len(inputs)} inputs")
    register = GraphRegister(d, pattern.graph.graph, lambda _v: plus_state(d), input_state, inputs)
    forced = forced or {}
    signals: Dict[int, int] = {}
    for v in pattern.order:
        signals[v] = register.measure(v, actual_angle(v, pattern, signals), rng, forced.get(v))
    out_labels = list(pattern.outputs)
    output = register.finish(out_labels)
    for idx, o in enumerate(out_labels):
        correction = output_correction(o, pattern, signals)
        output = apply_local(output, gate_matrix(GateSpec("PAULI", (0,), pauli=correction), d), (idx,))
    return output


# ---------------------------------------------------------------------------
# Standard patterns and JSON
# ---------------------------------------------------------------------------


def line_pattern(d: int, angles: Sequence[AngleVector]) -> MeasurementPattern:
    """Path 0-1-...-n with vertex i measured at angles[i]; implements Π F·Rotation(φ_i)†."""
    n = len(angles) + 1
    graph = OpenGraph(nx.path_graph(n), (0,), (n - 1,))
    flow = Flow({i: i + 1 for i in range(n - 1)}, {i: i for i in range(n)})
    return build_pattern(d, graph, flow, {i: a for i, a in enumerate(angles)})


def pattern_to_json(pattern: MeasurementPattern) -> dict:
    vertices = []
    for v in pattern.graph.vertices:
        vertices.append({
            "id": v,
            "role": pattern.roles[v],
            "angle": list(pattern.angles[v].as_tuple()),
            "neighbors": pattern.graph.neighbors(v),
            "dx": sorted(pattern.dx[v]),
            "dz": sorted(pattern.dz[v]),
            "level": pattern.flow.levels.get(v),
            "flow": pattern.flow.f.get(v),
            "link": pattern.links.get(v),
            "offset": list(pattern.offsets[v]) if v in pattern.offsets else None,
        })
    return {
        "d": pattern.d,
        "inputs": list(pattern.graph.inputs),
        "outputs": list(pattern.graph.outputs),
        "order": list(pattern.order),
        "vertices": vertices,
    }


def pattern_from_json(data: dict) -> MeasurementPattern:
    d = int(data["d"])
    graph = nx.Graph()
    for entry in data["vertices"]:
        graph.add_node(entry["id"])
        for u in entry["neighbors"]:
            graph.add_edge(entry["id"], u)
    open_graph = OpenGraph(graph, tuple(data["inputs"]), tuple(data["outputs"]))
    flow = Flow(
        {e["id"]: e["flow"] for e in data["vertices"] if e.get("flow") is not None},
        {e["id"]: e["level"] for e in data["vertices"] if e.get("level") is not None},
    )
    angles = {e["id"]: AngleVector(d, *e["angle"]) for e in data["vertices"]}
    roles = {e["id"]: e["role"] for e in data["vertices"]}
    links = {e["id"]: e["link"] for e in data["vertices"] if e.get("link") is not None}
    offsets = {e["id"]: tuple(e["offset"]) for e in data["vertices"] if e.get("offset") is not None}
    return build_pattern(d, open_graph, flow, angles, roles, links, offsets)
