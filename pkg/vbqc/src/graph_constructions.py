"""
Graph Constructions - trapified skeletons for the localising protocol.

Each base vertex γ of a computation line owns a triple S_γ of primary
vertices. A skeleton may carry several disjoint lines, one per output qudit;
base vertices are numbered line by line. Primary vertices are joined by
subdivided edges (every pair in the dotted-complete graph, consecutive
triples of a line only in the reduced variant). Gadgets attach to the last
triple of every line, each converging on its own public bottom vertex.
A linked skeleton also joins the first triples of every pair of lines, so a
pattern can entangle its line inputs through weighted link vertices.

Secret role data (trap, computation and dummy positions) lives in a
TrapAssignment; the skeleton itself never depends on secrets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from config import TRAP_SUBSET_SIZE
from mbqc_pattern import (
    Flow,
    MeasurementPattern,
    OpenGraph,
    build_pattern,
    link_angle,
    link_compensation,
    teleportation_step,
)
from qudit_algebra import AngleVector, GateSpec, PauliOp, compose_angles, rotation_matrix
from statevector import StateVector, apply_gate, apply_local, apply_pauli, check_ceiling


@dataclass(frozen=True)
class Gadget:
    subset: int
    first_row: Tuple[int, ...]  # first_row[j] hangs off partition[subset][j]
    bottom: int


@dataclass(frozen=True)
class TrapifiedGraph:
    base: OpenGraph
    graph: nx.Graph
    partition: Tuple[Tuple[int, ...], ...]
    edge_vertices: Mapping[int, Tuple[int, int]]
    levels: Mapping[int, int]
    gadgets: Tuple[Gadget, ...] = ()
    reduced: bool = False
    lines: int = 1
    linked: bool = False

    @property
    def m_prime(self) -> int:
        return len(self.partition)

    @property
    def line_length(self) -> int:
        return self.m_prime // self.lines

    @property
    def subset_of(self) -> Dict[int, int]:
        return {v: gamma for gamma, members in enumerate(self.partition) for v in members}

    @property
    def output_vertices(self) -> Tuple[int, ...]:
        return tuple(g.bottom for g in self.gadgets)

    @property
    def vertex_count(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def output_subsets(self) -> Tuple[int, ...]:
        return tuple((line + 1) * self.line_length - 1 for line in range(self.lines))

    def line_subsets(self, line: int) -> range:
        return range(line * self.line_length, (line + 1) * self.line_length)


@dataclass(frozen=True)
class TrapAssignment:
    trap_positions: Tuple[int, ...]
    computation_positions: Tuple[int, ...]


def _skeleton(
    line_length: int, lines: int, pairs: Sequence[Tuple[int, int]], reduced: bool, linked: bool = False
) -> TrapifiedGraph:
    if line_length < 1:
        raise ValueError(f"m_prime must be at least 1, got {line_length}")
    if lines < 1:
        raise ValueError(f"A skeleton needs at least one line, got {lines}")
    if linked and lines < 2:
        raise ValueError("A linked skeleton needs at least two lines")
    k = TRAP_SUBSET_SIZE
    total = line_length * lines
    # links between line starts are measured first, so everything else moves up one level
    shift = 1 if linked else 0
    partition = tuple(tuple(range(k * gamma, k * gamma + k)) for gamma in range(total))
    graph = nx.Graph()
    levels: Dict[int, int] = {}
    for gamma, members in enumerate(partition):
        for v in members:
            graph.add_node(v)
            levels[v] = 2 * (gamma % line_length) + shift
    edge_vertices: Dict[int, Tuple[int, int]] = {}
    next_id = k * total
    for u, v in pairs:
        graph.add_edge(u, next_id)
        graph.add_edge(next_id, v)
        edge_vertices[next_id] = (u, v)
        pos_u, pos_v = (u // k) % line_length, (v // k) % line_length
        if linked and pos_u == pos_v == 0 and u // k != v // k:
            levels[next_id] = 0
        else:
            levels[next_id] = 2 * min(pos_u, pos_v) + 1 + shift
        next_id += 1
    base_graph = nx.Graph()
    base_graph.add_nodes_from(range(total))
    for line in range(lines):
        start = line * line_length
        base_graph.add_edges_from((start + i, start + i + 1) for i in range(line_length - 1))
    base = OpenGraph(
        base_graph,
        tuple(line * line_length for line in range(lines)),
        tuple((line + 1) * line_length - 1 for line in range(lines)),
    )
    return TrapifiedGraph(base, graph, partition, edge_vertices, levels, (), reduced, lines, linked)


def build_dotted_complete(m_prime: int, lines: int = 1, linked: bool = False) -> TrapifiedGraph:
    """K_{3m'} over the primary vertices of every line, with every edge subdivided."""
    primaries = range(TRAP_SUBSET_SIZE * m_prime * lines)
    return _skeleton(m_prime, lines, list(itertools.combinations(primaries, 2)), False, linked)


def build_reduced(m_prime: int, lines: int = 1, linked: bool = False) -> TrapifiedGraph:
    """Dotted lines: subdivided complete bipartite links between consecutive triples of a line.

    With `linked`, the first triples of every pair of lines are joined the
    same way, so a computation may entangle the line inputs.
    """
    k = TRAP_SUBSET_SIZE
    pairs = [
        (u, v)
        for line in range(lines)
        for gamma in range(line * m_prime, (line + 1) * m_prime - 1)
        for u in range(k * gamma, k * gamma + k)
        for v in range(k * (gamma + 1), k * (gamma + 1) + k)
    ]
    if linked:
        starts = [line * m_prime for line in range(lines)]
        pairs += [
            (u, v)
            for ga, gb in itertools.combinations(starts, 2)
            for u in range(k * ga, k * ga + k)
            for v in range(k * gb, k * gb + k)
        ]
    return _skeleton(m_prime, lines, pairs, True, linked)


def attach_gadgets(g: TrapifiedGraph) -> TrapifiedGraph:
    if g.gadgets:
        raise ValueError("Gadgets are already attached")
    graph = g.graph.copy()
    levels = dict(g.levels)
    next_id = max(graph.nodes) + 1
    row_level = max(levels.values()) + 1
    gadgets = []
    for gamma in g.output_subsets:
        row = []
        for member in g.partition[gamma]:
            graph.add_edge(member, next_id)
            levels[next_id] = row_level
            row.append(next_id)
            next_id += 1
        bottom = next_id
        next_id += 1
        for r in row:
            graph.add_edge(r, bottom)
        levels[bottom] = row_level + 1
        gadgets.append(Gadget(gamma, tuple(row), bottom))
    return replace(g, graph=graph, levels=levels, gadgets=tuple(gadgets))


def draw_assignment(g: TrapifiedGraph, rng: np.random.Generator) -> TrapAssignment:
    """Uniform trap position per S_γ, then a uniform computation position among the rest."""
    traps, comps = [], []
    for members in g.partition:
        size = len(members)
        t = int(rng.integers(size))
        rest = [j for j in range(size) if j != t]
        traps.append(t)
        comps.append(rest[int(rng.integers(len(rest)))])
    return TrapAssignment(tuple(traps), tuple(comps))


def all_assignments(g: TrapifiedGraph) -> List[TrapAssignment]:
    per_subset = [
        [(t, c) for t in range(len(m)) for c in range(len(m)) if c != t] for m in g.partition
    ]
    return [
        TrapAssignment(tuple(t for t, _ in combo), tuple(c for _, c in combo))
        for combo in itertools.product(*per_subset)
    ]


def assign_roles(
    g: TrapifiedGraph, assignment: TrapAssignment, linked_lines: Iterable[Tuple[int, int]] = ()
) -> Dict[int, str]:
    """Roles of every vertex; a bridge between two computation vertices is computation
    iff it sits on a line or joins the starts of a pair in `linked_lines`."""
    if not g.gadgets:
        raise ValueError("Attach gadgets before assigning roles")
    if len(assignment.trap_positions) != g.m_prime:
        raise ValueError("Assignment does not match the partition")
    linked = set()
    for pair in linked_lines:
        la, lb = sorted(pair)
        if la == lb or not 0 <= la < lb < g.lines:
            raise ValueError(f"Cannot link lines {pair} of a {g.lines}-line skeleton")
        if not g.linked:
            raise ValueError("Links between lines need a linked skeleton")
        linked.add(frozenset((la * g.line_length, lb * g.line_length)))
    roles: Dict[int, str] = {}
    comp_vertices = set()
    for gamma, members in enumerate(g.partition):
        for j, v in enumerate(members):
            if j == assignment.trap_positions[gamma]:
                roles[v] = "trap"
            elif j == assignment.computation_positions[gamma]:
                roles[v] = "computation"
                comp_vertices.add(v)
            else:
                roles[v] = "dummy"
    subset_of = g.subset_of
    for e, (u, v) in g.edge_vertices.items():
        su, sv = subset_of[u], subset_of[v]
        bridge = (
            u in comp_vertices
            and v in comp_vertices
            and (g.base.graph.has_edge(su, sv) or frozenset((su, sv)) in linked)
        )
        roles[e] = "computation" if bridge else "dummy"
    for gadget in g.gadgets:
        comp_j = assignment.computation_positions[gadget.subset]
        for j, r in enumerate(gadget.first_row):
            roles[r] = "computation" if j == comp_j else "dummy"
        roles[gadget.bottom] = "output"
    return roles


def computation_path(g: TrapifiedGraph, assignment: TrapAssignment, line: int = 0) -> List[int]:
    """Effective computation line: comp_0, bridge, comp_1, ..., comp_{m'-1}, gadget row vertex, bottom."""
    if not 0 <= line < g.lines:
        raise ValueError(f"Skeleton has {g.lines} line(s), no line {line}")
    comps = [g.partition[gamma][assignment.computation_positions[gamma]] for gamma in g.line_subsets(line)]
    bridges = {frozenset(uv): e for e, uv in g.edge_vertices.items()}
    path = [comps[0]]
    for i in range(1, len(comps)):
        path.append(bridges[frozenset((comps[i - 1], comps[i]))])
        path.append(comps[i])
    gadget = g.gadgets[line]
    path.append(gadget.first_row[assignment.computation_positions[gadget.subset]])
    path.append(gadget.bottom)
    return path


def computation_paths(g: TrapifiedGraph, assignment: TrapAssignment) -> List[List[int]]:
    return [computation_path(g, assignment, line) for line in range(g.lines)]


def line_angle_count(g: TrapifiedGraph) -> int:
    """Freely chosen angles along one line's path (gadget row excluded)."""
    return 2 * g.line_length - 1


def path_length(g: TrapifiedGraph) -> int:
    """Freely chosen angles over all lines, listed line by line."""
    return g.lines * line_angle_count(g)


def trapified_pattern(
    g: TrapifiedGraph,
    assignment: TrapAssignment,
    d: int,
    path_angles: Optional[Sequence[AngleVector]] = None,
    links: Optional[Mapping[Tuple[int, int], int]] = None,
    offsets: Optional[Mapping[int, Tuple[int, int]]] = None,
) -> MeasurementPattern:
    """Measurement pattern for the given secret placement and computation angles.

    `links` maps a pair of lines to the weight w of the CZ^w joining their
    inputs (zero weights are dropped). `offsets` maps a line to the known
    Pauli (x, z) its output carries.
    """
    links = {tuple(sorted(pair)): w % d for pair, w in (links or {}).items() if w % d}
    roles = assign_roles(g, assignment, links)
    paths = computation_paths(g, assignment)
    if path_angles is None:
        path_angles = [AngleVector.zero(d)] * path_length(g)
    if len(path_angles) != path_length(g):
        raise ValueError(f"Expected {path_length(g)} computation angles, got {len(path_angles)}")
    per_line = line_angle_count(g)
    angles: Dict[int, AngleVector] = {}
    f: Dict[int, int] = {}
    for line, path in enumerate(paths):
        angles.update(zip(path, path_angles[line * per_line : (line + 1) * per_line]))
        f.update({path[i]: path[i + 1] for i in range(len(path) - 1)})
    bridges = {frozenset(uv): e for e, uv in g.edge_vertices.items()}
    link_vertices: Dict[int, int] = {}
    for (la, lb), w in links.items():
        a, b = paths[la][0], paths[lb][0]
        e = bridges[frozenset((a, b))]
        link_vertices[e] = w
        angles[e] = link_angle(d, w)
        angles[a] = compose_angles(angles[a], link_compensation(d, w))
        angles[b] = compose_angles(angles[b], link_compensation(d, w))
    for line in offsets or {}:
        if not 0 <= line < g.lines:
            raise ValueError(f"Offset for line {line} of a {g.lines}-line skeleton")
    output_offsets = {paths[line][-1]: xz for line, xz in (offsets or {}).items()}
    open_graph = OpenGraph(g.graph, tuple(path[0] for path in paths), g.output_vertices)
    return build_pattern(
        d, open_graph, Flow(f, dict(g.levels)), angles, roles, link_vertices, output_offsets
    )


def reference_output(g: TrapifiedGraph, assignment: TrapAssignment, pattern: MeasurementPattern) -> StateVector:
    """Honest output in line order: |+> on every line input, the links, each line's
    teleportation steps, and the known offsets undone."""
    d = pattern.d
    paths = computation_paths(g, assignment)
    check_ceiling(d, len(paths))
    start_line = {path[0]: line for line, path in enumerate(paths)}
    state = StateVector.plus(d, len(paths))
    for e, w in sorted(pattern.links.items()):
        ends = [start_line[y] for y in pattern.effective_graph().neighbors(e)]
        state = apply_gate(state, GateSpec("CZ", tuple(ends), power=w))
        for line in ends:
            state = apply_local(state, rotation_matrix(link_compensation(d, w)), (line,))
    for line, path in enumerate(paths):
        unitary = np.eye(d, dtype=complex)
        for v in path[:-1]:
            unitary = teleportation_step(pattern.angles[v]) @ unitary
        state = apply_local(state, unitary, (line,))
    if pattern.offsets:
        zero = (0, 0)
        offset = PauliOp(
            d,
            tuple(pattern.offsets.get(path[-1], zero)[0] for path in paths),
            tuple(pattern.offsets.get(path[-1], zero)[1] for path in paths),
        )
        state = apply_pauli(state, offset.inverse())
    return state


def skeleton_to_json(g: TrapifiedGraph) -> dict:
    """Public skeleton export: vertices, neighbours, levels and the S_γ partition."""
    return {
        "reduced": g.reduced,
        "linked": g.linked,
        "lines": g.lines,
        "vertices": [
            {"id": v, "neighbors": sorted(g.graph.neighbors(v)), "level": g.levels[v]}
            for v in sorted(g.graph.nodes)
        ],
        "partition": [list(members) for members in g.partition],
        "gadgets": [
            {"subset": gd.subset, "first_row": list(gd.first_row), "bottom": gd.bottom}
            for gd in g.gadgets
        ],
        "outputs": list(g.output_vertices),
    }


def dotted_complete_size(m_prime: int, lines: int = 1) -> int:
    """Vertex count of the dotted-complete graph with a gadget on every line's output triple."""
    n = TRAP_SUBSET_SIZE * m_prime * lines
    return n + n * (n - 1) // 2 + (TRAP_SUBSET_SIZE + 1) * lines
