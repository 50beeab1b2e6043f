import networkx as nx
import pytest

from mbqc_pattern import (
    Flow,
    GraphRegister,
    OpenGraph,
    build_pattern,
    execute_pattern,
    line_pattern,
    output_correction,
    pattern_from_json,
    pattern_to_json,
    teleportation_step,
    verify_flow,
)
from qudit_algebra import AngleVector, PauliOp, clock_matrix
from statevector import StateVector, plus_state, state_fidelity


def _expected_line_output(psi: StateVector, angles) -> StateVector:
    vec = psi.amps
    for v in angles:
        vec = teleportation_step(v) @ vec
    return StateVector(psi.d, 1, vec)


@pytest.mark.parametrize("d", [2, 3, 5])
@pytest.mark.parametrize("length", [1, 2, 3])
def test_line_pattern_implements_teleportation_steps(d, length, rng):
    for _ in range(5):
        angles = [AngleVector.random(d, rng) for _ in range(length)]
        psi = StateVector.random(d, 1, rng)
        out = execute_pattern(line_pattern(d, angles), input_state=psi, rng=rng)
        assert state_fidelity(out, _expected_line_output(psi, angles)) == pytest.approx(1.0)


def test_forced_outcomes_give_the_same_output(rng):
    d = 5
    angles = [AngleVector.random(d, rng) for _ in range(2)]
    psi = StateVector.random(d, 1, rng)
    pattern = line_pattern(d, angles)
    expected = _expected_line_output(psi, angles)
    for forced in ({0: 0, 1: 0}, {0: 3, 1: 1}, {0: 4, 1: 2}):
        out = execute_pattern(pattern, input_state=psi, rng=rng, forced=forced)
        assert state_fidelity(out, expected) == pytest.approx(1.0)


def test_line_dependencies():
    pattern = line_pattern(3, [AngleVector.zero(3)] * 3)
    assert pattern.order == (0, 1, 2)
    assert pattern.dx[2] == frozenset({1})
    assert pattern.dz[2] == frozenset({0})
    assert pattern.dx[3] == frozenset({2})
    assert pattern.dz[3] == frozenset({1})


def test_output_correction_undoes_byproduct():
    pattern = line_pattern(5, [AngleVector.zero(5)])
    correction = output_correction(1, pattern, {0: 2})
    byproduct = PauliOp(5, (-2,), (0,))
    assert correction.without_phase() == byproduct.inverse().without_phase()
    assert correction.x_exps == (2,)


def test_verify_flow_detects_broken_order():
    graph = OpenGraph(nx.path_graph(3), (0,), (2,))
    good = Flow({0: 1, 1: 2}, {0: 0, 1: 1, 2: 2})
    bad = Flow({0: 1, 1: 2}, {0: 1, 1: 0, 2: 2})
    assert verify_flow(graph, good)
    assert not verify_flow(graph, bad)


def test_verify_flow_needs_a_map_for_every_non_output():
    graph = OpenGraph(nx.path_graph(3), (0,), (2,))
    with pytest.raises(ValueError):
        verify_flow(graph, Flow({0: 1}, {0: 0, 1: 1, 2: 2}))


def test_traps_must_use_zero_angle():
    graph = OpenGraph(nx.path_graph(3), (0,), (2,))
    flow = Flow({0: 1, 1: 2}, {0: 0, 1: 1, 2: 2})
    roles = {0: "computation", 1: "computation", 2: "output"}
    build_pattern(3, graph, flow, {0: AngleVector(3, 1)}, roles)
    with pytest.raises(ValueError):
        build_pattern(
            3,
            OpenGraph(nx.path_graph(3), (0,), (2,)),
            flow,
            {0: AngleVector(3, 1)},
            {0: "trap", 1: "computation", 2: "output"},
        )


def test_output_role_must_match_outputs():
    graph = OpenGraph(nx.path_graph(2), (0,), (1,))
    flow = Flow({0: 1}, {0: 0, 1: 1})
    with pytest.raises(ValueError):
        build_pattern(3, graph, flow, roles={0: "output", 1: "output"})


def test_pattern_json_preserves_structure(rng):
    pattern = line_pattern(5, [AngleVector.random(5, rng) for _ in range(3)])
    restored = pattern_from_json(pattern_to_json(pattern))
    assert restored.order == pattern.order
    assert dict(restored.angles) == dict(pattern.angles)
    assert dict(restored.dx) == dict(pattern.dx)


def test_graph_register_builds_lazily(rng):
    d = 3
    register = GraphRegister(d, nx.path_graph(4), lambda _v: plus_state(d))
    register.measure(0, AngleVector.zero(d), rng)
    # measuring 0 only needs its neighbour alive
    assert register.labels == [1]
    register.measure(1, AngleVector.zero(d), rng)
    register.measure(2, AngleVector.zero(d), rng)
    assert register.finish([3]).n_sites == 1
    assert register.peak_sites == 2
    with pytest.raises(RuntimeError):
        register.measure(0, AngleVector.zero(d), rng)


def test_classical_vertices_never_join_the_register(rng):
    d = 3
    register = GraphRegister(d, nx.path_graph(3), lambda _v: plus_state(d), classical={1: 2})
    assert register.measure(1, AngleVector.random(d, rng), rng, forced=4) == 1
    assert register.labels == []
    assert register.peak_sites == 0
    # CZ with |2> leaves Z² on both neighbours
    local = clock_matrix(d, 2) @ plus_state(d)
    expected = StateVector.from_local_states(d, [local, local])
    assert state_fidelity(register.finish([0, 2]), expected) == pytest.approx(1.0)
    assert register.peak_sites == 2
    with pytest.raises(RuntimeError):
        register.measure(1, AngleVector.zero(d), rng)
