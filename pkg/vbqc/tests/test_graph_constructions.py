import numpy as np
import pytest

from graph_constructions import (
    all_assignments,
    assign_roles,
    attach_gadgets,
    build_dotted_complete,
    build_reduced,
    computation_path,
    dotted_complete_size,
    draw_assignment,
    path_length,
    skeleton_to_json,
    trapified_pattern,
)
from qudit_algebra import AngleVector


def test_dotted_complete_single_triple():
    g = build_dotted_complete(1)
    assert g.graph.number_of_nodes() == 6
    assert g.graph.number_of_edges() == 6
    assert g.partition == ((0, 1, 2),)
    assert all(g.graph.degree(e) == 2 for e in g.edge_vertices)


def test_dotted_complete_is_subdivided_complete_graph():
    g = build_dotted_complete(2)
    assert len(g.edge_vertices) == 15
    assert g.graph.number_of_nodes() == 6 + 15


def test_reduced_links_consecutive_triples_only():
    g = build_reduced(3)
    assert len(g.edge_vertices) == 18
    for u, v in g.edge_vertices.values():
        assert abs(u // 3 - v // 3) == 1


def test_gadgets_hang_off_the_output_triple():
    g = attach_gadgets(build_reduced(2))
    (gadget,) = g.gadgets
    assert gadget.subset == 1
    assert [sorted(g.graph.neighbors(r)) for r in gadget.first_row] == [
        sorted([member, gadget.bottom]) for member in g.partition[1]
    ]
    assert g.output_vertices == (gadget.bottom,)
    with pytest.raises(ValueError):
        attach_gadgets(g)


@pytest.mark.parametrize("m_prime", [1, 2, 3])
def test_dotted_complete_size_counts_gadgets(m_prime):
    g = attach_gadgets(build_dotted_complete(m_prime))
    assert dotted_complete_size(m_prime) == g.vertex_count


def test_assignments_are_uniform_over_ordered_pairs(rng):
    g = build_reduced(2)
    assert len(all_assignments(g)) == 36
    counts = {}
    for _ in range(6000):
        a = draw_assignment(g, rng)
        key = (a.trap_positions[0], a.computation_positions[0])
        counts[key] = counts.get(key, 0) + 1
    assert set(counts) == {(t, c) for t in range(3) for c in range(3) if t != c}
    assert max(counts.values()) - min(counts.values()) < 200


def test_roles_per_triple(rng):
    g = attach_gadgets(build_reduced(3))
    assignment = draw_assignment(g, rng)
    roles = assign_roles(g, assignment)
    for members in g.partition:
        assert sorted(roles[v] for v in members) == ["computation", "dummy", "trap"]
    bridges = [e for e in g.edge_vertices if roles[e] == "computation"]
    assert len(bridges) == 2
    assert roles[g.gadgets[0].bottom] == "output"


def test_roles_need_gadgets(rng):
    g = build_reduced(1)
    with pytest.raises(ValueError):
        assign_roles(g, draw_assignment(g, rng))


def test_computation_path_is_a_path(rng):
    g = attach_gadgets(build_reduced(3))
    assignment = draw_assignment(g, rng)
    path = computation_path(g, assignment)
    assert len(path) == path_length(g) + 2
    for u, v in zip(path, path[1:]):
        assert g.graph.has_edge(u, v)


def test_trapified_pattern_places_angles_on_the_path(rng):
    d = 3
    g = attach_gadgets(build_reduced(2))
    assignment = draw_assignment(g, rng)
    angles = [AngleVector.random(d, rng) for _ in range(path_length(g))]
    pattern = trapified_pattern(g, assignment, d, angles)
    path = computation_path(g, assignment)
    assert [pattern.angles[v] for v in path[:-2]] == angles
    for v in pattern.vertices_with_role("trap") + pattern.vertices_with_role("dummy"):
        assert pattern.angles[v] == AngleVector.zero(d)
    assert set(pattern.order) == set(g.graph.nodes) - set(g.output_vertices)
    with pytest.raises(ValueError):
        trapified_pattern(g, assignment, d, angles[:-1])


def test_skeleton_export_is_public_only():
    g = attach_gadgets(build_dotted_complete(1))
    data = skeleton_to_json(g)
    assert data["partition"] == [[0, 1, 2]]
    assert len(data["vertices"]) == 10
    assert "roles" not in data
    assert np.all([v["level"] is not None for v in data["vertices"]])
