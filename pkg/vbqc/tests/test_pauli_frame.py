import pytest

from amplification import IdentityCode
from graph_constructions import (
    TrapAssignment,
    attach_gadgets,
    build_reduced,
    computation_path,
    draw_assignment,
    trapified_pattern,
)
from pauli_frame import (
    PauliFrame,
    accept_and_corrupt,
    assignment_count,
    basis_frame,
    epsilon_budget,
    propagate_frame,
    residual_corrupts,
    traps_silent,
    twirl_sum,
)
from qudit_algebra import PauliOp
from statevector import StateVector


@pytest.mark.parametrize("d", [2, 3])
def test_twirl_cancels_distinct_paulis(d, rng):
    for _ in range(25):
        q = PauliOp.random(d, 1, rng, with_phase=False)
        q2 = PauliOp.random(d, 1, rng, with_phase=False)
        if q2 == q:
            continue
        rho = StateVector.random(d, 1, rng).to_density()
        assert twirl_sum(q, q2, rho) < 1e-10


def test_twirl_keeps_equal_paulis(rng):
    q = PauliOp(3, (1,), (2,))
    rho = StateVector.random(3, 1, rng).to_density()
    assert twirl_sum(q, q, rho) > 0.1


def test_twirl_rejects_mismatched_register(rng):
    with pytest.raises(ValueError):
        twirl_sum(PauliOp.identity(3, 1), PauliOp.identity(3, 2), StateVector.random(3, 1, rng).to_density())


def test_frame_attacks_are_single_site():
    with pytest.raises(ValueError):
        PauliFrame(3, {0: PauliOp.identity(3, 2)})
    assert PauliFrame.from_exponents(3, {0: (0, 0), 1: (1, 0)}).attacks.keys() == {1}


def test_random_frame_footprint(rng):
    g = attach_gadgets(build_reduced(3))
    for footprint in range(5):
        frame = PauliFrame.random(g, 5, footprint, rng)
        region = {v for members in g.partition for v in members}
        assert frame.footprint(region) == footprint
        assert not set(frame.attacks) & set(g.output_vertices)
    with pytest.raises(ValueError):
        PauliFrame.random(g, 5, 10, rng)


def test_x_on_a_trap_fires_and_z_does_not(rng):
    d = 5
    g = attach_gadgets(build_reduced(2))
    assignment = draw_assignment(g, rng)
    pattern = trapified_pattern(g, assignment, d)
    trap = pattern.vertices_with_role("trap")[0]
    fired = propagate_frame(PauliFrame.from_exponents(d, {trap: (2, 0)}), pattern)
    quiet = propagate_frame(PauliFrame.from_exponents(d, {trap: (0, 3)}), pattern)
    assert fired.trap_fired and fired.flips[trap]
    assert not quiet.trap_fired
    assert quiet.residual.is_identity()


def test_x_on_the_computation_path_reaches_the_output(rng):
    d = 5
    g = attach_gadgets(build_reduced(1))
    assignment = draw_assignment(g, rng)
    pattern = trapified_pattern(g, assignment, d)
    first = computation_path(g, assignment)[0]
    outcome = propagate_frame(PauliFrame.from_exponents(d, {first: (1, 0)}), pattern)
    assert not outcome.trap_fired
    assert not outcome.residual.is_identity()


def test_dummy_attacks_are_harmless(rng):
    d = 3
    g = attach_gadgets(build_reduced(2))
    pattern = trapified_pattern(g, draw_assignment(g, rng), d)
    dummies = pattern.vertices_with_role("dummy")
    outcome = propagate_frame(PauliFrame.from_exponents(d, {v: (1, 1) for v in dummies}), pattern)
    assert not outcome.trap_fired
    assert outcome.residual.is_identity()


def test_unknown_vertex_attack(rng):
    g = attach_gadgets(build_reduced(1))
    pattern = trapified_pattern(g, draw_assignment(g, rng), 3)
    with pytest.raises(ValueError):
        propagate_frame(PauliFrame.from_exponents(3, {999: (1, 0)}), pattern)


def test_traps_silent_reads_the_trap_position():
    g = build_reduced(1)
    frame = PauliFrame.from_exponents(3, {0: (1, 0)})
    assert not traps_silent(frame, g, TrapAssignment((0,), (1,)))
    assert traps_silent(frame, g, TrapAssignment((1,), (0,)))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_exact_acceptance_of_one_x_per_triple(k):
    g = attach_gadgets(build_reduced(1, lines=k))
    frame = PauliFrame.from_exponents(2, {members[0]: (1, 0) for members in g.partition})
    report = accept_and_corrupt(frame, g, mode="exact")
    assert report.samples == assignment_count(g) == 6 ** k
    assert report.d1 == k
    assert report.p_silent == pytest.approx((2 / 3) ** k)
    assert report.p_bad == pytest.approx((1 / 3) ** k)
    assert report.bound == pytest.approx((2 / 3) ** k)
    assert report.within_bound()


def test_small_footprint_does_not_count_as_corrupting():
    g = attach_gadgets(build_reduced(1, lines=3))
    frame = PauliFrame.from_exponents(2, {0: (1, 0)})
    report = accept_and_corrupt(frame, g, mode="exact")
    assert report.p_bad == 0.0
    assert report.p_silent == pytest.approx(2 / 3)


@pytest.mark.parametrize("second, p_bad", [(1, 1 / 9), (2, 0.0)])
def test_corruption_reads_the_decoded_residual(second, p_bad):
    g = attach_gadgets(build_reduced(1, lines=2))
    frame = PauliFrame.from_exponents(3, {g.partition[0][0]: (1, 0), g.partition[1][0]: (second, 0)})
    report = accept_and_corrupt(frame, g, mode="exact")
    assert report.footprint == 2
    assert report.p_silent == pytest.approx(4 / 9)
    assert report.p_bad == pytest.approx(p_bad)


def test_residual_corrupts_on_a_single_line(rng):
    d = 5
    g = attach_gadgets(build_reduced(1))
    corrupt = residual_corrupts(g, d, IdentityCode())
    assignment = draw_assignment(g, rng)
    members = g.partition[0]
    comp = members[assignment.computation_positions[0]]
    used = {assignment.trap_positions[0], assignment.computation_positions[0]}
    dummy = next(members[j] for j in range(len(members)) if j not in used)
    assert corrupt(PauliFrame.from_exponents(d, {comp: (2, 0)}), assignment)
    assert not corrupt(PauliFrame.from_exponents(d, {comp: (0, 2)}), assignment)
    assert not corrupt(PauliFrame.from_exponents(d, {dummy: (1, 0)}), assignment)


def test_basis_frame_turns_z_into_x():
    seen = basis_frame(PauliOp(5, (0, 1), (3, 0)))
    assert seen.x_exps == (2, 0)
    assert seen.z_exps == (0, 1)


def test_sampled_acceptance_stays_within_bound(rng):
    g = attach_gadgets(build_reduced(1, lines=2))
    frame = PauliFrame.from_exponents(3, {members[1]: (2, 0) for members in g.partition})
    report = accept_and_corrupt(frame, g, mode="mc", rng=rng, samples=4000)
    assert report.within_bound()
    assert report.stderr > 0


def test_exact_falls_back_to_sampling_when_too_large(rng):
    g = attach_gadgets(build_reduced(8))
    frame = PauliFrame.from_exponents(2, {0: (1, 0)})
    report = accept_and_corrupt(frame, g, mode="exact", rng=rng, samples=200)
    assert report.mode == "mc"
    assert report.notes


def test_unknown_mode():
    g = attach_gadgets(build_reduced(1))
    with pytest.raises(ValueError):
        accept_and_corrupt(PauliFrame.empty(2), g, mode="guess")


def test_epsilon_budget():
    budget = epsilon_budget(10, 1, 1 / 3)
    assert budget.eps1 == pytest.approx(0.1317, abs=1e-4)
    assert budget.eps2 == 0.5
    assert budget.eps == pytest.approx(budget.eps1 + 0.5)
    assert budget.inverse_c_power == pytest.approx((2 / 3) ** 5)
    assert epsilon_budget(0, 3, 1 / 3).eps == pytest.approx(1.125)


@pytest.mark.parametrize("args", [(-1, 1, 1 / 3), (3, 0, 1 / 3), (3, 1, 0.0), (3, 1, 1.0)])
def test_epsilon_budget_rejects_bad_arguments(args):
    with pytest.raises(ValueError):
        epsilon_budget(*args)
