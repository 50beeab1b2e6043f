import itertools

import numpy as np
import pytest

from abe_phase import (
    AbeSession,
    LogicalCircuit,
    LogicalGate,
    ToffoliRound,
    correction_leakage_check,
    distribution_check,
    encoded_inputs,
    marginal_leakage_checks,
    ideal_distribution,
    run_logical_circuit,
    teleport_random_input,
    toffoli_state,
)
from fk_localising import Indicator
from qudit_algebra import PauliOp
from signed_poly_code import Accept, CodeParams, PauliKey, Reject, SignKey, logical_x

D5 = CodeParams(5, 1)
CLIFFORD = LogicalCircuit(
    2,
    (
        LogicalGate("F", (0,)),
        LogicalGate("F", (0,)),
        LogicalGate("CX", (0, 1)),
        LogicalGate("S", (1,)),
    ),
)


def _padded_session(circuit, inputs, params, rng, sign_key=None):
    sign_key = sign_key or SignKey.random(params.m, rng)
    plaintext = encoded_inputs(circuit, inputs, params, sign_key)
    key = PauliKey.random(params.d, plaintext.n_sites, rng)
    return AbeSession.padded(params, sign_key, plaintext, key)


def test_logical_gate_validation():
    assert LogicalGate("toffoli", (0, 1, 2)).kind == "TOFFOLI"
    with pytest.raises(ValueError):
        LogicalGate("T", (0,))
    with pytest.raises(ValueError):
        LogicalGate("CX", (0,))
    with pytest.raises(ValueError):
        LogicalGate("CZ", (1, 1))


def test_logical_circuit_wires():
    with pytest.raises(ValueError):
        LogicalCircuit(0)
    with pytest.raises(ValueError):
        LogicalCircuit(2, (LogicalGate("CX", (0, 2)),))
    circuit = LogicalCircuit(3, (LogicalGate("TOFFOLI", (0, 1, 2)), LogicalGate("TOFFOLI", (2, 1, 0))))
    assert circuit.toffoli_count == 2
    assert circuit.total_wires == 9
    assert circuit.resource_wires(1) == (6, 7, 8)
    assert circuit.size == 5
    assert not circuit.is_clifford()


def test_circuit_from_json_forms():
    listed = LogicalCircuit.from_json([{"gate": "F", "wires": [0]}, {"gate": "CX", "wires": [0, 2], "power": 3}])
    assert listed.n_wires == 3
    assert listed.gates[1].power == 3
    assert LogicalCircuit.from_json(CLIFFORD.to_json()) == CLIFFORD


def test_toffoli_state_amplitudes():
    d = 3
    state = toffoli_state(d)
    for a, b in itertools.product(range(d), repeat=2):
        index = np.ravel_multi_index((a, b, (a * b) % d), (d, d, d))
        assert state.amps[index] == pytest.approx(1 / d)
    assert state.norm() == pytest.approx(1.0)


def test_encoded_inputs_need_one_value_per_wire(rng):
    with pytest.raises(ValueError):
        encoded_inputs(CLIFFORD, [1], D5, SignKey.random(3, rng))


def test_honest_clifford_circuit_decodes_the_ideal_values(rng):
    for _ in range(3):
        outcome = run_logical_circuit(_padded_session(CLIFFORD, [1, 2], D5, rng), CLIFFORD, rng)
        assert outcome.indicator is Indicator.ACC
        assert outcome.values() == {0: 4, 1: 1}
    probs = ideal_distribution(CLIFFORD, [1, 2], 5)
    assert probs[np.ravel_multi_index((4, 1), (5, 5))] == pytest.approx(1.0)


def test_frame_session_agrees_with_the_register(rng):
    sign_key = SignKey.random(3, rng)
    session = AbeSession.frame(
        D5, sign_key, PauliKey.random(5, 6, rng), PauliOp.identity(5, 6), ideal_values=[4, 1]
    )
    outcome = run_logical_circuit(session, CLIFFORD, rng)
    assert outcome.indicator is Indicator.ACC
    assert outcome.values() == {0: 4, 1: 1}
    assert session.logical_shift(0) == Accept(0)


@pytest.mark.parametrize("frame", [False, True])
def test_single_site_attack_is_rejected(frame, rng):
    if frame:
        sign_key = SignKey.random(3, rng)
        session = AbeSession.frame(D5, sign_key, PauliKey.random(5, 6, rng), PauliOp.identity(5, 6), [4, 1])
    else:
        session = _padded_session(CLIFFORD, [1, 2], D5, rng)
    outcome = run_logical_circuit(session, CLIFFORD, rng, attacks={0: PauliOp(5, (1,), (0,))})
    assert outcome.indicator is Indicator.REJ
    assert isinstance(outcome.results[0], Reject)


@pytest.mark.parametrize("frame", [False, True])
def test_logical_x_attack_goes_undetected(frame, rng):
    sign_key = SignKey.random(3, rng)
    shift = logical_x(D5, sign_key, (0, 1, 2), 6)
    attacks = {s: PauliOp(5, (shift.x_exps[s],), (0,)) for s in range(3)}
    if frame:
        session = AbeSession.frame(D5, sign_key, PauliKey.random(5, 6, rng), PauliOp.identity(5, 6), [4, 1])
    else:
        session = _padded_session(CLIFFORD, [1, 2], D5, rng, sign_key)
    outcome = run_logical_circuit(session, CLIFFORD, rng, attacks=attacks)
    assert outcome.indicator is Indicator.ACC
    assert outcome.values() == {0: 0, 1: 1}
    if frame:
        assert session.logical_shift(0) == Accept(1)


def test_frame_session_refuses_toffoli(rng):
    params = CodeParams(5, 0)
    session = AbeSession.frame(params, SignKey.trivial(1), PauliKey.identity(5, 6), PauliOp.identity(5, 6))
    with pytest.raises(ValueError):
        session.teleport_toffoli((0, 1, 2), (3, 4, 5), rng)
    with pytest.raises(ValueError):
        session.apply_logical(LogicalGate("TOFFOLI", (0, 1, 2)))
    with pytest.raises(ValueError):
        session.logical_density([0])


def test_session_blocks_must_divide_the_key():
    with pytest.raises(ValueError):
        AbeSession.frame(D5, SignKey.trivial(3), PauliKey.identity(5, 4), PauliOp.identity(5, 4))


@pytest.mark.parametrize("d", [3, 5])
def test_teleported_toffoli_matches_the_direct_gate(d, rng):
    for _ in range(3):
        fidelity, round_ = teleport_random_input(d, rng)
        assert fidelity == pytest.approx(1.0, abs=1e-9)
        assert len(round_.measured) == 3
        assert round_.correction == round_.decoded
        assert round_.accepted


def test_encoded_toffoli_circuit_on_basis_inputs(rng):
    d = 3
    params = CodeParams(d, 0)
    circuit = LogicalCircuit(3, (LogicalGate("TOFFOLI", (0, 1, 2)),))
    session = _padded_session(circuit, [2, 2, 0], params, rng, SignKey.trivial(1))
    outcome = run_logical_circuit(session, circuit, rng)
    assert outcome.indicator is Indicator.ACC
    assert outcome.values() == {0: 2, 1: 2, 2: 1}
    assert outcome.transcript.counters["rounds"] == 1 + 3
    assert outcome.transcript.counters["dits_to_prover"] == 3


def test_ideal_distribution_of_a_fourier_gate():
    probs = ideal_distribution(LogicalCircuit(1, (LogicalGate("F", (0,)),)), [0], 3)
    assert probs == pytest.approx(np.full(3, 1 / 3))


def test_distribution_check_on_uniform_samples():
    samples = [t for t in itertools.product(range(3), repeat=2) for _ in range(10)]
    report = distribution_check(samples, 3, other=list(reversed(samples)))
    assert report.bins == 9
    assert report.tv_uniform == pytest.approx(0.0)
    assert report.tv_between == pytest.approx(0.0)
    assert report.passed()


def test_distribution_check_flags_skew_and_thin_ensembles():
    skewed = distribution_check([(0, 0)] * 90, 3)
    assert skewed.max_z_uniform > 4
    assert not skewed.passed()
    thin = distribution_check([(0, 1), (1, 2)], 3)
    assert not thin.sufficient
    assert thin.notes
    with pytest.raises(ValueError):
        distribution_check([], 3)


def test_correction_leakage_reads_the_corrections():
    rounds = [
        ToffoliRound((0, 1, 2), (3, 4, 5), [], c, c, True) for c in itertools.product(range(3), repeat=3)
    ]
    report = correction_leakage_check(rounds * 5, 3)
    assert report.samples == 135
    assert report.bins == 27
    assert report.passed()


def _rounds(corrections):
    return [ToffoliRound((0, 1, 2), (3, 4, 5), [], c, c, True) for c in corrections]


def test_marginal_leakage_has_one_report_per_correction_dit():
    uniform = _rounds(itertools.product(range(3), repeat=3))
    reports = marginal_leakage_checks(uniform * 2, 3, uniform)
    assert len(reports) == 3
    assert all(r.bins == 3 and r.samples == 54 for r in reports)
    assert all(r.sufficient and r.passed() for r in reports)


def test_marginal_leakage_flags_a_placement_dependent_dit():
    uniform = _rounds(itertools.product(range(3), repeat=3))
    # the middle dit is stuck at 0 under the second placement
    stuck = _rounds((a, 0, c) for a, _, c in itertools.product(range(3), repeat=3))
    reports = marginal_leakage_checks(uniform * 2, 3, stuck * 2)
    assert [r.passed() for r in reports] == [True, False, True]
    assert reports[1].max_z_between > 4
