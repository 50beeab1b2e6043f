import itertools

import numpy as np
import pytest

from qudit_algebra import GateSpec, PauliOp, omega
from signed_poly_code import (
    Accept,
    CodeParams,
    PauliKey,
    Reject,
    SignKey,
    codeword_set,
    decoding_circuit,
    detect_and_decode,
    encode_quantum,
    encoding_circuit,
    lagrange_coefficients,
    logical_x,
    logical_z,
    shift_acceptance,
    update_pauli_key,
)
from statevector import StateVector, apply_gate, apply_pauli, basis_vector, plus_state, state_fidelity


D5 = CodeParams(5, 1)


def test_codeword_set_for_one():
    assert codeword_set(1, D5, SignKey.trivial(3)) == {
        (1, 1, 1),
        (2, 3, 4),
        (3, 0, 2),
        (4, 2, 0),
        (0, 4, 3),
    }


def test_detect_and_decode():
    key = SignKey.trivial(3)
    assert detect_and_decode((2, 3, 4), D5, key) == Accept(1)
    assert detect_and_decode((1, 1, 2), D5, key) == Reject()


@pytest.mark.parametrize("signs", list(itertools.product((1, -1), repeat=3)))
def test_every_signed_codeword_decodes(signs):
    key = SignKey(signs)
    for a in range(5):
        for word in codeword_set(a, D5, key):
            assert detect_and_decode(word, D5, key) == Accept(a)


def test_code_params_validation():
    with pytest.raises(ValueError):
        CodeParams(5, 2)
    with pytest.raises(ValueError):
        CodeParams(7, -1)
    with pytest.raises(ValueError):
        CodeParams(4, 1)
    with pytest.raises(ValueError):
        CodeParams(7, 1, eval_points=(1, 1, 2))
    assert CodeParams(7, 2).m == 5


def test_sign_key_entries():
    with pytest.raises(ValueError):
        SignKey((1, 0, -1))
    assert len(SignKey.all_keys(3)) == 8


def test_lagrange_coefficients_recover_the_secret():
    assert lagrange_coefficients(D5) == (3, 2, 1)
    params = CodeParams(7, 2)
    lam = lagrange_coefficients(params)
    for word in codeword_set(4, params, SignKey.trivial(5)):
        assert sum(l * y for l, y in zip(lam, word)) % 7 == 4


def test_exhaustive_shift_acceptance_is_at_most_half():
    keys = SignKey.all_keys(3)
    rates = [
        shift_acceptance(shift, D5, keys)
        for shift in itertools.product(range(5), repeat=3)
        if any(shift)
    ]
    assert max(rates) == 0.5
    assert shift_acceptance((2, 1, 0), D5, keys) == 0.5


def test_sampled_shift_acceptance_for_two_degrees(rng):
    params = CodeParams(7, 2)
    keys = SignKey.all_keys(5)
    for _ in range(60):
        shift = tuple(int(x) for x in rng.integers(7, size=5))
        if any(shift):
            assert shift_acceptance(shift, params, keys) <= 0.25


def test_encode_quantum_is_uniform_over_codewords(rng):
    key = SignKey.random(3, rng)
    state = encode_quantum(2, D5, key)
    support = {tuple(int(x) for x in np.unravel_index(i, (5, 5, 5))) for i in np.flatnonzero(np.abs(state.amps) > 1e-12)}
    assert support == codeword_set(2, D5, key)
    assert state.norm() == pytest.approx(1.0)


@pytest.mark.parametrize("signs", [(1, 1, 1), (1, -1, 1), (-1, -1, 1)])
def test_encoding_circuit_prepares_the_codeword_state(signs):
    key = SignKey(signs)
    for a in range(5):
        state = StateVector.from_local_states(5, [basis_vector(5, a), plus_state(5), basis_vector(5, 0)])
        for gate in encoding_circuit(D5, key):
            state = apply_gate(state, gate)
        assert state_fidelity(state, encode_quantum(a, D5, key)) == pytest.approx(1.0)


def test_decoding_circuit_inverts_encoding(rng):
    key = SignKey.random(3, rng)
    state = encode_quantum(3, D5, key)
    for gate in decoding_circuit(D5, key):
        state = apply_gate(state, gate)
    expected = StateVector.from_local_states(5, [basis_vector(5, 3), plus_state(5), basis_vector(5, 0)])
    assert state_fidelity(state, expected) == pytest.approx(1.0)


def test_decoding_circuit_on_offset_sites(rng):
    key = SignKey.random(3, rng)
    gates = decoding_circuit(D5, key, sites=(3, 4, 5))
    assert {s for g in gates for s in g.sites} <= {3, 4, 5}


def test_logical_x_shifts_the_decoded_value(rng):
    key = SignKey.random(3, rng)
    shift = logical_x(D5, key, (0, 1, 2), 3, power=2)
    for word in codeword_set(1, D5, key):
        moved = [(y + x) % 5 for y, x in zip(word, shift.x_exps)]
        assert detect_and_decode(moved, D5, key) == Accept(3)


def test_logical_z_is_a_value_phase(rng):
    key = SignKey.random(3, rng)
    for a in range(5):
        state = encode_quantum(a, D5, key)
        out = apply_pauli(state, logical_z(D5, key, (0, 1, 2), 3, power=1))
        assert np.allclose(out.amps, omega(5) ** a * state.amps)


def test_key_follows_clifford_gates(rng):
    d = 5
    key = PauliKey.random(d, 2, rng)
    gates = [GateSpec("CX", (0, 1)), GateSpec("F", (1,)), GateSpec("S", (0,), power=2)]
    plain = StateVector.random(d, 2, rng)
    padded = apply_pauli(plain, key.op)
    new_key = update_pauli_key(key, gates)
    for gate in gates:
        padded = apply_gate(padded, gate)
        plain = apply_gate(plain, gate)
    assert state_fidelity(padded, apply_pauli(plain, new_key.op)) == pytest.approx(1.0)


def test_then_and_absorb_logical(rng):
    d = 3
    key = PauliKey.random(d, 2, rng)
    p = PauliOp.random(d, 2, rng, with_phase=False)
    plain = StateVector.random(d, 2, rng)
    # a physical Pauli on the padded register is folded into the key
    hit = apply_pauli(apply_pauli(plain, key.op), p)
    assert state_fidelity(hit, apply_pauli(plain, key.then(p).op)) == pytest.approx(1.0)
    # the same register now reads as p·plain under the absorbed key
    absorbed = key.absorb_logical(p)
    register = apply_pauli(plain, key.op)
    assert state_fidelity(register, apply_pauli(apply_pauli(plain, p), absorbed.op)) == pytest.approx(1.0)
