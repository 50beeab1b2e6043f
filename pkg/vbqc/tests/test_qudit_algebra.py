import numpy as np
import pytest

from qudit_algebra import (
    AngleVector,
    Dit,
    GateSpec,
    PauliOp,
    adapt_angle_under_pauli,
    check_prime,
    clifford_conjugate,
    conjugate_circuit,
    gate_matrix,
    identify_pauli,
    pauli_matrix,
    pauli_mul,
    rotation_phases,
    z_power_between,
)


def _proportional(a: np.ndarray, b: np.ndarray) -> bool:
    """True when a = c·b for a unit-modulus c."""
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    c = a[idx] / b[idx]
    return abs(abs(c) - 1) < 1e-9 and np.allclose(a, c * b, atol=1e-9)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_check_prime_accepts_primes(d):
    assert check_prime(d) == d


@pytest.mark.parametrize("d", [0, 1, 4, 6, 9])
def test_check_prime_rejects_composites(d):
    with pytest.raises(ValueError):
        check_prime(d)


def test_dit_arithmetic():
    a, b = Dit(3, 5), Dit(9, 5)
    assert b.value == 4
    assert (a + b).value == 2
    assert (a - b).value == 4
    assert (a * b).value == 2
    assert (-a).value == 2
    assert (a * a.inverse()).value == 1
    with pytest.raises(ValueError):
        Dit(0, 5).inverse()
    with pytest.raises(ValueError):
        a + Dit(1, 7)
    with pytest.raises(ValueError):
        Dit(1, 4)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_pauli_mul_matches_matrix_product(d, rng):
    for _ in range(20):
        p = PauliOp.random(d, 2, rng)
        q = PauliOp.random(d, 2, rng)
        assert np.allclose(pauli_matrix(pauli_mul(p, q)), pauli_matrix(p) @ pauli_matrix(q))


@pytest.mark.parametrize("d", [2, 3, 5])
def test_pauli_inverse(d, rng):
    for _ in range(20):
        p = PauliOp.random(d, 2, rng)
        assert np.allclose(pauli_matrix(p.inverse()) @ pauli_matrix(p), np.eye(d * d))


def test_restrict_drops_phase():
    p = PauliOp(5, (1, 2, 3), (4, 0, 1), phase_exp=3)
    assert p.restrict([2, 0]) == PauliOp(5, (3, 1), (1, 4))


@pytest.mark.parametrize("d", [2, 3, 5])
@pytest.mark.parametrize("kind", ["F", "S", "CX", "CZ", "MUL"])
def test_clifford_conjugation_is_exact(d, kind, rng):
    if kind == "MUL" and d == 2:
        pytest.skip("no non-trivial multiplier at d=2")
    for _ in range(10):
        sites = (0, 1) if kind in ("CX", "CZ") else (int(rng.integers(2)),)
        weight = int(rng.integers(2, d)) if kind == "MUL" else 1
        gate = GateSpec(kind, sites, power=int(rng.integers(1, 4)), weight=weight)
        p = PauliOp.random(d, 2, rng)
        u = gate_matrix(gate, d)
        if len(sites) == 1:
            eye = np.eye(d)
            u = np.kron(u, eye) if sites[0] == 0 else np.kron(eye, u)
        assert np.allclose(u @ pauli_matrix(p) @ u.conj().T, pauli_matrix(clifford_conjugate(gate, p)))


def test_conjugate_circuit_applies_in_order():
    d = 5
    x0 = PauliOp(d, (1, 0), (0, 0))
    # CX spreads X to the target, then F turns the target's X into Z
    out = conjugate_circuit([GateSpec("CX", (0, 1)), GateSpec("F", (1,))], x0)
    assert out.without_phase() == PauliOp(d, (1, 0), (0, 1))


def test_non_clifford_conjugation_raises():
    with pytest.raises(ValueError):
        clifford_conjugate(GateSpec("T", (0,)), PauliOp.identity(3, 1))


def test_angle_vector_moduli():
    assert AngleVector(2, 9).a == 1
    assert AngleVector(3, 4, 5, 10).as_tuple() == (1, 2, 1)
    assert AngleVector(5, 7, 6, 5).as_tuple() == (2, 1, 0)


def test_pauli_z_vector_is_z_power():
    assert np.allclose(np.diag(rotation_phases(AngleVector.pauli_z(5, 2))), pauli_matrix(PauliOp(5, (0,), (2,))))
    assert np.allclose(np.diag(rotation_phases(AngleVector.pauli_z(2, 1))), pauli_matrix(PauliOp(2, (0,), (1,))))


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_adapted_angle_matches_conjugated_rotation(d, rng):
    for _ in range(15):
        v = AngleVector.random(d, rng)
        s, t = int(rng.integers(d)), int(rng.integers(d))
        adapted = np.diag(rotation_phases(adapt_angle_under_pauli(v, s, t)))
        x = pauli_matrix(PauliOp(d, (s,), (0,)))
        z = pauli_matrix(PauliOp(d, (0,), (t,)))
        expected = np.linalg.inv(z) @ np.linalg.inv(x) @ np.diag(rotation_phases(v)) @ x
        assert _proportional(adapted, expected)


def test_z_power_between():
    v = AngleVector(5, 1, 2, 3)
    assert z_power_between(v, AngleVector(5, 4, 2, 3)) == 3
    assert z_power_between(v, AngleVector(5, 1, 3, 3)) is None
    assert z_power_between(AngleVector(2, 1), AngleVector(2, 5)) == 1
    assert z_power_between(AngleVector(2, 1), AngleVector(2, 3)) is None


def test_gate_spec_validation():
    with pytest.raises(ValueError):
        GateSpec("CX", (0,))
    with pytest.raises(ValueError):
        GateSpec("CZ", (1, 1))
    with pytest.raises(ValueError):
        GateSpec("ROTATION", (0,))
    with pytest.raises(ValueError):
        GateSpec("SWAP", (0, 1))


def test_toffoli_matrix_on_basis():
    d = 3
    u = gate_matrix(GateSpec("TOFFOLI", (0, 1, 2)), d)
    col = (2 * d + 2) * d + 1
    row = (2 * d + 2) * d + (1 + 4) % d
    assert u[row, col] == 1


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_identify_pauli_ignores_the_global_phase(d, rng):
    for _ in range(10):
        p = PauliOp.random(d, 1, rng)
        found = identify_pauli(np.exp(1j * rng.uniform(0, 2 * np.pi)) * pauli_matrix(p), d)
        assert (found.x_exps, found.z_exps) == (p.x_exps, p.z_exps)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_identify_pauli_rejects_non_paulis(d):
    assert identify_pauli(gate_matrix(GateSpec("F", (0,)), d), d) is None
    with pytest.raises(ValueError):
        identify_pauli(np.eye(d + 1), d)
