import pytest

from amplification import IdentityCode, RepetitionCode, blocks_corrupt, code_from_name
from qudit_algebra import PauliOp


def test_identity_code():
    code = code_from_name("identity")
    assert code.block_length == 1 and code.decode_circuit([0]) == []
    assert code.syndrome_silent(PauliOp(5, (1,), (0,)))
    assert code.corrupts(PauliOp(5, (2,), (0,)))
    assert not code.corrupts(PauliOp(5, (0,), (2,)))
    assert not code.corrupts(PauliOp.identity(5, 1))


def test_repetition_detects_a_single_x():
    code = RepetitionCode(3)
    single = PauliOp(5, (0, 2, 0), (0, 0, 0))
    assert not code.syndrome_silent(single)
    assert not code.corrupts(single)


@pytest.mark.parametrize("k", [2, 3, 5])
def test_repetition_misses_a_full_logical_x(k):
    code = RepetitionCode(k)
    logical = PauliOp(5, (2,) * k, (0,) * k)
    assert code.syndrome_silent(logical)
    assert code.corrupts(logical)


def test_unequal_shifts_are_caught():
    assert not RepetitionCode(3).syndrome_silent(PauliOp(5, (1, 1, 2), (0, 0, 0)))


def test_z_errors_only_dress_basis_states():
    code = RepetitionCode(3)
    assert not code.corrupts(PauliOp(3, (0, 0, 0), (1, 2, 1)))
    assert code.syndrome_silent(PauliOp(3, (0, 0, 0), (1, 2, 1)))


def test_blocks_corrupt_checks_every_block():
    code = RepetitionCode(2)
    assert blocks_corrupt(code, PauliOp(3, (0, 0, 1, 1), (0, 0, 0, 0)))
    assert not blocks_corrupt(code, PauliOp(3, (0, 1, 1, 0), (0, 0, 0, 0)))
    assert blocks_corrupt(IdentityCode(), PauliOp(3, (0, 1), (0, 0)))
    with pytest.raises(ValueError):
        blocks_corrupt(code, PauliOp.identity(3, 3))


def test_repetition_validation():
    with pytest.raises(ValueError):
        RepetitionCode(1)
    with pytest.raises(ValueError):
        RepetitionCode(3).corrupts(PauliOp.identity(3, 2))
    with pytest.raises(ValueError):
        code_from_name("surface")
    assert isinstance(code_from_name("repetition", 4), RepetitionCode)
    assert isinstance(code_from_name("repetition", 1), IdentityCode)
    assert IdentityCode().distance == 1
