"""
Amplification codes applied to the localised output before the ABE phase.

Residuals are read in the basis the block's codeword lives in: the
computational basis of a wire instance's output lines, or the basis after
the public Fourier gate for bare localising lines. There a Z part only
dresses a basis state with a phase, so only X parts matter. The prover
decodes each block with a public Clifford circuit; a residual "corrupts"
the block when, after decoding, the syndrome sites stay silent while the
logical site carries a non-trivial X part.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Union

from qudit_algebra import GateSpec, PauliOp, conjugate_circuit


@dataclass(frozen=True)
class IdentityCode:
    """No amplification: one physical site per logical site, any X part corrupts."""

    name: str = "identity"

    @property
    def block_length(self) -> int:
        return 1

    @property
    def distance(self) -> int:
        return 1

    def decode_circuit(self, sites: Sequence[int]) -> List[GateSpec]:
        return []

    def syndrome_silent(self, residual: PauliOp) -> bool:
        return True

    def corrupts(self, residual: PauliOp) -> bool:
        return any(residual.x_exps)


@dataclass(frozen=True)
class RepetitionCode:
    """|a> -> |a>^k by CX fan-out from site 0; detects up to k-1 X-type errors."""

    k: int = 3
    name: str = "repetition"

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError(f"Repetition length must be at least 2, got {self.k}")

    @property
    def block_length(self) -> int:
        return self.k

    @property
    def distance(self) -> int:
        return self.k

    def decode_circuit(self, sites: Sequence[int]) -> List[GateSpec]:
        return [GateSpec("CX", (sites[0], t), power=-1) for t in sites[1:]]

    def _decoded(self, residual: PauliOp) -> PauliOp:
        if residual.n_sites != self.k:
            raise ValueError(f"Residual spans {residual.n_sites} sites, block length is {self.k}")
        return conjugate_circuit(self.decode_circuit(range(self.k)), residual)

    def syndrome_silent(self, residual: PauliOp) -> bool:
        return not any(self._decoded(residual).x_exps[1:])

    def corrupts(self, residual: PauliOp) -> bool:
        decoded = self._decoded(residual)
        return not any(decoded.x_exps[1:]) and bool(decoded.x_exps[0])


AmplificationCode = Union[IdentityCode, RepetitionCode]


def code_from_name(name: str, k: int = 3) -> AmplificationCode:
    """Repetition of length one is no amplification at all."""
    if name == "identity" or (name == "repetition" and k <= 1):
        return IdentityCode()
    if name == "repetition":
        return RepetitionCode(k)
    raise ValueError(f"Unknown amplification code {name!r}")


def blocks_corrupt(code: AmplificationCode, residual: PauliOp) -> bool:
    """Whether any consecutive block of `code.block_length` sites is corrupted."""
    n = code.block_length
    if residual.n_sites % n:
        raise ValueError(f"{residual.n_sites} sites do not split into blocks of {n}")
    return any(
        code.corrupts(residual.restrict(range(start, start + n))) for start in range(0, residual.n_sites, n)
    )
