"""
Signed Polynomial Code - detection code and one-time-pad keys for the ABE phase.

A logical dit a is spread over m = 2p + 1 physical qudits as the evaluations
k_i·f(α_i) of a random polynomial f of degree at most p with f(0) = a, masked
coordinate-wise by a secret sign key k ∈ {±1}^m. Detection undoes the signs
and checks the degree of the Lagrange interpolant.

Provides:
- CodeParams / SignKey / PauliKey
- classical codeword algebra and detection (exact, over galois.GF(d))
- quantum encoding on small statevectors and the Clifford encoding circuit
- logical Clifford gates and the matching Pauli-key updates
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Set, Tuple, Union

import galois
import numpy as np

from qudit_algebra import GateSpec, PauliOp, check_prime, conjugate_circuit, pauli_mul
from statevector import StateVector, check_ceiling


@lru_cache(maxsize=None)
def field(d: int):
    return galois.GF(check_prime(d))


@dataclass(frozen=True)
class CodeParams:
    d: int
    p: int
    eval_points: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        check_prime(self.d)
        if self.p < 0:
            raise ValueError(f"Polynomial degree p must be non-negative, got {self.p}")
        m = 2 * self.p + 1
        if m >= self.d:
            raise ValueError(f"Codeword length m={m} must be smaller than d={self.d}")
        points = tuple(int(a) for a in self.eval_points) or tuple(range(1, m + 1))
        if len(points) != m:
            raise ValueError(f"Expected {m} evaluation points, got {len(points)}")
        if len(set(a % self.d for a in points)) != m or any(a % self.d == 0 for a in points):
            raise ValueError(f"Evaluation points must be distinct and non-zero mod {self.d}: {points}")
        object.__setattr__(self, "eval_points", tuple(a % self.d for a in points))

    @property
    def m(self) -> int:
        return 2 * self.p + 1


@dataclass(frozen=True)
class SignKey:
    signs: Tuple[int, ...]

    def __post_init__(self) -> None:
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError(f"Sign key entries must be ±1, got {self.signs}")

    @classmethod
    def trivial(cls, m: int) -> "SignKey":
        return cls((1,) * m)

    @classmethod
    def random(cls, m: int, rng: np.random.Generator) -> "SignKey":
        return cls(tuple(int(s) for s in rng.choice([1, -1], size=m)))

    @classmethod
    def all_keys(cls, m: int) -> List["SignKey"]:
        return [cls(signs) for signs in itertools.product((1, -1), repeat=m)]


@dataclass(frozen=True)
class PauliKey:
    """Quantum one-time pad: the register holds key.op · |plaintext>."""

    op: PauliOp

    @classmethod
    def identity(cls, d: int, n_sites: int) -> "PauliKey":
        return cls(PauliOp.identity(d, n_sites))

    @classmethod
    def random(cls, d: int, n_sites: int, rng: np.random.Generator) -> "PauliKey":
        return cls(PauliOp.random(d, n_sites, rng, with_phase=False))

    @property
    def n_sites(self) -> int:
        return self.op.n_sites

    def x_key(self, site: int) -> int:
        return self.op.x_exps[site]

    def then(self, pauli: PauliOp) -> "PauliKey":
        """Key after the physical Pauli `pauli` hits the padded register."""
        return PauliKey(pauli_mul(pauli, self.op))

    def absorb_logical(self, pauli: PauliOp) -> "PauliKey":
        """Key under which the unchanged register now holds pauli·|plaintext>."""
        return PauliKey(pauli_mul(self.op, pauli.inverse()))


def update_pauli_key(key: PauliKey, gates: Sequence[GateSpec]) -> PauliKey:
    """Key after the Clifford circuit `gates` acts on the padded register."""
    return PauliKey(conjugate_circuit(gates, key.op))


# ---------------------------------------------------------------------------
# Classical codeword algebra
# ---------------------------------------------------------------------------


def lagrange_coefficients(params: CodeParams) -> Tuple[int, ...]:
    """λ_i with f(0) = Σ λ_i f(α_i) for every f of degree below m."""
    GF = field(params.d)
    pts = GF(list(params.eval_points))
    coeffs = []
    for i in range(params.m):
        lam = GF(1)
        for j in range(params.m):
            if j != i:
                lam = lam * pts[j] / (pts[j] - pts[i])
        coeffs.append(int(lam))
    return tuple(coeffs)


def _evaluate(params: CodeParams, poly_coeffs: Sequence[int]) -> Tuple[int, ...]:
    d = params.d
    return tuple(
        sum(c * pow(alpha, j, d) for j, c in enumerate(poly_coeffs)) % d
        for alpha in params.eval_points
    )


def codeword_set(a: int, params: CodeParams, key: SignKey) -> Set[Tuple[int, ...]]:
    _check_key(params, key)
    d = params.d
    words = set()
    for tail in itertools.product(range(d), repeat=params.p):
        values = _evaluate(params, (a % d, *tail))
        words.add(tuple((k * v) % d for k, v in zip(key.signs, values)))
    return words


def _check_key(params: CodeParams, key: SignKey) -> None:
    if len(key.signs) != params.m:
        raise ValueError(f"Sign key has {len(key.signs)} entries, code length is {params.m}")


@dataclass(frozen=True)
class Accept:
    value: int


@dataclass(frozen=True)
class Reject:
    pass


DecodeResult = Union[Accept, Reject]


def detect_and_decode(measured: Sequence[int], params: CodeParams, key: SignKey) -> DecodeResult:
    _check_key(params, key)
    if len(measured) != params.m:
        raise ValueError(f"Expected {params.m} dits, got {len(measured)}")
    GF = field(params.d)
    unsigned = GF([(k * int(y)) % params.d for k, y in zip(key.signs, measured)])
    if params.m == 1:
        return Accept(int(unsigned[0]))
    poly = galois.lagrange_poly(GF(list(params.eval_points)), unsigned)
    if poly.degree > params.p:
        return Reject()
    return Accept(int(poly(GF(0))))


def is_undetected_shift(shift: Sequence[int], params: CodeParams, key: SignKey) -> bool:
    """True iff adding `shift` to any codeword keeps it a codeword."""
    return isinstance(detect_and_decode(shift, params, key), Accept)


def shift_acceptance(shift: Sequence[int], params: CodeParams, keys: Sequence[SignKey]) -> float:
    """Fraction of sign keys under which an X-type shift goes undetected."""
    return sum(is_undetected_shift(shift, params, k) for k in keys) / len(keys)


# ---------------------------------------------------------------------------
# Quantum encoding
# ---------------------------------------------------------------------------


def encode_quantum(a: int, params: CodeParams, key: SignKey) -> StateVector:
    d, m = params.d, params.m
    check_ceiling(d, m)
    amps = np.zeros(d ** m, dtype=complex)
    words = codeword_set(a, params, key)
    for word in words:
        index = 0
        for dit in word:
            index = index * d + dit
        amps[index] = 1.0
    return StateVector(d, m, amps / np.sqrt(len(words)))


def generator_matrix(params: CodeParams, key: SignKey):
    """G[i, j] = k_i α_i^j; G·(a, c_1..c_p, 0..) is the signed codeword of a + Σ c_j x^j."""
    _check_key(params, key)
    GF = field(params.d)
    rows = [
        [(k * pow(alpha, j, params.d)) % params.d for j in range(params.m)]
        for k, alpha in zip(key.signs, params.eval_points)
    ]
    return GF(rows)


def _elimination_steps(matrix) -> List[Tuple[str, int, int, int]]:
    """Row operations E_1..E_r with E_r…E_1·matrix = I.

    Steps are ("add", src, dst, w): row dst += w·row src, ("scale", row, -, w)
    and ("swap", a, b, -).
    """
    GF = type(matrix)
    work = matrix.copy()
    n = work.shape[0]
    steps: List[Tuple[str, int, int, int]] = []
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r, col] != 0), None)
        if pivot is None:
            raise ValueError("Linear map is not invertible")
        if pivot != col:
            work[[col, pivot]] = work[[pivot, col]]
            steps.append(("swap", col, pivot, 0))
        inv = GF(1) / work[col, col]
        if work[col, col] != 1:
            work[col] = work[col] * inv
            steps.append(("scale", col, col, int(inv)))
        for r in range(n):
            if r != col and work[r, col] != 0:
                w = -work[r, col]
                work[r] = work[r] + w * work[col]
                steps.append(("add", col, r, int(w)))
    return steps


def _step_gates(step: Tuple[str, int, int, int], sites: Sequence[int], d: int, inverse: bool) -> List[GateSpec]:
    kind, a, b, w = step
    if kind == "add":
        return [GateSpec("CX", (sites[a], sites[b]), power=(-w if inverse else w) % d)]
    if kind == "scale":
        return [GateSpec("MUL", (sites[a],), weight=pow(w, -1, d) if inverse else w)]
    # v_a, v_b -> v_b, v_a
    return [
        GateSpec("CX", (sites[a], sites[b])),
        GateSpec("CX", (sites[b], sites[a]), power=d - 1),
        GateSpec("CX", (sites[a], sites[b])),
        GateSpec("MUL", (sites[a],), weight=d - 1),
    ]


def linear_map_circuit(matrix, sites: Sequence[int], inverse: bool = False) -> List[GateSpec]:
    """Clifford gates realising |v> -> |matrix·v> (or its inverse) on `sites`."""
    d = type(matrix).characteristic
    steps = _elimination_steps(matrix)
    if inverse:
        return [g for step in steps for g in _step_gates(step, sites, d, inverse=False)]
    gates: List[GateSpec] = []
    for step in reversed(steps):
        gates.extend(_step_gates(step, sites, d, inverse=True))
    return gates


def encoding_circuit(params: CodeParams, key: SignKey, sites: Optional[Sequence[int]] = None) -> List[GateSpec]:
    """Maps |a>|+0>^p|0>^(m-p-1) to the encoded |a> (up to normalisation of the |+0> sum)."""
    sites = tuple(range(params.m)) if sites is None else tuple(sites)
    return linear_map_circuit(generator_matrix(params, key), sites)


def decoding_circuit(params: CodeParams, key: SignKey, sites: Optional[Sequence[int]] = None) -> List[GateSpec]:
    sites = tuple(range(params.m)) if sites is None else tuple(sites)
    return linear_map_circuit(generator_matrix(params, key), sites, inverse=True)


# ---------------------------------------------------------------------------
# Logical gates on one or two blocks of m physical sites
# ---------------------------------------------------------------------------


def _block_pauli(d: int, n_sites: int, block: Sequence[int], xs: Sequence[int], zs: Sequence[int]) -> PauliOp:
    x_exps = [0] * n_sites
    z_exps = [0] * n_sites
    for site, x, z in zip(block, xs, zs):
        x_exps[site] = x
        z_exps[site] = z
    return PauliOp(d, tuple(x_exps), tuple(z_exps))


def logical_x(params: CodeParams, key: SignKey, block: Sequence[int], n_sites: int, power: int = 1) -> PauliOp:
    xs = [(power * k) % params.d for k in key.signs]
    return _block_pauli(params.d, n_sites, block, xs, [0] * params.m)


def logical_z(params: CodeParams, key: SignKey, block: Sequence[int], n_sites: int, power: int = 1) -> PauliOp:
    lam = lagrange_coefficients(params)
    zs = [(power * k * l) % params.d for k, l in zip(key.signs, lam)]
    return _block_pauli(params.d, n_sites, block, [0] * params.m, zs)


def logical_cx(control: Sequence[int], target: Sequence[int], power: int = 1) -> List[GateSpec]:
    return [GateSpec("CX", (c, t), power=power) for c, t in zip(control, target)]


def logical_cz(params: CodeParams, a: Sequence[int], b: Sequence[int], power: int = 1) -> List[GateSpec]:
    lam = lagrange_coefficients(params)
    return [
        GateSpec("CZ", (sa, sb), power=(power * l) % params.d)
        for sa, sb, l in zip(a, b, lam)
        if (power * l) % params.d
    ]


def logical_f(params: CodeParams, block: Sequence[int]) -> List[GateSpec]:
    lam = lagrange_coefficients(params)
    gates: List[GateSpec] = []
    for site, l in zip(block, lam):
        if l != 1:
            gates.append(GateSpec("MUL", (site,), weight=l))
        gates.append(GateSpec("F", (site,)))
    return gates


def logical_s(
    params: CodeParams, key: SignKey, block: Sequence[int], n_sites: int
) -> Tuple[List[GateSpec], PauliOp]:
    """Public gates ⊗S^{λ_i} and the key-dependent Pauli ⊗Z^{λ_i(k_i−1)/2} that completes logical S."""
    lam = lagrange_coefficients(params)
    gates = [GateSpec("S", (site,), power=l) for site, l in zip(block, lam)]
    # (k - 1)/2 is 0 for k = +1 and -1 for k = -1
    zs = [(l * ((k - 1) // 2)) % params.d for k, l in zip(key.signs, lam)]
    return gates, _block_pauli(params.d, n_sites, block, [0] * params.m, zs)
