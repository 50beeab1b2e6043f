"""
Qudit Algebra - exact arithmetic for d-level Pauli and Clifford operations.

Provides:
- Dit values over F_d with primality checks
- Generalized Pauli words with phases tracked as powers of ω_{2d}
- Gate specifications and their exact unitary matrices
- Pauli conjugation through Clifford gates (key and frame updates)
- Diagonal phase-polynomial rotations (measurement vectors) and their
  adaptation under Pauli byproducts
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import galois
import numpy as np


CLIFFORD_KINDS = frozenset({"F", "S", "CX", "CZ", "MUL", "PAULI"})
NON_CLIFFORD_KINDS = frozenset({"T", "T3", "TOFFOLI", "ROTATION"})
GATE_ARITY = {
    "F": 1, "S": 1, "T": 1, "T3": 1, "MUL": 1, "ROTATION": 1,
    "CX": 2, "CZ": 2, "TOFFOLI": 3,
}


def check_prime(d: int) -> int:
    """Return d if it is prime, otherwise raise ValueError."""
    if not isinstance(d, (int, np.integer)) or d < 2 or not galois.is_prime(int(d)):
        raise ValueError(f"Qudit dimension must be prime, got {d!r}")
    return int(d)


def omega(d: int) -> complex:
    """Primitive d-th root of unity."""
    return complex(np.exp(2j * np.pi / d))


@dataclass(frozen=True)
class Dit:
    """An element of F_d."""

    value: int
    modulus: int

    def __post_init__(self) -> None:
        check_prime(self.modulus)
        object.__setattr__(self, "value", int(self.value) % self.modulus)

    def __add__(self, other: "Dit") -> "Dit":
        _same_modulus(self.modulus, other.modulus)
        return Dit(self.value + other.value, self.modulus)

    def __sub__(self, other: "Dit") -> "Dit":
        _same_modulus(self.modulus, other.modulus)
        return Dit(self.value - other.value, self.modulus)

    def __mul__(self, other: "Dit") -> "Dit":
        _same_modulus(self.modulus, other.modulus)
        return Dit(self.value * other.value, self.modulus)

    def __neg__(self) -> "Dit":
        return Dit(-self.value, self.modulus)

    def inverse(self) -> "Dit":
        if self.value == 0:
            raise ValueError("Zero has no multiplicative inverse")
        return Dit(pow(self.value, -1, self.modulus), self.modulus)


def _same_modulus(d1: int, d2: int) -> None:
    if d1 != d2:
        raise ValueError(f"Modulus mismatch: {d1} vs {d2}")


# ---------------------------------------------------------------------------
# Pauli words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PauliOp:
    """ω_{2d}^{phase_exp} · ⊗_j X^{x_j} Z^{z_j} over n sites (site 0 leftmost)."""

    d: int
    x_exps: Tuple[int, ...]
    z_exps: Tuple[int, ...]
    phase_exp: int = 0

    def __post_init__(self) -> None:
        check_prime(self.d)
        if len(self.x_exps) != len(self.z_exps):
            raise ValueError("x_exps and z_exps must cover the same sites")
        object.__setattr__(self, "x_exps", tuple(int(x) % self.d for x in self.x_exps))
        object.__setattr__(self, "z_exps", tuple(int(z) % self.d for z in self.z_exps))
        object.__setattr__(self, "phase_exp", int(self.phase_exp) % (2 * self.d))

    @classmethod
    def identity(cls, d: int, n_sites: int) -> "PauliOp":
        return cls(d, (0,) * n_sites, (0,) * n_sites)

    @classmethod
    def single(cls, d: int, n_sites: int, site: int, x: int = 0, z: int = 0) -> "PauliOp":
        if not 0 <= site < n_sites:
            raise ValueError(f"Site {site} out of range for {n_sites} sites")
        xs = [0] * n_sites
        zs = [0] * n_sites
        xs[site] = x
        zs[site] = z
        return cls(d, tuple(xs), tuple(zs))

    @classmethod
    def random(cls, d: int, n_sites: int, rng: np.random.Generator, with_phase: bool = True) -> "PauliOp":
        xs = rng.integers(0, d, size=n_sites)
        zs = rng.integers(0, d, size=n_sites)
        phase = int(rng.integers(0, 2 * d)) if with_phase else 0
        return cls(d, tuple(int(v) for v in xs), tuple(int(v) for v in zs), phase)

    @property
    def n_sites(self) -> int:
        return len(self.x_exps)

    def is_identity(self, ignore_phase: bool = True) -> bool:
        trivial = not any(self.x_exps) and not any(self.z_exps)
        return trivial if ignore_phase else trivial and self.phase_exp == 0

    def without_phase(self) -> "PauliOp":
        return PauliOp(self.d, self.x_exps, self.z_exps, 0)

    def inverse(self) -> "PauliOp":
        """(X^x Z^z)^{-1} = Z^{-z} X^{-x}, rewritten in X-then-Z order."""
        phase = -self.phase_exp
        for x, z in zip(self.x_exps, self.z_exps):
            # Z^{-z} X^{-x} = ω^{xz} X^{-x} Z^{-z}
            phase += 2 * x * z
        return PauliOp(self.d, tuple(-x for x in self.x_exps), tuple(-z for z in self.z_exps), phase)

    def restrict(self, sites: Sequence[int]) -> "PauliOp":
        return PauliOp(
            self.d,
            tuple(self.x_exps[s] for s in sites),
            tuple(self.z_exps[s] for s in sites),
            0,
        )


def pauli_mul(p: PauliOp, q: PauliOp) -> PauliOp:
    """Group product p·q with exact phase (Z·X = ω_d X·Z on each site)."""
    _same_modulus(p.d, q.d)
    if p.n_sites != q.n_sites:
        raise ValueError(f"Site count mismatch: {p.n_sites} vs {q.n_sites}")
    phase = p.phase_exp + q.phase_exp
    phase += 2 * sum(pz * qx for pz, qx in zip(p.z_exps, q.x_exps))
    xs = tuple(a + b for a, b in zip(p.x_exps, q.x_exps))
    zs = tuple(a + b for a, b in zip(p.z_exps, q.z_exps))
    return PauliOp(p.d, xs, zs, phase)


def shift_matrix(d: int, power: int = 1) -> np.ndarray:
    """X^power with X|a> = |a+1>."""
    mat = np.zeros((d, d), dtype=complex)
    for a in range(d):
        mat[(a + power) % d, a] = 1.0
    return mat


def clock_matrix(d: int, power: int = 1) -> np.ndarray:
    """Z^power with Z|a> = ω^a |a>."""
    return np.diag([omega(d) ** ((a * power) % d) for a in range(d)])


def pauli_matrix(p: PauliOp) -> np.ndarray:
    mat = np.array([[1.0 + 0j]])
    for x, z in zip(p.x_exps, p.z_exps):
        mat = np.kron(mat, shift_matrix(p.d, x) @ clock_matrix(p.d, z))
    return np.exp(1j * np.pi * p.phase_exp / p.d) * mat


def all_paulis(d: int, n_sites: int) -> Iterable[PauliOp]:
    """Every phase-free Pauli word on n sites (d^{2n} elements)."""
    for exps in itertools.product(range(d), repeat=2 * n_sites):
        yield PauliOp(d, exps[:n_sites], exps[n_sites:])


def identify_pauli(matrix: np.ndarray, d: int, tol: float = 1e-9) -> Optional[PauliOp]:
    """The single-qudit Pauli X^x Z^z equal to `matrix` up to a global phase, or None."""
    if matrix.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} matrix, got {matrix.shape}")
    for p in all_paulis(d, 1):
        overlap = np.trace(pauli_matrix(p).conj().T @ matrix) / d
        if abs(abs(overlap) - 1.0) < tol:
            return p
    return None


# ---------------------------------------------------------------------------
# Measurement vectors
# ---------------------------------------------------------------------------


def angle_moduli(d: int) -> Tuple[int, int, int]:
    if d == 2:
        # single qubit angle in units of π/4
        return (8, 1, 1)
    if d == 3:
        return (3, 3, 9)
    return (d, d, d)


@dataclass(frozen=True)
class AngleVector:
    """Coefficients of the diagonal phase ω_d^{c·k³ + b·k(k+1)/2 + a·k}.

    For d=3 the cubic term is ω_9^{c·(k³ mod 9)}; for d=2 the vector holds a
    single angle a·π/4 and b = c = 0.
    """

    d: int
    a: int = 0
    b: int = 0
    c: int = 0

    def __post_init__(self) -> None:
        check_prime(self.d)
        ma, mb, mc = angle_moduli(self.d)
        object.__setattr__(self, "a", int(self.a) % ma)
        object.__setattr__(self, "b", int(self.b) % mb)
        object.__setattr__(self, "c", int(self.c) % mc)

    @classmethod
    def zero(cls, d: int) -> "AngleVector":
        return cls(d)

    @classmethod
    def pauli_z(cls, d: int, power: int) -> "AngleVector":
        """The vector whose rotation is Z^power."""
        return cls(d, 4 * power) if d == 2 else cls(d, power)

    @classmethod
    def random(cls, d: int, rng: np.random.Generator) -> "AngleVector":
        ma, mb, mc = angle_moduli(d)
        return cls(d, int(rng.integers(ma)), int(rng.integers(mb)), int(rng.integers(mc)))

    @classmethod
    def all_vectors(cls, d: int) -> List["AngleVector"]:
        ma, mb, mc = angle_moduli(d)
        return [cls(d, a, b, c) for a in range(ma) for b in range(mb) for c in range(mc)]

    def is_clifford(self) -> bool:
        return self.a % 2 == 0 if self.d == 2 else self.c == 0

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.a, self.b, self.c)


def rotation_phases(v: AngleVector) -> np.ndarray:
    """Diagonal of Rotation(v) as complex phases for k = 0..d-1."""
    d = v.d
    ks = np.arange(d)
    if d == 2:
        return np.exp(1j * np.pi * v.a * ks / 4)
    quad = (v.b * ks * (ks + 1) // 2 + v.a * ks) % d
    phases = np.exp(2j * np.pi * quad / d)
    if d == 3:
        phases = phases * np.exp(2j * np.pi * v.c * ((ks ** 3) % 9) / 9)
    else:
        phases = phases * np.exp(2j * np.pi * (v.c * ks ** 3 % d) / d)
    return phases


def rotation_matrix(v: AngleVector) -> np.ndarray:
    return np.diag(rotation_phases(v))


def compose_angles(u: AngleVector, v: AngleVector) -> AngleVector:
    """Rotation(result) = Rotation(u)·Rotation(v)."""
    _same_modulus(u.d, v.d)
    return AngleVector(u.d, u.a + v.a, u.b + v.b, u.c + v.c)


def adapt_angle_under_pauli(v: AngleVector, x_shift: int, z_shift: int) -> AngleVector:
    """Vector v' with Rotation(v') ∝ Z^{-z} X^{-x} Rotation(v) X^{x}.

    The basis of v' is X^{-x} Z^{-z} applied to the basis of v, so measuring
    X^{-x} Z^{-z}|ψ> at v' gives the statistics and labels of |ψ> at v.
    """
    d = v.d
    s = int(x_shift) % d
    t = int(z_shift) % d
    if d == 2:
        a = -v.a if s else v.a
        return AngleVector(2, a - 4 * t)
    if d == 3:
        return _adapt_qutrit(v, s, t)
    # (k+s)³ = k³ + 3s·k² + 3s²·k + s³ and k² = 2·k(k+1)/2 − k
    a = v.a + 3 * v.c * s * s - 3 * v.c * s + v.b * s - t
    b = v.b + 6 * v.c * s
    return AngleVector(d, a, b, v.c)


def _qutrit_exponents(v: AngleVector) -> np.ndarray:
    ks = np.arange(3)
    return (v.c * ((ks ** 3) % 9) + 3 * ((v.b * ks * (ks + 1) // 2 + v.a * ks) % 3)) % 9


def _adapt_qutrit(v: AngleVector, s: int, t: int) -> AngleVector:
    # Exponents in units of ω_9; the mod-9 cubic term has no binomial shortcut.
    base = _qutrit_exponents(v)
    target = np.array([(base[(k + s) % 3] - 3 * t * k) % 9 for k in range(3)])
    for candidate in AngleVector.all_vectors(3):
        diff = (_qutrit_exponents(candidate) - target) % 9
        if np.all(diff == diff[0]):
            return candidate
    raise RuntimeError(f"No qutrit measurement vector matches the adapted phase {target}")


def z_power_between(v: AngleVector, w: AngleVector) -> Optional[int]:
    """t such that w = v + pauli_z(t), or None if they differ by more than a Z power."""
    _same_modulus(v.d, w.d)
    if v.d == 2:
        diff = (w.a - v.a) % 8
        return diff // 4 if diff % 4 == 0 else None
    if v.b != w.b or v.c != w.c:
        return None
    return (w.a - v.a) % v.d


# ---------------------------------------------------------------------------
# Gates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GateSpec:
    """A gate acting on the given sites, optionally raised to an integer power.

    `pauli` is the local word for PAULI gates, `angle` the vector for ROTATION
    gates and `weight` the multiplier w of MUL (|y> -> |wy>).
    """

    kind: str
    sites: Tuple[int, ...]
    power: int = 1
    pauli: Optional[PauliOp] = None
    angle: Optional[AngleVector] = None
    weight: int = 1

    def __post_init__(self) -> None:
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        if kind not in CLIFFORD_KINDS | NON_CLIFFORD_KINDS:
            raise ValueError(f"Unknown gate kind {self.kind!r}")
        if len(set(self.sites)) != len(self.sites):
            raise ValueError(f"Gate sites must be distinct: {self.sites}")
        if kind == "PAULI":
            if self.pauli is None or self.pauli.n_sites != len(self.sites):
                raise ValueError("PAULI gate needs a Pauli word over exactly its sites")
        elif len(self.sites) != GATE_ARITY[kind]:
            raise ValueError(f"{kind} acts on {GATE_ARITY[kind]} site(s), got {len(self.sites)}")
        if kind == "ROTATION" and self.angle is None:
            raise ValueError("ROTATION gate needs an AngleVector")

    @property
    def is_clifford(self) -> bool:
        return self.kind in CLIFFORD_KINDS

    def shifted(self, site_map: dict) -> "GateSpec":
        """Same gate with sites relabelled through site_map."""
        return GateSpec(
            self.kind,
            tuple(site_map[s] for s in self.sites),
            self.power,
            self.pauli,
            self.angle,
            self.weight,
        )


def _base_matrix(g: GateSpec, d: int) -> np.ndarray:
    w = omega(d)
    kind = g.kind
    if kind == "F":
        idx = np.arange(d)
        return np.exp(2j * np.pi * np.outer(idx, idx) / d) / np.sqrt(d)
    if kind == "S":
        if d == 2:
            return np.diag([1.0, 1j])
        return np.diag([w ** ((a * (a + 1) // 2) % d) for a in range(d)])
    if kind == "T":
        if d == 2:
            return np.diag([1.0, np.exp(1j * np.pi / 4)])
        return np.diag([w ** ((a ** 3) % d) for a in range(d)])
    if kind == "T3":
        if d != 3:
            raise ValueError(f"T3 is only defined for d=3, got d={d}")
        return np.diag([np.exp(2j * np.pi * ((a ** 3) % 9) / 9) for a in range(3)])
    if kind == "MUL":
        if g.weight % d == 0:
            raise ValueError("MUL weight must be invertible mod d")
        mat = np.zeros((d, d), dtype=complex)
        for a in range(d):
            mat[(g.weight * a) % d, a] = 1.0
        return mat
    if kind == "CX":
        mat = np.zeros((d * d, d * d), dtype=complex)
        for a, b in itertools.product(range(d), repeat=2):
            mat[a * d + (a + b) % d, a * d + b] = 1.0
        return mat
    if kind == "CZ":
        return np.diag([w ** ((a * b) % d) for a, b in itertools.product(range(d), repeat=2)])
    if kind == "TOFFOLI":
        dim = d ** 3
        mat = np.zeros((dim, dim), dtype=complex)
        for a, b, c in itertools.product(range(d), repeat=3):
            mat[(a * d + b) * d + (c + a * b) % d, (a * d + b) * d + c] = 1.0
        return mat
    if kind == "PAULI":
        _same_modulus(g.pauli.d, d)
        return pauli_matrix(g.pauli)
    if kind == "ROTATION":
        _same_modulus(g.angle.d, d)
        return rotation_matrix(g.angle)
    raise ValueError(f"Unknown gate kind {kind!r}")


def gate_matrix(g: GateSpec, d: int) -> np.ndarray:
    """Exact local unitary of g over its own sites (first site most significant)."""
    check_prime(d)
    mat = _base_matrix(g, d)
    power = g.power
    if power < 0:
        mat = mat.conj().T
        power = -power
    return np.linalg.matrix_power(mat, power)


# ---------------------------------------------------------------------------
# Clifford conjugation
# ---------------------------------------------------------------------------


def _gate_order(g: GateSpec, d: int) -> int:
    if g.kind == "F":
        return 4
    if g.kind == "S":
        return 4 if d == 2 else d
    if g.kind == "MUL":
        return max(d - 1, 1)
    return d


def clifford_conjugate(g: GateSpec, p: PauliOp) -> PauliOp:
    """P' with g·P·g† = P' exactly (phase included)."""
    if not g.is_clifford:
        raise ValueError(f"Gate {g.kind} is not Clifford")
    d = p.d
    if any(s >= p.n_sites or s < 0 for s in g.sites):
        raise ValueError(f"Gate sites {g.sites} out of range for {p.n_sites} sites")
    xs = list(p.x_exps)
    zs = list(p.z_exps)
    phase = p.phase_exp
    for _ in range(g.power % _gate_order(g, d)):
        phase = _conjugate_once(g, d, xs, zs, phase)
    return PauliOp(d, tuple(xs), tuple(zs), phase)


def _conjugate_once(g: GateSpec, d: int, xs: List[int], zs: List[int], phase: int) -> int:
    kind = g.kind
    if kind == "F":
        (s,) = g.sites
        x, z = xs[s], zs[s]
        # F X F† = Z, F Z F† = X^{-1}; Z^x X^{-z} = ω^{-xz} X^{-z} Z^x
        xs[s], zs[s] = (-z) % d, x
        return phase - 2 * x * z
    if kind == "S":
        (s,) = g.sites
        x = xs[s]
        eps = 1 if d == 2 else 2
        zs[s] = (zs[s] + x) % d
        return phase + eps * x + x * (x - 1)
    if kind == "CX":
        c, t = g.sites
        zs[c] = (zs[c] - zs[t]) % d
        xs[t] = (xs[t] + xs[c]) % d
        return phase
    if kind == "CZ":
        a, b = g.sites
        xa, xb = xs[a], xs[b]
        zs[a] = (zs[a] + xb) % d
        zs[b] = (zs[b] + xa) % d
        return phase + 2 * xa * xb
    if kind == "MUL":
        (s,) = g.sites
        w = g.weight % d
        xs[s] = (w * xs[s]) % d
        zs[s] = (pow(w, -1, d) * zs[s]) % d
        return phase
    if kind == "PAULI":
        q = g.pauli
        _same_modulus(q.d, d)
        for local, s in enumerate(g.sites):
            phase += 2 * (q.z_exps[local] * xs[s] - zs[s] * q.x_exps[local])
        return phase
    raise ValueError(f"Gate {kind} is not Clifford")


def conjugate_circuit(gates: Sequence[GateSpec], p: PauliOp) -> PauliOp:
    """C·P·C† for the circuit C that applies `gates` in list order."""
    for g in gates:
        p = clifford_conjugate(g, p)
    return p
