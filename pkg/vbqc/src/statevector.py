"""
Statevector Backend - dense simulation of small qudit registers.

Amplitudes are stored as a flat complex array of length d**n with site 0 as
the most significant index. Measured sites are removed from the register.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from config import MAX_STATEVECTOR_AMPLITUDES, NORM_TOLERANCE, ZERO_BRANCH_TOLERANCE
from qudit_algebra import (
    AngleVector,
    GateSpec,
    PauliOp,
    check_prime,
    gate_matrix,
    pauli_matrix,
    rotation_matrix,
)


DUMP_MAGIC = b"QSV1"


def check_ceiling(d: int, n_sites: int) -> None:
    if d ** n_sites > MAX_STATEVECTOR_AMPLITUDES:
        raise RuntimeError(
            f"Register of {n_sites} sites at d={d} needs {d ** n_sites} amplitudes, "
            f"above the statevector ceiling of {MAX_STATEVECTOR_AMPLITUDES}"
        )


def fourier_matrix(d: int) -> np.ndarray:
    return gate_matrix(GateSpec("F", (0,)), d)


def plus_state(d: int) -> np.ndarray:
    return np.full(d, 1 / np.sqrt(d), dtype=complex)


def basis_vector(d: int, value: int) -> np.ndarray:
    vec = np.zeros(d, dtype=complex)
    vec[value % d] = 1.0
    return vec


@dataclass(frozen=True)
class StateVector:
    d: int
    n_sites: int
    amps: np.ndarray

    def __post_init__(self) -> None:
        check_prime(self.d)
        check_ceiling(self.d, self.n_sites)
        if self.amps.shape != (self.d ** self.n_sites,):
            raise ValueError(
                f"Expected {self.d ** self.n_sites} amplitudes, got shape {self.amps.shape}"
            )

    @classmethod
    def from_local_states(cls, d: int, local_states: Sequence[np.ndarray]) -> "StateVector":
        amps = np.array([1.0 + 0j])
        for vec in local_states:
            amps = np.kron(amps, np.asarray(vec, dtype=complex))
        return cls(d, len(local_states), amps)

    @classmethod
    def basis(cls, d: int, values: Sequence[int]) -> "StateVector":
        return cls.from_local_states(d, [basis_vector(d, v) for v in values])

    @classmethod
    def plus(cls, d: int, n_sites: int) -> "StateVector":
        return cls.from_local_states(d, [plus_state(d)] * n_sites)

    @classmethod
    def random(cls, d: int, n_sites: int, rng: np.random.Generator) -> "StateVector":
        dim = d ** n_sites
        amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return cls(d, n_sites, amps / np.linalg.norm(amps))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def tensor(self, other: "StateVector") -> "StateVector":
        if other.d != self.d:
            raise ValueError(f"Modulus mismatch: {self.d} vs {other.d}")
        return StateVector(self.d, self.n_sites + other.n_sites, np.kron(self.amps, other.amps))

    def append_site(self, local: np.ndarray) -> "StateVector":
        return StateVector(self.d, self.n_sites + 1, np.kron(self.amps, np.asarray(local, dtype=complex)))

    def tensor_view(self) -> np.ndarray:
        return self.amps.reshape([self.d] * self.n_sites)

    def permuted(self, order: Sequence[int]) -> "StateVector":
        """Register whose site j is this register's site order[j]."""
        if sorted(order) != list(range(self.n_sites)):
            raise ValueError(f"Not a permutation of sites: {order}")
        moved = np.transpose(self.tensor_view(), order)
        return StateVector(self.d, self.n_sites, moved.reshape(-1).copy())

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.d, self.n_sites, np.outer(self.amps, self.amps.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    d: int
    n_sites: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        dim = self.d ** self.n_sites
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"Expected a {dim}x{dim} matrix, got {self.matrix.shape}")

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))


def _check_sites(n_sites: int, sites: Sequence[int]) -> None:
    if len(set(sites)) != len(sites):
        raise ValueError(f"Sites must be distinct: {tuple(sites)}")
    for s in sites:
        if not 0 <= s < n_sites:
            raise ValueError(f"Site {s} out of range for a {n_sites}-site register")


def apply_local(state: StateVector, matrix: np.ndarray, sites: Sequence[int]) -> StateVector:
    """Apply a d^k x d^k matrix to the given k sites."""
    sites = tuple(sites)
    _check_sites(state.n_sites, sites)
    d, k = state.d, len(sites)
    op = np.asarray(matrix, dtype=complex).reshape([d] * (2 * k))
    psi = state.tensor_view()
    out = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), list(sites)))
    out = np.moveaxis(out, list(range(k)), list(sites))
    return StateVector(d, state.n_sites, out.reshape(-1))


def apply_pauli(state: StateVector, pauli: PauliOp) -> StateVector:
    """Site-by-site application of a Pauli word, up to its global phase."""
    if pauli.n_sites != state.n_sites:
        raise ValueError(f"Pauli spans {pauli.n_sites} sites, register has {state.n_sites}")
    for site in range(state.n_sites):
        local = pauli.restrict([site])
        if not local.is_identity():
            state = apply_local(state, pauli_matrix(local), (site,))
    return state


def apply_local_density(rho: DensityMatrix, matrix: np.ndarray, sites: Sequence[int]) -> DensityMatrix:
    """U ρ U† for a local U on the given sites."""
    sites = tuple(sites)
    _check_sites(rho.n_sites, sites)
    d, n, k = rho.d, rho.n_sites, len(sites)
    op = np.asarray(matrix, dtype=complex).reshape([d] * (2 * k))
    tensor = rho.matrix.reshape([d] * (2 * n))
    tensor = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), list(sites)))
    tensor = np.moveaxis(tensor, list(range(k)), list(sites))
    cols = [n + s for s in sites]
    tensor = np.tensordot(op.conj(), tensor, axes=(list(range(k, 2 * k)), cols))
    tensor = np.moveaxis(tensor, list(range(k)), cols)
    dim = d ** n
    return DensityMatrix(d, n, tensor.reshape(dim, dim))


def apply_gate(state: StateVector, gate: GateSpec, sites: Optional[Sequence[int]] = None) -> StateVector:
    return apply_local(state, gate_matrix(gate, state.d), gate.sites if sites is None else sites)


def measurement_unitary(v: AngleVector) -> np.ndarray:
    """F·Rotation(v)†: maps the basis vector Rotation(v)F†|j> = Z^-j Rotation(v)|+0> to |j>."""
    return fourier_matrix(v.d) @ rotation_matrix(v).conj().T


def outcome_probabilities(state: StateVector, site: int) -> np.ndarray:
    """Computational-basis outcome distribution of one site."""
    _check_sites(state.n_sites, (site,))
    probs = np.abs(np.moveaxis(state.tensor_view(), site, 0).reshape(state.d, -1)) ** 2
    return probs.sum(axis=1)


def project_site(state: StateVector, site: int, outcome: int) -> Tuple[float, StateVector]:
    """Project a site onto |outcome>, renormalise and drop the site."""
    slab = np.take(state.tensor_view(), outcome, axis=site).reshape(-1)
    prob = float(np.vdot(slab, slab).real)
    if prob < ZERO_BRANCH_TOLERANCE:
        raise RuntimeError(f"Measurement branch {outcome} on site {site} has zero norm ({prob:.3e})")
    post = StateVector(state.d, state.n_sites - 1, slab / np.sqrt(prob))
    if abs(post.norm() - 1.0) > NORM_TOLERANCE:
        raise RuntimeError("Post-measurement state lost normalisation")
    return prob, post


def measure_computational(
    state: StateVector,
    site: int,
    rng: np.random.Generator,
    forced: Optional[int] = None,
) -> Tuple[int, StateVector]:
    probs = outcome_probabilities(state, site)
    if forced is None:
        outcome = int(rng.choice(state.d, p=probs / probs.sum()))
    else:
        outcome = int(forced) % state.d
    _, post = project_site(state, site, outcome)
    return outcome, post


def measure_rotated(
    state: StateVector,
    site: int,
    v: AngleVector,
    rng: np.random.Generator,
    forced: Optional[int] = None,
) -> Tuple[int, StateVector]:
    """Measure in the basis {Z^-j Rotation(v)|+0>}_j; returns (j, post-state without the site)."""
    rotated = apply_local(state, measurement_unitary(v), (site,))
    return measure_computational(rotated, site, rng, forced)


def partial_trace(rho: DensityMatrix, keep_sites: Sequence[int]) -> DensityMatrix:
    """Reduced state on keep_sites, in ascending site order."""
    keep = sorted(set(keep_sites))
    _check_sites(rho.n_sites, keep)
    n = rho.n_sites
    if len(keep) == n:
        return rho
    letters = string.ascii_letters
    if 2 * n > len(letters):
        raise ValueError(f"partial_trace supports at most {len(letters) // 2} sites")
    rows = list(letters[:n])
    cols = [rows[i] if i not in keep else letters[n + i] for i in range(n)]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    spec = "".join(rows) + "".join(cols) + "->" + out
    tensor = rho.matrix.reshape([rho.d] * (2 * n))
    reduced = np.einsum(spec, tensor)
    dim = rho.d ** len(keep)
    return DensityMatrix(rho.d, len(keep), reduced.reshape(dim, dim))


def _check_same_dims(rho: DensityMatrix, sigma: DensityMatrix) -> None:
    if rho.matrix.shape != sigma.matrix.shape:
        raise ValueError(f"Dimension mismatch: {rho.matrix.shape} vs {sigma.matrix.shape}")


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    _check_same_dims(rho, sigma)
    diff = rho.matrix - sigma.matrix
    eigs = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return float(min(1.0, 0.5 * np.abs(eigs).sum()))


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity (tr √(√ρ σ √ρ))²."""
    _check_same_dims(rho, sigma)
    root = _psd_sqrt(rho.matrix)
    inner = root @ sigma.matrix @ root
    vals = np.clip(np.linalg.eigvalsh((inner + inner.conj().T) / 2), 0.0, None)
    return float(min(1.0, np.sqrt(vals).sum() ** 2))


def state_fidelity(a: StateVector, b: StateVector) -> float:
    if a.amps.shape != b.amps.shape:
        raise ValueError(f"Dimension mismatch: {a.amps.shape} vs {b.amps.shape}")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


def dump_state(state: StateVector, path: Path) -> Path:
    """Write amplitudes as QSV1: magic, d and n (u32 LE), then interleaved f64 LE re/im."""
    path = Path(path)
    header = DUMP_MAGIC + np.array([state.d, state.n_sites], dtype="<u4").tobytes()
    path.write_bytes(header + state.amps.astype("<c16").tobytes())
    return path


def load_state(path: Path) -> StateVector:
    raw = Path(path).read_bytes()
    if raw[:4] != DUMP_MAGIC:
        raise ValueError(f"{path} is not a QSV1 dump")
    d, n_sites = (int(v) for v in np.frombuffer(raw[4:12], dtype="<u4"))
    amps = np.frombuffer(raw[12:], dtype="<c16").astype(complex)
    return StateVector(d, n_sites, amps)
