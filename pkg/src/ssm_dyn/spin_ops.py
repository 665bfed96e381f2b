"""Spin-register operators: embedded Paulis, collective spins, total-spin
decomposition, and the four-qubit logical (J=0) subspace.

Spin convention: the collective components are S^a = sum_j sigma_j^a / 2,
so S^2 has eigenvalues J(J+1) with half-integer J. The kernel structure
of the collective-noise models is independent of this factor; it only
rescales rates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor_core import Array, dag

PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}
AXES = ("x", "y", "z")

# Tolerance for grouping S^2 eigenvalues; the spectrum is integer-spaced
# in J(J+1) units so an absolute tolerance is safe.
S2_CLUSTER_TOL = 1e-8


@dataclass(frozen=True)
class SpinRegister:
    """N spin-1/2 sites; Hilbert dimension 2^N."""

    n_sites: int

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be positive")

    @property
    def local_dim(self) -> int:
        return 2

    @property
    def hilbert_dim(self) -> int:
        return 2 ** self.n_sites


@dataclass(frozen=True)
class AngularMomentumBlock:
    """One total-spin sector C^{n_J} (x) C^{d_J} inside the register space.

    `isometry` has orthonormal columns indexed multiplicity-major: column
    a*d_J + t carries multiplicity label a and magnetic index t, with
    m = J - t (m descending). Collective spins act only on the second
    factor; the first factor is the noiseless degree of freedom.
    """

    j_value: float
    multiplicity: int
    isometry: Array

    @property
    def block_dim(self) -> int:
        return int(round(2 * self.j_value + 1))

    @property
    def projector(self) -> Array:
        return self.isometry @ dag(self.isometry)


def site_pauli(reg: SpinRegister, site: int, axis: str) -> Array:
    """Pauli sigma^axis acting on `site` (1-based), identity elsewhere."""
    if axis not in PAULI:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    if not 1 <= site <= reg.n_sites:
        raise ValueError(f"site {site} out of range 1..{reg.n_sites}")
    out = np.ones((1, 1), dtype=complex)
    for j in range(1, reg.n_sites + 1):
        out = np.kron(out, PAULI[axis] if j == site else np.eye(2))
    return out


def pauli_product(reg: SpinRegister, factors: list[tuple[int, str]]) -> Array:
    """Product of single-site Paulis, e.g. [(1, 'z'), (2, 'z')]."""
    out = np.eye(reg.hilbert_dim, dtype=complex)
    for site, axis in factors:
        out = out @ site_pauli(reg, site, axis)
    return out


def collective_spin(reg: SpinRegister, axis: str) -> Array:
    """S^axis = sum_j sigma_j^axis / 2."""
    out = np.zeros((reg.hilbert_dim, reg.hilbert_dim), dtype=complex)
    for j in range(1, reg.n_sites + 1):
        out += site_pauli(reg, j, axis)
    return out / 2.0


def total_spin_squared(reg: SpinRegister) -> Array:
    return sum(collective_spin(reg, a) @ collective_spin(reg, a) for a in AXES)


def total_spin_blocks(reg: SpinRegister) -> list[AngularMomentumBlock]:
    """Decompose the register into total-spin sectors C^{n_J} (x) C^{d_J}.

    Diagonalizes S^2, groups eigenvalues into J(J+1) clusters, picks the
    highest-weight (m = J) multiplicity space from S^z and generates the
    rest of each ladder with the lowering operator. The lowering operator
    preserves orthogonality between multiplicity labels, so the resulting
    isometry columns are orthonormal by construction.
    """
    if reg.n_sites > 12:
        raise ValueError("dense total-spin decomposition limited to n_sites <= 12")
    dim = reg.hilbert_dim
    s2 = total_spin_squared(reg)
    sz = collective_spin(reg, "z")
    s_minus = collective_spin(reg, "x") - 1j * collective_spin(reg, "y")

    evals, evecs = np.linalg.eigh(s2)
    blocks: list[AngularMomentumBlock] = []
    start = 0
    for i in range(1, dim + 1):
        if i < dim and evals[i] - evals[start] <= S2_CLUSTER_TOL:
            continue
        val = float(np.mean(evals[start:i]))
        j = (-1.0 + np.sqrt(1.0 + 4.0 * max(val, 0.0))) / 2.0
        j = round(2.0 * j) / 2.0
        d_j = int(round(2 * j + 1))
        group_dim = i - start
        if group_dim % d_j != 0:
            raise ValueError(
                f"S^2 cluster at J={j} has dimension {group_dim}, not a multiple of 2J+1={d_j}"
            )
        n_j = group_dim // d_j
        w = evecs[:, start:i]

        # highest-weight space: m = J eigenvectors of S^z within the sector
        sz_blk = dag(w) @ sz @ w
        m_evals, m_evecs = np.linalg.eigh(sz_blk)
        top = np.where(np.abs(m_evals - j) < S2_CLUSTER_TOL)[0]
        if len(top) != n_j:
            raise ValueError(
                f"J={j}: expected {n_j} highest-weight vectors, found {len(top)}"
            )
        columns = np.zeros((dim, n_j * d_j), dtype=complex)
        for a in range(n_j):
            v = w @ m_evecs[:, top[a]]
            v = v / np.linalg.norm(v)
            columns[:, a * d_j] = v
            for t in range(1, d_j):
                v = s_minus @ v
                nrm = np.linalg.norm(v)
                if nrm < 1e-12:
                    raise ValueError(f"lowering chain collapsed at J={j}, m={j - t}")
                v = v / nrm
                columns[:, a * d_j + t] = v
        blocks.append(AngularMomentumBlock(j_value=j, multiplicity=n_j, isometry=columns))
        start = i
    return blocks


def dfs_gate_hamiltonian(reg: SpinRegister, axis: str) -> Array:
    """Two-body + local perturbations that act as logical Paulis on the
    four-qubit J=0 subspace:

        H_x = 3/2 (s1z s2z + s2z s3z) + 1
        H_z = -sqrt(3)/2 (s1z s2z - s2z s3z) + s1z
    """
    if reg.n_sites < 3:
        raise ValueError("gate Hamiltonians need at least 3 sites")
    zz12 = pauli_product(reg, [(1, "z"), (2, "z")])
    zz23 = pauli_product(reg, [(2, "z"), (3, "z")])
    if axis == "x":
        return 1.5 * (zz12 + zz23) + np.eye(reg.hilbert_dim)
    if axis == "z":
        return -np.sqrt(3.0) / 2.0 * (zz12 - zz23) + site_pauli(reg, 1, "z")
    raise ValueError(f"no logical gate Hamiltonian for axis {axis!r}")


def logical_basis_j0(reg: SpinRegister) -> tuple[Array, Array, Array]:
    """Phase-fixed basis (|0_L>, |1_L|) of the two-dimensional J=0 subspace
    of four spins, plus its projector.

    The basis is fixed so the gate Hamiltonians restrict to literal Pauli
    matrices: diagonalize the H_z restriction, label the +eigenvector
    |0_L>, then rotate the phase of |1_L> so that <0_L|H_x|1_L> = +1.
    The overall phase of |0_L> is pinned by making its largest component
    real positive.
    """
    if reg.n_sites != 4:
        raise ValueError("the two-fold degenerate J=0 subspace requires exactly 4 sites")
    blocks = total_spin_blocks(reg)
    j0 = [b for b in blocks if b.j_value == 0.0]
    if not j0 or j0[0].multiplicity != 2:
        raise ValueError("J=0 sector with multiplicity 2 not found")
    w = j0[0].isometry  # 16 x 2

    hz = dfs_gate_hamiltonian(reg, "z")
    hx = dfs_gate_hamiltonian(reg, "x")
    m = dag(w) @ hz @ w
    evals, evecs = np.linalg.eigh(m)
    if abs(evals[0] - evals[1]) < 1e-6:
        raise ValueError(
            f"restricted H_z is not gapped (eigenvalues {evals}); "
            "logical basis cannot be phase-fixed"
        )
    order = np.argsort(-evals)
    basis = w @ evecs[:, order]

    # pin the global phase of |0_L>
    k = int(np.argmax(np.abs(basis[:, 0])))
    phase = basis[k, 0] / abs(basis[k, 0])
    basis[:, 0] = basis[:, 0] / phase

    cross = np.vdot(basis[:, 0], hx @ basis[:, 1])
    if abs(cross) < 1e-12:
        raise ValueError("restricted H_x has no off-diagonal weight; phase fixing failed")
    basis[:, 1] = basis[:, 1] * (cross.conjugate() / abs(cross))

    zero_l = basis[:, 0].copy()
    one_l = basis[:, 1].copy()
    pi = np.outer(zero_l, zero_l.conj()) + np.outer(one_l, one_l.conj())
    return zero_l, one_l, pi
