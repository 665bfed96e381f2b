import numpy as np
import pytest

from ssm_dyn.spin_ops import (PAULI, SpinRegister, collective_spin,
                              dfs_gate_hamiltonian, logical_basis_j0,
                              site_pauli, total_spin_blocks)
from ssm_dyn.tensor_core import dag

from oracles import sz_eigenvalue_counts


def swap_sites(reg, i, j):
    """Transposition operator by permuting tensor indices (independent of
    the Pauli constructors)."""
    n = reg.n_sites
    dims = [2] * n
    perm = list(range(n))
    perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]
    op = np.eye(reg.hilbert_dim).reshape(dims + dims)
    op = np.transpose(op, axes=perm + [n + k for k in range(n)])
    return op.reshape(reg.hilbert_dim, reg.hilbert_dim).astype(complex)


class TestSitePauli:
    def test_single_site(self):
        np.testing.assert_array_equal(site_pauli(SpinRegister(1), 1, "z"),
                                      np.diag([1.0, -1.0]).astype(complex))

    def test_commutation_structure(self):
        reg = SpinRegister(2)
        x2 = site_pauli(reg, 2, "x")
        z2 = site_pauli(reg, 2, "z")
        z1 = site_pauli(reg, 1, "z")
        np.testing.assert_allclose(x2 @ z2 + z2 @ x2, 0, atol=1e-14)
        np.testing.assert_allclose(x2 @ z1 - z1 @ x2, 0, atol=1e-14)

    @pytest.mark.parametrize("n,site,axis", [(1, 1, "x"), (3, 2, "y"), (4, 4, "z")])
    def test_square_trace(self, n, site, axis):
        p = site_pauli(SpinRegister(n), site, axis)
        assert np.trace(p @ p).real == pytest.approx(2 ** n)
        np.testing.assert_allclose(p, dag(p), atol=1e-14)
        assert abs(np.trace(p)) < 1e-14

    def test_site_out_of_range(self):
        with pytest.raises(ValueError):
            site_pauli(SpinRegister(2), 3, "x")


class TestCollectiveSpin:
    def test_single_site(self):
        np.testing.assert_allclose(collective_spin(SpinRegister(1), "z"),
                                   PAULI["z"] / 2)

    def test_sz_spectrum_against_enumeration(self):
        reg = SpinRegister(4)
        evals = np.linalg.eigvalsh(collective_spin(reg, "z"))
        counts = {}
        for v in np.round(evals, 10):
            counts[v] = counts.get(v, 0) + 1
        assert counts == {m: c for m, c in sz_eigenvalue_counts(4).items()}
        assert counts == {-2.0: 1, -1.0: 4, 0.0: 6, 1.0: 4, 2.0: 1}

    def test_su2_commutator(self):
        reg = SpinRegister(3)
        sx, sy, sz = (collective_spin(reg, a) for a in "xyz")
        np.testing.assert_allclose(sx @ sy - sy @ sx, 1j * sz, atol=1e-13)

    def test_permutation_invariance(self):
        reg = SpinRegister(3)
        for axis in "xyz":
            s = collective_spin(reg, axis)
            for (i, j) in [(1, 2), (2, 3), (1, 3)]:
                swap = swap_sites(reg, i, j)
                np.testing.assert_allclose(s @ swap - swap @ s, 0, atol=1e-10)


class TestTotalSpinBlocks:
    def test_two_sites_singlet_triplet(self):
        blocks = total_spin_blocks(SpinRegister(2))
        summary = {b.j_value: b.multiplicity for b in blocks}
        assert summary == {0.0: 1, 1.0: 1}
        assert sum(b.multiplicity * b.block_dim for b in blocks) == 4

    def test_four_sites_commutant_dimension(self):
        blocks = total_spin_blocks(SpinRegister(4))
        assert {b.j_value: b.multiplicity for b in blocks} == {0.0: 2, 1.0: 3, 2.0: 1}
        assert sum(b.multiplicity ** 2 for b in blocks) == 14

    def test_three_sites_commutant_dimension(self):
        blocks = total_spin_blocks(SpinRegister(3))
        assert {b.j_value: b.multiplicity for b in blocks} == {0.5: 2, 1.5: 1}
        assert sum(b.multiplicity ** 2 for b in blocks) == 5

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_isometry_completeness(self, n):
        reg = SpinRegister(n)
        blocks = total_spin_blocks(reg)
        total = sum(b.projector for b in blocks)
        np.testing.assert_allclose(total, np.eye(reg.hilbert_dim), atol=1e-10)
        for b in blocks:
            gram = dag(b.isometry) @ b.isometry
            np.testing.assert_allclose(gram, np.eye(gram.shape[0]), atol=1e-10)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_s2_block_action(self, n):
        reg = SpinRegister(n)
        s2 = sum(collective_spin(reg, a) @ collective_spin(reg, a) for a in "xyz")
        for b in total_spin_blocks(reg):
            restricted = dag(b.isometry) @ s2 @ b.isometry
            expected = b.j_value * (b.j_value + 1) * np.eye(restricted.shape[0])
            np.testing.assert_allclose(restricted, expected, atol=1e-10)

    def test_collective_spin_respects_factorization(self):
        # collective operators must act only on the spin factor
        reg = SpinRegister(4)
        for b in total_spin_blocks(reg):
            if b.block_dim == 1:
                continue
            sz_blk = dag(b.isometry) @ collective_spin(reg, "z") @ b.isometry
            sz_blk = sz_blk.reshape(b.multiplicity, b.block_dim,
                                    b.multiplicity, b.block_dim)
            m_values = np.arange(b.j_value, -b.j_value - 1, -1)
            for a in range(b.multiplicity):
                for c in range(b.multiplicity):
                    blockac = sz_blk[a, :, c, :]
                    expected = np.diag(m_values) if a == c else np.zeros_like(blockac)
                    np.testing.assert_allclose(blockac, expected, atol=1e-10)


class TestLogicalBasis:
    def test_projector_properties(self):
        reg = SpinRegister(4)
        zero_l, one_l, pi = logical_basis_j0(reg)
        np.testing.assert_allclose(pi @ pi, pi, atol=1e-12)
        np.testing.assert_allclose(pi, dag(pi), atol=1e-12)
        assert np.trace(pi).real == pytest.approx(2.0)
        assert np.vdot(zero_l, one_l) == pytest.approx(0.0, abs=1e-12)

    def test_gate_identities(self):
        reg = SpinRegister(4)
        zero_l, one_l, _ = logical_basis_j0(reg)
        basis = np.column_stack([zero_l, one_l])
        for axis in "xz":
            h = dfs_gate_hamiltonian(reg, axis)
            np.testing.assert_allclose(dag(basis) @ h @ basis, PAULI[axis],
                                       atol=1e-10)

    def test_collective_spins_annihilate(self):
        reg = SpinRegister(4)
        _, _, pi = logical_basis_j0(reg)
        for axis in "xyz":
            np.testing.assert_allclose(collective_spin(reg, axis) @ pi, 0,
                                       atol=1e-12)

    def test_requires_four_sites(self):
        with pytest.raises(ValueError):
            logical_basis_j0(SpinRegister(3))
