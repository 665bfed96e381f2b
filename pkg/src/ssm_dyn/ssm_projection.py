"""Spectral projections onto steady-state manifolds and the effective
generators they induce.

The production path for the kernel projector P0 and the reduced resolvent
S is an ordered Schur decomposition: eigenvalues inside the kernel cluster
are reordered into a leading block, the block coupling is removed by a
Sylvester solve, and the (generally non-Hermitian) projector is read off.
This is backward-stable where a raw eigendecomposition of a non-normal
generator can be arbitrarily ill-conditioned; the eigendecomposition path
is kept as an independent cross-check (`spectral_resolution` +
`reduced_resolvent`).

For purely Hamiltonian generators -i[h0, .] the kernel projector is the
pinching over eigenspaces of h0; `EigenspacePinching` implements that path
at operator level, O(d^3) instead of O(d^6).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .liouville import KERNEL_CLUSTER_SCALE, ModelError
from .spin_ops import AngularMomentumBlock
from .tensor_core import Array, dag, norm_2_estimate, svd_max, unvec, vec

NILPOTENT_REL_TOL = 1e-8
SYLVESTER_COND_LIMIT = 1e12


class ClusterSeparationError(ModelError):
    """Eigenvalue clusters are too close to separate reliably."""


@dataclass
class SsmData:
    """Kernel spectral data of an unperturbed generator.

    p0: spectral projector onto the kernel (not Hermitian in general)
    q0: complementary projector I - p0
    resolvent_s: pseudo-inverse of l0 supported off the kernel,
                 s @ l0 = l0 @ s = q0 and s @ p0 = p0 @ s = 0
    ssm_dim: algebraic dimension of the kernel cluster
    tau_r: 1 / min |Re lambda| outside the kernel, None when the
           complement spectrum is purely imaginary (Hamiltonian case)
    gap: min |lambda| outside the kernel cluster
    l0: the generator this data was computed from
    """

    p0: Array
    q0: Array
    resolvent_s: Array
    ssm_dim: int
    tau_r: float | None
    gap: float
    l0: Array


@dataclass
class SpectralCluster:
    center: complex
    projector: Array
    nilpotent: Array
    multiplicity: int


@dataclass
class SpectralResolution:
    """Eigenvalue-cluster resolution m = sum_j (lambda_j P_j + D_j)."""

    clusters: list[SpectralCluster]
    dim: int

    def reconstruct(self) -> Array:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for c in self.clusters:
            out += c.center * c.projector + c.nilpotent
        return out


def _ordered_schur_projector(m: Array, select, expected_dim: int | None = None,
                             want_resolvent: bool = True
                             ) -> tuple[Array, Array | None, Array, int]:
    """Schur-reorder eigenvalues satisfying `select` into the leading block
    and decouple it.

    Returns (p, s_complement, t22_diag, sdim): the spectral projector onto
    the selected invariant subspace, the resolvent supported on the
    complement (inverse of the complement block; None unless
    `want_resolvent`, which requires the complement to be invertible), the
    complement eigenvalues, and the selected dimension.
    """
    n = m.shape[0]
    t, z, sdim = sla.schur(m, output="complex", sort=select)
    if expected_dim is not None and sdim != expected_dim:
        raise ClusterSeparationError(
            f"selected cluster has dimension {sdim}, expected {expected_dim}")
    if sdim == n:
        return np.eye(n, dtype=complex), np.zeros((n, n), dtype=complex), np.array([]), sdim
    if sdim == 0:
        raise ClusterSeparationError("no eigenvalue satisfies the cluster predicate")
    a = t[:sdim, :sdim]
    b = t[sdim:, sdim:]
    c = t[:sdim, sdim:]
    # block-decoupling: a @ y - y @ b = -c
    y = sla.solve_sylvester(a, -b, -c)
    y_norm = float(np.max(np.abs(y))) if y.size else 0.0
    if y_norm > SYLVESTER_COND_LIMIT:
        warnings.warn(
            f"Sylvester decoupling is ill-conditioned (||Y|| ~ {y_norm:.2e}); "
            "projector entries may lose accuracy", stacklevel=3)
    p_schur = np.zeros((n, n), dtype=complex)
    p_schur[:sdim, :sdim] = np.eye(sdim)
    p_schur[:sdim, sdim:] = -y
    p = z @ p_schur @ dag(z)

    s = None
    if want_resolvent:
        b_inv = sla.solve_triangular(b, np.eye(n - sdim, dtype=complex))
        s_schur = np.zeros((n, n), dtype=complex)
        s_schur[:sdim, sdim:] = y @ b_inv
        s_schur[sdim:, sdim:] = b_inv
        s = z @ s_schur @ dag(z)
    return p, s, np.diag(b), sdim


def kernel_projector(l0: Array, cluster_tol: float | None = None) -> SsmData:
    """Spectral projector onto the kernel cluster of l0, with the reduced
    resolvent, via ordered Schur decomposition.

    `cluster_tol` defaults to 1e-9 ||l0||; eigenvalues inside the kernel
    cluster and the rest must be separated by a factor 10 beyond it.
    A nonzero nilpotent part on the kernel cluster is reported as a
    warning: the leading-order projection picture assumes it is absent.
    """
    l0 = np.asarray(l0, dtype=complex)
    norm = max(1.0, norm_2_estimate(l0)) if l0.any() else 1.0
    if cluster_tol is None:
        cluster_tol = KERNEL_CLUSTER_SCALE * norm

    p0, s, lam_rest, sdim = _ordered_schur_projector(
        l0, lambda lam: abs(lam) < cluster_tol)
    if lam_rest.size:
        gap = float(np.min(np.abs(lam_rest)))
        if gap <= 10 * cluster_tol:
            raise ClusterSeparationError(
                f"kernel cluster and the rest are separated by only {gap:.3e} "
                f"(cluster tolerance {cluster_tol:.3e})")
        min_re = float(np.min(np.abs(lam_rest.real)))
        tau_r = 1.0 / min_re if min_re > cluster_tol else None
    else:
        gap = np.inf
        tau_r = None

    nil = l0 @ p0
    nil_norm = svd_max(nil)
    if nil_norm > NILPOTENT_REL_TOL * norm:
        warnings.warn(
            f"kernel cluster carries a nilpotent part of norm {nil_norm:.3e}; "
            "the O(1/T) projection bound assumes none", stacklevel=2)

    q0 = np.eye(l0.shape[0], dtype=complex) - p0
    return SsmData(p0=p0, q0=q0, resolvent_s=s, ssm_dim=sdim,
                   tau_r=tau_r, gap=gap, l0=l0)


def lambda_group_projector(l_t: Array, ssm_dim: int) -> Array:
    """Spectral projector onto the invariant subspace of the `ssm_dim`
    eigenvalues of the perturbed generator nearest zero.

    These eigenvalues emanate from the degenerate kernel as the
    perturbation switches on; they must still be separated from the rest
    by a gap of at least 10x their spread.
    """
    l_t = np.asarray(l_t, dtype=complex)
    lam = np.sort(np.abs(np.linalg.eigvals(l_t)))
    if ssm_dim >= l_t.shape[0]:
        raise ValueError("ssm_dim must be smaller than the matrix dimension")
    spread = lam[ssm_dim - 1]
    nxt = lam[ssm_dim]
    if nxt < 10 * max(spread, 1e-300):
        raise ClusterSeparationError(
            f"cluster spread {spread:.3e} and next eigenvalue {nxt:.3e} "
            "are not separated; the scale T is too small")
    threshold = np.sqrt(spread * nxt) if spread > 0 else nxt / 2.0
    p, _, _, _ = _ordered_schur_projector(
        l_t, lambda z: abs(z) < threshold, expected_dim=ssm_dim,
        want_resolvent=False)
    return p


def _cluster_eigenvalues(lam: Array, cluster_tol: float) -> list[Array]:
    """Single-linkage clustering of eigenvalues in the complex plane;
    returns index arrays, ordered by |cluster center|."""
    n = lam.size
    labels = -np.ones(n, dtype=int)
    n_clusters = 0
    for i in range(n):
        if labels[i] >= 0:
            continue
        stack = [i]
        labels[i] = n_clusters
        while stack:
            j = stack.pop()
            near = np.where((labels < 0) & (np.abs(lam - lam[j]) <= cluster_tol))[0]
            for k in near:
                labels[k] = n_clusters
                stack.append(int(k))
        n_clusters += 1
    groups = [np.where(labels == c)[0] for c in range(n_clusters)]
    groups.sort(key=lambda idx: abs(complex(np.mean(lam[idx]))))
    return groups


def spectral_resolution(m: Array, cluster_tol: float | None = None) -> SpectralResolution:
    """Full eigenvalue-cluster resolution m = sum_j (lambda_j P_j + D_j),
    one ordered-Schur projector per cluster.

    Intended for moderate dimensions (one Schur factorization per cluster);
    the production kernel path is `kernel_projector`.
    """
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    scale = max(1.0, norm_2_estimate(m)) if m.any() else 1.0
    if cluster_tol is None:
        cluster_tol = KERNEL_CLUSTER_SCALE * scale
    lam = np.linalg.eigvals(m)
    groups = _cluster_eigenvalues(lam, cluster_tol)

    clusters = []
    for idx in groups:
        center = complex(np.mean(lam[idx]))
        rest = np.concatenate([lam[g] for g in groups if g is not idx]) if len(groups) > 1 else np.array([])
        if rest.size:
            gap = float(np.min(np.abs(rest - center)))
            radius = float(np.max(np.abs(lam[idx] - center)))
            if gap <= 2 * max(radius, cluster_tol):
                raise ClusterSeparationError(
                    f"cluster at {center:.3e} (radius {radius:.3e}) is not "
                    f"separated from the rest (gap {gap:.3e})")
            threshold = np.sqrt(max(radius, cluster_tol) * gap)
        else:
            threshold = np.inf
        proj, _, _, sdim = _ordered_schur_projector(
            m, lambda z: abs(z - center) < threshold, expected_dim=len(idx),
            want_resolvent=False)
        nil = (m - center * np.eye(n)) @ proj
        if svd_max(nil) <= NILPOTENT_REL_TOL * scale:
            nil = np.zeros_like(nil)
        clusters.append(SpectralCluster(center=center, projector=proj,
                                        nilpotent=nil, multiplicity=sdim))
    return SpectralResolution(clusters=clusters, dim=n)


def reduced_resolvent(res: SpectralResolution, at_cluster: int = 0) -> Array:
    """Reduced resolvent at one cluster from the explicit resolution
    formula:

      S = - sum_{j != at} [ (-lambda_j)^-1 P_j
                            + sum_n (-lambda_j)^(-n-1) D_j^n ]

    (eigenvalues measured relative to the target cluster's center).
    """
    target = res.clusters[at_cluster]
    lam0 = target.center
    if svd_max(target.nilpotent) > 0:
        warnings.warn("target cluster carries a nilpotent part; the first-order "
                      "projection bound assumes none", stacklevel=2)
    n = res.dim
    s = np.zeros((n, n), dtype=complex)
    for j, cl in enumerate(res.clusters):
        if j == at_cluster:
            continue
        lam = cl.center - lam0
        if lam == 0:
            raise ValueError("two distinct clusters share a center; increase cluster_tol")
        s -= (-lam) ** -1 * cl.projector
        d_pow = cl.nilpotent
        k = 1
        while np.any(d_pow) and k < cl.multiplicity:
            s -= (-lam) ** (-k - 1) * d_pow
            d_pow = d_pow @ cl.nilpotent
            k += 1
    return s


def effective_generator(ssm: SsmData, k_superop: Array) -> Array:
    """First-order effective generator p0 @ K @ p0 on the manifold."""
    k = np.asarray(k_superop)
    if k.shape != ssm.p0.shape:
        raise ValueError(f"perturbation shape {k.shape} != projector shape {ssm.p0.shape}")
    return ssm.p0 @ k @ ssm.p0


def second_order_generator(ssm: SsmData, k_superop: Array) -> Array:
    """Second-order effective generator -p0 @ K @ S @ K @ p0.

    Meaningful when the first-order part p0 K p0 vanishes; a warning with
    its norm is emitted otherwise.
    """
    first = effective_generator(ssm, k_superop)
    first_norm = svd_max(first)
    if first_norm > 1e-10 * max(1.0, svd_max(np.asarray(k_superop))):
        warnings.warn(
            f"first-order effective generator does not vanish "
            f"(norm {first_norm:.3e}); second-order form is not the leading term",
            stacklevel=2)
    return -ssm.p0 @ k_superop @ ssm.resolvent_s @ k_superop @ ssm.p0


def commutant_projection(blocks: list[AngularMomentumBlock], x: Array) -> Array:
    """Conditional expectation onto the commutant of the collective-spin
    algebra: inside each total-spin sector, trace out the spin factor and
    re-tensor the normalized identity.

    The output commutes with every collective spin; applying the map twice
    is idempotent.
    """
    x = np.asarray(x, dtype=complex)
    dim = x.shape[0]
    total = sum(b.multiplicity * b.block_dim for b in blocks)
    if total != dim:
        raise ValueError(f"blocks cover dimension {total}, operator has {dim}")
    out = np.zeros_like(x)
    for b in blocks:
        n_j, d_j = b.multiplicity, b.block_dim
        m = dag(b.isometry) @ x @ b.isometry
        m = m.reshape(n_j, d_j, n_j, d_j)
        omega = np.einsum("atbt->ab", m)
        out += b.isometry @ np.kron(omega, np.eye(d_j) / d_j) @ dag(b.isometry)
    return out


@dataclass
class EigenspacePinching:
    """Kernel data of a commutator generator -i[h0, .], stored in operator
    form: the kernel projector is the pinching over eigenspace clusters of
    h0, X -> sum_c Pi_c X Pi_c.
    """

    eigenvalues: Array
    basis: Array
    cluster_slices: list[slice] = field(repr=False)

    @property
    def kernel_dim(self) -> int:
        return sum((s.stop - s.start) ** 2 for s in self.cluster_slices)

    @property
    def gap(self) -> float:
        """Smallest nonzero eigenvalue difference between clusters."""
        centers = [np.mean(self.eigenvalues[s]) for s in self.cluster_slices]
        diffs = [abs(a - b) for i, a in enumerate(centers) for b in centers[:i]]
        return float(min(diffs)) if diffs else np.inf

    def cluster_projectors(self) -> list[Array]:
        return [self.basis[:, s] @ dag(self.basis[:, s]) for s in self.cluster_slices]

    def pinch(self, x: Array) -> Array:
        """sum_c Pi_c x Pi_c."""
        y = dag(self.basis) @ x @ self.basis
        out = np.zeros_like(y)
        for s in self.cluster_slices:
            out[s, s] = y[s, s]
        return self.basis @ out @ dag(self.basis)

    def p0_superoperator(self) -> Array:
        """Dense kernel projector sum_c conj(Pi_c) kron Pi_c."""
        d = self.basis.shape[0]
        out = np.zeros((d * d, d * d), dtype=complex)
        for pc in self.cluster_projectors():
            out += np.kron(pc.conj(), pc)
        return out

    def apply_p0(self, v: Array) -> Array:
        return vec(self.pinch(unvec(v)))


def commutator_kernel_pinching(h0: Array, cluster_tol: float = 1e-8) -> EigenspacePinching:
    """Eigenspace-cluster pinching data for the generator -i[h0, .]."""
    h0 = np.asarray(h0, dtype=complex)
    if np.max(np.abs(h0 - dag(h0))) > 1e-12 * max(1.0, float(np.max(np.abs(h0)))):
        raise ModelError("pinching path requires a Hermitian generator")
    evals, basis = np.linalg.eigh(h0)
    slices = []
    start = 0
    for i in range(1, len(evals) + 1):
        if i == len(evals) or evals[i] - evals[start] > cluster_tol:
            slices.append(slice(start, i))
            start = i
    return EigenspacePinching(eigenvalues=evals, basis=basis, cluster_slices=slices)
