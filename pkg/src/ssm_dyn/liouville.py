"""Superoperator assembly: Hamiltonian commutators, Lindblad dissipators,
Kraus-map generators, and the perturbed generator L_T = L0 + K/T.

All matrices follow the column-stacking convention of `tensor_core`:

    -i[h, .]            ->  -i (I kron h - h^T kron I)
    gamma D[L]          ->  gamma [ conj(L) kron L
                                    - 1/2 I kron (L^H L)
                                    - 1/2 (L^H L)^T kron I ]
    Phi - id, Phi CP    ->  sum_i p_i conj(A_i) kron A_i  -  I
"""
from __future__ import annotations

import numbers
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .tensor_core import Array, dag, norm_2_estimate, vec

SPECTRUM_RE_TOL = 1e-10  # attractivity validation: all Re(eigenvalue) <= tol
KERNEL_CLUSTER_SCALE = 1e-9  # default kernel cluster tolerance, times ||L0||


class ModelError(ValueError):
    """A model description violates its invariants (dimensions, rates,
    weights, Hermiticity, or attractivity of the unperturbed generator)."""


@dataclass
class LiouvillianModel:
    """Declarative description of a generator.

    The unperturbed part is built from `hamiltonian_terms` (coefficient,
    Hermitian operator), `lindblad_terms` (operator, nonnegative rate) and
    optionally `kraus_map_terms` (operators with probability weights,
    contributing Phi - id). The Hamiltonian perturbation `perturbation`
    enters the full generator as (theta/scale) * -i[perturbation, .]:
    `theta` is the strength swept experiments hold fixed, `scale` is the
    adiabatic time T they send to infinity.
    """

    dim: int
    hamiltonian_terms: list[tuple[Array, float]] = field(default_factory=list)
    lindblad_terms: list[tuple[Array, float]] = field(default_factory=list)
    kraus_map_terms: list[tuple[Array, float]] | None = None
    perturbation: Array | None = None
    theta: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise ModelError("dim must be positive")
        for h, c in self.hamiltonian_terms:
            self._check_op(h, "hamiltonian term")
            if not isinstance(c, numbers.Real):
                raise ModelError("hamiltonian coefficients must be real")
        for l, g in self.lindblad_terms:
            self._check_op(l, "lindblad operator")
            if g < 0:
                raise ModelError(f"lindblad rate {g} is negative")
        if self.kraus_map_terms is not None:
            total = 0.0
            for a, p in self.kraus_map_terms:
                self._check_op(a, "kraus operator")
                if p < 0:
                    raise ModelError(f"kraus weight {p} is negative")
                total += p
            if abs(total - 1.0) > 1e-12:
                raise ModelError(f"kraus weights sum to {total}, expected 1")
        if self.perturbation is not None:
            self._check_op(self.perturbation, "perturbation")
        if not self.scale > 0:
            raise ModelError("scale must be positive")

    def _check_op(self, a, name: str):
        a = np.asarray(a)
        if a.shape != (self.dim, self.dim):
            raise ModelError(f"{name} has shape {a.shape}, expected ({self.dim}, {self.dim})")
        if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
            raise ModelError(f"{name} contains non-finite entries")

    @property
    def is_hamiltonian_only(self) -> bool:
        return not self.lindblad_terms and not self.kraus_map_terms

    def drift_hamiltonian(self) -> Array:
        """Sum of the Hamiltonian terms as a single operator."""
        h = np.zeros((self.dim, self.dim), dtype=complex)
        for op, c in self.hamiltonian_terms:
            h = h + c * np.asarray(op, dtype=complex)
        return h

    def with_scale(self, t: float) -> "LiouvillianModel":
        return replace(self, scale=float(t))


def hamiltonian_superop(h) -> Array:
    """Matrix of -i[h, .]; annihilates vec(I), anti-Hermitian for Hermitian h."""
    h = np.asarray(h, dtype=complex)
    d = h.shape[0]
    if h.shape != (d, d):
        raise ModelError(f"hamiltonian must be square, got {h.shape}")
    herm_defect = np.max(np.abs(h - dag(h)))
    if herm_defect > 1e-12 * max(1.0, float(np.max(np.abs(h)))):
        raise ModelError(f"hamiltonian is not Hermitian (defect {herm_defect:.2e})")
    eye = np.eye(d)
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def lindblad_superop(terms: list[tuple[Array, float]], dim: int | None = None) -> Array:
    """Dissipator sum_i gamma_i (L_i . L_i^H - 1/2 {L_i^H L_i, .})."""
    if dim is None:
        if not terms:
            raise ModelError("dim required when no terms are given")
        dim = np.asarray(terms[0][0]).shape[0]
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    eye = np.eye(dim)
    for l, gamma in terms:
        l = np.asarray(l, dtype=complex)
        if l.shape != (dim, dim):
            raise ModelError(f"lindblad operator shape {l.shape} != ({dim}, {dim})")
        if gamma < 0:
            raise ModelError(f"negative rate {gamma}")
        ldl = dag(l) @ l
        out += gamma * (np.kron(l.conj(), l)
                        - 0.5 * np.kron(eye, ldl)
                        - 0.5 * np.kron(ldl.T, eye))
    return out


def kraus_generator(kraus: list[tuple[Array, float]]) -> Array:
    """Generator Phi - id of a weighted Kraus map Phi = sum_i p_i A_i . A_i^H."""
    if not kraus:
        raise ModelError("empty kraus list")
    dim = np.asarray(kraus[0][0]).shape[0]
    total = sum(p for _, p in kraus)
    if abs(total - 1.0) > 1e-12:
        raise ModelError(f"kraus weights sum to {total}, expected 1")
    phi = np.zeros((dim * dim, dim * dim), dtype=complex)
    for a, p in kraus:
        a = np.asarray(a, dtype=complex)
        if a.shape != (dim, dim):
            raise ModelError(f"kraus operator shape {a.shape} != ({dim}, {dim})")
        phi += p * np.kron(a.conj(), a)
    return phi - np.eye(dim * dim)


def liouvillian(model: LiouvillianModel) -> Array:
    """Unperturbed generator L0 of a model (drift + dissipators)."""
    d2 = model.dim * model.dim
    l0 = np.zeros((d2, d2), dtype=complex)
    h = model.drift_hamiltonian()
    if np.any(h):
        l0 += hamiltonian_superop(h)
    if model.lindblad_terms:
        l0 += lindblad_superop(model.lindblad_terms, model.dim)
    if model.kraus_map_terms:
        l0 += kraus_generator(model.kraus_map_terms)
    return l0


def perturbation_superop(model: LiouvillianModel) -> Array:
    """K = theta * -i[perturbation, .], not yet divided by the scale T."""
    if model.perturbation is None:
        return np.zeros((model.dim ** 2, model.dim ** 2), dtype=complex)
    return model.theta * hamiltonian_superop(model.perturbation)


def assemble(model: LiouvillianModel, validate_spectrum: bool = True
             ) -> tuple[Array, Array, Array]:
    """Build (L0, K, L_T) with L_T = L0 + K / model.scale.

    With `validate_spectrum` (default on) the eigenvalues of L0 are checked
    for Re <= SPECTRUM_RE_TOL; a violation means the steady-state manifold
    is not attractive and every downstream projection result is invalid.
    """
    l0 = liouvillian(model)
    if validate_spectrum and not model.is_hamiltonian_only:
        re_max = float(np.linalg.eigvals(l0).real.max())
        if re_max > SPECTRUM_RE_TOL:
            raise ModelError(
                f"unperturbed generator has eigenvalue with Re = {re_max:.3e} > "
                f"{SPECTRUM_RE_TOL:.0e}; steady-state manifold is not attractive"
            )
    k = perturbation_superop(model)
    l_t = l0 + k / model.scale
    return l0, k, l_t


def relaxation_time(l0: Array, cluster_tol: float | None = None) -> float:
    """1 / min |Re lambda| over eigenvalues outside the kernel cluster.

    Raises ModelError when every eigenvalue sits in the kernel cluster or
    the remaining ones are purely imaginary (Hamiltonian generator): the
    relaxation time is undefined in that case.
    """
    l0 = np.asarray(l0)
    if cluster_tol is None:
        cluster_tol = KERNEL_CLUSTER_SCALE * max(1.0, norm_2_estimate(l0))
    lam = np.linalg.eigvals(l0)
    outside = lam[np.abs(lam) >= cluster_tol]
    if outside.size == 0:
        raise ModelError("all eigenvalues are in the kernel cluster; "
                         "relaxation time undefined")
    min_re = float(np.min(np.abs(outside.real)))
    if min_re <= cluster_tol:
        raise ModelError("generator has nonzero purely imaginary eigenvalues; "
                         "relaxation time undefined")
    return 1.0 / min_re


def trace_preservation_defect(superop: Array) -> float:
    """|| vec(I)^H L || — zero for any trace-preserving generator."""
    d2 = superop.shape[0]
    d = int(round(np.sqrt(d2)))
    left = vec(np.eye(d)).conj()
    return float(np.linalg.norm(left @ superop))
