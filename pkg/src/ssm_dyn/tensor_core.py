"""Dense complex linear-algebra kernels shared by every higher layer.

Vectorization convention (used package-wide): vec(X) stacks the *columns*
of X, so that

    vec(A X B) = (B^T kron A) vec(X).

All superoperator builders rely on this identity; do not mix with
row-stacking.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla

Array = np.ndarray


def _as_finite_matrix(m, name: str = "matrix") -> Array:
    a = np.asarray(m)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or (np.iscomplexobj(a) and not np.all(np.isfinite(a.imag))):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def vec(x: Array) -> Array:
    """Column-stacking vectorization of a matrix."""
    return np.asarray(x).flatten(order="F")


def unvec(v: Array, dim: int | None = None) -> Array:
    """Inverse of :func:`vec`; `dim` defaults to sqrt(len(v))."""
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorized square matrix")
    return v.reshape((dim, dim), order="F")


def dag(a: Array) -> Array:
    return np.asarray(a).conj().T


def kron(a, b) -> Array:
    """Kronecker product with input validation."""
    a = _as_finite_matrix(a, "a")
    b = _as_finite_matrix(b, "b")
    return np.kron(a, b)


def expm(m) -> Array:
    """Matrix exponential (scaling-and-squaring Pade via scipy)."""
    m = _as_finite_matrix(m)
    return sla.expm(m)


def eig(m) -> tuple[Array, Array, Array]:
    """Eigendecomposition of a general complex matrix.

    Returns (w, vr, vl) with m @ vr[:, k] = w[k] vr[:, k] and
    vl[:, k]^H @ m = w[k] vl[:, k]^H. When the spectrum is simple the
    columns are biorthogonally normalized: vl^H @ vr = I. For clustered
    or defective spectra the overlap may be tiny and the raw (unit-norm)
    left vectors are kept for those columns.
    """
    m = _as_finite_matrix(m)
    w, vl, vr = sla.eig(m, left=True, right=True)
    overlap = np.einsum("ij,ij->j", vl.conj(), vr)
    safe = np.abs(overlap) > 1e-12
    scale = np.where(safe, overlap, 1.0)
    vl = vl / scale.conj()[np.newaxis, :]
    return w, vr, vl


def svd_max(m) -> float:
    """Largest singular value (spectral norm) of a dense matrix."""
    m = _as_finite_matrix(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def operator_norm_power(apply_a, apply_ah, probe, tol: float = 1e-13, maxiter: int = 5000) -> float:
    """Largest singular value of a linear map given only its action.

    `apply_a` / `apply_ah` apply the map and its adjoint to arrays shaped
    like `probe` (the adjoint is with respect to the flat Euclidean inner
    product). Plain power iteration on A^H A; convergence slows when the
    two top singular values nearly coincide.
    """
    x = np.asarray(probe, dtype=complex)
    nx = np.linalg.norm(x)
    if nx == 0:
        raise ValueError("probe must be nonzero")
    x = x / nx
    sigma = 0.0
    for _ in range(maxiter):
        y = apply_a(x)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = apply_ah(y / ny)
        nx = np.linalg.norm(x)
        if nx == 0.0:
            return float(ny)
        x = x / nx
        if abs(nx - sigma) <= tol * max(nx, 1.0):
            return float(nx)
        sigma = nx
    return float(sigma)


def svd_max_power(m, seed: int = 0, tol: float = 1e-13, maxiter: int = 5000) -> float:
    """Power-iteration estimate of the largest singular value of a dense
    matrix; independent of the LAPACK SVD path in :func:`svd_max`."""
    m = _as_finite_matrix(m)
    rng = np.random.default_rng(seed)
    probe = rng.normal(size=m.shape[1]) + 1j * rng.normal(size=m.shape[1])
    return operator_norm_power(lambda x: m @ x, lambda y: m.conj().T @ y, probe,
                               tol=tol, maxiter=maxiter)


def is_hermitian(m, tol: float = 1e-12) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol * max(1.0, float(np.max(np.abs(m)))))


def norm_2_estimate(m, seed: int = 0) -> float:
    """Cheap spectral-norm estimate used for tolerance scaling (power
    iteration with loose tolerance)."""
    return svd_max_power(m, seed=seed, tol=1e-6, maxiter=200)
