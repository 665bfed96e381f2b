"""Propagation of the full and effective dynamics, distance/leakage
measurement, scale sweeps, and log-log slope fitting.

The headline quantity is

    distance(T) = || e^{T L_T} P0 - e^{K_eff} P0 ||

with K_eff = P0 K P0 the projected perturbation (the generator carries the
perturbation strength theta but not the scale T; the effective map is
evolved for unit rescaled time). The norm is the maximum singular value of
the maps as matrices on the doubled space. Leakage || Q0 e^{T L_T} P0 ||
tracks the weight driven out of the steady-state manifold.
"""
from __future__ import annotations

import csv
import json
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg as sla

from .liouville import LiouvillianModel, ModelError, assemble, perturbation_superop
from .ssm_projection import (EigenspacePinching, SsmData,
                             commutator_kernel_pinching, kernel_projector,
                             lambda_group_projector)
from .tensor_core import Array, dag, expm, operator_norm_power, svd_max

SWEEP_CSV_COLUMNS = ("T", "inv_T", "distance", "leakage", "projector_drift", "wall_time")
SWEEP_JSON_SCHEMA = "ssm-dyn/sweep/v1"
# operation-time regime: the scale must dominate the relaxation time
MIN_SCALE_TAU_FACTOR = 10.0
DENSE_EXPM_DIM_LIMIT = 1500  # largest d^2 the dense sweep path will attempt


@dataclass
class SweepRecord:
    """One scale point of a sweep."""

    t_scale: float
    distance: float
    leakage: float
    projector_drift: float | None
    wall_time: float

    def __post_init__(self):
        for name in ("t_scale", "distance", "leakage"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if self.projector_drift is not None and (
                not np.isfinite(self.projector_drift) or self.projector_drift < 0):
            raise ValueError(f"projector_drift must be finite and >= 0")


@dataclass
class FitResult:
    slope: float
    intercept: float
    points_used: int
    residual: float

    def __post_init__(self):
        if self.points_used < 2:
            raise ValueError("a fit needs at least 2 points")


def propagate(l_t: Array, t: float) -> Array:
    """Evolution map e^{t l_t}."""
    if t < 0:
        raise ValueError("propagation time must be nonnegative")
    return expm(t * np.asarray(l_t))


def propagate_unitary_lift(h_total: Array, t: float) -> Array:
    """Conjugation superoperator of e^{-i t h}: conj(u) kron u.

    Agrees with propagate(-i[h, .], t) at O(d^3) instead of O(d^6) cost.
    """
    h_total = np.asarray(h_total, dtype=complex)
    if np.max(np.abs(h_total - dag(h_total))) > 1e-12 * max(1.0, float(np.max(np.abs(h_total)))):
        raise ModelError("unitary lift requires a Hermitian generator")
    u = sla.expm(-1j * t * h_total)
    return np.kron(u.conj(), u)


def theorem_distance(l_t: Array, ssm: SsmData, k_eff_gen: Array, t_scale: float,
                     exp_k_eff: Array | None = None,
                     compute_drift: bool = False) -> SweepRecord:
    """Distance and leakage of the exact evolution from the projected one
    at one scale point (dense path)."""
    start = time.perf_counter()
    e_t = propagate(l_t, t_scale)
    if exp_k_eff is None:
        exp_k_eff = expm(k_eff_gen)
    distance = svd_max(e_t @ ssm.p0 - exp_k_eff @ ssm.p0)
    leakage = svd_max(ssm.q0 @ e_t @ ssm.p0)
    drift = None
    if compute_drift:
        p = lambda_group_projector(l_t, ssm.ssm_dim)
        drift = svd_max(p - ssm.p0)
    return SweepRecord(t_scale=float(t_scale), distance=distance, leakage=leakage,
                       projector_drift=drift, wall_time=time.perf_counter() - start)


def dyson_first_order(ssm: SsmData, k_superop: Array, t: float) -> Array:
    """First-order approximant to e^{tL} P0:

        P0 + t P0 K P0 + (e^{t l0} - 1) S K P0

    with K the scaled perturbation actually entering the generator. The
    remainder is second order in K; the third term is the only one leaving
    the manifold and is bounded uniformly in t by ||S|| ||K||.
    """
    if t < 0:
        raise ValueError("time must be nonnegative")
    k = np.asarray(k_superop)
    eye = np.eye(k.shape[0])
    return (ssm.p0
            + t * (ssm.p0 @ k @ ssm.p0)
            + (propagate(ssm.l0, t) - eye) @ ssm.resolvent_s @ k @ ssm.p0)


def default_t_grid(t_min: float = 1e2, t_max: float = 1e5, n_points: int = 8) -> Array:
    """Log-spaced scale grid; 8 points over [1e2, 1e5] by default."""
    if not (t_min > 0 and t_max > t_min and n_points >= 2):
        raise ValueError("need 0 < t_min < t_max and n_points >= 2")
    return np.logspace(np.log10(t_min), np.log10(t_max), n_points)


def _sweep_point_dense(model: LiouvillianModel, ssm: SsmData, k: Array,
                       exp_k_eff: Array, t: float, compute_drift: bool) -> SweepRecord:
    l_t = ssm.l0 + k / t
    return theorem_distance(l_t, ssm, None, t, exp_k_eff=exp_k_eff,
                            compute_drift=compute_drift)


def _hamiltonian_record(h0: Array, h1: Array, theta: float,
                        pinching: EigenspacePinching, u_eff: Array,
                        t: float) -> SweepRecord:
    """Distance/leakage point for a commutator generator, computed at
    operator level with a matrix-free norm (no d^2 x d^2 matrices)."""
    start = time.perf_counter()
    d = h0.shape[0]
    u = sla.expm(-1j * (t * h0 + theta * h1))
    pinch = pinching.pinch

    def diff(x):
        xp = pinch(x)
        return u @ xp @ dag(u) - u_eff @ xp @ dag(u_eff)

    def diff_h(y):
        return pinch(dag(u) @ y @ u - dag(u_eff) @ y @ u_eff)

    def leak(x):
        y = u @ pinch(x) @ dag(u)
        return y - pinch(y)

    def leak_h(y):
        return pinch(dag(u) @ (y - pinch(y)) @ u)

    rng = np.random.default_rng(12345)
    probe = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    distance = operator_norm_power(diff, diff_h, probe)
    leakage = operator_norm_power(leak, leak_h, probe)
    return SweepRecord(t_scale=float(t), distance=distance, leakage=leakage,
                       projector_drift=None, wall_time=time.perf_counter() - start)


def run_sweep(model: LiouvillianModel, t_grid, compute_drift: bool = False,
              workers: int = 1) -> list[SweepRecord]:
    """Sweep the adiabatic scale over `t_grid` and measure the projection
    theorem distance at every point.

    The grid must be positive ascending with min(T) at least 10x the
    relaxation time. Purely Hamiltonian models take the operator-level
    pinching path (where the relaxation time is undefined and the spectral
    gap plays its role, enforced as a warning only); all other models take
    the dense superoperator path. Per-point failures are recorded as
    warnings and the sweep continues.
    """
    t_grid = np.asarray(list(t_grid), dtype=float)
    if t_grid.size == 0 or np.any(t_grid <= 0) or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be positive and strictly ascending")
    if model.perturbation is None:
        raise ModelError("sweep requires a perturbation")

    if model.is_hamiltonian_only:
        h0 = model.drift_hamiltonian()
        h1 = np.asarray(model.perturbation, dtype=complex)
        pinching = commutator_kernel_pinching(h0)
        if t_grid[0] < MIN_SCALE_TAU_FACTOR / pinching.gap:
            warnings.warn(
                f"min(T) = {t_grid[0]:.3g} is below {MIN_SCALE_TAU_FACTOR}/gap = "
                f"{MIN_SCALE_TAU_FACTOR / pinching.gap:.3g}; smallest scale points "
                "are outside the adiabatic regime", stacklevel=2)
        h1_pinched = pinching.pinch(h1)
        u_eff = sla.expm(-1j * model.theta * h1_pinched)

        def point(t):
            return _hamiltonian_record(h0, h1, model.theta, pinching, u_eff, t)
    else:
        if model.dim ** 2 > DENSE_EXPM_DIM_LIMIT:
            raise ModelError(
                f"dense sweep path limited to dim^2 <= {DENSE_EXPM_DIM_LIMIT}")
        l0, k, _ = assemble(model)
        ssm = kernel_projector(l0)
        if ssm.tau_r is not None and t_grid[0] < MIN_SCALE_TAU_FACTOR * ssm.tau_r:
            raise ModelError(
                f"min(T) = {t_grid[0]:.3g} violates the operation-time condition "
                f"T >= {MIN_SCALE_TAU_FACTOR} tau_R = "
                f"{MIN_SCALE_TAU_FACTOR * ssm.tau_r:.3g}")
        exp_k_eff = expm(ssm.p0 @ k @ ssm.p0)

        def point(t):
            return _sweep_point_dense(model, ssm, k, exp_k_eff, t, compute_drift)

    records: list[SweepRecord] = []
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {t: pool.submit(point, t) for t in t_grid}
            for t in t_grid:
                try:
                    records.append(futures[t].result())
                except Exception as exc:  # noqa: BLE001 - per-point isolation
                    warnings.warn(f"sweep point T={t:.3g} failed: {exc}", stacklevel=2)
    else:
        for t in t_grid:
            try:
                records.append(point(t))
            except Exception as exc:  # noqa: BLE001 - per-point isolation
                warnings.warn(f"sweep point T={t:.3g} failed: {exc}", stacklevel=2)
    records.sort(key=lambda r: r.t_scale)
    return records


def loglog_fit(records, n_points: int = 4, value: str = "distance") -> FitResult:
    """Least-squares fit of log(value) against log(1/T) over the
    `n_points` largest scales.

    Accepts SweepRecords or (T, value) pairs. Nonpositive values cannot be
    fit on a log scale and are excluded with a warning.
    """
    pairs = []
    for r in records:
        if isinstance(r, SweepRecord):
            pairs.append((r.t_scale, getattr(r, value)))
        else:
            pairs.append((float(r[0]), float(r[1])))
    if n_points > len(pairs):
        raise ValueError(f"requested {n_points} fit points, have {len(pairs)}")
    pairs.sort(key=lambda p: -p[0])
    chosen = pairs[:n_points]
    kept = [(t, v) for t, v in chosen if v > 0]
    if len(kept) < len(chosen):
        warnings.warn(f"excluded {len(chosen) - len(kept)} nonpositive values from fit",
                      stacklevel=2)
    if len(kept) < 2:
        raise ValueError("fewer than 2 positive values; cannot fit")
    x = np.log([1.0 / t for t, _ in kept])
    y = np.log([v for _, v in kept])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return FitResult(slope=float(slope), intercept=float(intercept),
                     points_used=len(kept), residual=resid)


def _fmt(v) -> str:
    if v is None:
        return ""
    return format(float(v), ".17g")


def write_sweep_csv(records: list[SweepRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_CSV_COLUMNS)
        for r in records:
            writer.writerow([_fmt(r.t_scale), _fmt(1.0 / r.t_scale), _fmt(r.distance),
                             _fmt(r.leakage), _fmt(r.projector_drift), _fmt(r.wall_time)])


def read_sweep_csv(path) -> list[SweepRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(SWEEP_CSV_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing sweep columns {sorted(missing)}")
        for row in reader:
            drift = row["projector_drift"]
            records.append(SweepRecord(
                t_scale=float(row["T"]),
                distance=float(row["distance"]),
                leakage=float(row["leakage"]),
                projector_drift=float(drift) if drift else None,
                wall_time=float(row["wall_time"] or 0.0),
            ))
    return records


def write_sweep_json(records: list[SweepRecord], path, meta: dict | None = None) -> None:
    payload = {
        "schema": SWEEP_JSON_SCHEMA,
        "meta": meta or {},
        "records": [asdict(r) for r in records],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
