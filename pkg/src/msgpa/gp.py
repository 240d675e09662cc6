"""Geometric-phase estimators for pure and mixed state trajectories.

Pure states use the discrete Pancharatnam product,
``arg<psi_0|psi_N> - sum_i arg<psi_i|psi_{i+1}>``, cross-checked against
``arg<psi_0|psi_N> - Im int <psi|dpsi/dt> dt``. Mixed states follow the
interferometric (Tong) construction: instantaneous eigenvectors of rho are
parallel transported along the trajectory and the phase is
``Arg sum_k sqrt(l_k(0) l_k(t)) <v_k(0)|v_k(t)>``.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import linear_sum_assignment

from .dynamics import Kind, Trajectory
from .errors import RefinementError, ResolutionError

log = logging.getLogger(__name__)

ORTHOGONAL_TOL = 1e-6
ESTIMATOR_TOL = 1e-4
WEIGHT_TOL = 1e-10
DEGENERACY_TOL = 1e-9
BRANCH_OVERLAP_MIN = 0.9


@dataclass
class GPTrace:
    """Time-resolved geometric phase.

    ``phi_g``, ``phi_global`` and ``phi_dyn`` are NaN at ``flagged`` samples,
    where the reference overlap vanishes and the phase is undefined.
    ``phi_g = phi_global - phi_dyn`` wherever defined.
    """

    times: np.ndarray
    phi_g: np.ndarray
    phi_global: np.ndarray
    phi_dyn: np.ndarray
    flagged: np.ndarray
    extra: dict = field(default_factory=dict)

    def max_abs(self):
        return float(np.nanmax(np.abs(self.phi_g)))


def wrap(phases):
    """Map phases onto ``(-pi, pi]``."""
    phases = np.asarray(phases, dtype=float)
    return np.pi - np.mod(np.pi - phases, 2 * np.pi)


def unwrap(phases):
    """Remove ``2 pi`` jumps so adjacent samples differ by at most ``pi``.

    NaN entries are skipped and stay NaN.
    """
    phases = np.asarray(phases, dtype=float)
    out = phases.copy()
    ok = ~np.isnan(phases)
    if ok.any():
        out[ok] = np.unwrap(phases[ok])
    return out


def _check_estimators(disc, integral, flagged):
    gap = np.abs(disc - integral)
    worst = float(gap.max()) if gap.size else 0.0
    if worst > ESTIMATOR_TOL:
        raise ResolutionError(
            f"discrete and integral dynamical phases differ by {worst:.3e} rad",
            "increase the number of time steps",
        )
    return worst


def gp_pure(traj, check=True):
    """Geometric phase of a pure-state trajectory.

    Returns a GPTrace whose ``extra`` holds the integral estimator
    (``phi_g_integral``) and the largest discrete/integral gap.
    """
    if traj.kind is not Kind.PURE:
        raise TypeError("gp_pure needs a pure-state trajectory")
    psi = traj.states
    if psi.shape[0] < 2:
        raise ValueError("need at least two samples")
    t = traj.times

    ref = psi @ psi[0].conj()
    flagged = np.abs(ref) < ORTHOGONAL_TOL
    glob = np.where(flagged, np.nan, np.angle(ref))
    glob = unwrap(glob)

    steps = np.einsum("ti,ti->t", psi[:-1].conj(), psi[1:])
    dyn = np.concatenate([[0.0], np.cumsum(np.angle(steps))])

    dpsi = np.gradient(psi, t, axis=0)
    integrand = np.einsum("ti,ti->t", psi.conj(), dpsi).imag
    dyn_int = cumulative_trapezoid(integrand, t, initial=0.0)
    gap = _check_estimators(dyn, dyn_int, flagged) if check else float(np.max(np.abs(dyn - dyn_int)))

    phi_g = glob - dyn
    phi_dyn = np.where(flagged, np.nan, dyn)
    return GPTrace(
        t.copy(), phi_g, glob, phi_dyn, flagged,
        {"phi_g_integral": glob - dyn_int, "estimator_gap": gap},
    )


def _clusters(vals, tol):
    """Index groups of (sorted) eigenvalues closer than ``tol`` to a neighbour."""
    groups = [[0]]
    for j in range(1, len(vals)):
        if abs(vals[j] - vals[j - 1]) < tol:
            groups[-1].append(j)
        else:
            groups.append([j])
    return groups


def _align(prev, vals, vecs, tol):
    """Carry the tracked columns ``prev`` onto the new eigenframe.

    Each tracked vector is assigned to one eigenvector slot by maximal
    overlap (capacity of a degenerate cluster equals its size); vectors in
    the same cluster are rotated jointly by orthogonal Procrustes. The
    result is gauge fixed so ``<prev_k|new_k>`` is real and non-negative.
    """
    groups = _clusters(vals, tol)
    owner = np.empty(len(vals), dtype=int)
    for c, g in enumerate(groups):
        owner[g] = c
    weight = np.empty((len(groups), prev.shape[1]))
    for c, g in enumerate(groups):
        weight[c] = np.sum(np.abs(vecs[:, g].conj().T @ prev) ** 2, axis=0)
    cost = -weight[owner].T  # (tracked, slots)
    rows, cols = linear_sum_assignment(cost)
    cluster_of = np.empty(prev.shape[1], dtype=int)
    cluster_of[rows] = owner[cols]

    new = np.empty_like(prev)
    new_vals = np.empty(prev.shape[1])
    for c in np.unique(cluster_of):
        ks = np.flatnonzero(cluster_of == c)
        basis = vecs[:, groups[c]]
        m = basis.conj().T @ prev[:, ks]
        u, _, vh = np.linalg.svd(m, full_matrices=False)
        new[:, ks] = basis @ (u @ vh)
        new_vals[ks] = np.mean(vals[groups[c]])
    overlaps = np.einsum("ik,ik->k", prev.conj(), new)
    new *= np.exp(-1j * np.angle(overlaps))
    return new, new_vals, np.abs(overlaps)


def gp_mixed(traj, weight_tol=WEIGHT_TOL, degeneracy_tol=DEGENERACY_TOL,
             min_overlap=BRANCH_OVERLAP_MIN):
    """Geometric phase of a density-matrix trajectory.

    Only eigenbranches with initial weight above ``weight_tol`` are tracked.
    ``phi_dyn`` is zero by construction (the tracked frame is parallel
    transported), so ``phi_global`` equals ``phi_g``.
    """
    rhos = traj.density_matrices()
    if rhos.shape[0] < 2:
        raise ValueError("need at least two samples")
    t = traj.times
    n = rhos.shape[0]

    vals0, vecs0 = np.linalg.eigh(0.5 * (rhos[0] + rhos[0].conj().T))
    vals0, vecs0 = vals0[::-1], vecs0[:, ::-1]
    keep = vals0 > weight_tol
    lam0 = vals0[keep]
    v0 = vecs0[:, keep]
    m = v0.shape[1]

    lam = np.empty((n, m))
    quality = np.ones((n, m))
    total = np.empty(n, dtype=complex)
    lam[0] = lam0
    total[0] = np.sum(lam0)
    cur = v0
    for i in range(1, n):
        vals, vecs = np.linalg.eigh(0.5 * (rhos[i] + rhos[i].conj().T))
        cur, lam[i], quality[i] = _align(cur, vals, vecs, degeneracy_tol)
        if quality[i].min() < min_overlap:
            dt = t[i] - t[i - 1]
            raise RefinementError(
                f"eigenbranch overlap {quality[i].min():.3f} < {min_overlap} at t={t[i]:.6g}",
                f"halve the time step (dt={dt:.3g}); try {2 * (n - 1)} steps",
            )
        ov = np.einsum("ik,ik->k", v0.conj(), cur)
        total[i] = np.sum(np.sqrt(np.clip(lam0 * lam[i], 0, None)) * ov)

    flagged = np.abs(total) < ORTHOGONAL_TOL
    phi = unwrap(np.where(flagged, np.nan, np.angle(total)))
    return GPTrace(
        t.copy(), phi, phi.copy(), np.where(flagged, np.nan, 0.0), flagged,
        {"eigenvalues": lam, "branch_overlap": quality, "amplitude": total},
    )


def gp_subsystem(traj, keep):
    """Geometric phase of the reduced state on the factors in ``keep``."""
    return gp_mixed(traj.reduced(keep))


def gp_of(traj, target="full"):
    """Dispatch on a GP target: ``"full"``, ``"qubits"`` or ``"subsystem:<i>"``."""
    if target == "full":
        return gp_pure(traj) if traj.kind is Kind.PURE else gp_mixed(traj)
    if target == "qubits":
        return gp_subsystem(traj, [0, 1])
    if isinstance(target, str) and target.startswith("subsystem:"):
        return gp_subsystem(traj, [int(target.split(":", 1)[1])])
    raise ValueError(f"unknown GP target {target!r}")


def as_trajectory(grid, states, spec, kind=Kind.PURE):
    """Wrap externally produced states (e.g. closed-form ones) as a Trajectory."""
    return Trajectory(grid, np.asarray(states, dtype=complex), spec, kind)
