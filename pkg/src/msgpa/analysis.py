"""Entanglement, x-state checks, GP deviations and noise calibration."""
import logging
from dataclasses import dataclass

import numpy as np

from .dynamics import Kind, NoiseChannel, TimeGrid, propagate_lindblad
from .model import hamiltonian_norm
from .errors import CalibrationError, DimensionError
from .ops import HilbertSpec, partial_trace, partial_transpose, validate_density

log = logging.getLogger(__name__)

TWO_QUBITS = HilbertSpec((2, 2))
# entries of a 4x4 matrix that vanish for an x-state
_OFF_X = [(i, j) for i in range(4) for j in range(4) if i != j and i + j != 3]


@dataclass(frozen=True)
class NegativityReading:
    """Sum of negative partial-transpose eigenvalues and derived scales.

    ``raw_sum <= 0``; ``magnitude = |raw_sum|`` (at most 1/2 for two
    qubits); ``normalized = 2 * magnitude`` equals 1 for a Bell state.
    """

    raw_sum: float
    magnitude: float
    normalized: float


@dataclass(frozen=True)
class XStateReport:
    is_x: bool
    max_violation: float


def negativity(rho, tol=1e-8):
    """Negativity across the qubit bipartition of a 4x4 density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DimensionError(f"negativity expects a two-qubit 4x4 matrix, got {rho.shape}")
    validate_density(rho, herm_tol=tol, trace_tol=tol, pos_tol=tol)
    ev = np.linalg.eigvalsh(partial_transpose(rho, 1, TWO_QUBITS))
    raw = float(np.sum(ev[ev < 0]))
    return NegativityReading(raw, abs(raw), 2 * abs(raw))


def qubit_state(rho, spec):
    """Two-qubit reduced state (mode traced out)."""
    if spec.dims == (2, 2):
        return np.asarray(rho, dtype=complex)
    return partial_trace(rho, [0, 1], spec)


def negativity_series(traj):
    """Normalized negativity of the qubit state at every sample."""
    out = np.empty(len(traj))
    for i, r in enumerate(traj.density_matrices()):
        out[i] = negativity(qubit_state(r, traj.spec)).normalized
    return out


def is_x_state(rho, tol=1e-8):
    """Check that only the diagonal and anti-diagonal of a 4x4 matrix are non-zero."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise DimensionError(f"x-state check expects a 4x4 matrix, got {rho.shape}")
    worst = max(abs(rho[i, j]) for i, j in _OFF_X)
    return XStateReport(bool(worst <= tol), float(worst))


def x_state_series(traj, tol=1e-8):
    """x-state reports of the qubit state at every sample."""
    return [is_x_state(qubit_state(r, traj.spec), tol) for r in traj.density_matrices()]


def delta_gp(gp_unitary, gp_noisy):
    """Pointwise ``phi_g(unitary) - phi_g(noisy)``."""
    if gp_unitary.times.shape != gp_noisy.times.shape or not np.array_equal(gp_unitary.times, gp_noisy.times):
        raise ValueError("GP traces are sampled on different time grids")
    return gp_unitary.phi_g - gp_noisy.phi_g


def entanglement_loss(traj, p):
    """``1 - E(T)`` with ``E`` the normalized negativity at the gate time."""
    T = p.gate_time
    grid = traj.grid
    if not grid.t0 - 0.5 * grid.dt <= T <= grid.t1 + 0.5 * grid.dt:
        raise ValueError(f"gate time {T:.6g} outside trajectory [{grid.t0:.6g}, {grid.t1:.6g}]")
    i = grid.index_of(T)
    rho = traj.density_matrices()[i]
    return 1.0 - negativity(qubit_state(rho, traj.spec)).normalized


# calibration probes only need the state at T; this keeps dt*||H|| below the bound with margin
CALIBRATION_PHASE_PER_STEP = 0.04


def gate_time_grid(p, steps=None):
    """Grid over ``[0, T]`` used when only the gate-time state matters."""
    if steps is None:
        steps = max(64, int(np.ceil(p.gate_time * hamiltonian_norm(p) / CALIBRATION_PHASE_PER_STEP)))
    return TimeGrid(0.0, p.gate_time, steps)


def loss_at_gamma(p, rho0, channel, gamma, grid=None):
    """Entanglement loss after a noisy run with the given channel rate."""
    grid = grid or gate_time_grid(p)
    traj = propagate_lindblad(p, rho0, [channel.with_gamma(gamma)], grid)
    return entanglement_loss(traj, p)


def calibrate_gamma(p, channel, target, tol=1e-3, rho0=None, grid=None,
                    gamma_start=None, max_doublings=60, max_iter=200):
    """Bisect the channel rate until the entanglement loss hits ``target``.

    ``channel`` is a NoiseChannel (its own rate is ignored) or a built-in
    kind name. The upper bracket starts at ``gamma_start`` (default
    ``0.01 / T``) and doubles until the loss reaches the target.
    """
    if isinstance(channel, NoiseChannel):
        ch = channel
    else:
        ch = NoiseChannel.builtin(channel, 0.0, p.n_fock)
    if target == 0:
        return 0.0
    if not 0 < target < 0.9:
        raise ValueError(f"target entanglement loss must lie in (0, 0.9), got {target}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if rho0 is None:
        rho0 = np.zeros((4 * p.n_fock,) * 2, dtype=complex)
        rho0[0, 0] = 1.0
    grid = grid or gate_time_grid(p)

    def f(g):
        return loss_at_gamma(p, rho0, ch, g, grid) - target

    f_lo = f(0.0)
    if f_lo > 0:
        raise CalibrationError(f"noiseless loss {f_lo + target:.3g} already above target {target}")
    lo = 0.0
    hi = gamma_start if gamma_start is not None else 0.01 / p.gate_time
    f_hi = f(hi)
    for _ in range(max_doublings):
        if f_hi >= 0:
            break
        if f_hi < f_lo - tol:
            raise CalibrationError(f"entanglement loss decreased when raising gamma to {hi:.4g}")
        lo, f_lo = hi, f_hi
        hi *= 2
        f_hi = f(hi)
    else:
        raise CalibrationError(f"could not bracket target {target} below gamma={hi:.4g}")
    if abs(f_hi) <= tol:
        return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if abs(f_mid) <= tol:
            log.debug("calibrated %s to gamma=%.6g (loss error %.2e)", ch.kind.value, mid, f_mid)
            return mid
        if not f_lo <= f_mid <= f_hi:
            raise CalibrationError(f"non-monotonic loss inside bracket [{lo:.4g}, {hi:.4g}]")
        if f_mid < 0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    raise CalibrationError(f"bisection did not reach tol {tol} within {max_iter} iterations")


def slope_series(traj, component=0):
    """Imaginary part of ``d<component|psi>/dt`` by centred differences."""
    if traj.kind is not Kind.PURE:
        raise TypeError("slope_series needs a pure-state trajectory")
    return np.gradient(traj.states[:, component], traj.times).imag


def sign_changes(times, values):
    """Times where ``values`` changes sign, by linear interpolation.

    NaN samples and exact zeros are skipped.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    ok = np.isfinite(y) & (y != 0)
    t, y = t[ok], y[ok]
    idx = np.flatnonzero(np.sign(y[1:]) != np.sign(y[:-1]))
    return t[idx] - y[idx] * (t[idx + 1] - t[idx]) / (y[idx + 1] - y[idx])


def wf_gate_window_max(trace, period):
    """Largest ``|phi_g|`` up to ``period / 4``, where the ideal weak-field gate makes its Bell state.

    Later samples are excluded because the overlap with ``|00>`` passes
    through zero at ``period / 2`` and the phase jumps by pi there.
    """
    window = trace.times <= 0.25 * period * (1 + 1e-12)
    return float(np.nanmax(np.abs(trace.phi_g[window])))
