"""Fixed-step RK4 propagation: Schrodinger and Lindblad master equation."""
import enum
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps

from .errors import DimensionError, StepSizeError
from .model import hamiltonian_norm, hamiltonian_parts
from .ops import (
    SIGMA_MINUS,
    SIGMA_X,
    SIGMA_Z,
    HilbertSpec,
    boson_ops,
    embed,
    kron,
    partial_trace,
    validate_density,
)

log = logging.getLogger(__name__)

# dt * ||H|| bound for default runs
MAX_PHASE_PER_STEP = 0.05
NORM_DRIFT_WARN = 1e-7
NORM_DRIFT_FAIL = 1e-5
POSITIVITY_FAIL = -1e-6


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    t1: float
    steps: int

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ValueError(f"t1 must exceed t0 (got {self.t0}, {self.t1})")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps}")

    @classmethod
    def gate_periods(cls, p, periods=3.0, steps=4096):
        """Grid over ``[0, periods * T]``."""
        return cls(0.0, periods * p.gate_time, steps)

    @property
    def dt(self):
        return (self.t1 - self.t0) / self.steps

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.steps + 1)

    def index_of(self, t):
        """Index of the grid point nearest ``t``."""
        return int(round((t - self.t0) / self.dt))


class Kind(enum.Enum):
    PURE = "pure"
    LINDBLAD = "lindblad"


@dataclass
class Trajectory:
    """States sampled on every point of ``grid``.

    ``states`` has shape ``(steps + 1, d)`` for pure runs and
    ``(steps + 1, d, d)`` for density-matrix runs.
    """

    grid: TimeGrid
    states: np.ndarray
    spec: HilbertSpec
    kind: Kind
    diagnostics: dict = field(default_factory=dict)

    @property
    def times(self):
        return self.grid.times

    def __len__(self):
        return self.states.shape[0]

    def density_matrices(self):
        if self.kind is Kind.LINDBLAD:
            return self.states
        return np.einsum("ti,tj->tij", self.states, self.states.conj())

    def reduced(self, keep):
        """Density-matrix trajectory of the subsystems in ``keep``."""
        keep = sorted(set(np.atleast_1d(keep).tolist()))
        rhos = np.array([partial_trace(r, keep, self.spec) for r in self.density_matrices()])
        sub = HilbertSpec(tuple(self.spec.dims[k] for k in keep))
        return Trajectory(self.grid, rhos, sub, Kind.LINDBLAD, {"reduced_from": self.spec.dims, "keep": keep})


class ChannelKind(enum.Enum):
    QUBIT_DECAY = "qubit_decay"
    QUBIT_DEPHASING = "qubit_dephasing"
    MOTIONAL_HEATING = "motional_heating"
    MOTIONAL_DEPHASING = "motional_dephasing"
    NON_LOCAL = "non_local"
    CUSTOM = "custom"


TABLE_CHANNELS = (
    ChannelKind.QUBIT_DECAY,
    ChannelKind.QUBIT_DEPHASING,
    ChannelKind.MOTIONAL_HEATING,
    ChannelKind.MOTIONAL_DEPHASING,
)


@dataclass(frozen=True)
class NoiseChannel:
    """A set of Lindblad operators sharing one rate ``gamma`` (rad/s)."""

    kind: ChannelKind
    gamma: float
    operators: tuple

    def __post_init__(self):
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")

    @classmethod
    def builtin(cls, kind, gamma, n_fock):
        kind = ChannelKind(kind)
        return cls(kind, float(gamma), tuple(channel_operators(kind, n_fock)))

    @classmethod
    def custom(cls, gamma, *operators):
        return cls(ChannelKind.CUSTOM, float(gamma), tuple(np.asarray(op, dtype=complex) for op in operators))

    def with_gamma(self, gamma):
        return NoiseChannel(self.kind, float(gamma), self.operators)


def channel_operators(kind, n_fock):
    """Full-space Lindblad operators of a built-in channel.

    Qubit channels act independently on each ion (two operators).
    """
    kind = ChannelKind(kind)
    spec = HilbertSpec.ms(n_fock)
    a, _, n_op = boson_ops(n_fock)
    if kind is ChannelKind.QUBIT_DECAY:
        return [embed(SIGMA_MINUS, 0, spec), embed(SIGMA_MINUS, 1, spec)]
    if kind is ChannelKind.QUBIT_DEPHASING:
        return [embed(SIGMA_Z, 0, spec), embed(SIGMA_Z, 1, spec)]
    if kind is ChannelKind.MOTIONAL_HEATING:
        return [embed(a, 2, spec)]
    if kind is ChannelKind.MOTIONAL_DEPHASING:
        return [embed(n_op, 2, spec)]
    if kind is ChannelKind.NON_LOCAL:
        return [kron(SIGMA_X, np.eye(2), np.eye(n_fock)) + kron(np.eye(2), SIGMA_Z, np.eye(n_fock))]
    raise ValueError("custom channels carry their own operators")


def _check_step(p, grid, check_step):
    bound = grid.dt * hamiltonian_norm(p)
    if bound > MAX_PHASE_PER_STEP:
        msg = f"dt*||H|| = {bound:.3g} exceeds {MAX_PHASE_PER_STEP}"
        hint = f"use at least {int(np.ceil(grid.steps * bound / MAX_PHASE_PER_STEP))} steps"
        if check_step:
            raise StepSizeError(msg, hint)
        log.warning("%s (%s)", msg, hint)


def propagate_schrodinger(p, psi0, grid, check_step=True):
    """Integrate ``dpsi/dt = -i H(t) psi`` with classical RK4.

    The raw state is propagated without feedback; recorded states are
    renormalised and the largest raw norm drift is kept in
    ``diagnostics["norm_drift"]``.
    """
    spec = p.spec
    psi = np.array(psi0, dtype=complex)
    spec.check(psi)
    if psi.ndim != 1:
        raise DimensionError("psi0 must be a vector")
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise ValueError("psi0 must be normalised")
    _check_step(p, grid, check_step)

    x = hamiltonian_parts(p)
    xd = x.conj().T
    eps = p.epsilon
    dt = grid.dt
    ts = grid.times

    def rhs(t, y):
        ph = np.exp(1j * eps * t)
        return -1j * (ph * (x @ y) + np.conj(ph) * (xd @ y))

    out = np.empty((grid.steps + 1, psi.size), dtype=complex)
    out[0] = psi
    for i in range(grid.steps):
        t = ts[i]
        k1 = rhs(t, psi)
        k2 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k2)
        k4 = rhs(t + dt, psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = psi

    norms = np.linalg.norm(out, axis=1)
    drift = float(np.max(np.abs(norms - 1)))
    if drift > NORM_DRIFT_FAIL:
        raise StepSizeError(f"norm drift {drift:.3e} exceeds {NORM_DRIFT_FAIL}", "increase the number of steps")
    if drift > NORM_DRIFT_WARN:
        log.warning("norm drift %.3e above %.0e before renormalisation", drift, NORM_DRIFT_WARN)
    log.debug("schrodinger run: %d steps, raw norm drift %.3e", grid.steps, drift)
    out /= norms[:, None]
    return Trajectory(grid, out, spec, Kind.PURE, {"norm_drift": drift})


def _superoperators(p, channels, dim):
    """Row-major vectorised generators: ``L(t) = L0 + e Lx + e* Lxd``, ``e = exp(i eps t)``.

    Built sparse; the operators themselves have O(d) non-zeros.
    """
    eye = sps.identity(dim, dtype=complex, format="csr")
    x = sps.csr_matrix(hamiltonian_parts(p))
    xd = x.conj().T.tocsr()
    lx = -1j * (sps.kron(x, eye) - sps.kron(eye, x.T))
    lxd = -1j * (sps.kron(xd, eye) - sps.kron(eye, xd.T))
    l0 = sps.csr_matrix((dim * dim, dim * dim), dtype=complex)
    for ch in channels:
        if ch.gamma == 0:
            continue
        for op in ch.operators:
            op = sps.csr_matrix(np.asarray(op, dtype=complex))
            opd = op.conj().T
            n = (opd @ op).tocsr()
            l0 = l0 + ch.gamma * (sps.kron(op, op.conj()) - 0.5 * sps.kron(n, eye) - 0.5 * sps.kron(eye, n.T))
    return sps.hstack([l0, lx, lxd]).tocsr()


def propagate_lindblad(p, rho0, channels, grid, check_step=True, check_positivity=True):
    """Integrate the master equation with classical RK4.

    ``drho/dt = -i[H(t), rho] + sum_k gamma_k (L rho L^dag - {L^dag L, rho}/2)``.

    Recorded states are Hermitised and trace-normalised. Raw deviations
    before that clean-up are kept in ``diagnostics``: ``trace_dev`` and
    ``herm_dev``. With ``check_positivity`` every recorded state is
    certified to have no eigenvalue below ``POSITIVITY_FAIL``.
    """
    spec = p.spec
    rho = np.array(rho0, dtype=complex)
    spec.check(rho)
    if rho.ndim != 2:
        raise DimensionError("rho0 must be a matrix")
    validate_density(rho)
    for ch in channels:
        for op in ch.operators:
            if np.shape(op) != rho.shape:
                raise DimensionError(f"channel operator shape {np.shape(op)} does not match {rho.shape}")
    _check_step(p, grid, check_step)

    d = rho.shape[0]
    gen = _superoperators(p, channels, d)
    eps = p.epsilon
    dt = grid.dt
    ts = grid.times
    shift = -POSITIVITY_FAIL * np.eye(d)

    def rhs(t, v):
        e = np.exp(1j * eps * t)
        return gen @ np.concatenate([v, e * v, np.conj(e) * v])

    n = grid.steps + 1
    out = np.empty((n, d, d), dtype=complex)
    trace_dev = np.zeros(n)
    herm_dev = np.zeros(n)

    def record(i, v):
        r = v.reshape(d, d)
        tr = np.trace(r)
        trace_dev[i] = abs(tr - 1)
        herm_dev[i] = np.linalg.norm(r - r.conj().T)
        clean = 0.5 * (r + r.conj().T) / tr.real
        if check_positivity:
            try:
                np.linalg.cholesky(clean + shift)
            except np.linalg.LinAlgError:
                lam = np.linalg.eigvalsh(clean)[0]
                raise StepSizeError(
                    f"density matrix lost positivity (eigenvalue {lam:.3e}) at t={ts[i]:.6g}",
                    "increase the number of steps",
                ) from None
        out[i] = clean

    v = rho.reshape(-1)
    record(0, v)
    for i in range(grid.steps):
        t = ts[i]
        k1 = rhs(t, v)
        k2 = rhs(t + 0.5 * dt, v + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, v + 0.5 * dt * k2)
        k4 = rhs(t + dt, v + dt * k3)
        v = v + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        record(i + 1, v)

    diag = {"trace_dev": float(trace_dev.max()), "herm_dev": float(herm_dev.max())}
    log.debug("lindblad run: %d steps, %s", grid.steps, diag)
    return Trajectory(grid, out, spec, Kind.LINDBLAD, diag)


def observable_series(traj, op):
    """Expectation value of ``op`` at every sample (real part)."""
    op = np.asarray(op, dtype=complex)
    traj.spec.check(op)
    if traj.kind is Kind.PURE:
        vals = np.einsum("ti,ij,tj->t", traj.states.conj(), op, traj.states)
    else:
        vals = np.einsum("tij,ji->t", traj.states, op)
    return vals.real


def qubit_projectors(n_fock):
    """Projectors ``|q1 q2><q1 q2| (x) I`` for the four qubit basis states."""
    eye_f = np.eye(n_fock)
    out = []
    for k in range(4):
        pk = np.zeros((4, 4))
        pk[k, k] = 1.0
        out.append(kron(pk, eye_f))
    return out


def populations(traj):
    """Qubit-basis populations ``p00, p01, p10, p11`` as a ``(samples, 4)`` array."""
    n_fock = traj.spec.dims[-1]
    return np.stack([observable_series(traj, pk) for pk in qubit_projectors(n_fock)], axis=1)
