"""Molmer-Sorensen gate parameters, Hamiltonian and closed-form evolutions.

Units: hbar = 1, frequencies in rad/s, times in seconds.
"""
import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import RegimeError, SingularParameterError
from .ops import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    HilbertSpec,
    boson_ops,
    expm,
    kron,
)

TWO_PI = 2 * math.pi

# eta * Omega must not exceed this fraction of |epsilon| for the weak-field regime
WF_RATIO = 0.05
SF_REL_TOL = 1e-12


class Regime(enum.Enum):
    WEAK_FIELD = "wf"
    STRONG_FIELD = "sf"
    CUSTOM = "custom"


@dataclass(frozen=True)
class MSParams:
    """Physical parameters of the bichromatic two-ion drive.

    Parameters
    ----------
    eta : float
        Lamb-Dicke parameter.
    omega : float
        Sideband Rabi frequency (rad/s).
    nu : float
        Motional mode frequency (rad/s).
    delta : float
        Laser detuning (rad/s); the sideband detuning is ``delta - nu``.
    phi_s, phi_m : float
        Spin and motional phases (rad).
    n_fock : int
        Fock-space cutoff of the motional mode.
    """

    eta: float
    omega: float
    nu: float
    delta: float
    phi_s: float = 0.0
    phi_m: float = 0.0
    n_fock: int = 16

    def __post_init__(self):
        if not self.eta >= 0:
            raise ValueError(f"eta must be non-negative, got {self.eta}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.nu > 0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if int(self.n_fock) != self.n_fock or self.n_fock < 2:
            raise ValueError(f"n_fock must be an integer >= 2, got {self.n_fock}")

    @classmethod
    def strong_field(cls, eta=0.028, omega=TWO_PI * 270e3, nu=TWO_PI * 2.03e6,
                     phi_s=0.0, phi_m=0.0, n_fock=16):
        """Parameters on the gate condition ``epsilon = 2 eta omega``.

        Defaults are the trap of the reference strong-field run; the
        detuning is derived from the gate condition (T ~= 66 us).
        """
        return cls(eta, omega, nu, nu + 2 * eta * omega, phi_s, phi_m, n_fock)

    @classmethod
    def weak_field_reference(cls, eta=0.1, nu=TWO_PI * 2.03e6, phi_s=0.0,
                             phi_m=0.0, n_fock=16):
        """``omega = 0.1 nu`` and ``delta = 0.9 nu`` (so ``epsilon = -0.1 nu``)."""
        return cls(eta, 0.1 * nu, nu, 0.9 * nu, phi_s, phi_m, n_fock)

    def with_(self, **changes):
        return replace(self, **changes)

    @property
    def epsilon(self):
        return self.delta - self.nu

    @property
    def phi_b(self):
        return self.phi_s + self.phi_m

    @property
    def phi_r(self):
        return self.phi_s - self.phi_m

    @property
    def coupling(self):
        """``eta * omega``."""
        return self.eta * self.omega

    @property
    def gate_time(self):
        """Phase-space loop closing time ``2 pi / |epsilon|``."""
        _require_detuning(self)
        return TWO_PI / abs(self.epsilon)

    @property
    def spec(self):
        return HilbertSpec.ms(self.n_fock)

    @property
    def regime(self):
        return classify_regime(self)


def classify_regime(p):
    eps = p.epsilon
    g = p.coupling
    if g > 0 and abs(eps - 2 * g) <= SF_REL_TOL * 2 * g:
        return Regime.STRONG_FIELD
    if eps != 0 and g <= WF_RATIO * abs(eps):
        return Regime.WEAK_FIELD
    return Regime.CUSTOM


def _require_detuning(p):
    if p.epsilon == 0:
        raise SingularParameterError("sideband detuning delta - nu is zero")


def spin_ops(phi_s):
    """Collective two-qubit operators on ``[2, 2]``.

    Returns ``(S_plus, S_minus, S)`` with
    ``S = S_minus exp(i phi_s) - S_plus exp(-i phi_s)`` (anti-Hermitian).
    """
    eye = np.eye(2)
    s_plus = kron(SIGMA_PLUS, eye) + kron(eye, SIGMA_PLUS)
    s_minus = kron(SIGMA_MINUS, eye) + kron(eye, SIGMA_MINUS)
    s = s_minus * np.exp(1j * phi_s) - s_plus * np.exp(-1j * phi_s)
    return s_plus, s_minus, s


def full_operators(p):
    """``S``, ``a`` and ``a_dag`` lifted to the ``[2, 2, n_fock]`` space."""
    _, _, s = spin_ops(p.phi_s)
    a, a_dag, _ = boson_ops(p.n_fock)
    eye_f = np.eye(p.n_fock)
    return kron(s, eye_f), kron(np.eye(4), a), kron(np.eye(4), a_dag)


def hamiltonian_parts(p):
    """Return ``X`` with ``H(t) = X exp(i eps t) + X^dag exp(-i eps t)``."""
    _, _, s = spin_ops(p.phi_s)
    a, _, _ = boson_ops(p.n_fock)
    return 0.5j * p.coupling * np.exp(1j * p.phi_m) * kron(s, a)


def ms_hamiltonian(p, t):
    """Interaction-picture Hamiltonian ``H_I(t)`` on ``[2, 2, n_fock]``."""
    x = hamiltonian_parts(p) * np.exp(1j * p.epsilon * t)
    return x + x.conj().T


def hamiltonian_norm(p):
    """Spectral norm of ``H_I(t)``; it does not depend on ``t``."""
    return float(np.linalg.norm(ms_hamiltonian(p, 0.0), 2))


def alpha(p, t):
    """Displacement amplitude ``(eta Omega / eps) e^{i eps t/2} sin(eps t/2) e^{i phi_m}``."""
    _require_detuning(p)
    eps = p.epsilon
    t = np.asarray(t, dtype=float)
    return (p.coupling / eps) * np.exp(0.5j * eps * t) * np.sin(0.5 * eps * t) * np.exp(1j * p.phi_m)


def beta(p, t):
    """Spin-spin phase ``(eta Omega / 2 eps)^2 (eps t - sin eps t)``."""
    _require_detuning(p)
    eps = p.epsilon
    t = np.asarray(t, dtype=float)
    return (p.coupling / (2 * eps)) ** 2 * (eps * t - np.sin(eps * t))


def effective_rabi(p):
    """Signed two-photon Rabi frequency ``(eta Omega)^2 / eps``."""
    _require_detuning(p)
    return p.coupling ** 2 / p.epsilon


def ms_unitary_analytic(p, t):
    """Closed-form propagator ``exp(S (alpha a + alpha* a^dag) + i beta S^2)``."""
    s, a, a_dag = full_operators(p)
    al = complex(alpha(p, t))
    be = float(beta(p, t))
    gen = s @ (al * a + np.conj(al) * a_dag) + 1j * be * (s @ s)
    return expm(gen)


def wf_state_analytic(p, t):
    """Two-qubit state from ``|00>`` under the ideal weak-field gate.

    ``cos(W t / 2)|00> + i exp(-2 i phi_s) sin(W t / 2)|11>`` with ``W`` the
    effective Rabi frequency; the motional factor and the global phase
    ``exp(-i W t / 2)`` are dropped. Accepts scalar or array ``t``.
    """
    if classify_regime(p) is not Regime.WEAK_FIELD:
        raise RegimeError(
            f"weak-field closed form needs eta*omega <= {WF_RATIO}*|delta - nu| "
            f"(got eta*omega={p.coupling:.4g}, |eps|={abs(p.epsilon):.4g})"
        )
    w = effective_rabi(p)
    t = np.asarray(t, dtype=float)
    theta = 0.5 * w * t
    out = np.zeros(t.shape + (4,), dtype=complex)
    out[..., 0] = np.cos(theta)
    out[..., 3] = 1j * np.exp(-2j * p.phi_s) * np.sin(theta)
    return out


def bell_target(phi_s=0.0):
    """Qubit state produced from ``|00>`` at the strong-field gate time."""
    v = np.zeros(4, dtype=complex)
    v[0] = 1.0
    v[3] = 1j * np.exp(-2j * phi_s)
    return v / math.sqrt(2)


def initial_state(p, qubits=0, fock=0):
    """Basis ket ``|q1 q2> (x) |n>``; ``qubits`` is the two-qubit index 0..3."""
    if not 0 <= fock < p.n_fock:
        raise ValueError(f"Fock level {fock} outside cutoff {p.n_fock}")
    v = np.zeros(4 * p.n_fock, dtype=complex)
    v[qubits * p.n_fock + fock] = 1.0
    return v
