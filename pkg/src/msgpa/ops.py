"""Dense complex operator algebra on small composite Hilbert spaces.

Tensor ordering is fixed as (qubit 1, qubit 2, mode); a basis index is
``((q1 * 2) + q2) * n_fock + n``. Qubit state ``|1>`` is the raised state:
``sigma_plus |0> = |1>`` and ``sigma_z = diag(1, -1)``.
"""
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg

from .errors import DensityMatrixError, DimensionError

__all__ = [
    "HilbertSpec",
    "qubit_ops",
    "kron",
    "boson_ops",
    "embed",
    "expm",
    "eigh",
    "partial_trace",
    "partial_transpose",
    "validate_density",
    "ket",
    "projector",
]

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()


@dataclass(frozen=True)
class HilbertSpec:
    """Ordered subsystem dimensions of a composite space."""

    dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionError(f"subsystem dimensions must be positive, got {self.dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def ms(cls, n_fock):
        """The ``[2, 2, n_fock]`` layout used for two ions plus one mode."""
        if n_fock < 2:
            raise DimensionError(f"Fock cutoff must be >= 2, got {n_fock}")
        return cls((2, 2, n_fock))

    @property
    def size(self):
        return int(np.prod(self.dims))

    def __len__(self):
        return len(self.dims)

    def check(self, x):
        """Raise unless ``x`` (vector or square matrix) lives on this space."""
        x = np.asarray(x)
        if x.ndim == 1:
            ok = x.shape[0] == self.size
        else:
            ok = x.ndim == 2 and x.shape == (self.size, self.size)
        if not ok:
            raise DimensionError(f"shape {x.shape} does not match dims {self.dims}")


def qubit_ops():
    """Return a dict of the single-qubit operators used throughout."""
    return {
        "I": IDENTITY2.copy(),
        "x": SIGMA_X.copy(),
        "y": SIGMA_Y.copy(),
        "z": SIGMA_Z.copy(),
        "plus": SIGMA_PLUS.copy(),
        "minus": SIGMA_MINUS.copy(),
    }


def kron(*ops):
    """Kronecker product of any number of matrices, left factor slowest."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    return reduce(np.kron, (np.asarray(op, dtype=complex) for op in ops))


def boson_ops(n_fock):
    """Truncated annihilation, creation and number operators.

    Returns
    -------
    a, a_dag, n_op : ndarray
        ``a[n-1, n] = sqrt(n)``; ``a_dag = a^dagger``; ``n_op = a_dag @ a``.
    """
    if n_fock < 2:
        raise DimensionError(f"Fock cutoff must be >= 2, got {n_fock}")
    a = np.diag(np.sqrt(np.arange(1, n_fock)), 1).astype(complex)
    a_dag = a.conj().T
    return a, a_dag, a_dag @ a


def embed(op, site, spec):
    """Lift ``op`` acting on factor ``site`` to the full space of ``spec``."""
    op = np.asarray(op, dtype=complex)
    if not 0 <= site < len(spec):
        raise DimensionError(f"site {site} out of range for dims {spec.dims}")
    d = spec.dims[site]
    if op.shape != (d, d):
        raise DimensionError(f"operator shape {op.shape} does not fit factor of dimension {d}")
    factors = [np.eye(dim, dtype=complex) for dim in spec.dims]
    factors[site] = op
    return kron(*factors)


def expm(m):
    """Matrix exponential (scaling and squaring with a Pade approximant)."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expm needs a square matrix, got shape {m.shape}")
    return scipy.linalg.expm(m.astype(complex))


def eigh(h):
    """Hermitian eigensolve: ascending real eigenvalues, orthonormal columns."""
    h = np.asarray(h, dtype=complex)
    return np.linalg.eigh(0.5 * (h + h.conj().T))


def _normalize_keep(keep, n):
    keep = sorted({int(k) for k in np.atleast_1d(keep)})
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"subsystem indices {keep} out of range for {n} factors")
    return keep


def partial_trace(rho, keep, spec):
    """Reduced density matrix over the factors in ``keep`` (original order kept).

    An empty ``keep`` returns the full trace as a 1x1 matrix.
    """
    rho = np.asarray(rho, dtype=complex)
    spec.check(rho)
    if rho.ndim != 2:
        raise DimensionError("partial_trace expects a square matrix")
    n = len(spec)
    keep = _normalize_keep(keep, n)
    drop = [i for i in range(n) if i not in keep]
    t = rho.reshape(spec.dims + spec.dims)
    # contract dropped factors from the highest index down so axis numbers stay valid
    for ax in sorted(drop, reverse=True):
        width = t.ndim // 2
        t = np.trace(t, axis1=ax, axis2=ax + width)
    d = int(np.prod([spec.dims[k] for k in keep])) if keep else 1
    return t.reshape(d, d)


def partial_transpose(rho, sub, spec):
    """Transpose factor ``sub`` only."""
    rho = np.asarray(rho, dtype=complex)
    spec.check(rho)
    n = len(spec)
    if not 0 <= sub < n:
        raise DimensionError(f"subsystem index {sub} out of range for {n} factors")
    t = rho.reshape(spec.dims + spec.dims)
    axes = list(range(2 * n))
    axes[sub], axes[sub + n] = axes[sub + n], axes[sub]
    return t.transpose(axes).reshape(rho.shape)


def validate_density(rho, herm_tol=1e-10, trace_tol=1e-8, pos_tol=1e-8):
    """Raise DensityMatrixError unless ``rho`` is Hermitian, unit-trace and PSD."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DensityMatrixError(f"density matrix must be square, got {rho.shape}")
    herm = np.linalg.norm(rho - rho.conj().T)
    if herm > herm_tol:
        raise DensityMatrixError(f"not Hermitian: ||rho - rho^dag||_F = {herm:.3e}")
    tr = np.trace(rho)
    if abs(tr - 1) > trace_tol:
        raise DensityMatrixError(f"trace {tr.real:.12g} differs from 1")
    lam_min = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lam_min < -pos_tol:
        raise DensityMatrixError(f"negative eigenvalue {lam_min:.3e}")
    return rho


def ket(index, size):
    v = np.zeros(size, dtype=complex)
    v[index] = 1.0
    return v


def projector(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())
