"""
Single-qubit geometric phase and x-states
=========================================

Local noise keeps the two-qubit state in x-form (only diagonal and
anti-diagonal entries), so each qubit on its own stays diagonal and picks
up no geometric phase. A non-local Lindblad operator breaks the pattern.
"""

from msgpa import NoiseChannel, TimeGrid, calibrate_gamma, gp_subsystem, propagate_lindblad
from msgpa.analysis import x_state_series
from msgpa.model import MSParams, initial_state
from msgpa.ops import projector

p = MSParams.strong_field()
grid = TimeGrid.gate_periods(p, 3, 4098)
rho0 = projector(initial_state(p))

for kind in ("qubit_decay", "motional_heating", "non_local"):
    gamma = calibrate_gamma(p, kind, 0.1)
    traj = propagate_lindblad(p, rho0, [NoiseChannel.builtin(kind, gamma, p.n_fock)], grid)
    worst = max(r.max_violation for r in x_state_series(traj))
    print(f"{kind:<17} max|phi_g(qubit 2)|={gp_subsystem(traj, [1]).max_abs():.3e} "
          f"largest off-x entry={worst:.2e}")
