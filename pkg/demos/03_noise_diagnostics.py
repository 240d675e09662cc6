"""
Geometric-phase deviation under noise
=====================================

Each noise channel is tuned so the gate loses a given amount of
entanglement at T. The difference between the noiseless and noisy
geometric phases of the two-qubit state then peaks close to t = 2T.
"""

import numpy as np

from msgpa import NoiseChannel, TimeGrid, calibrate_gamma, delta_gp, propagate_lindblad, propagate_schrodinger
from msgpa.analysis import entanglement_loss
from msgpa.gp import gp_of
from msgpa.model import MSParams, initial_state
from msgpa.ops import projector

p = MSParams.strong_field()
T = p.gate_time
grid = TimeGrid.gate_periods(p, 3, 4098)
rho0 = projector(initial_state(p))
ref = gp_of(propagate_schrodinger(p, initial_state(p), grid), "qubits")

for kind in ("qubit_dephasing", "qubit_decay"):
    for target in (0.05, 0.1, 0.2):
        gamma = calibrate_gamma(p, kind, target)
        noisy = propagate_lindblad(p, rho0, [NoiseChannel.builtin(kind, gamma, p.n_fock)], grid)
        d = np.abs(delta_gp(ref, gp_of(noisy, "qubits")))
        i = int(np.nanargmax(d))
        print(f"{kind:<16} dE={entanglement_loss(noisy, p):.4f} gamma*T={gamma * T:.4f} "
              f"max|dphi_g|={d[i]:.4f} at t={grid.times[i] / T:.3f}T")
