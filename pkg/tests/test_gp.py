import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from msgpa.dynamics import Kind, NoiseChannel, TimeGrid, propagate_lindblad
from msgpa.errors import RefinementError, ResolutionError
from msgpa.gp import as_trajectory, gp_mixed, gp_of, gp_pure, gp_subsystem, unwrap, wrap
from msgpa.model import MSParams, effective_rabi, initial_state, wf_state_analytic
from msgpa.ops import SIGMA_X, SIGMA_Z, HilbertSpec, kron, projector


def precession_run(theta, omega=1.0, steps=4000):
    """Spin-1/2 along polar angle ``theta`` precessing once about z, solved by scipy."""
    h = 0.5 * omega * SIGMA_Z
    psi0 = np.array([np.cos(theta / 2), np.sin(theta / 2)], dtype=complex)
    period = 2 * np.pi / omega
    grid = TimeGrid(0.0, period, steps)
    sol = solve_ivp(lambda t, y: -1j * (h @ y), (0.0, period), psi0, t_eval=grid.times,
                    method="DOP853", rtol=1e-12, atol=1e-12)
    return as_trajectory(grid, sol.y.T, HilbertSpec((2,)))


def test_precession_cone():
    theta = np.pi / 3
    trace = gp_pure(precession_run(theta))
    assert trace.phi_g[-1] == pytest.approx(-np.pi * (1 - np.cos(theta)), abs=1e-4)
    assert trace.extra["phi_g_integral"][-1] == pytest.approx(-np.pi / 2, abs=1e-4)


def test_trace_starts_at_zero_and_is_continuous(sf_unitary_run):
    tr = gp_pure(sf_unitary_run)
    assert tr.phi_g[0] == 0.0
    assert np.all(np.abs(np.diff(tr.phi_g[~tr.flagged])) < np.pi)
    ok = ~tr.flagged
    assert np.array_equal(tr.phi_g[ok], tr.phi_global[ok] - tr.phi_dyn[ok])


def test_gauge_invariance(sf, sf_unitary_run):
    t = sf_unitary_run.times
    T = sf.gate_time
    theta = 0.7 * np.sin(2 * np.pi * t / (3 * T)) + 0.3 * t / T + 0.2 * np.cos(5 * t / T)
    moved = as_trajectory(sf_unitary_run.grid, sf_unitary_run.states * np.exp(1j * theta)[:, None],
                          sf_unitary_run.spec)
    a = gp_pure(sf_unitary_run)
    b = gp_pure(moved, check=False)
    assert np.nanmax(np.abs(a.phi_g - b.phi_g)) <= 1e-9


def test_pure_gauge_motion_has_no_gp():
    grid = TimeGrid(0.0, 1.0, 2000)
    psi0 = np.array([0.6, 0.8j])
    states = np.exp(1j * 3.0 * grid.times**2)[:, None] * psi0
    tr = gp_pure(as_trajectory(grid, states, HilbertSpec((2,))))
    assert np.max(np.abs(tr.phi_g)) <= 1e-12


def test_estimator_gap_shrinks(sf_unitary_run):
    fine = gp_pure(sf_unitary_run).extra["estimator_gap"]
    half = TimeGrid(sf_unitary_run.grid.t0, sf_unitary_run.grid.t1, sf_unitary_run.grid.steps // 2)
    coarse_traj = as_trajectory(half, sf_unitary_run.states[::2], sf_unitary_run.spec)
    coarse = gp_pure(coarse_traj, check=False).extra["estimator_gap"]
    assert fine <= 1e-4
    assert coarse / fine >= 3.5


def test_resolution_error_on_coarse_sampling(sf_unitary_run):
    g = sf_unitary_run.grid
    coarse = as_trajectory(TimeGrid(g.t0, g.t1, g.steps // 64), sf_unitary_run.states[::64],
                           sf_unitary_run.spec)
    with pytest.raises(ResolutionError):
        gp_pure(coarse)


def test_mixed_reduces_to_pure(sf_unitary_run):
    rho = as_trajectory(sf_unitary_run.grid, sf_unitary_run.density_matrices(), sf_unitary_run.spec,
                        Kind.LINDBLAD)
    pure = gp_pure(sf_unitary_run)
    mixed = gp_mixed(rho)
    ok = ~pure.flagged
    assert np.max(np.abs(wrap(pure.phi_g[ok] - mixed.phi_g[ok]))) <= 1e-5
    assert np.all(mixed.phi_dyn[~mixed.flagged] == 0.0)


def test_static_maximally_mixed():
    grid = TimeGrid(0.0, 1.0, 50)
    states = np.repeat(np.eye(4)[None] / 4, 51, axis=0).astype(complex)
    tr = gp_mixed(as_trajectory(grid, states, HilbertSpec((2, 2)), Kind.LINDBLAD))
    assert np.all(tr.phi_g == 0.0)
    assert np.allclose(tr.extra["eigenvalues"], 0.25)


def test_mixed_precession_matches_weighted_sum():
    # rho = p |n><n| + (1-p)|-n><-n| precessing once: Tong phase is
    # Arg(p e^{i g_up} + (1-p) e^{i g_down}) from the two cone phases
    theta, w = np.pi / 3, 0.8
    up = precession_run(theta)
    down = precession_run(theta + np.pi)
    rhos = w * np.einsum("ti,tj->tij", up.states, up.states.conj()) \
        + (1 - w) * np.einsum("ti,tj->tij", down.states, down.states.conj())
    tr = gp_mixed(as_trajectory(up.grid, rhos, up.spec, Kind.LINDBLAD))
    g_up = -np.pi * (1 - np.cos(theta))
    g_down = -np.pi * (1 - np.cos(theta + np.pi))
    expected = np.angle(w * np.exp(1j * g_up) + (1 - w) * np.exp(1j * g_down))
    assert wrap(tr.phi_g[-1] - expected) == pytest.approx(0.0, abs=1e-4)


def test_refinement_error_on_jumpy_frames():
    grid = TimeGrid(0.0, 1.0, 2)
    a = np.diag([0.7, 0.3]).astype(complex)
    flip = SIGMA_X @ a @ SIGMA_X
    mid = 0.5 * (np.eye(2) + 0.4 * SIGMA_X)
    states = np.stack([a, mid, flip]).astype(complex)
    with pytest.raises(RefinementError):
        gp_mixed(as_trajectory(grid, states, HilbertSpec((2,)), Kind.LINDBLAD))


def test_subsystem_of_product_with_idle_qubit():
    grid = TimeGrid(0.0, 2.0, 400)
    kept = np.array([0.8, 0.6], dtype=complex)
    moving = np.stack([np.array([np.cos(t), 1j * np.sin(t)]) for t in grid.times])
    states = np.stack([kron(kept[:, None], m[:, None])[:, 0] for m in moving])
    tr = gp_subsystem(as_trajectory(grid, states, HilbertSpec((2, 2))), [0])
    assert np.max(np.abs(tr.phi_g)) <= 1e-12


def test_sf_table_channels_leave_subsystem_phase_zero(sf):
    rho0 = projector(initial_state(sf))
    grid = TimeGrid.gate_periods(sf, 1, 1366)
    traj = propagate_lindblad(sf, rho0, [NoiseChannel.builtin("qubit_decay", 2000.0, sf.n_fock)], grid)
    assert np.max(np.abs(gp_subsystem(traj, [1]).phi_g)) <= 1e-6
    assert np.max(np.abs(gp_of(traj, "subsystem:0").phi_g)) <= 1e-6


def test_gp_of_targets(sf_unitary_run):
    assert np.array_equal(gp_of(sf_unitary_run).phi_g, gp_pure(sf_unitary_run).phi_g, equal_nan=True)
    assert gp_of(sf_unitary_run, "qubits").times.shape == sf_unitary_run.times.shape
    with pytest.raises(ValueError):
        gp_of(sf_unitary_run, "mode")


def test_wf_analytic_phase_before_and_after_orthogonality():
    p = MSParams.weak_field_reference(eta=0.04)
    period = 2 * np.pi / abs(effective_rabi(p))
    grid = TimeGrid(0.0, period, 2000)
    states = np.stack([wf_state_analytic(p, t) for t in grid.times])
    tr = gp_pure(as_trajectory(grid, states, HilbertSpec((2, 2))))
    first = grid.times < 0.499 * period
    second = grid.times > 0.501 * period
    assert np.max(np.abs(tr.phi_g[first])) <= 1e-9
    # crossing |11> flips the sign of the reference overlap: a Pancharatnam pi jump
    assert np.allclose(np.abs(tr.phi_g[second]), np.pi, atol=1e-9)


def test_unwrap_examples():
    out = unwrap([0.0, 3.0, -3.0])
    assert out[:2].tolist() == [0.0, 3.0]
    assert out[2] == pytest.approx(2 * np.pi - 3.0)
    assert unwrap([1.5, 1.5, 1.5]).tolist() == [1.5, 1.5, 1.5]
    nan = unwrap([0.0, np.nan, 3.0, -3.0])
    assert np.isnan(nan[1]) and nan[3] == pytest.approx(2 * np.pi - 3.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(-20, 20), st.lists(st.floats(-3.0, 3.0), min_size=1, max_size=40))
def test_unwrap_wrap_roundtrip(x0, steps):
    x = x0 + np.concatenate([[0.0], np.cumsum(steps)])
    # unwrap anchors on the first wrapped sample
    assert np.allclose(unwrap(wrap(x)), x - (x0 - wrap(x0)), atol=1e-9)
