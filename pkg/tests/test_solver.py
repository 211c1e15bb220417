import math

import numpy as np
import pytest

from rswe_triads.metrics import phi_profiles, reformation_count
from rswe_triads.solver import (
    BlowUpError,
    NumericalFailure,
    SolverConfig,
    apply_hyperviscosity,
    full_to_half,
    half_to_full,
    integrate,
    integrate_1d,
    linear_propagator,
    nonlinear_rhs,
    step,
)
from rswe_triads.spectral_core import (
    GridSpec,
    PhysicalParams,
    WaveIndex,
    dispersion,
    eigenvector,
    physical_eigenmode,
    project_spectral_amplitudes,
    to_spectral,
)
from rswe_triads.stability import Scheme, ab3_cubic, amplification
from rswe_triads.testcases import canonical_case, gaussian_1d_ic

SOLVER_SCHEMES = ["RK4", "TRAP", "ALPHA0.7", "TRBDF2", "AB3", "ETDRK2"]


@pytest.fixture(scope="module")
def case1():
    return canonical_case("case1_ps")


def hermitian_defect(U, grid):
    rows = (-np.arange(grid.ny)) % grid.ny
    cols = (-np.arange(grid.nx)) % grid.nx
    return np.abs(U - np.conj(U[..., rows, :][..., cols])).max()


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig("RK3", dt=1e-3, t_end=1)
    with pytest.raises(ValueError):
        SolverConfig("RK4", dt=0, t_end=1)
    with pytest.raises(ValueError):
        SolverConfig("RK4", dt=1e-3, t_end=-1)
    with pytest.raises(ValueError):
        SolverConfig("RK4", dt=1e-2, t_end=1, sample_interval=1e-3)
    assert SolverConfig("trap", dt=1e-3, t_end=1).scheme == Scheme.alpha(0.5)


def test_sample_count_case1(case1):
    # T = 100 at dT = 0.05 with both endpoints
    cfg = case1.solver_config("RK4", dt=1e-4)
    assert len(cfg.sample_steps()) == 2001
    assert cfg.sample_steps()[-1] == cfg.n_steps == 1_000_000


def test_linear_propagator_properties(nd_params):
    g = GridSpec.square(8)
    eye = np.broadcast_to(np.eye(3), g.shape + (3, 3))
    np.testing.assert_allclose(linear_propagator(nd_params, g, 0.0), eye, atol=1e-15)
    P = linear_propagator(nd_params, g, 0.013)
    Q = linear_propagator(nd_params, g, -0.013)
    assert np.abs(P @ Q - eye).max() < 1e-12
    w = WaveIndex(2, -1, 1)
    r = eigenvector(nd_params, w, g)
    row, col = g.fft_index(w.zx, w.zy)
    om = dispersion(nd_params, w, g)
    np.testing.assert_allclose(P[row, col] @ r, np.exp(-1j * om * 0.013) * r, atol=1e-13)


def test_hyperviscosity():
    g = GridSpec.square(64)
    U = np.ones((3,) + g.shape, complex)
    assert apply_hyperviscosity(U, 0.0, 1e-3, g) is U
    D = apply_hyperviscosity(U, 4e-12, 1e-3, g)
    assert D[0, 0, 0] == 1
    row, col = g.fft_index(16, 0)
    assert D[1, row, col].real == pytest.approx(math.exp(-4e-12 * 16**8 * 1e-3), rel=1e-15)


def test_half_full_roundtrip():
    g = GridSpec.square(8)
    rng = np.random.default_rng(3)
    U = to_spectral(rng.standard_normal((3, 8, 8)))
    np.testing.assert_allclose(half_to_full(full_to_half(U, g), g), U, atol=1e-16)


def test_nonlinear_rhs_trivial(case1):
    g = case1.grid
    assert np.abs(nonlinear_rhs(np.zeros((3,) + g.shape), case1.params, g)).max() == 0
    const = np.zeros((3,) + g.shape)
    const[2] = 0.7
    assert np.abs(nonlinear_rhs(to_spectral(const), case1.params, g)).max() == 0


def test_single_wave_self_interaction_support():
    g = GridSpec.square(32)
    p = PhysicalParams(10, 50, 2)
    U = to_spectral(0.1 * physical_eigenmode(p, WaveIndex(5, 0, 1), g))
    N = np.abs(nonlinear_rhs(U, p, g)).max(axis=0)
    support = {(int(g.zx[0, c]), int(g.zy[r, 0])) for r, c in zip(*np.nonzero(N > 1e-12))}
    assert support <= {(0, 0), (10, 0), (-10, 0)}
    assert (10, 0) in support


def test_nonlinear_rhs_against_direct_convolution():
    # inputs supported on |z| <= 2 so no product wraps onto |z| <= 3 on an 8^2 grid
    g = GridSpec.square(8)
    rng = np.random.default_rng(4)
    U = to_spectral(rng.standard_normal((3, 8, 8)))
    U[:, (np.abs(g.zy) > 2) | (np.abs(g.zx) > 2)] = 0
    N = nonlinear_rhs(U, PhysicalParams(1, 1, 1), g)
    box = range(-2, 3)
    for kx in range(-3, 4):
        for ky in range(-3, 4):
            acc = 0j
            for ax in box:
                for ay in box:
                    bx, by = kx - ax, ky - ay
                    if abs(bx) <= 2 and abs(by) <= 2:
                        pa = U[2][g.fft_index(ax, ay)]
                        ub, vb = U[0][g.fft_index(bx, by)], U[1][g.fft_index(bx, by)]
                        acc += pa * (1j * kx * ub + 1j * ky * vb)
            assert N[2][g.fft_index(kx, ky)] == pytest.approx(-acc, abs=1e-12)


def test_mass_conservation_per_step(case1):
    U0 = case1.initial_state()
    assert abs(nonlinear_rhs(U0, case1.params, case1.grid)[2, 0, 0]) < 1e-12
    for s in SOLVER_SCHEMES:
        U1 = step(U0, case1.solver_config(s, dt=2e-3, t_end=2e-3), case1.params, case1.grid)
        assert abs(U1[2, 0, 0] - U0[2, 0, 0]) < 1e-12


@pytest.mark.parametrize("scheme", SOLVER_SCHEMES)
def test_hermitian_symmetry_per_step(case1, scheme):
    U0 = case1.initial_state()
    U1 = step(U0, case1.solver_config(scheme, dt=2e-3, t_end=2e-3), case1.params, case1.grid)
    assert hermitian_defect(U1, case1.grid) < 1e-12


def _linear_eigenmode_run(scheme, n_steps, dt=2e-3):
    p = PhysicalParams(10, 50, 2)
    g = GridSpec.square(16)
    w = WaveIndex(3, 1, 1)
    U0 = to_spectral(physical_eigenmode(p, w, g))
    cfg = SolverConfig(scheme, dt=dt, t_end=n_steps * dt, nonlinear=False)
    tr = integrate(U0, cfg, p, g)
    amps = np.array([project_spectral_amplitudes(c, p, g)[w] for c in tr.coeffs])
    return amps, -1j * dispersion(p, w, g) * dt


@pytest.mark.parametrize("scheme", ["RK4", "TRAP", "ALPHA0.7", "TRBDF2", "ETDRK2"])
def test_linear_eigenmode_matches_stability_polynomial(scheme):
    amps, W = _linear_eigenmode_run(scheme, 5)
    P = complex(amplification(Scheme.parse(scheme), W))
    for n in range(1, len(amps)):
        assert abs(amps[n] - amps[n - 1] * P) < 1e-13


def test_linear_ab3_satisfies_characteristic_recurrence():
    amps, W = _linear_eigenmode_run("AB3", 8)
    # a_{n+3} - (1 + 23W/12) a_{n+2} + 16W/12 a_{n+1} - 5W/12 a_n = 0 once the history is filled
    for n in range(0, len(amps) - 3):
        res = amps[n + 3] - (1 + 23 * W / 12) * amps[n + 2] + 16 * W / 12 * amps[n + 1] - 5 * W / 12 * amps[n]
        assert abs(res) < 1e-13
    assert abs(ab3_cubic(W, 1.0) + W) < 1e-15


def test_t_end_zero_gives_initial_snapshot(case1):
    tr = integrate(case1.initial_state(), case1.solver_config("RK4", dt=1e-3, t_end=0.0), case1.params, case1.grid)
    assert len(tr) == 1 and tr.times[0] == 0
    np.testing.assert_array_equal(tr.final, half_to_full(full_to_half(case1.initial_state(), case1.grid), case1.grid)
                                  * case1.grid.nyquist_mask())


def test_deterministic_rerun(case1):
    cfg = case1.solver_config("TRBDF2", dt=5e-3, t_end=0.1)
    a = integrate(case1.initial_state(), cfg, case1.params, case1.grid)
    b = integrate(case1.initial_state(), cfg, case1.params, case1.grid)
    np.testing.assert_array_equal(a.coeffs, b.coeffs)
    np.testing.assert_allclose(a.times, np.arange(3) * 0.05)


def test_blow_up_reports_time_and_scheme(case1):
    cfg = case1.solver_config("RK4", dt=5e-2, t_end=20.0)
    with pytest.raises(BlowUpError) as info:
        integrate(case1.initial_state(), cfg, case1.params, case1.grid)
    assert info.value.scheme == "RK4" and 0 < info.value.t <= 20.0
    assert isinstance(info.value, NumericalFailure)


def test_dealiased_run_stays_in_box():
    c = canonical_case("case2a")
    cfg = c.solver_config("RK4", dt=2e-3, t_end=0.2)
    tr = integrate(c.initial_state(), cfg, c.params, c.grid)
    outside = ~c.grid.dealias_mask()
    assert np.abs(tr.coeffs[:, :, outside]).max() == 0.0


def test_integrate_1d_rejects_square_grid(nd_params):
    with pytest.raises(ValueError):
        integrate_1d(np.zeros((3, 8, 8)), SolverConfig("RK4", dt=1e-3, t_end=0), nd_params, GridSpec.square(8))


def test_1d_without_rotation_keeps_v_zero():
    g = GridSpec.line(64)
    p = PhysicalParams(0.0, 1.0, 1.0)
    tr = integrate_1d(gaussian_1d_ic(g), SolverConfig("RK4", dt=1e-2, t_end=1.0, sample_interval=0.1), p, g)
    assert np.abs(tr.coeffs[:, 1]).max() == 0.0


def test_smaller_epsilon_reforms_more_often():
    g = GridSpec.line(128)
    counts = {}
    for eps in (1.0, 0.1):
        cfg = SolverConfig("RK4", dt=5e-4 * eps / 0.1 if eps < 1 else 2e-3, t_end=10.0, sample_interval=0.005)
        tr = integrate_1d(gaussian_1d_ic(g), cfg, PhysicalParams.nondimensional(eps), g, nonlinear=False)
        counts[eps] = reformation_count(phi_profiles(tr))
    assert counts[0.1] > counts[1.0]


def test_rk4_self_convergence_factor(case1):
    U0 = case1.initial_state()
    run = lambda dt: integrate(U0, case1.solver_config("RK4", dt=dt, t_end=0.1), case1.params, case1.grid).final
    ref = run(0.1 / 800)
    e1 = np.abs(run(0.1 / 25) - ref).max()
    e2 = np.abs(run(0.1 / 50) - ref).max()
    assert 12 < e1 / e2 < 20
