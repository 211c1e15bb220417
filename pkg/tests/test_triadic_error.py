import io
import math

import numpy as np
import pytest

from rswe_triads.stability import Scheme
from rswe_triads.triadic_error import (
    ConvergenceFit,
    average_triadic_error,
    convergence_order,
    default_dt_grid,
    exact_propagator,
    numerical_propagator,
    triad_error_sweep,
    triadic_error,
    triadic_error_from_frequencies,
    write_sweep_csv,
)
from rswe_triads.triads import enumerate_triads, make_triad

RK = [Scheme.rk(k) for k in (1, 2, 3, 4)]


def test_exact_propagator():
    assert exact_propagator(0.0, 0.3) == 1
    assert exact_propagator(math.pi, 1.0) == pytest.approx(-1, abs=1e-15)
    assert exact_propagator(1.4938, 0.01) == pytest.approx(np.exp(0.014938j), abs=1e-15)
    with pytest.raises(ValueError):
        exact_propagator(1.0, 0.0)


def test_rk1_direct_resonance_hand_value():
    # (1 + 0.1i)(1)(1 - 0.1i) = 1.01
    E = triadic_error_from_frequencies(Scheme.rk(1), 1.0, 0.0, 1.0, 0.1)
    assert float(E) == pytest.approx(0.01, abs=1e-15)


def test_numerical_propagator_product(nd_params, grid32):
    t = make_triad(nd_params, grid32, (5, 0, 1), (-5, 5, 0), (0, 5, 1))
    w = 10 * math.sqrt(26)
    dt = 1e-3
    expect = (1 + 1j * w * dt) * (1 - 1j * w * dt)
    assert numerical_propagator(Scheme.rk(1), t, nd_params, grid32, dt) == pytest.approx(expect, abs=1e-14)


def test_sss_triad_has_no_error(nd_params, grid32):
    t = make_triad(nd_params, grid32, (1, 2, 0), (2, -3, 0), 0)
    for s in RK + [Scheme("AB3"), Scheme("TRBDF2")]:
        assert triadic_error(s, t, nd_params, grid32, 0.01) == 0.0


def test_etd_error_vanishes(nd_params, grid32):
    sub = enumerate_triads(nd_params, grid32, omega_cutoff=20.0)
    assert average_triadic_error(Scheme("ETD"), sub, 0.01) < 1e-14


def test_empty_subset_raises(nd_params, grid32):
    sub = enumerate_triads(nd_params, grid32, types=["iii"], omega_cutoff=0.0)
    with pytest.raises(ValueError):
        average_triadic_error(Scheme.rk(4), sub, 1e-3)


def test_rk_errors_decrease_with_order(nd_params, grid32):
    sub = enumerate_triads(nd_params, grid32, omega_cutoff=5.0, jobs=2)
    errs = [average_triadic_error(s, sub, 1e-3) for s in RK]
    assert errs[3] < errs[2] < errs[1] < errs[0]


def test_vectorised_matches_scalar(nd_params, grid32):
    sub = enumerate_triads(nd_params, grid32, omega_cutoff=1.0)
    idx = np.linspace(0, len(sub) - 1, 25).astype(int)
    for s in (Scheme.rk(3), Scheme("AB3"), Scheme("TRBDF2")):
        vec = triadic_error_from_frequencies(s, sub.w[idx, 0], sub.w[idx, 1], sub.w[idx, 2], 2e-3)
        scal = [triadic_error(s, sub.triad(i), nd_params, grid32, 2e-3) for i in idx]
        np.testing.assert_allclose(vec, scal, rtol=1e-10, atol=1e-17)


def test_default_dt_grid():
    g = default_dt_grid()
    assert len(g) == 17 and g[0] == pytest.approx(1e-4) and g[-1] == pytest.approx(1e-2)


def test_convergence_order_slopes(nd_params, grid32):
    nonres = make_triad(nd_params, grid32, (1, 0, 1), (1, 0, 0), (2, 0, 1))
    res = make_triad(nd_params, grid32, (5, 0, 1), (-5, 5, 0), (0, 5, 1))
    assert nonres.interaction_type == "ii-b" and nonres.omega != 0
    assert convergence_order(Scheme.rk(3), nonres, nd_params, grid32).slope == pytest.approx(4, abs=0.1)
    assert convergence_order(Scheme.rk(2), res, nd_params, grid32).slope == pytest.approx(4, abs=0.1)
    assert convergence_order(Scheme.rk(1), res, nd_params, grid32).slope == pytest.approx(2, abs=0.1)


def test_convergence_order_exact_and_bad_range(nd_params, grid32):
    res = make_triad(nd_params, grid32, (5, 0, 1), (-5, 5, 0), (0, 5, 1))
    fit = convergence_order(Scheme.alpha(0.5), res, nd_params, grid32)
    assert isinstance(fit, ConvergenceFit) and fit.exact and str(fit) == "exact"
    with pytest.raises(ValueError):
        convergence_order(Scheme.rk(4), res, nd_params, grid32, dts=[1e-3, 2e-3])


def test_sweep_rows_and_csv(nd_params, grid32):
    subs = [enumerate_triads(nd_params, grid32, omega_cutoff=c) for c in (0.1, 5.0)]
    rows = triad_error_sweep([Scheme.rk(4), Scheme.alpha(0.5)], [1e-3, 2e-3], subs)
    assert len(rows) == 8
    assert [r.omega_c for r in rows[:4]] == [0.1] * 4
    trap = [r for r in rows if r.scheme == "TRAP" and r.omega_c == 0.1]
    assert all(r.mean_error < 1e-14 for r in trap)
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    assert buf.getvalue().splitlines()[0] == "scheme,dt,omega_c,mean_error,n_triads"
