"""Property tests over randomly drawn parameters, waves and states."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from rswe_triads.metrics import ELEVATION_KINDS, convert_elevation, invert_elevation, normalized_correlation
from rswe_triads.spectral_core import (
    GridSpec,
    PhysicalParams,
    WaveIndex,
    eigenbasis,
    project_spectral_amplitudes,
    to_spectral,
)
from rswe_triads.stability import Scheme, amplification
from rswe_triads.triadic_error import triadic_error_from_frequencies
from rswe_triads.triads import classify

positive = st.floats(0.05, 50.0, allow_nan=False)
params_st = st.builds(PhysicalParams, f=positive, g=positive, H0=positive)
G8 = GridSpec.square(8)


@settings(max_examples=40, deadline=None)
@given(params_st, st.sampled_from([8, 12]), st.floats(0.5, 20.0))
def test_eigenbasis_unitary_for_any_parameters(params, n, length):
    R = eigenbasis(params, GridSpec.square(n, length))
    RH = np.conj(np.swapaxes(R, -1, -2))
    assert np.abs(RH @ R - np.eye(3)).max() < 1e-12


@settings(max_examples=25, deadline=None)
@given(params_st, st.integers(0, 2**32 - 1))
def test_real_fields_give_hermitian_amplitudes(params, seed):
    U = to_spectral(np.random.default_rng(seed).standard_normal((3, 8, 8)))
    amps = project_spectral_amplitudes(U, params, G8)
    for zx in range(-3, 4):
        for zy in range(-3, 4):
            for a in (-1, 0, 1):
                w = WaveIndex(zx, zy, a)
                assert abs(amps[w] - np.conj(amps[w.mirror()])) < 1e-12


@given(st.floats(-50.0, 50.0))
def test_trapezoid_amplification_is_unimodular(theta):
    assert abs(abs(complex(amplification(Scheme.alpha(0.5), 1j * theta))) - 1) < 1e-14


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(1e-5, 1e-2))
def test_etd_triadic_error_vanishes(wa, wb, wo, dt):
    assert float(triadic_error_from_frequencies(Scheme("ETD"), wa, wb, wo, dt)) <= 1e-13


@given(st.tuples(*[st.sampled_from([-1, 0, 1])] * 3))
def test_classification_ignores_signs_of_fast_branches(modes):
    flipped = tuple(-m for m in modes)
    assert classify(modes) == classify(flipped)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_correlation_is_scale_invariant(seed, scale):
    p = np.random.default_rng(seed).standard_normal((5, 16))
    np.testing.assert_allclose(normalized_correlation(scale * p), normalized_correlation(p), atol=1e-12)


@given(st.sampled_from(ELEVATION_KINDS), params_st,
       st.lists(st.floats(-10.0, 10.0), min_size=1, max_size=8))
def test_elevation_conversion_inverts(kind, params, values):
    phi = np.array(values)
    back = convert_elevation(kind, invert_elevation(kind, phi, params), params)
    np.testing.assert_allclose(back, phi, atol=1e-9 * (1 + params.g))
