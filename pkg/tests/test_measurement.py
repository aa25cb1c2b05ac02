import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dsradar import dictionaries as dct
from dsradar.ds_codes import catalog, equivalent_shift
from dsradar.errors import DelayOverrun, NumericallyUnsampledBin, ValidationError
from dsradar.measurement import (
    MeasurementMatrix,
    NoiseSpec,
    RadarParams,
    Scene,
    Target,
    add_noise,
    coefficient_noise_std,
    discrete_snr,
    fourier_extract,
    grid_scene,
    noise_variance,
    pulse_samples,
    quadrature_coefficients,
    random_scene,
    synthesize_model,
    synthesize_time_oracle,
)
from dsradar.waveforms import make_waveform

TAU = 10e-6
PARAMS = RadarParams(TAU, 9.1e6, 6, 91, 16)
DS = catalog("91-10-1")
SAMP = dct.build_sampling("ds", rng_range=PARAMS.fourier_range, ds=DS)
DSFCM = make_waveform("dsfcm", TAU, 9.1e6, indices=SAMP.indices)


def test_radar_params():
    assert PARAMS.N == 91 and PARAMS.nyquist_per_pri == 91
    with pytest.raises(ValidationError):
        RadarParams(TAU, 9.1e6, 6, 200, 16)
    with pytest.raises(ValidationError):
        RadarParams(TAU, 9.1e6, 0, 91, 16)


def test_random_scene_examples():
    assert len(random_scene(0, PARAMS, 1)) == 0
    a = random_scene(5, PARAMS, 42)
    b = random_scene(5, PARAMS, 42)
    assert a == b
    assert np.allclose(np.abs(a.amplitudes), 1)
    assert np.all((a.delays >= 0) & (a.delays < TAU))
    assert np.all((a.dopplers >= -0.5 / TAU) & (a.dopplers < 0.5 / TAU))
    g = random_scene(20, PARAMS, 3, on_grid=True)
    assert set(g.delays) <= set(PARAMS.delay_grid())
    assert set(g.dopplers) <= set(PARAMS.doppler_grid())


def test_random_scene_max_delay():
    s = random_scene(200, PARAMS, 0, max_delay=TAU / 4)
    assert s.delays.max() < TAU / 4


def test_model_single_target_at_origin():
    Y = synthesize_model(Scene((Target(1.0, 0.0, 0.0),)), SAMP, PARAMS).values
    assert Y.shape == (10, 6) and np.allclose(Y, 1)


def test_model_on_grid_is_rank_one():
    m, n = 5, 17
    Y = synthesize_model(grid_scene([(m, n)], PARAMS), SAMP, PARAMS).values
    Phi = dct.delay_dictionary(SAMP, 91).matrix
    Psi = dct.doppler_dictionary(6, 16, TAU).matrix
    assert np.allclose(Y, np.outer(Phi[:, n], Psi[:, m]))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_model_linearity(seed):
    s = random_scene(3, PARAMS, seed)
    total = synthesize_model(s, SAMP, PARAMS).values
    parts = sum(synthesize_model(Scene((t,)), SAMP, PARAMS).values for t in s)
    assert np.allclose(total, parts)


def test_oracle_examples():
    assert not np.any(synthesize_time_oracle(Scene(), DSFCM, PARAMS))
    assert not np.any(synthesize_time_oracle(Scene((Target(0j, 3e-6, 1e4),)), DSFCM, PARAMS))


def test_oracle_linearity():
    s = random_scene(3, PARAMS, 9)
    total = synthesize_time_oracle(s, DSFCM, PARAMS)
    parts = sum(synthesize_time_oracle(Scene((t,)), DSFCM, PARAMS) for t in s)
    assert np.allclose(total, parts)


def test_delay_overrun():
    short = make_waveform("dsfcm", TAU, 9.1e6, pulse_width=TAU / 4, indices=SAMP.indices)
    late = Scene((Target(1.0, 0.9 * TAU, 0.0),))
    with pytest.raises(DelayOverrun):
        synthesize_time_oracle(late, short, PARAMS, wrap=False)
    with pytest.raises(DelayOverrun):
        synthesize_time_oracle(Scene((Target(1.0, TAU, 0.0),)), short, PARAMS)


def test_extract_pure_tone():
    L = PARAMS.nyquist_per_pri
    t = np.arange(L) * TAU / L
    tone = np.exp(2j * np.pi * 9 * t / TAU)[None, :]
    flat = make_waveform("rect", TAU, 9.1e6, pulse_width=TAU)
    spectra = np.fft.fft(tone, axis=1) / L
    assert np.isclose(spectra[0, 9], 1) and np.allclose(np.delete(spectra[0], 9), 0, atol=1e-12)
    # through fourier_extract (rect with T_p = tau only has c_0, so sample bin 0)
    y = fourier_extract(np.exp(2j * np.pi * 0 * t)[None, :], [0], flat).values
    assert np.isclose(y[0, 0], 1)


def test_guard_rejects_unsampled_bins():
    flat = make_waveform("rect", TAU, 9.1e6, pulse_width=TAU)
    blocks = np.ones((1, 91), dtype=complex)
    with pytest.raises(NumericallyUnsampledBin):
        fourier_extract(blocks, SAMP, flat)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_zero_doppler(seed):
    rng = np.random.default_rng(seed)
    s = Scene(tuple(Target(complex(np.exp(1j * rng.uniform(0, 6.3))), float(rng.uniform(0, TAU)), 0.0)
                    for _ in range(3)))
    oracle = fourier_extract(synthesize_time_oracle(s, DSFCM, PARAMS), SAMP, DSFCM).values
    model = synthesize_model(s, SAMP, PARAMS).values
    assert np.max(np.abs(oracle - model)) < 1e-6


def test_quadrature_agrees_with_model_at_zero_doppler():
    s = Scene((Target(1.0, 3.3e-6, 0.0), Target(-1j, 7.1e-6, 0.0)))
    params = RadarParams(TAU, 9.1e6, 2, 91, 16)
    q = quadrature_coefficients(s, DSFCM, SAMP, params)
    m = synthesize_model(s, SAMP, params).values
    assert np.max(np.abs(q - m)) < 1e-6


def test_snr_examples():
    rect = make_waveform("rect", TAU, 9.1e6, pulse_width=5e-6)
    h = pulse_samples(rect)
    assert h.size == int(5e-6 * 9.1e6)
    assert discrete_snr(h, 1.0, 1.0) == pytest.approx(1.0)
    assert noise_variance(0.0, rect) == pytest.approx(1.0)
    assert noise_variance(10.0, rect) == pytest.approx(0.1)
    assert noise_variance(np.inf, rect) == 0


def test_infinite_snr_is_noiseless():
    s = random_scene(2, PARAMS, 4)
    Y = synthesize_model(s, SAMP, PARAMS)
    Yn = add_noise(Y, NoiseSpec(np.inf), DSFCM, PARAMS, SAMP)
    assert np.array_equal(Y.values, Yn.values)
    blocks = synthesize_time_oracle(s, DSFCM, PARAMS)
    assert np.array_equal(add_noise(blocks, NoiseSpec(np.inf), DSFCM, PARAMS), blocks)


def test_noise_determinism():
    Y = synthesize_model(random_scene(2, PARAMS, 4), SAMP, PARAMS)
    a = add_noise(Y, NoiseSpec(0.0, seed=11), DSFCM, PARAMS, SAMP).values
    b = add_noise(Y, NoiseSpec(0.0, seed=11), DSFCM, PARAMS, SAMP).values
    assert np.array_equal(a, b)


def test_fast_path_variance_matches_formula():
    short = make_waveform("dsfcm", TAU, 9.1e6, pulse_width=TAU / 3, indices=SAMP.indices)
    zero = MeasurementMatrix(np.zeros((10, 4000), dtype=complex), SAMP)
    params = RadarParams(TAU, 9.1e6, 4000, 91, 16)
    W = add_noise(zero, NoiseSpec(-3.0, 1), short, params, SAMP).values
    expect = coefficient_noise_std(noise_variance(-3.0, short), short, SAMP, 91) ** 2
    assert np.allclose(np.var(W, axis=1), expect, rtol=0.1)
