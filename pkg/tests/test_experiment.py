import numpy as np
import pytest

from dsradar import experiment as ex
from dsradar.errors import ConfigError, KindMismatch
from dsradar.measurement import NoiseSpec, RadarParams, Scene, Target, grid_scene
from dsradar.metrics import NyquistBins, match_detections
from dsradar.waveforms import make_waveform

TAU = 10e-6
SMALL = dict(pri_s=TAU, bandwidth_hz=9.1e6, delay_grids=91, doppler_grids=16, pulses=8, ds="91-10-1")


def cfg(**kw):
    return ex.config_from_dict({**SMALL, **kw})


def test_detect_sweep_rises():
    table = ex.run_experiment(cfg(kind="detect", trials=40, seed=1, num_targets=2, snr_db=[-30, 20],
                                  models=["structured"]))
    low, high = (r["p_detect"] for r in table.rows)
    assert low < 0.15 and high > 0.95


def test_deterministic_single_trial():
    c = cfg(kind="detect", trials=1, seed=9, snr_db=[0.0], models=["structured", "df"])
    a = ex.run_experiment(c)
    b = ex.run_experiment(c)
    assert ex.format_csv(a.columns, a.rows) == ex.format_csv(b.columns, b.rows)


def test_pool_matches_serial():
    c = cfg(kind="detect", trials=6, seed=4, snr_db=[-10.0, 5.0],
            models=["structured", "standard", "modified-df", "nyquist-reference"])
    a = ex.run_experiment(c, jobs=1)
    b = ex.run_experiment(c, jobs=2)
    assert ex.format_csv(a.columns, a.rows) == ex.format_csv(b.columns, b.rows)


def test_trial_seed_is_pure():
    a = ex.trial_seed(3, 1, 7).generate_state(4)
    b = ex.trial_seed(3, 1, 7).generate_state(4)
    c = ex.trial_seed(3, 7, 1).generate_state(4)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_separate_spacing_zero():
    table = ex.run_experiment(cfg(kind="separate", trials=20, seed=2, snr_db=30,
                                  delay_spacing_bins=[0, 4], models=["structured"]))
    zero, four = table.rows
    assert zero["p_separate"] == 0
    assert "p_separate" in table.columns and four["delay_spacing_bins"] == 4


def test_one_row_per_point_and_model():
    c = cfg(kind="pulses-sweep", trials=2, pulses=[4, 8], snr_db=[0, 10], models=["structured", "df"])
    table = ex.run_experiment(c)
    keys = [(r["pulses"], r["snr_db"], r["model"]) for r in table.rows]
    assert len(keys) == len(set(keys)) == 8


def test_config_errors():
    with pytest.raises(ConfigError):
        cfg(bogus_key=1)
    with pytest.raises(ConfigError):
        cfg(models=["lasso"])
    with pytest.raises(ConfigError):
        cfg(trials=0)
    with pytest.raises(ConfigError):
        cfg(delay_grids=500)
    with pytest.raises(ConfigError):
        ex.config_from_dict({**SMALL, "variant": [{"model": "structured", "colour": "red"}]})
    with pytest.raises(ConfigError):
        cfg(sampling="ds", ds="993-32-1")


def test_load_config_file(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('kind = "detect"\npri_s = 10e-6\nbandwidth_hz = 9.1e6\ndelay_grids = 91\n'
                 'pulses = 8\ndoppler_grids = 16\nds = "91-10-1"\n[[variant]]\nmodel = "df"\n'
                 'sampling = "consecutive"\nwaveform = "rect"\nnum_samples = 10\n')
    c = ex.load_config(p, seed=5)
    assert c.seed == 5 and c.resolved_variants()[0].sampling == "consecutive"
    (tmp_path / "bad.toml").write_text("kind = \n")
    with pytest.raises(ConfigError):
        ex.load_config(tmp_path / "bad.toml")


@pytest.mark.parametrize("name", ["detect_desk", "separate_desk", "detect_full", "coherence", "spectrum"])
def test_shipped_configs_validate(name):
    from importlib import resources

    path = resources.files("dsradar") / "configs" / f"{name}.toml"
    c = ex.load_config(path)
    assert ex.dry_run_summary(c)


def test_dry_run_sizes():
    rows = ex.dry_run_summary(cfg(models=["structured"]))
    r = rows[0]
    assert (r["K"], r["N"], r["M"], r["P"]) == (10, 91, 16, 8)
    assert r["kronecker_bytes"] == 10 * 8 * 91 * 16 * 16


def test_nyquist_reference_strong_target():
    params = RadarParams(TAU, 9.1e6, 8, 91, 16)
    s = Scene((Target(1.0, 3.3e-6, 12345.0),))
    dmap = ex.nyquist_reference(s, params, NoiseSpec(20.0, seed=1))
    est = ex.nyquist_estimates(dmap, params)
    score = match_detections(s, est, NyquistBins.from_radar(9.1e6, 8, TAU), pri=TAU)
    assert score.detections == 1


def test_nyquist_delay_error_is_centred():
    # uniform off-grid delays: centred quantization error has RMS 1/sqrt(12) bins
    params = RadarParams(TAU, 9.1e6, 8, 91, 16)
    rng = np.random.default_rng(3)
    errs = []
    for _ in range(200):
        t = rng.uniform(0, 0.9 * TAU)
        s = Scene((Target(1.0, t, 0.0),))
        est = ex.nyquist_estimates(ex.nyquist_reference(s, params, NoiseSpec(np.inf)), params)
        errs.append((est[0].delay - t) / params.delay_bin)
    errs = np.array(errs)
    assert np.all(np.abs(errs) <= 0.5 + 1e-9)
    assert abs(np.sqrt(np.mean(errs**2)) - 1 / np.sqrt(12)) < 0.03


def test_nyquist_reference_empty():
    params = RadarParams(TAU, 9.1e6, 8, 91, 16)
    dmap = ex.nyquist_reference(Scene(), params, NoiseSpec(np.inf))
    assert len(dmap) == 0


def test_matched_filter_leakage_bounded():
    params = RadarParams(TAU, 9.1e6, 1, 91, 1)
    w = make_waveform("rect", TAU, 9.1e6, pulse_width=5 / 9.1e6)
    from dsradar.measurement import synthesize_time_oracle

    blocks = synthesize_time_oracle(Scene((Target(1.0, 30 * TAU / 91, 0.0),)), w, params)
    h = np.zeros(91, complex)
    h[:5] = 1
    mf = np.abs(np.fft.ifft(np.fft.fft(blocks[0]) * np.conj(np.fft.fft(h))))
    # triangular profile: peak at the delay, (5 - |lag|) / 5 nearby, zero past T_p
    assert np.argmax(mf) == 30
    assert mf[31] < mf[30] and mf[32] / mf[30] == pytest.approx(0.6)
    assert np.all(mf[np.r_[:26, 35:91]] < 1e-9)


def test_emit_plot_data():
    t = ex.run_experiment(cfg(kind="detect", trials=2, snr_db=[0], models=["structured"]))
    out = ex.emit_plot_data(t, "detect")
    cols, rows = out["detect_plot"]
    assert cols == ("snr_db", "model", "p_detect") and len(rows) == 1
    with pytest.raises(KindMismatch):
        ex.emit_plot_data(t, "spectrum")
    with pytest.raises(KindMismatch):
        ex.emit_plot_data(t, "histogram")


def test_coherence_and_spectrum_kinds():
    t = ex.run_experiment(cfg(kind="coherence", trials=30))
    ds_rows = [r for r in t.rows if r["scheme"] == "ds"]
    assert len(ds_rows) == 90 and all(abs(r["mu_of_u"] - 0.3) < 1e-10 for r in ds_rows)
    out = ex.emit_plot_data(t, "coherence")
    assert out["coherence_plot"][0] == ("scheme", "u", "mu_of_u")
    assert sum(r["count"] for r in out["coherence_histogram"][1]) == 30
    s = ex.run_experiment(cfg(kind="spectrum", spectrum_points=11, pulse_width_s=2e-6))
    assert {r["waveform"] for r in s.rows} == {"rect", "lfm", "dsfcm"}
    assert ex.emit_plot_data(s, "spectrum")["spectrum_plot"][0] == ("waveform", "freq_hz", "power_db")


def test_oracle_synthesis_mode():
    c = cfg(kind="detect", trials=5, snr_db=[30.0], synthesis="oracle", models=["structured"])
    assert ex.run_experiment(c).rows[0]["p_detect"] > 0.8


def test_single_trial_matches_run():
    c = cfg(kind="detect", trials=1, seed=3, snr_db=[np.inf], num_targets=2, on_grid=True, models=["structured"])
    tr = ex.single_trial(c)
    dmap = ex.recover_single(tr)
    truth = {(int(np.argmin(abs(tr.params.doppler_grid() - t.doppler))),
              int(round(t.delay / tr.params.delay_bin))) for t in tr.scene}
    assert dmap.support == truth
