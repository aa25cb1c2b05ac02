import csv
import io

import pytest

from dsradar.cli import main

SMALL = """
kind = "detect"
trials = 3
seed = 1
pri_s = 10e-6
bandwidth_hz = 9.1e6
delay_grids = 91
doppler_grids = 16
pulses = 8
ds = "91-10-1"
num_targets = 2
snr_db = [0, 20]
models = ["structured", "nyquist-reference"]
"""


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.toml"
    p.write_text(SMALL)
    return p


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_ds_verify_codes(capsys):
    assert main(["ds", "verify", "--modulus", "7", "--elements", "1,2,4"]) == 0
    assert main(["ds", "verify", "--modulus", "7", "--elements", "0,1,2"]) == 1
    assert main(["ds", "verify", "--modulus", "7", "--elements", "1,x"]) == 1
    assert "invalid" in capsys.readouterr().out


def test_ds_catalog(capsys):
    assert main(["ds", "catalog", "91-10-1"]) == 0
    out = capsys.readouterr().out
    assert "shifted,-42,-35,-30,-14,-10,0,1,3,9,27" in out
    assert main(["ds", "catalog", "nope"]) == 1


def test_dict_coherence(tmp_path):
    out = tmp_path / "mu.csv"
    assert main(["dict", "coherence", "--scheme", "ds", "--ds", "91-10-1", "-N", "91", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 90 and abs(float(rows[0]["mu_of_u"]) - 0.3) < 1e-10
    summary = read_csv(tmp_path / "mu_summary.csv")[0]
    assert float(summary["mu"]) == pytest.approx(float(summary["welch"]))
    assert main(["dict", "coherence", "--scheme", "random", "-N", "91", "--seed", "2", "--trials", "40",
                 "--out", str(out)]) == 0
    hist = read_csv(tmp_path / "mu_histogram.csv")
    assert list(hist[0]) == ["bin_lo", "bin_hi", "count"]
    assert sum(int(r["count"]) for r in hist) == 40


def test_waveform_spectrum(capsys):
    assert main(["waveform", "spectrum", "--kind", "rect", "--pri", "1e-5", "--pw", "1e-6", "--points", "5"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 5 and set(rows[0]) == {"freq_hz", "power_db"}


def test_sim_and_recover(tmp_path, small_cfg):
    scene = tmp_path / "scene.csv"
    assert main(["sim", "run", "--config", str(small_cfg), "--out", str(scene)]) == 0
    rows = read_csv(scene)
    assert list(rows[0]) == ["target_id", "re_a", "im_a", "delay_s", "doppler_hz"] and len(rows) == 2
    assert len(read_csv(tmp_path / "scene_Y.csv")) == 10 * 8
    for model in ("standard", "structured", "df", "modified-df"):
        out = tmp_path / f"{model}.csv"
        assert main(["recover", "--model", model, "--config", str(small_cfg), "--out", str(out)]) == 0
        assert list(read_csv(out)[0]) == ["m", "n", "re_amp", "im_amp"]
    assert list(read_csv(tmp_path / "structured_diag.csv")[0]) == ["iter", "residual_norm"]


def test_exper_run_writes_csv_and_figures(tmp_path, small_cfg):
    out = tmp_path / "res" / "results.csv"
    assert main(["exper", "run", "--config", str(small_cfg), "--out", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0])[:8] == ["snr_db", "model", "sampling", "waveform", "trials", "p_detect", "e_t", "e_f"]
    assert len(rows) == 4
    d = out.parent
    assert (d / "detect_plot.csv").exists() and (d / "results_timing.csv").exists()
    assert (d / "results_p_detect.png").stat().st_size > 1000


def test_exper_byte_identical(tmp_path, small_cfg):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["exper", "run", "--config", str(small_cfg), "--out", str(a), "--no-plots"])
    main(["--jobs", "2", "exper", "run", "--config", str(small_cfg), "--out", str(b), "--no-plots"])
    assert a.read_bytes() == b.read_bytes()


def test_dry_run(capsys, small_cfg):
    assert main(["exper", "run", "--config", str(small_cfg), "--dry-run"]) == 0
    out = capsys.readouterr().out
    assert '"K": 10' in out and "kronecker_bytes" in out


def test_global_flags_before_command(capsys, small_cfg):
    assert main(["--config", str(small_cfg), "--dry-run", "exper", "run"]) == 0


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("unknown_key = 3\n")
    assert main(["exper", "run", "--config", str(bad)]) == 1
    assert main(["exper", "run"]) == 1
    assert main(["exper", "run", "--config", str(tmp_path / "missing.toml")]) == 2
    assert main(["dict", "coherence", "--scheme", "ds", "-N", "90"]) == 1
