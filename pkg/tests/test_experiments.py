"""Config parsing and the builders behind the experiment commands."""

import numpy as np
import pytest
import yaml

from espframe import ConfigError, EspFrame, StftFrame, build_frame, build_signal, load_config
from espframe.experiments import decay_grid, load_signal_file, noise_cells
from espframe.signals import write_signal_csv, Signal


def _write(tmp_path, doc):
    path = tmp_path / "cfg.yaml"
    path.write_text(yaml.safe_dump(doc))
    return path


BASE_SIGNAL = {
    "source": "synthetic",
    "n": 120,
    "sample_rate": 50000.0,
    "resonances": [{"frequency": 4000.0, "time_constant": 0.002}],
}


def test_load_config_rejects_non_mapping(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("- just\n- a list\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_load_config_rejects_bad_yaml(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("signal: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_build_signal_synthetic():
    sig = build_signal({"signal": dict(BASE_SIGNAL)})
    assert sig.n == 120
    assert sig.sample_rate == 50000.0
    assert sig.is_real


def test_build_signal_complex_amplitude():
    doc = {
        "signal": {
            **BASE_SIGNAL,
            "residues": "unit",
            "resonances": [
                {"frequency": 4000.0, "time_constant": 0.002, "amplitude": [0.0, 1.0]}
            ],
        }
    }
    sig = build_signal(doc)
    assert sig.n == 120


def test_build_signal_validation_errors():
    with pytest.raises(ConfigError):
        build_signal({"signal": {**BASE_SIGNAL, "resonances": []}})
    with pytest.raises(ConfigError):
        build_signal({"signal": {**BASE_SIGNAL, "n": 0}})
    with pytest.raises(ConfigError):
        build_signal({"signal": {**BASE_SIGNAL, "resonances": [{"frequency": 1.0}]}})
    with pytest.raises(ConfigError):
        build_signal({})


def test_build_signal_from_file(tmp_path):
    ref = Signal(np.arange(16, dtype=float), 2000.0)
    path = tmp_path / "sig.csv"
    write_signal_csv(path, ref)
    doc = {"signal": {"source": "file", "path": str(path), "sample_rate": 2000.0}}
    sig = build_signal(doc)
    assert np.array_equal(sig.samples, ref.samples)


def test_load_signal_file_requires_rate_for_csv(tmp_path):
    path = tmp_path / "sig.csv"
    write_signal_csv(path, Signal(np.ones(4), 1.0))
    with pytest.raises(ConfigError):
        load_signal_file(path, None)


def test_build_frame_esp_gaussian():
    doc = {
        "signal": dict(BASE_SIGNAL),
        "frame": {"type": "esp", "envelope": "gaussian", "sigmas": [0.001, 0.004]},
    }
    frame = build_frame(doc, 120, 50000.0)
    assert isinstance(frame, EspFrame)
    assert frame.l_count == 2
    assert frame.is_parseval  # normalize defaults on


def test_build_frame_unnormalized():
    doc = {"frame": {"envelope": "exponential", "taus": [0.001], "normalize": False}}
    frame = build_frame(doc, 120, 50000.0)
    assert not frame.is_parseval


def test_build_frame_kind_override():
    doc = {"frame": {"envelope": "exponential", "taus": [0.001], "window_length": 32}}
    frame = build_frame(doc, 120, 50000.0, kind="stft")
    assert isinstance(frame, StftFrame)
    assert frame.window_length == 32


def test_build_frame_rejects_unknown_dtype():
    doc = {"frame": {"taus": [0.001], "dtype": "float32"}}
    with pytest.raises(ConfigError):
        build_frame(doc, 120, 50000.0)


def test_noise_cells_explicit_seeds():
    cfg = {"noise": {"snr_db": [0.0, 10.0], "seeds": [5, 6]}}
    assert noise_cells(cfg, 99) == [(0.0, 5), (0.0, 6), (10.0, 5), (10.0, 6)]


def test_noise_cells_generated_from_base_seed():
    cfg = {"noise": {"snr_db": [15.0], "realizations": 3}}
    assert noise_cells(cfg, 100) == [(15.0, 100), (15.0, 101), (15.0, 102)]


def test_noise_cells_empty_means_clean():
    assert noise_cells({}, 0) == [(None, None)]
    assert noise_cells({"noise": {"snr_db": []}}, 0) == [(None, None)]


def test_decay_grid_prefers_explicit_values():
    cfg = {
        "frame": {"taus": [0.001, 0.002]},
        "estimate": {"decay_values": [0.003, 0.004]},
    }
    assert decay_grid(cfg) == [0.003, 0.004]
    assert decay_grid({"frame": {"taus": [0.001]}}) == [0.001]
    assert decay_grid({"frame": {"sigmas": [0.002]}}) == [0.002]
    with pytest.raises(ConfigError):
        decay_grid({"frame": {"envelope": "custom", "path": "x.csv"}})
