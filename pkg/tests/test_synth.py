"""Damped-resonance signal generator: poles, residues, and envelopes."""

import numpy as np
import pytest

from espframe import (
    ResonanceSpec,
    pole,
    resonant_impulse_response,
    single_atom_signal,
    transfer_residues,
)

FS = 100e3


def test_pole_location():
    spec = ResonanceSpec(frequency=5e3, time_constant=3e-3)
    z = pole(spec, FS)
    assert abs(z) == pytest.approx(np.exp(-1.0 / (3e-3 * FS)))
    assert np.angle(z) == pytest.approx(2 * np.pi * 5e3 / FS)


def test_spec_validation():
    with pytest.raises(ValueError):
        ResonanceSpec(frequency=5e3, time_constant=-1.0)
    with pytest.raises(ValueError):
        ResonanceSpec(frequency=5e3, time_constant=0.0)


def test_signal_is_real_and_causal():
    spec = ResonanceSpec(frequency=5e3, time_constant=3e-3)
    sig = resonant_impulse_response([spec], 400, FS, impulse_index=60)
    assert sig.is_real
    assert np.all(sig.samples[:60] == 0)
    assert np.abs(sig.samples[60]) > 0


def test_unit_residues_are_additive():
    a = ResonanceSpec(frequency=5e3, time_constant=3e-3)
    b = ResonanceSpec(frequency=13e3, time_constant=0.8e-3)
    both = resonant_impulse_response([a, b], 256, FS, residues="unit")
    sep = (
        resonant_impulse_response([a], 256, FS, residues="unit").samples
        + resonant_impulse_response([b], 256, FS, residues="unit").samples
    )
    assert np.allclose(both.samples, sep, atol=1e-14)


def test_log_envelope_slope_matches_time_constant():
    tau = 2e-3
    spec = ResonanceSpec(frequency=5e3, time_constant=tau)
    sig = resonant_impulse_response([spec], 1000, FS, residues="unit")
    analytic = np.abs(sig.samples + 1j * np.imag(np.fft.ifft(
        np.fft.fft(sig.samples) * _analytic_filter(1000)
    )))
    # fit log|envelope| over a clean interior stretch
    t = np.arange(100, 700) / FS
    slope = np.polyfit(t, np.log(analytic[100:700]), 1)[0]
    assert slope == pytest.approx(-1.0 / tau, rel=0.02)


def _analytic_filter(n):
    h = np.zeros(n)
    h[0] = 1.0
    h[1 : n // 2] = 2.0
    h[n // 2] = 1.0
    return h


def test_spectral_peak_lands_on_the_resonance_bin():
    spec = ResonanceSpec(frequency=13e3, time_constant=0.8e-3)
    sig = resonant_impulse_response([spec], 1000, FS, residues="unit")
    spectrum = np.abs(np.fft.rfft(sig.samples.real))
    peak_hz = np.argmax(spectrum) * FS / 1000
    assert abs(peak_hz - 13e3) <= FS / 1000  # within one bin


def test_transfer_residues_include_conjugate_poles():
    specs = [
        ResonanceSpec(frequency=5e3, time_constant=3e-3),
        ResonanceSpec(frequency=13e3, time_constant=0.8e-3),
    ]
    residues = transfer_residues(specs, FS)
    assert len(residues) == 2
    # residues of a real rational transfer come in conjugate structure;
    # building the signal from them must stay real
    sig = resonant_impulse_response(specs, 300, FS, residues="transfer")
    assert sig.is_real


def test_start_time_offsets_the_onset():
    spec = ResonanceSpec(frequency=5e3, time_constant=3e-3, start_time=1e-3)
    sig = resonant_impulse_response([spec], 400, FS, impulse_index=10)
    onset = 10 + round(1e-3 * FS)
    assert np.all(sig.samples[:onset] == 0)
    assert np.abs(sig.samples[onset]) > 0


def test_aliasing_and_onset_bounds_are_rejected():
    with pytest.raises(ValueError):
        resonant_impulse_response(
            [ResonanceSpec(frequency=60e3, time_constant=1e-3)], 100, FS
        )
    with pytest.raises(ValueError):
        resonant_impulse_response(
            [ResonanceSpec(frequency=5e3, time_constant=1e-3, start_time=1.0)],
            100,
            FS,
            impulse_index=0,
        )


def test_single_atom_signal_norm(small_frame):
    w = single_atom_signal(small_frame, 1, 17, 30)
    n, l_count = small_frame.n, small_frame.l_count
    # sqrt(N L) * unit-normalized atom: coefficient at (l,k,m) is 1/sqrt(NL)
    c = small_frame.analysis(w.samples)
    assert np.abs(c[1, 17, 30]) == pytest.approx((n * l_count) ** -0.5, rel=1e-10)
    peak = np.unravel_index(np.argmax(np.abs(c)), c.shape)
    assert peak == (1, 17, 30)
