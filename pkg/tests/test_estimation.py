"""Peak search over coefficient tensors and time-constant interpolation."""

import numpy as np
import pytest

from espframe import (
    EspFrame,
    estimate_time_constant,
    exponential_set,
    find_resonance_peak,
    parseval_normalize,
    resonance_estimate,
)


def _frame(n=100, fs=1000.0, taus=(0.002, 0.004, 0.008, 0.016)):
    env = parseval_normalize(exponential_set(n, fs, list(taus)))
    f = EspFrame(env)
    f.fit()
    return f


def _tensor_with_peak(frame, l, k, m, value=1.0):
    c = np.zeros(frame.coeff_shape, dtype=complex)
    c[l, k, m] = value
    return c


def test_peak_is_found_inside_the_band():
    f = _frame()
    # bin 30 of 100 at 1 kHz -> 300 Hz
    c = _tensor_with_peak(f, 2, 30, 7)
    c[0, 80, 3] = 10.0  # larger peak at -200 Hz, outside the band
    l, k, m, magnitude = find_resonance_peak(c, (250.0, 350.0), f)
    assert (l, k, m) == (2, 30, 7)
    assert magnitude == pytest.approx(1.0)


def test_peak_ties_break_lexicographically():
    f = _frame()
    c = np.zeros(f.coeff_shape, dtype=complex)
    c[1, 30, 5] = 1.0
    c[3, 30, 2] = 1.0  # same magnitude, larger l
    assert find_resonance_peak(c, (250.0, 350.0), f)[:3] == (1, 30, 5)


def test_band_with_no_energy_is_an_error():
    f = _frame()
    c = _tensor_with_peak(f, 0, 80, 0)  # negative-frequency peak only
    with pytest.raises(ValueError):
        find_resonance_peak(c, (250.0, 350.0), f)


def test_band_outside_nyquist_is_rejected():
    f = _frame()
    c = _tensor_with_peak(f, 0, 30, 0)
    with pytest.raises(ValueError):
        find_resonance_peak(c, (400.0, 600.0), f)


def test_interpolation_at_a_grid_point_with_symmetric_neighbors():
    taus = [0.002, 0.004, 0.008, 0.016]
    f = _frame(taus=taus)
    c = _tensor_with_peak(f, 1, 30, 5, 1.0)
    # equal neighbor magnitudes: the log-weighted mean stays at tau_1
    c[0, 30, 5] = 0.5
    c[2, 30, 5] = 0.5
    tau = estimate_time_constant(c, (1, 30, 5), taus)
    assert tau == pytest.approx(0.004)


def test_interpolation_pulls_toward_the_heavier_neighbor():
    taus = [0.002, 0.004, 0.008, 0.016]
    f = _frame(taus=taus)
    c = _tensor_with_peak(f, 1, 30, 5, 1.0)
    c[2, 30, 5] = 0.8
    c[0, 30, 5] = 0.1
    tau = estimate_time_constant(c, (1, 30, 5), taus)
    assert 0.004 < tau < 0.008


def test_interpolation_is_geometric_not_arithmetic():
    taus = [0.002, 0.004, 0.008]
    f = _frame(taus=taus)
    c = np.zeros(f.coeff_shape, dtype=complex)
    c[0, 30, 5] = 1.0
    c[1, 30, 5] = 1.0
    c[2, 30, 5] = 1.0
    tau = estimate_time_constant(c, (1, 30, 5), taus)
    assert tau == pytest.approx((0.002 * 0.004 * 0.008) ** (1 / 3))


def test_boundary_peak_uses_available_neighbors_only():
    taus = [0.002, 0.004, 0.008]
    f = _frame(taus=taus)
    c = _tensor_with_peak(f, 0, 30, 5, 1.0)
    c[1, 30, 5] = 1.0
    tau = estimate_time_constant(c, (0, 30, 5), taus)
    assert tau == pytest.approx(np.sqrt(0.002 * 0.004))


def test_interpolated_tau_is_bracketed_by_neighbor_grid_values():
    rng = np.random.default_rng(5)
    taus = [0.001, 0.003, 0.009, 0.027]
    f = _frame(taus=taus)
    for _ in range(20):
        l = int(rng.integers(1, 3))
        mags = rng.uniform(0.05, 1.0, size=3)
        mags[1] = 1.0  # center must dominate for (l, k, m) to be the peak
        c = np.zeros(f.coeff_shape, dtype=complex)
        c[l - 1, 40, 9], c[l, 40, 9], c[l + 1, 40, 9] = mags
        tau = estimate_time_constant(c, (l, 40, 9), taus)
        assert taus[l - 1] <= tau <= taus[l + 1]


def test_interpolation_is_scale_invariant():
    taus = [0.002, 0.004, 0.008]
    f = _frame(taus=taus)
    c = np.zeros(f.coeff_shape, dtype=complex)
    c[0, 30, 5], c[1, 30, 5], c[2, 30, 5] = 0.3, 1.0, 0.6
    tau_a = estimate_time_constant(c, (1, 30, 5), taus)
    tau_b = estimate_time_constant(1000.0 * c, (1, 30, 5), taus)
    assert tau_a == pytest.approx(tau_b, rel=1e-12)


def test_zero_weights_are_an_error():
    taus = [0.002, 0.004, 0.008]
    f = _frame(taus=taus)
    c = np.zeros(f.coeff_shape, dtype=complex)
    with pytest.raises(ValueError):
        estimate_time_constant(c, (1, 30, 5), taus)


def test_taus_must_be_strictly_ascending():
    taus = [0.002, 0.004, 0.008, 0.016]
    f = _frame(taus=taus)
    c = _tensor_with_peak(f, 1, 30, 5)
    with pytest.raises(ValueError):
        estimate_time_constant(c, (1, 30, 5), [0.004, 0.002, 0.008, 0.016])


def test_full_estimate_bundles_frequency_and_tau():
    taus = [0.002, 0.004, 0.008, 0.016]
    f = _frame(taus=taus)
    c = _tensor_with_peak(f, 1, 30, 5)
    est = resonance_estimate(f, c, (250.0, 350.0), taus, "unregularized")
    assert est.frequency == pytest.approx(300.0)
    assert est.time_constant == pytest.approx(0.004)
    assert est.shift_index == 5
    assert est.source == "unregularized"


def test_estimate_rejects_unknown_source():
    taus = [0.002, 0.004, 0.008, 0.016]
    f = _frame(taus=taus)
    c = _tensor_with_peak(f, 1, 30, 5)
    with pytest.raises(ValueError):
        resonance_estimate(f, c, (250.0, 350.0), taus, "magic")
