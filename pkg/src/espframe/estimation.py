"""Resonance parameter readout from coefficient tensors.

The frequency estimate is the bin of the in-band magnitude peak. The time
constant interpolates between envelope grid points: a geometric average of
tau at the peak envelope and its neighbors, weighted by the coefficient
magnitudes at the same (k, m).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .frame import EspFrame

__all__ = [
    "ResonanceEstimate",
    "find_resonance_peak",
    "estimate_time_constant",
    "resonance_estimate",
]

SOURCES = ("unregularized", "bp", "bpd", "weighted-bpd")


@dataclasses.dataclass(frozen=True)
class ResonanceEstimate:
    """One (frequency, time constant) readout and where it came from."""

    frequency: float
    time_constant: float
    shift_index: int
    peak_magnitude: float
    source: str

    def __post_init__(self):
        if self.time_constant <= 0:
            raise ValueError("time_constant must be positive")
        if self.peak_magnitude <= 0:
            raise ValueError("peak_magnitude must be positive")
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}")


def _check_band(band, sample_rate):
    lo, hi = (float(b) for b in band)
    nyquist = sample_rate / 2.0
    if not (-nyquist <= lo <= hi <= nyquist):
        raise ValueError(
            f"band [{lo}, {hi}] must satisfy -fs/2 <= lo <= hi <= fs/2"
        )
    return lo, hi


def find_resonance_peak(c, band, frame: EspFrame) -> tuple:
    """(l, k, m, magnitude) of the largest |c| with bin frequency in band.

    Ties resolve to the lexicographically smallest (l, k, m), k compared by
    storage index.
    """
    c = np.asarray(c)
    if c.shape != frame.coeff_shape:
        raise ValueError(f"tensor shape {c.shape} does not match frame {frame.coeff_shape}")
    lo, hi = _check_band(band, frame.sample_rate)
    freqs = frame.frequencies()
    (k_indices,) = np.nonzero((freqs >= lo) & (freqs <= hi))
    if k_indices.size == 0:
        raise ValueError(f"no frequency bins inside [{lo}, {hi}] Hz")
    mags = np.abs(c[:, k_indices, :])
    flat = int(np.argmax(mags))  # first occurrence = lexicographic winner
    l, k_sub, m = np.unravel_index(flat, mags.shape)
    magnitude = float(mags[l, k_sub, m])
    if magnitude == 0.0:
        raise ValueError("tensor is zero inside the band")
    return int(l), int(k_indices[k_sub]), int(m), magnitude


def estimate_time_constant(c, peak, taus) -> float:
    """Magnitude-weighted geometric interpolation of tau around the peak.

    With the peak at envelope l and weights w_i = |c[i, k, m]| for
    i in {l-1, l, l+1} (missing neighbors at the grid edge are omitted),
    returns exp(sum w_i log tau_i / sum w_i). The result always lies
    between the outermost taus entering the average.
    """
    c = np.asarray(c)
    l, k, m = (int(v) for v in peak[:3])
    taus = [float(t) for t in taus]
    if len(taus) != c.shape[0]:
        raise ValueError(f"got {len(taus)} taus for {c.shape[0]} envelopes")
    if any(b <= a for a, b in zip(taus, taus[1:])):
        raise ValueError("taus must be strictly ascending")
    if not 0 <= l < c.shape[0]:
        raise IndexError(f"peak envelope index {l} out of range")

    log_sum = 0.0
    weight_sum = 0.0
    for i in (l - 1, l, l + 1):
        if 0 <= i < len(taus):
            w = float(np.abs(c[i, k, m]))
            log_sum += w * math.log(taus[i])
            weight_sum += w
    if weight_sum == 0.0:
        raise ValueError("zero total weight at the peak neighborhood")
    return math.exp(log_sum / weight_sum)


def resonance_estimate(frame: EspFrame, c, band, taus, source: str) -> ResonanceEstimate:
    """Peak search plus tau interpolation, packaged as a ResonanceEstimate."""
    l, k, m, magnitude = find_resonance_peak(c, band, frame)
    tau = estimate_time_constant(c, (l, k, m), taus)
    return ResonanceEstimate(
        frequency=frame.frequency(k),
        time_constant=tau,
        shift_index=m,
        peak_magnitude=magnitude,
        source=source,
    )
