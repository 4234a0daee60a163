"""Synthetic test signals: resonant impulse responses and single-atom probes."""

from __future__ import annotations

import dataclasses

import numpy as np

from . import validation
from .frame import EspFrame
from .signals import Signal

__all__ = [
    "ResonanceSpec",
    "pole",
    "transfer_residues",
    "resonant_impulse_response",
    "single_atom_signal",
]


@dataclasses.dataclass(frozen=True)
class ResonanceSpec:
    """One decaying resonance, representing a conjugate pole pair.

    frequency : Hz (positive member of the pair)
    time_constant : e-folding decay time in seconds, > 0
    start_time : onset offset in seconds relative to the impulse
    amplitude : complex residue used in "unit" residue mode
    """

    frequency: float
    time_constant: float
    start_time: float = 0.0
    amplitude: complex = 1.0 + 0.0j

    def __post_init__(self):
        validation.check_positive(self.time_constant, "time_constant")
        if not np.isfinite(self.frequency):
            raise ValueError("frequency must be finite")
        validation.check_positive(self.start_time, "start_time", allow_zero=True)


def pole(spec: ResonanceSpec, sample_rate: float) -> complex:
    """Discrete pole exp((-1/tau + 2*pi*j*f) / sample_rate).

    One sample multiplies the mode by this value, so |z|**(tau * fs) = 1/e
    and the phase advances by 2*pi*f/fs: the sampled signal is exactly a
    decaying sinusoid with the spec's (f, tau).
    """
    validation.check_positive(sample_rate, "sample_rate")
    s = -1.0 / spec.time_constant + 2j * np.pi * spec.frequency
    return complex(np.exp(s / sample_rate))


def transfer_residues(specs, sample_rate: float) -> list:
    """Residues of (z - 1) / prod(z - z_p) at each spec's pole.

    The pole set is every spec's pole plus its conjugate (real transfer
    function); the returned list gives the residue at the positive-frequency
    member, in spec order.
    """
    specs = list(specs)
    poles = [pole(s, sample_rate) for s in specs]
    full = poles + [np.conj(z) for z in poles]
    out = []
    for i, z in enumerate(poles):
        denom = 1.0 + 0.0j
        for j, other in enumerate(full):
            if j == i:
                continue
            denom *= z - other
        if denom == 0:
            raise ValueError("repeated poles: residues undefined")
        out.append((z - 1.0) / denom)
    return out


def resonant_impulse_response(
    specs,
    n: int,
    sample_rate: float,
    impulse_index: int = 0,
    residues: str = "unit",
) -> Signal:
    """Real signal: sum over specs of 2*Re{A_p * z_p**(t - t_onset)}.

    Each spec contributes a decaying sinusoid switched on at
    impulse_index + round(start_time * sample_rate) and exactly zero before.
    ``residues`` selects the A_p: "unit" takes each spec's amplitude field,
    "transfer" derives them from the pole/zero structure with a zero at
    z = 1 (the residue phases then interlock so the onset is smooth).
    """
    specs = list(specs)
    if not specs:
        raise ValueError("need at least one resonance spec")
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    validation.check_positive(sample_rate, "sample_rate")
    impulse_index = int(impulse_index)
    if not 0 <= impulse_index < n:
        raise ValueError(f"impulse_index {impulse_index} out of range [0, {n})")
    if residues not in ("unit", "transfer"):
        raise ValueError("residues must be 'unit' or 'transfer'")

    nyquist = sample_rate / 2.0
    for spec in specs:
        if abs(spec.frequency) >= nyquist:
            raise ValueError(
                f"frequency {spec.frequency} Hz aliases at sample rate {sample_rate}"
            )

    if residues == "transfer":
        amps = transfer_residues(specs, sample_rate)
    else:
        amps = [complex(s.amplitude) for s in specs]

    samples = np.zeros(n, dtype=np.float64)
    for spec, amp in zip(specs, amps):
        onset = impulse_index + int(round(spec.start_time * sample_rate))
        if not 0 <= onset < n:
            raise ValueError(f"onset sample {onset} out of range [0, {n})")
        z = pole(spec, sample_rate)
        t = np.arange(n - onset)
        samples[onset:] += 2.0 * np.real(amp * z**t)
    return Signal(samples.astype(np.complex128), sample_rate)


def single_atom_signal(frame: EspFrame, l: int, k: int, m: int) -> Signal:
    """Unit-norm probe sqrt(N*L) * a[l,k,m] from a Parseval frame."""
    if not frame.envelope_set.normalized:
        raise ValueError("single-atom probes need a normalized (Parseval) frame")
    scale = np.sqrt(frame.n * frame.l_count)
    return Signal(scale * frame.vector(l, k, m), frame.sample_rate)
