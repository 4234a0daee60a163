"""Linear-prediction (Prony) estimation of decaying sinusoid parameters.

Forward covariance method: solve x[t] = sum_j a_j x[t-j] in least squares
over the valid rows, take the roots of the prediction polynomial as poles,
then fit complex amplitudes through a Vandermonde system. An optional SVD
truncation of the data matrix suppresses noise directions before solving,
and a start-sample shift skips any pre-onset region so the model sees pure
decay.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import validation
from .signals import Signal

__all__ = ["PronyConfig", "PoleEstimate", "prony_estimate", "select_pole"]


@dataclasses.dataclass(frozen=True)
class PronyConfig:
    """num_poles: prediction order p; svd_keep: optional rank r <= p kept
    when truncating the data matrix; shift_samples: samples dropped from the
    start before fitting."""

    num_poles: int
    svd_keep: int | None = None
    shift_samples: int = 0

    def __post_init__(self):
        if int(self.num_poles) < 1:
            raise ValueError("num_poles must be >= 1")
        object.__setattr__(self, "num_poles", int(self.num_poles))
        if self.svd_keep is not None:
            r = int(self.svd_keep)
            if not 1 <= r <= self.num_poles:
                raise ValueError("svd_keep must lie in [1, num_poles]")
            object.__setattr__(self, "svd_keep", r)
        if int(self.shift_samples) < 0:
            raise ValueError("shift_samples must be >= 0")
        object.__setattr__(self, "shift_samples", int(self.shift_samples))


@dataclasses.dataclass(frozen=True)
class PoleEstimate:
    """One estimated pole.

    frequency = angle(z) * fs / (2 pi); time_constant = -1/(fs * ln|z|) for
    |z| < 1 and +inf otherwise (non-decaying, flagged unstable so selection
    skips it).
    """

    z: complex
    frequency: float
    time_constant: float
    amplitude: complex
    stable: bool


def _pole_parameters(z: complex, sample_rate: float) -> tuple:
    frequency = float(np.angle(z) * sample_rate / (2.0 * np.pi))
    radius = abs(z)
    if radius >= 1.0:
        return frequency, np.inf, False
    if radius == 0.0:
        return frequency, 0.0, True
    return frequency, float(-1.0 / (sample_rate * np.log(radius))), True


def prony_estimate(signal: Signal, config: PronyConfig) -> list:
    """Estimate poles and amplitudes; sorted by |amplitude| descending.

    Conjugate partners (equal |amplitude| for real input) end up adjacent,
    positive frequency first. Rank-deficient but consistent prediction
    systems are solved in the minimum-norm sense, which leaves the true
    poles among the roots and near-zero amplitudes on the spurious ones.
    """
    x = validation.as_complex_vector(signal, name="signal", dtype=np.complex128)
    sample_rate = float(getattr(signal, "sample_rate", 1.0))
    p = config.num_poles
    x = x[config.shift_samples :]
    if x.size <= 2 * p:
        raise ValueError(
            f"need more than {2 * p} samples after the shift, have {x.size}"
        )

    # column j (1-based lag) is x[p-j : len-j]; rows are prediction eqs.
    columns = [x[p - j : x.size - j] for j in range(1, p + 1)]
    data = np.stack(columns, axis=1)
    target = x[p:]

    if config.svd_keep is not None:
        u_mat, s, vh = np.linalg.svd(data, full_matrices=False)
        inv = np.zeros_like(s)
        kept = s[: config.svd_keep]
        nonzero = kept > 0
        inv[: config.svd_keep][nonzero] = 1.0 / kept[nonzero]
        coeffs = vh.conj().T @ (inv * (u_mat.conj().T @ target))
    else:
        coeffs, *_ = np.linalg.lstsq(data, target, rcond=None)

    poles = np.roots(np.concatenate(([1.0], -coeffs)))

    # Amplitude fit on the shifted record. Powers of non-decaying poles can
    # overflow on long records; those entries are zeroed, which truncates
    # the corresponding atom rather than poisoning the whole solve.
    t = np.arange(x.size)
    with np.errstate(over="ignore", invalid="ignore"):
        vander = np.power(poles[np.newaxis, :], t[:, np.newaxis])
    vander[~np.isfinite(vander)] = 0.0
    amplitudes, *_ = np.linalg.lstsq(vander, x, rcond=None)

    estimates = []
    for z, amp in zip(poles, amplitudes):
        frequency, tau, stable = _pole_parameters(complex(z), sample_rate)
        estimates.append(PoleEstimate(complex(z), frequency, tau, complex(amp), stable))

    peak = max((abs(e.amplitude) for e in estimates), default=0.0)
    scale = peak if peak > 0 else 1.0
    estimates.sort(
        key=lambda e: (
            -round(abs(e.amplitude) / scale, 9),
            round(abs(e.frequency), 6),
            -e.frequency,
        )
    )
    return estimates


def select_pole(estimates, target_band) -> PoleEstimate:
    """Largest-amplitude stable pole with frequency inside [lo, hi].

    Ties on amplitude go to the lower frequency.
    """
    lo, hi = (float(b) for b in target_band)
    if lo > hi:
        raise ValueError("band must satisfy lo <= hi")
    candidates = [e for e in estimates if e.stable and lo <= e.frequency <= hi]
    if not candidates:
        raise ValueError(f"no stable pole with frequency in [{lo}, {hi}] Hz")
    return max(candidates, key=lambda e: (abs(e.amplitude), -e.frequency))
