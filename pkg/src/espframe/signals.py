"""Signal container, white-noise injection, and reconstruction quality metrics."""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.io.wavfile

from . import validation

__all__ = [
    "Signal",
    "QualityReport",
    "add_white_noise",
    "relative_error",
    "reconstructed_snr",
    "sparsity",
    "quality_report",
    "read_signal_csv",
    "write_signal_csv",
    "read_signal_wav",
    "write_signal_wav",
]


@dataclasses.dataclass(frozen=True, eq=False, repr=False)
class Signal:
    """A uniformly sampled signal.

    Real-valued signals are stored with zero imaginary parts rather than a
    separate real dtype, so every consumer sees one sample type.

    Parameters
    ----------
    samples : ndarray, shape (n,)
        Complex sample values; finite entries only.
    sample_rate : float
        Samples per second, > 0.
    """

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        raw = self.samples
        arr = validation.as_complex_vector(raw, name="samples")
        if isinstance(raw, np.ndarray) and np.shares_memory(arr, raw) and arr.flags.writeable:
            arr = arr.copy()  # freezing must not touch the caller's buffer
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)
        object.__setattr__(
            self, "sample_rate", validation.check_positive(self.sample_rate, "sample_rate")
        )

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.n / self.sample_rate

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.samples.imag == 0))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.samples))

    def __repr__(self):
        kind = "real" if self.is_real else "complex"
        return f"Signal(n={self.n}, sample_rate={self.sample_rate:g}, {kind})"


@dataclasses.dataclass(frozen=True)
class QualityReport:
    """Reconstruction quality numbers reported by the denoising pipeline.

    ``sparsity_percent``/``nonzero_count`` are None when no coefficient
    tensor is involved (e.g. quality of a non-sparse baseline).
    """

    relative_error: float
    reconstructed_snr_db: float
    sparsity_percent: float | None = None
    nonzero_count: int | None = None


def add_white_noise(signal: Signal, snr_db: float, seed: int) -> Signal:
    """Add white Gaussian noise at the requested SNR.

    The noise is scaled so that 20*log10(||signal|| / ||noise||) targets
    ``snr_db`` in expectation. Real signals get real noise; complex signals
    get circularly symmetric complex noise. Draws come from
    ``numpy.random.default_rng(seed)`` (PCG64), so outputs are reproducible
    across platforms for a given seed.
    """
    if not np.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    x = signal.samples
    power = float(np.mean(np.abs(x) ** 2))
    if power == 0.0:
        raise ValueError("cannot scale noise against a zero-power signal")
    sigma = np.sqrt(power * 10.0 ** (-snr_db / 10.0))
    rng = np.random.default_rng(seed)
    if signal.is_real:
        noise = sigma * rng.standard_normal(signal.n)
    else:
        noise = (sigma / np.sqrt(2.0)) * (
            rng.standard_normal(signal.n) + 1j * rng.standard_normal(signal.n)
        )
    return Signal(x + noise, signal.sample_rate)


def _as_pair(reconstructed, reference):
    a = validation.as_complex_vector(reconstructed, name="reconstructed")
    b = validation.as_complex_vector(reference, name="reference")
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    return a, b


def relative_error(reconstructed, reference) -> float:
    """l2 relative error ||reconstructed - reference|| / ||reference||."""
    a, b = _as_pair(reconstructed, reference)
    denom = np.linalg.norm(b)
    if denom == 0.0:
        raise ValueError("reference signal is zero; relative error undefined")
    return float(np.linalg.norm(a - b) / denom)


def reconstructed_snr(reconstructed, reference) -> float:
    """Reconstruction SNR in dB: 20*log10(||reference|| / ||residual||).

    Equals -20*log10(relative_error); an exact reconstruction returns +inf.
    """
    err = relative_error(reconstructed, reference)
    if err == 0.0:
        return np.inf
    return float(-20.0 * np.log10(err))


def sparsity(coeffs, zero_tol: float | None = None) -> tuple[float, int]:
    """Sparsity percentage and nonzero count of a coefficient array.

    ``zero_tol`` defaults to 1e-8 * max|c|; entries with magnitude strictly
    above the tolerance count as nonzero. Returns (sparsity_percent,
    nonzero_count).
    """
    mags = np.abs(np.asarray(coeffs))
    if zero_tol is None:
        zero_tol = 1e-8 * float(mags.max(initial=0.0))
    elif zero_tol < 0:
        raise ValueError("zero_tol must be >= 0")
    count = int(np.count_nonzero(mags > zero_tol))
    percent = 100.0 * (1.0 - count / mags.size)
    return percent, count


def quality_report(reconstructed, reference, coeffs=None, zero_tol=None) -> QualityReport:
    """Assemble a QualityReport; coefficient stats only when a tensor is given."""
    err = relative_error(reconstructed, reference)
    snr = np.inf if err == 0.0 else float(-20.0 * np.log10(err))
    if coeffs is None:
        return QualityReport(err, snr)
    percent, count = sparsity(coeffs, zero_tol)
    return QualityReport(err, snr, percent, count)


# ---------------------------------------------------------------------------
# File I/O. CSV: one sample per line, "re" or "re,im". WAV: mono PCM,
# float32 on write; real signals only.

def write_signal_csv(path, signal: Signal) -> None:
    x = signal.samples
    with open(path, "w", newline="") as fh:
        if signal.is_real:
            for v in x.real:
                fh.write(f"{v:.17g}\n")
        else:
            for v in x:
                fh.write(f"{v.real:.17g},{v.imag:.17g}\n")


def read_signal_csv(path, sample_rate: float) -> Signal:
    values = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                if len(parts) == 1:
                    values.append(complex(float(parts[0]), 0.0))
                elif len(parts) == 2:
                    values.append(complex(float(parts[0]), float(parts[1])))
                else:
                    raise ValueError
            except ValueError:
                raise ValueError(f"{path}:{line_no}: expected 're' or 're,im'") from None
    return Signal(np.asarray(values, dtype=np.complex128), sample_rate)


def write_signal_wav(path, signal: Signal) -> None:
    if not signal.is_real:
        raise ValueError("WAV output supports real signals only")
    scipy.io.wavfile.write(
        path, int(round(signal.sample_rate)), signal.samples.real.astype(np.float32)
    )


def read_signal_wav(path) -> Signal:
    rate, data = scipy.io.wavfile.read(path)
    if data.ndim != 1:
        raise ValueError("only mono WAV files are supported")
    if np.issubdtype(data.dtype, np.integer):
        data = data / float(-np.iinfo(data.dtype).min)
    return Signal(np.asarray(data, dtype=np.complex128), float(rate))
