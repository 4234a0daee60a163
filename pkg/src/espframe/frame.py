"""Tight frames of circularly shifted, envelope-modulated sinusoids.

Atoms are a[l,k,m][i] = e_l[(i-m) mod N] * exp(2*pi*j*k*(i-m)/N): envelope l,
frequency bin k, circular shift m. Any nonzero envelope collection yields a
tight frame with constant alpha = N * sum_l ||e_l||^2; normalizing every
envelope to (N*L)**-0.5 makes it Parseval (alpha = 1).

For fixed (l, k) the coefficients over all shifts m form a circular
correlation of the signal with the modulated envelope, so one sheet of the
coefficient tensor costs two length-N FFT passes instead of N inner
products. ``analysis`` exploits that; ``analysis_direct`` keeps the literal
O(L*N^3) sum as an oracle.
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.fft
from sklearn.base import BaseEstimator, TransformerMixin

from . import validation
from .envelopes import EnvelopeSet

__all__ = ["EspFrame", "MipImage", "analysis_direct", "mip"]

# Modulation-table cache budget. Above this the tables are rebuilt per
# envelope on every operator call, keeping memory bounded for large N.
CACHE_BUDGET_BYTES = 256 * 2**20

_COMPLEX_DTYPES = (np.dtype(np.complex64), np.dtype(np.complex128))


class EspFrame(BaseEstimator, TransformerMixin):
    """Analysis/synthesis operators for an enveloped-sinusoid tight frame.

    Parameters
    ----------
    envelope_set : EnvelopeSet
        The generating envelopes. Normalize with
        :func:`espframe.envelopes.parseval_normalize` for a Parseval frame.
    dtype : numpy dtype, default complex128
        Working precision of the operators. complex64 halves memory and
        roughly doubles throughput at ~1e-7 relative accuracy; keep the
        default where 1e-9 reconstruction tolerances matter.
    cache_operators : bool or None, default None
        Precompute the (L, N, N) modulation tables. None picks automatically
        by the CACHE_BUDGET_BYTES limit.

    Notes
    -----
    The scikit-learn transformer protocol (fit/transform/inverse_transform
    on row-stacked signals) is provided for pipeline interop; note that
    transform materializes L*N*N coefficients per row. The ``analysis`` /
    ``synthesis`` methods are the primary API and operate on one signal.
    """

    def __init__(self, envelope_set, dtype=np.complex128, cache_operators=None):
        self.envelope_set = envelope_set
        self.dtype = dtype
        self.cache_operators = cache_operators

    # -- derived state -----------------------------------------------------

    def _ensure_state(self):
        key = (id(self.envelope_set), np.dtype(self.dtype).name, self.cache_operators)
        if getattr(self, "_state_key", None) == key:
            return
        env = self.envelope_set
        if not isinstance(env, EnvelopeSet):
            raise TypeError("envelope_set must be an EnvelopeSet")
        dt = np.dtype(self.dtype)
        if dt not in _COMPLEX_DTYPES:
            raise ValueError("dtype must be complex64 or complex128")
        self._dt = dt
        self._n = env.n
        self._l = env.l_count
        norms2 = env.norms() ** 2
        self._alpha = float(self._n * norms2.sum())
        self._env_fft = scipy.fft.fft(env.values, axis=1)
        self._idx = None
        self._m_cache = None
        cache = self.cache_operators
        if cache is None:
            cache = self._l * self._n * self._n * dt.itemsize <= CACHE_BUDGET_BYTES
        if cache:
            self._m_cache = np.empty((self._l, self._n, self._n), dtype=dt)
            for l in range(self._l):
                self._m_cache[l] = self._modulation_build(l)
        self._state_key = key

    def _shift_index(self):
        # idx[k, q] = (q - k) mod N; row k of the modulation table is the
        # envelope spectrum conjugated and rolled by k.
        if self._idx is None:
            q = np.arange(self._n, dtype=np.int32)
            self._idx = (q[np.newaxis, :] - q[:, np.newaxis]) % self._n
        return self._idx

    def _modulation_build(self, l):
        return np.conj(self._env_fft[l]).astype(self._dt)[self._shift_index()]

    def _modulation(self, l):
        if self._m_cache is not None:
            return self._m_cache[l]
        return self._modulation_build(l)

    # -- frame facts ---------------------------------------------------------

    @property
    def n(self) -> int:
        self._ensure_state()
        return self._n

    @property
    def l_count(self) -> int:
        self._ensure_state()
        return self._l

    @property
    def alpha(self) -> float:
        """Tight-frame constant N * sum_l ||e_l||^2."""
        self._ensure_state()
        return self._alpha

    @property
    def coeff_shape(self) -> tuple:
        self._ensure_state()
        return (self._l, self._n, self._n)

    @property
    def coeff_dtype(self):
        self._ensure_state()
        return self._dt

    @property
    def sample_rate(self) -> float:
        return self.envelope_set.sample_rate

    @property
    def is_parseval(self) -> bool:
        return abs(self.alpha - 1.0) <= 1e-10

    def frequency(self, k: int) -> float:
        """Signed frequency in Hz of bin k (storage keeps raw k)."""
        n = self.n
        k = validation.check_index(k, n, "k")
        return ((k + n // 2) % n - n // 2) * self.sample_rate / n

    def frequencies(self) -> np.ndarray:
        """Signed frequency of every bin, in storage order."""
        n = self.n
        k = np.arange(n)
        return ((k + n // 2) % n - n // 2) * (self.sample_rate / n)

    # -- operators -----------------------------------------------------------

    def vector(self, l: int, k: int, m: int) -> np.ndarray:
        """The frame vector a[l,k,m], exactly as defined."""
        self._ensure_state()
        l = validation.check_index(l, self._l, "l")
        k = validation.check_index(k, self._n, "k")
        m = validation.check_index(m, self._n, "m")
        shifted = np.roll(self.envelope_set.values[l], m)
        i = np.arange(self._n)
        return shifted * np.exp(2j * np.pi * k * (i - m) / self._n)

    def analysis(self, w) -> np.ndarray:
        """All inner products <w, a[l,k,m]> as an (L, N, N) tensor.

        Accepts a Signal or a length-N array. Matches ``analysis_direct``
        to 1e-9 * ||w|| in max-abs at the default precision.
        """
        self._ensure_state()
        w = validation.as_complex_vector(w, n=self._n, dtype=self._dt)
        out = np.empty((self._l, self._n, self._n), dtype=self._dt)
        return self._analysis_into(w, out)

    def _analysis_into(self, w, out):
        spectrum = scipy.fft.fft(w)
        for l in range(self._l):
            np.multiply(spectrum[np.newaxis, :], self._modulation(l), out=out[l])
            out[l] = scipy.fft.ifft(out[l], axis=1, overwrite_x=True)
        return out

    def synthesis(self, c) -> np.ndarray:
        """Weighted atom sum (1/alpha) * sum c[l,k,m] * a[l,k,m], length N.

        Left-inverse of ``analysis``: synthesis(analysis(w)) reconstructs w.
        """
        self._ensure_state()
        c = validation.as_coeff_array(c, self.coeff_shape)
        return self._recon(c)

    def _recon(self, c):
        # Accumulate the assembled spectrum in double precision; the final
        # result is cast back to the working dtype.
        acc = np.zeros(self._n, dtype=np.complex128)
        for l in range(self._l):
            rows = scipy.fft.fft(np.ascontiguousarray(c[l]), axis=1)
            rows *= np.conj(self._modulation(l))
            acc += rows.sum(axis=0)
        return (scipy.fft.ifft(acc) / self._alpha).astype(self._dt)

    # -- scikit-learn transformer protocol ------------------------------------

    def fit(self, X=None, y=None):
        """Validate parameters and build operator state. X is unused."""
        self._ensure_state()
        self.n_features_in_ = self._n
        return self

    def transform(self, X) -> np.ndarray:
        """Row-wise analysis: (n_samples, n) -> (n_samples, L*N*N)."""
        self.fit()
        X = np.atleast_2d(np.asarray(X))
        if X.shape[1] != self._n:
            raise ValueError(f"X has {X.shape[1]} columns, frame dimension is {self._n}")
        return np.stack([self.analysis(row).ravel() for row in X])

    def inverse_transform(self, Xt) -> np.ndarray:
        """Row-wise synthesis: (n_samples, L*N*N) -> (n_samples, n)."""
        self.fit()
        Xt = np.atleast_2d(np.asarray(Xt))
        shape = self.coeff_shape
        if Xt.shape[1] != np.prod(shape):
            raise ValueError(f"Xt has {Xt.shape[1]} columns, expected {np.prod(shape)}")
        return np.stack([self.synthesis(row.reshape(shape)) for row in Xt])

    def __repr__(self):
        # BaseEstimator's repr chokes on the EnvelopeSet; keep it short.
        try:
            return (
                f"EspFrame(n={self.n}, L={self.l_count}, alpha={self.alpha:.6g}, "
                f"dtype={np.dtype(self.dtype).name})"
            )
        except Exception:
            return "EspFrame(<unconfigured>)"


def analysis_direct(frame: EspFrame, w) -> np.ndarray:
    """Coefficients by literal inner-product summation.

    O(L*N^3); intended for N <= 256. This is the ground truth the FFT path
    is tested against.
    """
    w = validation.as_complex_vector(w, n=frame.n, dtype=np.complex128)
    n, l_count = frame.n, frame.l_count
    i = np.arange(n)
    out = np.empty((l_count, n, n), dtype=np.complex128)
    for l in range(l_count):
        e = frame.envelope_set.values[l]
        for m in range(n):
            windowed = w * np.conj(np.roll(e, m))
            phases = np.exp(-2j * np.pi * np.outer(i, i - m) / n)
            out[l, :, m] = phases @ windowed
    return out


@dataclasses.dataclass(frozen=True)
class MipImage:
    """Maximum-intensity projection of a coefficient tensor, in relative dB.

    values: (L, N) matrix, one row per envelope, entries in [floor_db, 0].
    collapsed_axis: "frequency" (max over k) or "time-shift" (max over m).
    reference_max: the global magnitude maximum that 0 dB refers to.
    """

    values: np.ndarray
    collapsed_axis: str
    reference_max: float
    floor_db: float


_MIP_AXES = {"frequency": 1, "time-shift": 2}


def mip(c, collapse_axis: str = "time-shift", floor_db: float = -120.0) -> MipImage:
    """Project |c| onto (envelope, remaining-index) by maximum, in dB re max."""
    if collapse_axis not in _MIP_AXES:
        raise ValueError(f"collapse_axis must be one of {sorted(_MIP_AXES)}")
    if not floor_db < 0:
        raise ValueError("floor_db must be negative")
    c = np.asarray(c)
    if c.ndim != 3:
        raise ValueError("expected an (L, N, N) coefficient tensor")
    mags = np.abs(c)
    reference = float(mags.max())
    if reference == 0.0:
        raise ValueError("all-zero tensor has no dB reference")
    proj = mags.max(axis=_MIP_AXES[collapse_axis])
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(proj / reference)
    db = np.clip(db, floor_db, 0.0)
    return MipImage(db, collapse_axis, reference, float(floor_db))
