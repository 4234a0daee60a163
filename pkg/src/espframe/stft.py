"""Parseval short-time Fourier transform baseline.

Sine-windowed, half-overlapped, circularly extended STFT scaled so that
coefficient energy equals signal energy (alpha = 1). It exposes the same
operator surface as EspFrame (n, alpha, coeff_shape, analysis, synthesis),
so the sparse solvers run on either frame unchanged.

Boundary handling: the signal is zero-padded up to a hop multiple and the
window wraps circularly on that padded length; synthesis truncates back,
which is exactly the adjoint of the padding. For n = 1000 and W = 128 this
gives 16 hop positions (2048 coefficients).
"""

from __future__ import annotations

import numpy as np
import scipy.fft
from sklearn.base import BaseEstimator, TransformerMixin

from . import validation

__all__ = ["StftFrame"]

_COMPLEX_DTYPES = (np.dtype(np.complex64), np.dtype(np.complex128))


class StftFrame(BaseEstimator, TransformerMixin):
    """Parseval STFT operators on length-n signals.

    Parameters
    ----------
    n : int
        Signal length.
    sample_rate : float, default 1.0
        Metadata for frequency labeling; no numerical role.
    window_length : int, default 128
        Even analysis window length W; hop is W/2.
    dtype : numpy dtype, default complex128
        Coefficient dtype.
    """

    def __init__(self, n, sample_rate=1.0, window_length=128, dtype=np.complex128):
        self.n = n
        self.sample_rate = sample_rate
        self.window_length = window_length
        self.dtype = dtype

    # -- derived state -----------------------------------------------------

    def _ensure_state(self):
        key = (self.n, self.sample_rate, self.window_length, np.dtype(self.dtype).name)
        if getattr(self, "_state_key", None) == key:
            return
        n = int(self.n)
        w_len = int(self.window_length)
        if n < 1:
            raise ValueError("n must be >= 1")
        if w_len < 2 or w_len % 2:
            raise ValueError("window_length must be even and >= 2")
        if n < w_len:
            # the cyclic tiling needs at least one full window on the circle
            raise ValueError(f"n={n} is shorter than window_length={w_len}")
        validation.check_positive(self.sample_rate, "sample_rate")
        dt = np.dtype(self.dtype)
        if dt not in _COMPLEX_DTYPES:
            raise ValueError("dtype must be complex64 or complex128")
        self._dt = dt
        self._hop = w_len // 2
        self._n_pad = -(-n // self._hop) * self._hop
        self._frame_count = self._n_pad // self._hop
        i = np.arange(w_len)
        # sin(pi (i+1/2) / W) halves overlap to a constant 1/W sum of
        # squares; the 1/sqrt(W) factor then cancels the non-unitary DFT.
        self._window = np.sin(np.pi * (i + 0.5) / w_len) / np.sqrt(w_len)
        self._segment_idx = (
            np.arange(w_len)[np.newaxis, :]
            + self._hop * np.arange(self._frame_count)[:, np.newaxis]
        ) % self._n_pad
        self._state_key = key

    @property
    def hop(self) -> int:
        self._ensure_state()
        return self._hop

    @property
    def frame_count(self) -> int:
        self._ensure_state()
        return self._frame_count

    @property
    def window(self) -> np.ndarray:
        self._ensure_state()
        return self._window.copy()

    @property
    def alpha(self) -> float:
        return 1.0

    @property
    def coeff_shape(self) -> tuple:
        self._ensure_state()
        return (self._frame_count, int(self.window_length))

    @property
    def coeff_dtype(self):
        self._ensure_state()
        return self._dt

    # -- operators -----------------------------------------------------------

    def analysis(self, w) -> np.ndarray:
        """Windowed DFT at every hop: (frame_count, window_length) matrix.

        Parseval: total coefficient energy equals ||w||^2.
        """
        self._ensure_state()
        w = validation.as_complex_vector(w, n=int(self.n), dtype=self._dt)
        padded = np.zeros(self._n_pad, dtype=self._dt)
        padded[: w.size] = w
        segments = padded[self._segment_idx] * self._window
        return scipy.fft.fft(segments, axis=1).astype(self._dt, copy=False)

    def synthesis(self, c) -> np.ndarray:
        """Adjoint of analysis; exact left-inverse since alpha = 1."""
        self._ensure_state()
        c = validation.as_coeff_array(c, self.coeff_shape)
        return self._recon(c)

    def _analysis_into(self, w, out):
        out[:] = self.analysis(w)
        return out

    def _recon(self, c):
        w_len = int(self.window_length)
        segments = scipy.fft.ifft(np.ascontiguousarray(c), axis=1) * (w_len * self._window)
        padded = np.zeros(self._n_pad, dtype=np.complex128)
        np.add.at(padded, self._segment_idx, segments)
        return padded[: int(self.n)].astype(self._dt)

    # -- scikit-learn transformer protocol ------------------------------------

    def fit(self, X=None, y=None):
        self._ensure_state()
        self.n_features_in_ = int(self.n)
        return self

    def transform(self, X) -> np.ndarray:
        """Row-wise analysis: (n_samples, n) -> (n_samples, frame_count*W)."""
        self.fit()
        X = np.atleast_2d(np.asarray(X))
        if X.shape[1] != int(self.n):
            raise ValueError(f"X has {X.shape[1]} columns, expected {self.n}")
        return np.stack([self.analysis(row).ravel() for row in X])

    def inverse_transform(self, Xt) -> np.ndarray:
        self.fit()
        Xt = np.atleast_2d(np.asarray(Xt))
        shape = self.coeff_shape
        if Xt.shape[1] != np.prod(shape):
            raise ValueError(f"Xt has {Xt.shape[1]} columns, expected {np.prod(shape)}")
        return np.stack([self.synthesis(row.reshape(shape)) for row in Xt])
