"""scikit-learn estimator conventions on both frame transformers."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import Pipeline

from espframe import EspFrame, StftFrame, exponential_set, parseval_normalize


def _envelopes(n=64):
    return parseval_normalize(exponential_set(n, 1000.0, [0.004, 0.016]))


def test_get_params_round_trip():
    env = _envelopes()
    frame = EspFrame(env, dtype=np.complex64, cache_operators=True)
    params = frame.get_params()
    assert params["envelope_set"] is env
    assert params["dtype"] == np.complex64
    assert params["cache_operators"] is True
    rebuilt = EspFrame(**params)
    assert rebuilt.get_params() == params


def test_set_params_invalidates_state():
    frame = EspFrame(_envelopes())
    frame.fit()
    assert frame.coeff_shape == (2, 64, 64)
    frame.set_params(envelope_set=_envelopes(32))
    frame.fit()
    assert frame.coeff_shape == (2, 32, 32)


def test_clone_produces_an_unfitted_equivalent():
    frame = EspFrame(_envelopes())
    frame.fit()
    other = clone(frame)
    other.fit()
    assert other is not frame
    assert other.coeff_shape == frame.coeff_shape
    assert other.alpha == pytest.approx(frame.alpha)


def test_fit_sets_n_features_in():
    frame = EspFrame(_envelopes())
    assert frame.fit().n_features_in_ == 64


def test_transform_inverse_transform_round_trip(rng):
    frame = EspFrame(_envelopes())
    X = rng.standard_normal((3, 64)) + 1j * rng.standard_normal((3, 64))
    Xt = frame.transform(X)
    assert Xt.shape == (3, 2 * 64 * 64)
    back = frame.inverse_transform(Xt)
    assert back.shape == (3, 64)
    assert np.linalg.norm(back - X) <= 1e-9 * np.linalg.norm(X)


def test_transform_rejects_wrong_width(rng):
    frame = EspFrame(_envelopes())
    with pytest.raises(ValueError):
        frame.transform(rng.standard_normal((2, 65)))


def test_stft_transformer_round_trip(rng):
    frame = StftFrame(256, 1000.0, 64)
    X = rng.standard_normal((2, 256))
    Xt = frame.fit_transform(X)
    assert Xt.shape == (2, frame.frame_count * 64)
    back = frame.inverse_transform(Xt)
    assert np.linalg.norm(back - X) <= 1e-9 * np.linalg.norm(X)


def test_stft_get_params_and_clone():
    frame = StftFrame(512, 8000.0, 128, dtype=np.complex64)
    other = clone(frame)
    assert other.get_params() == frame.get_params()


def test_pipeline_chains_the_transform(rng):
    pipe = Pipeline([("frame", EspFrame(_envelopes()))])
    X = rng.standard_normal((2, 64))
    Xt = pipe.fit_transform(X)
    assert Xt.shape == (2, 2 * 64 * 64)
    back = pipe.inverse_transform(Xt)
    assert np.linalg.norm(back - X) <= 1e-9 * np.linalg.norm(X)


def test_repr_is_compact():
    frame = EspFrame(_envelopes())
    text = repr(frame)
    assert "EspFrame" in text
    assert len(text) < 120
