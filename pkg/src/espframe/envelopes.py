"""Envelope sets that generate enveloped-sinusoid frames.

An envelope is any nonzero complex vector; the frame construction only
needs the collection {e_l}. Gaussian and exponential families are provided
because their time constants map directly to physical decay parameters,
and arbitrary collections can be loaded from CSV.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import validation

__all__ = [
    "Envelope",
    "EnvelopeSet",
    "gaussian_set",
    "exponential_set",
    "parseval_normalize",
    "load_custom",
    "save_envelopes",
]


@dataclasses.dataclass(frozen=True, eq=False, repr=False)
class Envelope:
    """A single complex envelope with a human-readable label."""

    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        arr = validation.as_complex_vector(self.values, name="envelope values")
        if not np.any(arr):
            raise ValueError(f"envelope {self.label!r} is identically zero")
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def __repr__(self):
        return f"Envelope(n={self.n}, label={self.label!r})"


class EnvelopeSet:
    """An ordered collection of L equal-length envelopes.

    Parameters
    ----------
    envelopes : sequence of Envelope
    sample_rate : float
        Rate the envelopes were sampled at. Carried as metadata so frames
        built from the set can label frequency bins in Hz.

    Attributes
    ----------
    n : int
        Envelope length (the signal dimension N).
    l_count : int
        Number of envelopes L.
    normalized : bool
        True when every ||e_l|| equals (N*L)**-0.5 to 1e-12 relative.
    """

    def __init__(self, envelopes, sample_rate: float = 1.0):
        envelopes = tuple(envelopes)
        if not envelopes:
            raise ValueError("need at least one envelope")
        if not all(isinstance(e, Envelope) for e in envelopes):
            raise TypeError("EnvelopeSet takes Envelope instances")
        n = envelopes[0].n
        if any(e.n != n for e in envelopes):
            raise ValueError("envelopes have mismatched lengths")
        self.envelopes = envelopes
        self.sample_rate = validation.check_positive(sample_rate, "sample_rate")
        self._values = np.vstack([e.values for e in envelopes])
        self._values.setflags(write=False)

    @property
    def n(self) -> int:
        return self._values.shape[1]

    @property
    def l_count(self) -> int:
        return self._values.shape[0]

    @property
    def labels(self) -> tuple:
        return tuple(e.label for e in self.envelopes)

    @property
    def values(self) -> np.ndarray:
        """All envelopes stacked as a read-only (L, N) array."""
        return self._values

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self._values, axis=1)

    @property
    def normalized(self) -> bool:
        target = (self.n * self.l_count) ** -0.5
        return bool(np.all(np.abs(self.norms() - target) <= 1e-12 * target))

    def __len__(self):
        return self.l_count

    def __iter__(self):
        return iter(self.envelopes)

    def __repr__(self):
        flag = ", normalized" if self.normalized else ""
        return f"EnvelopeSet(L={self.l_count}, n={self.n}{flag})"


def _time_axis(n: int, sample_rate: float) -> np.ndarray:
    # Sampled on [0, (n-1)/fs]; any circular wrap is the frame's business.
    return np.arange(n) / sample_rate


def gaussian_set(n: int, sample_rate: float, sigmas) -> EnvelopeSet:
    """Gaussian envelopes e_l[i] = exp(-t_i^2 / (2 sigma_l^2)), unnormalized."""
    if int(n) < 1:
        raise ValueError("n must be >= 1")
    t = _time_axis(int(n), validation.check_positive(sample_rate, "sample_rate"))
    out = []
    for sigma in sigmas:
        sigma = validation.check_positive(sigma, "sigma")
        values = np.exp(-(t**2) / (2.0 * sigma**2)).astype(np.complex128)
        out.append(Envelope(values, label=f"sigma={sigma * 1e3:.6g}ms"))
    return EnvelopeSet(out, sample_rate)


def exponential_set(n: int, sample_rate: float, taus) -> EnvelopeSet:
    """Exponential envelopes e_l[i] = exp(-t_i / tau_l), unnormalized."""
    if int(n) < 1:
        raise ValueError("n must be >= 1")
    t = _time_axis(int(n), validation.check_positive(sample_rate, "sample_rate"))
    out = []
    for tau in taus:
        tau = validation.check_positive(tau, "tau")
        values = np.exp(-t / tau).astype(np.complex128)
        out.append(Envelope(values, label=f"tau={tau * 1e3:.6g}ms"))
    return EnvelopeSet(out, sample_rate)


def parseval_normalize(env_set: EnvelopeSet) -> EnvelopeSet:
    """Rescale every envelope to norm (N*L)**-0.5.

    With that normalization the frame built from the set has tight constant
    alpha = N * sum_l ||e_l||^2 = 1, i.e. it is Parseval. Each envelope is
    multiplied by a positive real, so directions are preserved. Idempotent.
    """
    target = (env_set.n * env_set.l_count) ** -0.5
    out = []
    for env in env_set:
        out.append(Envelope(env.values * (target / env.norm()), env.label))
    return EnvelopeSet(out, env_set.sample_rate)


_COMPLEX_FORMAT = "%.17g%+.17gj"


def save_envelopes(path, env_set: EnvelopeSet) -> None:
    """Write the set as CSV: L rows by N columns, entries 're' or 're+imj'."""
    with open(path, "w", newline="") as fh:
        for env in env_set:
            cells = []
            for v in env.values:
                if v.imag == 0:
                    cells.append(f"{v.real:.17g}")
                else:
                    cells.append(_COMPLEX_FORMAT % (v.real, v.imag))
            fh.write(",".join(cells) + "\n")


def load_custom(path, n: int, sample_rate: float = 1.0) -> EnvelopeSet:
    """Load an EnvelopeSet from CSV (L rows of n complex entries).

    Entries parse as python complex literals without parentheses ("1.5",
    "1.5+0.25j"). Rows must all have length n; zero rows are rejected
    because the frame construction requires nonzero envelopes.
    """
    rows = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != n:
                raise ValueError(f"{path}:{line_no}: expected {n} entries, got {len(cells)}")
            try:
                values = np.array([complex(c.strip()) for c in cells], dtype=np.complex128)
            except ValueError:
                raise ValueError(f"{path}:{line_no}: unparseable complex entry") from None
            rows.append(Envelope(values, label=f"row{len(rows)}"))
    if not rows:
        raise ValueError(f"{path}: no envelope rows found")
    return EnvelopeSet(rows, sample_rate)
