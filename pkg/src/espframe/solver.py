"""Split augmented Lagrangian solvers for L1-regularized coefficient inference.

Two problems over a tight frame with analysis A, synthesis (1/alpha)A*, and
coefficient tensor u:

- basis pursuit (``solve_bp``): min ||D(lam) u||_1 s.t. (1/alpha) A* u = w
- basis pursuit denoising (``solve_bpd``):
  min ||D(lam) u||_1 + (1/2) ||(1/alpha) A* u - w||^2

Both run the same alternating scheme; they differ only in the step
coefficient applied to the analysis of the residual (1 for BP,
1/(1 + mu/alpha) for BPD). The penalty ``lam`` may be a scalar or a
coefficient-shaped field, which is how temporal priors enter
(``time_shift_weights``). Optional iterative reweighting sets
lam[i] = 1/(|u[i]| + eps) so that established coefficients feel less
pressure while small ones are driven to exact zero.

The solvers only require an operator object exposing ``n``, ``alpha``,
``coeff_shape``, ``coeff_dtype``, ``analysis`` and ``synthesis`` (EspFrame
and StftFrame both qualify), so the code path is frame-agnostic. There is
no randomness anywhere: identical inputs produce bit-identical results.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import validation

__all__ = [
    "ReweightSpec",
    "SolveConfig",
    "SolveResult",
    "SolverDivergence",
    "soft_threshold",
    "lambda_max",
    "mu_auto",
    "solve_bp",
    "solve_bpd",
    "time_shift_weights",
]


class SolverDivergence(RuntimeError):
    """Raised when iterates blow past the divergence guard."""


@dataclasses.dataclass(frozen=True)
class ReweightSpec:
    """Iterative reweighting: lam = 1/(|u| + epsilon), refreshed every
    ``period`` iterations. Pick epsilon smaller than the smallest expected
    nonzero coefficient magnitude."""

    epsilon: float
    period: int = 1

    def __post_init__(self):
        validation.check_positive(self.epsilon, "epsilon")
        if int(self.period) < 1:
            raise ValueError("period must be >= 1")
        object.__setattr__(self, "period", int(self.period))


@dataclasses.dataclass(frozen=True)
class SolveConfig:
    """Solver settings shared by BP and BPD.

    mode : "bp" or "bpd"
    lam : positive scalar, or a positive field broadcastable to the
        coefficient shape. When reweighting is enabled lam is superseded:
        the field starts at 1/(|A w| + epsilon) and refreshes from the
        current iterate, so the configured value plays no numerical role.
    mu : positive scalar, or "auto" for the percentile heuristic
        (see ``mu_auto``); when reweighting is enabled the heuristic is fed
        the initial reweighted field and mu stays fixed afterwards.
    max_iterations : fixed iteration budget.
    reweight : optional ReweightSpec.
    convergence_tol : optional early stop on relative change of u.
    record_history : keep per-iteration residual/objective. Costs one extra
        synthesis per iteration; heavy runs turn it off, in which case the
        histories come back empty.
    accelerate : experimental momentum with restart on the (x, d) pair.
        Off by default; results are exact SALSA iterates only when off.
    """

    mode: str = "bpd"
    lam: object = 1.0
    mu: object = "auto"
    max_iterations: int = 1000
    reweight: ReweightSpec | None = None
    convergence_tol: float | None = None
    record_history: bool = True
    accelerate: bool = False

    def __post_init__(self):
        mode = str(self.mode).lower()
        if mode not in ("bp", "bpd"):
            raise ValueError(f"mode must be 'bp' or 'bpd', got {self.mode!r}")
        object.__setattr__(self, "mode", mode)
        if np.ndim(self.lam) == 0 and not isinstance(self.lam, str):
            validation.check_positive(float(np.real(self.lam)), "lam")
        if isinstance(self.mu, str):
            if self.mu != "auto":
                raise ValueError("mu must be a positive scalar or 'auto'")
        else:
            validation.check_positive(self.mu, "mu")
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be >= 1")
        object.__setattr__(self, "max_iterations", int(self.max_iterations))
        if self.reweight is not None and not isinstance(self.reweight, ReweightSpec):
            raise TypeError("reweight must be a ReweightSpec or None")
        if self.convergence_tol is not None:
            validation.check_positive(self.convergence_tol, "convergence_tol")


@dataclasses.dataclass(frozen=True)
class SolveResult:
    """Final iterate and bookkeeping from one solve.

    coefficients: final u tensor.
    iterations_run: iterations actually executed (early stop counts).
    residual_history: per-iteration ||synthesis(u) - w|| (the BP feasibility
        gap and the BPD fidelity residual coincide under this contract).
    objective_history: per-iteration sum(lam * |u|), plus the 0.5*residual^2
        fidelity term for BPD. Histories are empty arrays when
        record_history was off, otherwise length iterations_run.
    """

    coefficients: np.ndarray
    iterations_run: int
    residual_history: np.ndarray
    objective_history: np.ndarray


def soft_threshold(x, t):
    """Complex soft thresholding: shrink |x| by t, preserving phase.

    Elementwise over arrays; t may be a scalar or broadcastable array of
    nonnegative thresholds. Magnitudes at or below t map to exactly 0.
    """
    x = np.asarray(x)
    t = np.asarray(t)
    if np.any(t < 0):
        raise ValueError("threshold must be >= 0")
    mag = np.abs(x)
    shrunk = np.maximum(mag - t, 0.0)
    scale = np.divide(shrunk, mag, out=np.zeros_like(shrunk), where=mag > 0)
    return x * scale


def lambda_max(frame_op, w) -> float:
    """Smallest penalty that forces the BPD optimum to zero: ||A w||_inf."""
    return float(np.max(np.abs(frame_op.analysis(w))))


def _percentile_99(mags: np.ndarray) -> float:
    # Nearest-rank convention: the ceil(0.99 n)-th smallest value.
    flat = mags.ravel()
    rank = math.ceil(0.99 * flat.size) - 1
    return float(np.partition(flat, rank)[rank])


def mu_auto(initial_coeffs, lam) -> float:
    """Percentile heuristic for the augmented-Lagrangian weight mu.

    With p the 99th percentile of the initial coefficient magnitudes,
    returns lam/p for scalar lam and mean(lam)/p for a weight field, so the
    first soft threshold lam/mu zeroes out 99% of the start tensor.
    """
    mags = np.abs(np.asarray(initial_coeffs))
    if not mags.any():
        raise ValueError("all-zero tensor: percentile heuristic undefined")
    p = _percentile_99(mags)
    if p == 0.0:
        raise ValueError("99th percentile of |coefficients| is zero")
    lam_mean = float(np.mean(lam)) if np.ndim(lam) else float(lam)
    return lam_mean / p


def time_shift_weights(frame_shape, cutoff_m: int, low: float, high: float) -> np.ndarray:
    """Penalty field favoring coefficients with time shift below cutoff_m.

    Returns an array of shape ``frame_shape`` holding ``low`` where
    m < cutoff_m and ``high`` elsewhere. Callers typically scale it by
    lambda_max(frame_op, w) to form the lam field for ``solve_bpd``.
    """
    shape = tuple(int(s) for s in frame_shape)
    if len(shape) < 1:
        raise ValueError("frame_shape must have at least one axis")
    n = shape[-1]
    if not 0 <= int(cutoff_m) <= n:
        raise ValueError(f"cutoff_m must lie in [0, {n}]")
    low = validation.check_positive(low, "low")
    high = validation.check_positive(high, "high")
    if low > high:
        raise ValueError("low must be <= high")
    field = np.full(shape, high, dtype=np.float64)
    field[..., : int(cutoff_m)] = low
    return field


def solve_bp(frame_op, w, config: SolveConfig) -> SolveResult:
    """Basis pursuit: exact-reconstruction L1 minimization."""
    if config.mode != "bp":
        raise ValueError(f"config.mode is {config.mode!r}, expected 'bp'")
    return _salsa(frame_op, w, config)


def solve_bpd(frame_op, w, config: SolveConfig) -> SolveResult:
    """Basis pursuit denoising: L1 plus quadratic fidelity."""
    if config.mode != "bpd":
        raise ValueError(f"config.mode is {config.mode!r}, expected 'bpd'")
    return _salsa(frame_op, w, config)


def _soft_inplace(u, thresh, mag, scale):
    # mag must already hold |u|. Entries with mag == 0 keep scale == 0
    # because max(0 - t, 0) = 0, so the where-guarded divide is safe.
    np.subtract(mag, thresh, out=scale)
    np.maximum(scale, 0.0, out=scale)
    np.divide(scale, mag, out=scale, where=mag > 0)
    u *= scale


def _salsa(frame_op, w, config: SolveConfig) -> SolveResult:
    shape = tuple(frame_op.coeff_shape)
    dt = np.dtype(frame_op.coeff_dtype)
    real_dt = np.float32 if dt == np.complex64 else np.float64
    w = validation.as_complex_vector(w, n=frame_op.n, dtype=dt)
    alpha = float(frame_op.alpha)

    analysis_into = getattr(frame_op, "_analysis_into", None)
    if analysis_into is None:
        def analysis_into(vec, out):
            out[:] = frame_op.analysis(vec)
            return out

    recon = getattr(frame_op, "_recon", frame_op.synthesis)

    x = frame_op.analysis(w)
    mag = np.abs(x).astype(real_dt, copy=False)
    start_peak = float(mag.max())
    guard = 1e12 * max(start_peak, np.finfo(real_dt).tiny)

    reweight = config.reweight
    # thresh always stores lam/mu (what the shrink step consumes). lam is
    # recoverable as mu * thresh wherever the objective needs it.
    if reweight is not None:
        lam_field = 1.0 / (mag + reweight.epsilon)
        lam_for_mu = lam_field
    else:
        lam_field = validation.as_weight_field(config.lam, shape)
        lam_for_mu = lam_field

    if config.mu == "auto":
        if start_peak == 0.0:
            mu = 1.0  # w = 0: every path below yields the zero solution
        else:
            mu = mu_auto(x, lam_for_mu)
    else:
        mu = float(config.mu)

    if np.ndim(lam_field) == 0:
        thresh = np.asarray(lam_field / mu, dtype=real_dt)
    else:
        thresh = (lam_field / mu).astype(real_dt, copy=False)
    del lam_field, lam_for_mu

    coef = 1.0 if config.mode == "bp" else 1.0 / (1.0 + mu / alpha)

    u = np.empty(shape, dtype=dt)
    v = np.empty(shape, dtype=dt)
    d = np.zeros(shape, dtype=dt)
    scratch = np.empty(shape, dtype=dt)
    scale = np.empty(shape, dtype=real_dt)
    u_prev = np.empty(shape, dtype=dt) if config.convergence_tol else None
    if config.accelerate:
        x_prev = x.copy()
        d_prev = d.copy()
        momentum = 1.0
        combined_prev = np.inf

    residuals: list[float] = []
    objectives: list[float] = []
    iterations_run = 0

    for iteration in range(1, config.max_iterations + 1):
        np.add(x, d, out=u)
        np.abs(u, out=mag)
        peak = float(mag.max())
        if not np.isfinite(peak) or peak > guard:
            raise SolverDivergence(
                f"iterate magnitude {peak:.3e} exceeded guard {guard:.3e} "
                f"at iteration {iteration}"
            )
        _soft_inplace(u, thresh, mag, scale)

        if reweight is not None and iteration % reweight.period == 0:
            # thresh := lam/mu with lam = 1/(|u| + eps); thresh is a full
            # field whenever reweighting is on, so copyto is safe.
            np.abs(u, out=mag)
            np.add(mag, reweight.epsilon, out=mag)
            mag *= mu
            np.reciprocal(mag, out=mag)
            np.copyto(thresh, mag)

        np.subtract(u, d, out=v)
        residual_vec = w - recon(v)
        analysis_into(residual_vec, scratch)
        if coef != 1.0:
            scratch *= dt.type(coef)
        np.add(v, scratch, out=x)
        np.subtract(x, v, out=d)

        if config.accelerate:
            gap = float(np.linalg.norm(d - d_prev) ** 2 + np.linalg.norm(x - x_prev) ** 2)
            if gap <= 0.999 * combined_prev:
                next_momentum = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * momentum**2))
                beta = (momentum - 1.0) / next_momentum
                x_hat = x + beta * (x - x_prev)
                d_hat = d + beta * (d - d_prev)
                momentum = next_momentum
                combined_prev = gap
                x_prev, d_prev = x.copy(), d.copy()
                x, d = x_hat, d_hat
            else:
                # restart: fall back to the plain iterate
                momentum = 1.0
                combined_prev = gap / 0.999
                x_prev, d_prev = x.copy(), d.copy()

        iterations_run = iteration

        if config.record_history:
            fit_gap = float(np.linalg.norm(recon(u) - w))
            residuals.append(fit_gap)
            np.abs(u, out=mag)
            weighted = float(np.sum(thresh * mag) * mu)
            if config.mode == "bpd":
                weighted += 0.5 * fit_gap**2
            objectives.append(weighted)

        if config.convergence_tol is not None:
            if iteration > 1:
                delta = float(np.linalg.norm(u - u_prev))
                norm_u = float(np.linalg.norm(u))
                if delta <= config.convergence_tol * max(norm_u, np.finfo(real_dt).tiny):
                    np.copyto(u_prev, u)
                    break
            np.copyto(u_prev, u)

    return SolveResult(
        coefficients=u,
        iterations_run=iterations_run,
        residual_history=np.asarray(residuals, dtype=np.float64),
        objective_history=np.asarray(objectives, dtype=np.float64),
    )
