"""Config-driven experiment pipelines behind the command line.

A single YAML document describes the signal, the frame, the solver, the
noise grid, and the outputs; the run functions here turn one document into
deterministic CSV/PNG artifacts. Independent (snr, seed) cells can run in a
process pool; every worker returns plain data and a single collector does
all file writing, with rows sorted before the write so scheduling order
never shows up in the output.
"""

from __future__ import annotations

import concurrent.futures
import json
import os
import pathlib
import types

import numpy as np
import yaml

from . import solver as solver_mod
from .envelopes import exponential_set, gaussian_set, load_custom, parseval_normalize
from .estimation import resonance_estimate
from .frame import EspFrame, mip
from .prony import PronyConfig, prony_estimate, select_pole
from .signals import (
    Signal,
    add_white_noise,
    quality_report,
    read_signal_csv,
    read_signal_wav,
    write_signal_csv,
    write_signal_wav,
)
from .stft import StftFrame
from .synth import ResonanceSpec, resonant_impulse_response
from . import tensorio

__all__ = [
    "ConfigError",
    "load_config",
    "build_signal",
    "build_frame",
    "load_signal_file",
    "run_denoise",
    "run_sweep",
    "run_estimate",
]

_TOP_KEYS = {"signal", "frame", "solver", "noise", "sweep", "estimate", "output", "workers"}
_DEFAULT_REALIZATIONS = 20


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config does not parse as YAML: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a mapping")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    return doc


def _section(cfg, name, required=False) -> dict:
    value = cfg.get(name)
    if value is None:
        if required:
            raise ConfigError(f"missing required config section '{name}'")
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"config section '{name}' must be a mapping")
    return value


def _positive(value, what) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a number, got {value!r}") from None
    if not np.isfinite(value) or value <= 0:
        raise ConfigError(f"{what} must be positive and finite, got {value}")
    return value


def _int_at_least(value, minimum, what) -> int:
    try:
        out = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be an integer, got {value!r}") from None
    if out < minimum:
        raise ConfigError(f"{what} must be >= {minimum}, got {out}")
    return out


# ---------------------------------------------------------------------------
# builders


def build_signal(cfg) -> Signal:
    """The clean reference signal described by the config."""
    sig = _section(cfg, "signal", required=True)
    source = sig.get("source", "synthetic")
    if source == "file":
        path = sig.get("path")
        if not path:
            raise ConfigError("signal.source=file requires signal.path")
        return load_signal_file(path, sig.get("sample_rate"))
    if source != "synthetic":
        raise ConfigError(f"signal.source must be 'synthetic' or 'file', got {source!r}")

    n = _int_at_least(sig.get("n"), 1, "signal.n")
    sample_rate = _positive(sig.get("sample_rate"), "signal.sample_rate")
    impulse_index = _int_at_least(sig.get("impulse_index", 0), 0, "signal.impulse_index")
    residues = sig.get("residues", "transfer")
    entries = sig.get("resonances")
    if not isinstance(entries, list) or not entries:
        raise ConfigError("signal.resonances must be a nonempty list")
    specs = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise ConfigError(f"signal.resonances[{i}] must be a mapping")
        amplitude = entry.get("amplitude", 1.0)
        if isinstance(amplitude, (list, tuple)):
            if len(amplitude) != 2:
                raise ConfigError(f"signal.resonances[{i}].amplitude must be [re, im]")
            amplitude = complex(float(amplitude[0]), float(amplitude[1]))
        try:
            specs.append(
                ResonanceSpec(
                    frequency=float(entry["frequency"]),
                    time_constant=float(entry["time_constant"]),
                    start_time=float(entry.get("start_time", 0.0)),
                    amplitude=complex(amplitude),
                )
            )
        except KeyError as exc:
            raise ConfigError(f"signal.resonances[{i}] missing {exc}") from None
        except ValueError as exc:
            raise ConfigError(f"signal.resonances[{i}]: {exc}") from None
    try:
        return resonant_impulse_response(specs, n, sample_rate, impulse_index, residues)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_signal_file(path, sample_rate=None) -> Signal:
    """Load a signal from CSV or WAV by extension."""
    suffix = pathlib.Path(path).suffix.lower()
    try:
        if suffix == ".wav":
            loaded = read_signal_wav(path)
            if sample_rate is not None and float(sample_rate) != loaded.sample_rate:
                raise ConfigError(
                    f"configured sample_rate {sample_rate} disagrees with "
                    f"{path} ({loaded.sample_rate})"
                )
            return loaded
        if sample_rate is None:
            raise ConfigError(f"CSV signal {path} needs signal.sample_rate")
        return read_signal_csv(path, _positive(sample_rate, "signal.sample_rate"))
    except FileNotFoundError:
        raise ConfigError(f"signal file not found: {path}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


_DTYPES = {"complex64": np.complex64, "complex128": np.complex128}


def build_frame(cfg, n: int, sample_rate: float, kind: str | None = None):
    """Build the frame operator from the config's frame section.

    ``kind`` overrides frame.type, which is how the sweep builds its STFT
    comparator from a config whose frame section describes the ESP frame.
    """
    fr = _section(cfg, "frame", required=True)
    kind = kind or fr.get("type", "esp")
    dtype_name = fr.get("dtype", "complex128")
    if dtype_name not in _DTYPES:
        raise ConfigError(f"frame.dtype must be one of {sorted(_DTYPES)}")
    dtype = _DTYPES[dtype_name]

    if kind == "stft":
        window_length = _int_at_least(fr.get("window_length", 128), 2, "frame.window_length")
        if window_length % 2:
            raise ConfigError("frame.window_length must be even")
        stft_frame = StftFrame(n, sample_rate, window_length, dtype=dtype)
        stft_frame.fit()
        return stft_frame
    if kind != "esp":
        raise ConfigError(f"frame.type must be 'esp' or 'stft', got {kind!r}")

    family = fr.get("envelope", "exponential")
    try:
        if family == "exponential":
            taus = fr.get("taus")
            if not isinstance(taus, list) or not taus:
                raise ConfigError("frame.envelope=exponential requires frame.taus")
            env = exponential_set(n, sample_rate, [_positive(t, "frame.taus[]") for t in taus])
        elif family == "gaussian":
            sigmas = fr.get("sigmas")
            if not isinstance(sigmas, list) or not sigmas:
                raise ConfigError("frame.envelope=gaussian requires frame.sigmas")
            env = gaussian_set(n, sample_rate, [_positive(s, "frame.sigmas[]") for s in sigmas])
        elif family == "custom":
            path = fr.get("path")
            if not path:
                raise ConfigError("frame.envelope=custom requires frame.path")
            env = load_custom(path, n, sample_rate)
        else:
            raise ConfigError(f"frame.envelope must be exponential/gaussian/custom, got {family!r}")
    except FileNotFoundError:
        raise ConfigError(f"envelope file not found: {fr.get('path')}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    if fr.get("normalize", True):
        env = parseval_normalize(env)
    esp = EspFrame(env, dtype=dtype, cache_operators=fr.get("cache_operators"))
    esp.fit()
    return esp


def decay_grid(cfg) -> list:
    """The tau (or sigma) grid backing time-constant interpolation."""
    fr = _section(cfg, "frame", required=True)
    est = _section(cfg, "estimate")
    if est.get("decay_values"):
        return [_positive(v, "estimate.decay_values[]") for v in est["decay_values"]]
    for key in ("taus", "sigmas"):
        if fr.get(key):
            return [_positive(v, f"frame.{key}[]") for v in fr[key]]
    raise ConfigError("no decay grid: set frame.taus/sigmas or estimate.decay_values")


def _solver_section(cfg) -> dict:
    sol = _section(cfg, "solver")
    mode = str(sol.get("mode", "bpd")).lower()
    if mode not in ("bp", "bpd"):
        raise ConfigError(f"solver.mode must be 'bp' or 'bpd', got {mode!r}")
    out = {
        "mode": mode,
        "iterations": _int_at_least(sol.get("iterations", 1000), 1, "solver.iterations"),
        "mu": sol.get("mu", "auto"),
        "record_history": bool(sol.get("record_history", False)),
        "lambda_fraction": sol.get("lambda_fraction"),
        "lambda_abs": sol.get("lambda_abs"),
        "convergence_tol": sol.get("convergence_tol"),
        "reweight": None,
        "weights": None,
    }
    if out["mu"] != "auto":
        out["mu"] = _positive(out["mu"], "solver.mu")
    if out["convergence_tol"] is not None:
        out["convergence_tol"] = _positive(out["convergence_tol"], "solver.convergence_tol")
    if out["lambda_abs"] is not None:
        out["lambda_abs"] = _positive(out["lambda_abs"], "solver.lambda_abs")
    if out["lambda_fraction"] is not None:
        out["lambda_fraction"] = _positive(out["lambda_fraction"], "solver.lambda_fraction")
    rw = sol.get("reweight")
    if rw is not None:
        if not isinstance(rw, dict):
            raise ConfigError("solver.reweight must be a mapping")
        out["reweight"] = solver_mod.ReweightSpec(
            epsilon=_positive(rw.get("epsilon"), "solver.reweight.epsilon"),
            period=_int_at_least(rw.get("period", 1), 1, "solver.reweight.period"),
        )
    weights = sol.get("time_shift_weights")
    if weights is not None:
        if not isinstance(weights, dict):
            raise ConfigError("solver.time_shift_weights must be a mapping")
        out["weights"] = {
            "cutoff_m": _int_at_least(weights.get("cutoff_m"), 0, "cutoff_m"),
            "low": _positive(weights.get("low"), "time_shift_weights.low"),
            "high": _positive(weights.get("high"), "time_shift_weights.high"),
        }
    return out


def _solve_config(sol: dict, frame_op, w, lam_fraction=None, weighted=False):
    """SolveConfig for one cell; returns (config, lambda label for reports)."""
    if weighted:
        if not sol["weights"]:
            raise ConfigError("weighted solve requires solver.time_shift_weights")
        field = solver_mod.time_shift_weights(
            frame_op.coeff_shape, sol["weights"]["cutoff_m"],
            sol["weights"]["low"], sol["weights"]["high"],
        )
        lam = solver_mod.lambda_max(frame_op, w) * field
        label = "weighted"
    elif lam_fraction is not None:
        lam = lam_fraction * solver_mod.lambda_max(frame_op, w)
        label = f"{lam_fraction:.10g}"
    elif sol["lambda_abs"] is not None:
        lam = sol["lambda_abs"]
        label = "abs"
    else:
        fraction = sol["lambda_fraction"] if sol["lambda_fraction"] is not None else 0.1
        lam = fraction * solver_mod.lambda_max(frame_op, w)
        label = f"{fraction:.10g}"
    if np.ndim(lam) == 0 and lam <= 0:
        raise ConfigError("lambda came out non-positive (zero signal?)")
    config = solver_mod.SolveConfig(
        mode=sol["mode"],
        lam=lam,
        mu=sol["mu"],
        max_iterations=sol["iterations"],
        reweight=sol["reweight"],
        convergence_tol=sol["convergence_tol"],
        record_history=sol["record_history"],
    )
    return config, label


def _solve(frame_op, w, config):
    if config.mode == "bp":
        return solver_mod.solve_bp(frame_op, w, config)
    return solver_mod.solve_bpd(frame_op, w, config)


def noise_cells(cfg, seed_base: int) -> list:
    """(snr_db, seed) grid; [(None, None)] when no noise is configured."""
    noise = _section(cfg, "noise")
    snrs = noise.get("snr_db", [])
    if snrs is None:
        snrs = []
    if not isinstance(snrs, list):
        snrs = [snrs]
    snrs = [float(s) for s in snrs]
    if not snrs:
        return [(None, None)]
    seeds = noise.get("seeds")
    if seeds is not None:
        if not isinstance(seeds, list) or not seeds:
            raise ConfigError("noise.seeds must be a nonempty list")
        seeds = [_int_at_least(s, 0, "noise.seeds[]") for s in seeds]
    else:
        count = _int_at_least(
            noise.get("realizations", _DEFAULT_REALIZATIONS), 1, "noise.realizations"
        )
        seeds = [int(seed_base) + i for i in range(count)]
    return [(snr, seed) for snr in snrs for seed in seeds]


# ---------------------------------------------------------------------------
# worker-side context: rebuilt once per process, keyed by the config content


_WORKER_CONTEXT: dict = {}


def _context(cfg) -> dict:
    key = json.dumps(cfg, sort_keys=True, default=str)
    ctx = _WORKER_CONTEXT.get(key)
    if ctx is None:
        _WORKER_CONTEXT.clear()  # one config per run; drop stale frames
        ctx = {"cfg": cfg, "signal": build_signal(cfg), "frames": {}}
        _WORKER_CONTEXT[key] = ctx
    return ctx


def _context_frame(ctx, kind: str):
    frame_op = ctx["frames"].get(kind)
    if frame_op is None:
        signal = ctx["signal"]
        frame_op = build_frame(ctx["cfg"], signal.n, signal.sample_rate, kind=kind)
        ctx["frames"][kind] = frame_op
    return frame_op


def _noisy(signal: Signal, snr, seed) -> Signal:
    if snr is None:
        return signal
    return add_white_noise(signal, snr, seed)


def _frame_kind(frame_op) -> str:
    return "stft" if isinstance(frame_op, StftFrame) else "esp"


def _run_pool(worker, payloads, cfg):
    workers = cfg.get("workers")
    if workers is None:
        workers = os.cpu_count() or 1
    workers = max(1, min(int(workers), len(payloads)))
    if workers == 1:
        return [worker(p) for p in payloads]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, payloads))


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _fmt_db(value) -> str:
    if value is None:
        return ""
    if np.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.4f}"


def _fmt(value, spec="%.10g") -> str:
    return "" if value is None else spec % value


def _cell_tag(snr, seed) -> str:
    if snr is None:
        return "clean"
    return f"snr{snr:.4f}_seed{seed}"


# ---------------------------------------------------------------------------
# denoise


def _denoise_cell(payload):
    cfg, snr, seed = payload["cfg"], payload["snr"], payload["seed"]
    ctx = _context(cfg)
    clean = ctx["signal"]
    frame_op = _context_frame(ctx, _section(cfg, "frame", required=True).get("type", "esp"))
    noisy = _noisy(clean, snr, seed)
    sol = _solver_section(cfg)
    config, lam_label = _solve_config(sol, frame_op, noisy.samples)
    result = _solve(frame_op, noisy.samples, config)
    recon = frame_op.synthesis(result.coefficients)
    report = quality_report(recon, clean.samples, result.coefficients)
    out = {
        "snr": snr,
        "seed": seed,
        "lam_label": lam_label,
        "frame": _frame_kind(frame_op),
        "report": report,
        "recon": np.asarray(recon, dtype=np.complex128),
        "mips": None,
        "history": (result.residual_history, result.objective_history)
        if config.record_history
        else None,
    }
    output = _section(cfg, "output")
    if output.get("mip", True):
        floor_db = -abs(float(output.get("floor_db", -120.0)))
        tensor = result.coefficients
        if tensor.ndim == 2:  # stft matrix as a single-envelope stack
            tensor = tensor[np.newaxis]
        out["mips"] = {
            axis: mip(tensor, collapse_axis=axis, floor_db=floor_db)
            for axis in ("frequency", "time-shift")
        }
    return out


def run_denoise(cfg, seed_base: int, out_dir) -> list:
    """Noise/solve/reconstruct over the (snr, seed) grid; returns file paths."""
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    clean = build_signal(cfg)  # validates early, before any cell spins up
    _solver_section(cfg)
    cells = noise_cells(cfg, seed_base)
    payloads = [{"cfg": cfg, "snr": snr, "seed": seed} for snr, seed in cells]
    results = _run_pool(_denoise_cell, payloads, cfg)

    output = _section(cfg, "output")
    want_wav = bool(output.get("wav", False))
    written = []
    rows = []
    order = {(r["snr"], r["seed"]): r for r in results}
    for snr, seed in sorted(cells, key=lambda c: (c[0] is not None, c[0], c[1])):
        r = order[(snr, seed)]
        tag = _cell_tag(snr, seed)
        recon = Signal(r["recon"], clean.sample_rate)
        recon_path = out_dir / f"recon_{tag}.csv"
        write_signal_csv(recon_path, recon)
        written.append(recon_path)
        if want_wav and clean.is_real:
            # solver output keeps a ~1e-16 imaginary residue on real input
            wav_path = out_dir / f"recon_{tag}.wav"
            write_signal_wav(wav_path, Signal(recon.samples.real.copy(), clean.sample_rate))
            written.append(wav_path)
        if r["mips"]:
            for axis, image in r["mips"].items():
                for ext, writer in (("csv", tensorio.write_mip_csv), ("png", tensorio.write_mip_png)):
                    path = out_dir / f"mip_{axis}_{tag}.{ext}"
                    writer(path, image)
                    written.append(path)
        if r["history"]:
            residual, objective = r["history"]
            hist_path = out_dir / f"history_{tag}.csv"
            tensorio.write_history_csv(
                hist_path,
                types.SimpleNamespace(residual_history=residual, objective_history=objective),
            )
            written.append(hist_path)
        report = r["report"]
        rows.append(
            (
                r["frame"],
                _fmt_db(snr),
                "" if seed is None else str(seed),
                r["lam_label"],
                _fmt(report.relative_error, "%.10e"),
                _fmt_db(report.reconstructed_snr_db),
                _fmt(report.sparsity_percent, "%.4f"),
                str(report.nonzero_count),
            )
        )
    quality_path = out_dir / "quality.csv"
    _write_csv(
        quality_path,
        [
            "frame",
            "snr_db",
            "seed",
            "lambda",
            "relative_error",
            "reconstructed_snr_db",
            "sparsity_percent",
            "nonzero_count",
        ],
        rows,
    )
    written.append(quality_path)
    return written


# ---------------------------------------------------------------------------
# sweep


def _sweep_cell(payload):
    cfg, kind, snr, seed = payload["cfg"], payload["kind"], payload["snr"], payload["seed"]
    fractions = payload["fractions"]
    ctx = _context(cfg)
    clean = ctx["signal"]
    frame_op = _context_frame(ctx, kind)
    noisy = _noisy(clean, snr, seed)
    sol = _solver_section(cfg)
    peak = solver_mod.lambda_max(frame_op, noisy.samples)
    out = []
    for fraction in fractions:
        config = solver_mod.SolveConfig(
            mode=sol["mode"],
            lam=fraction * peak,
            mu=sol["mu"],
            max_iterations=sol["iterations"],
            reweight=sol["reweight"],
            convergence_tol=sol["convergence_tol"],
            record_history=False,
        )
        result = _solve(frame_op, noisy.samples, config)
        recon = frame_op.synthesis(result.coefficients)
        report = quality_report(recon, clean.samples, result.coefficients)
        out.append(
            (kind, snr, seed, fraction, 100.0 - report.sparsity_percent, report.reconstructed_snr_db)
        )
    return out


def run_sweep(cfg, seed_base: int, out_dir) -> pathlib.Path:
    """Penalty sweep over frames/SNRs/seeds; one CSV with summary rows."""
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    build_signal(cfg)
    _solver_section(cfg)
    sweep = _section(cfg, "sweep", required=True)
    fractions = sweep.get("lambda_fractions")
    if not isinstance(fractions, list) or not fractions:
        raise ConfigError("sweep.lambda_fractions must be a nonempty list")
    fractions = [_positive(f, "sweep.lambda_fractions[]") for f in fractions]
    kinds = sweep.get("frames", ["esp", "stft"])
    if not isinstance(kinds, list) or not kinds:
        raise ConfigError("sweep.frames must be a nonempty list")
    for kind in kinds:
        if kind not in ("esp", "stft"):
            raise ConfigError(f"sweep.frames entries must be esp/stft, got {kind!r}")

    cells = [(kind, snr, seed) for kind in kinds for snr, seed in noise_cells(cfg, seed_base)]
    payloads = [
        {"cfg": cfg, "kind": kind, "snr": snr, "seed": seed, "fractions": fractions}
        for kind, snr, seed in cells
    ]
    results = _run_pool(_sweep_cell, payloads, cfg)

    data = [row for cell in results for row in cell]
    data.sort(
        key=lambda r: (r[0], r[1] if r[1] is not None else -np.inf, r[2] if r[2] is not None else -1, r[3])
    )

    # Summary: per (frame, snr), the fraction with the best mean
    # reconstructed SNR over seeds.
    groups: dict = {}
    for kind, snr, seed, fraction, nz_pct, snr_out in data:
        groups.setdefault((kind, snr), {}).setdefault(fraction, []).append((nz_pct, snr_out))
    summaries = []
    for (kind, snr), per_fraction in sorted(
        groups.items(), key=lambda kv: (kv[0][0], kv[0][1] if kv[0][1] is not None else -np.inf)
    ):
        best = None
        for fraction in sorted(per_fraction):
            pairs = per_fraction[fraction]
            mean_nz = float(np.mean([p[0] for p in pairs]))
            mean_snr = float(np.mean([p[1] for p in pairs]))
            if best is None or mean_snr > best[1]:
                best = (fraction, mean_snr, mean_nz)
        summaries.append((kind, snr, "all", best[0], best[2], best[1]))

    def fmt_row(kind, snr, seed, fraction, nz_pct, snr_out):
        return (
            kind,
            _fmt_db(snr),
            str(seed) if seed is not None else "",
            _fmt(fraction, "%.10g"),
            _fmt(nz_pct, "%.6f"),
            _fmt_db(snr_out),
        )

    rows = [fmt_row(*row) for row in data]
    rows += [fmt_row(*row) for row in summaries]
    path = out_dir / "sweep.csv"
    _write_csv(
        path,
        ["frame", "snr_db", "seed", "lambda_fraction", "nonzero_pct", "reconstructed_snr_db"],
        rows,
    )
    return path


# ---------------------------------------------------------------------------
# estimate


_METHODS = ("esp-unreg", "esp-bpd", "esp-weighted-bpd", "prony")


def _prony_section(cfg) -> PronyConfig:
    est = _section(cfg, "estimate", required=True)
    pr = est.get("prony")
    if not isinstance(pr, dict):
        raise ConfigError("estimate.prony must be a mapping when the prony method is used")
    return PronyConfig(
        num_poles=_int_at_least(pr.get("num_poles"), 1, "estimate.prony.num_poles"),
        svd_keep=None if pr.get("svd_keep") is None else _int_at_least(pr["svd_keep"], 1, "svd_keep"),
        shift_samples=_int_at_least(pr.get("shift_samples", 0), 0, "shift_samples"),
    )


def _estimate_cell(payload):
    cfg, snr, seed = payload["cfg"], payload["snr"], payload["seed"]
    methods, bands = payload["methods"], payload["bands"]
    ctx = _context(cfg)
    clean = ctx["signal"]
    noisy = _noisy(clean, snr, seed)
    taus = decay_grid(cfg) if any(m.startswith("esp") for m in methods) else None
    sol = _solver_section(cfg)
    rows = []
    for method in methods:
        if method == "prony":
            estimates = prony_estimate(noisy, _prony_section(cfg))
            for band in bands:
                pole = select_pole(estimates, band)
                peak_db = 20.0 * np.log10(abs(pole.amplitude)) if pole.amplitude else None
                rows.append(
                    (method, band[0], band[1], snr, seed, pole.frequency, pole.time_constant, None, peak_db)
                )
            continue
        frame_op = _context_frame(ctx, "esp")
        if method == "esp-unreg":
            tensor = frame_op.analysis(noisy.samples)
            source = "unregularized"
        else:
            weighted = method == "esp-weighted-bpd"
            config, _ = _solve_config(sol, frame_op, noisy.samples, weighted=weighted)
            tensor = _solve(frame_op, noisy.samples, config).coefficients
            source = "weighted-bpd" if weighted else sol["mode"]
        reference = float(np.max(np.abs(tensor)))
        for band in bands:
            est = resonance_estimate(frame_op, tensor, band, taus, source)
            peak_db = 20.0 * np.log10(est.peak_magnitude / reference)
            rows.append(
                (
                    method,
                    band[0],
                    band[1],
                    snr,
                    seed,
                    est.frequency,
                    est.time_constant,
                    est.shift_index,
                    peak_db,
                )
            )
    return rows


def run_estimate(cfg, seed_base: int, out_dir) -> pathlib.Path:
    """Parameter estimation over methods/bands/noise cells, with summaries."""
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    build_signal(cfg)
    est = _section(cfg, "estimate", required=True)
    methods = est.get("methods", ["esp-unreg"])
    if not isinstance(methods, list) or not methods:
        raise ConfigError("estimate.methods must be a nonempty list")
    for method in methods:
        if method not in _METHODS:
            raise ConfigError(f"unknown estimate method {method!r} (choose from {_METHODS})")
    bands = est.get("bands")
    if not isinstance(bands, list) or not bands:
        raise ConfigError("estimate.bands must be a nonempty list of [lo, hi] pairs")
    parsed_bands = []
    for band in bands:
        if not isinstance(band, (list, tuple)) or len(band) != 2:
            raise ConfigError("each estimate.bands entry must be [lo_hz, hi_hz]")
        lo, hi = float(band[0]), float(band[1])
        if lo > hi:
            raise ConfigError(f"band [{lo}, {hi}] must satisfy lo <= hi")
        parsed_bands.append((lo, hi))
    if "prony" in methods:
        _prony_section(cfg)
    if any(m.startswith("esp") for m in methods):
        decay_grid(cfg)

    cells = noise_cells(cfg, seed_base)
    payloads = [
        {"cfg": cfg, "snr": snr, "seed": seed, "methods": methods, "bands": parsed_bands}
        for snr, seed in cells
    ]
    results = _run_pool(_estimate_cell, payloads, cfg)
    samples = [row for cell in results for row in cell]
    samples.sort(
        key=lambda r: (
            r[0],
            r[1],
            r[3] if r[3] is not None else -np.inf,
            r[4] if r[4] is not None else -1,
        )
    )

    groups: dict = {}
    for row in samples:
        groups.setdefault((row[0], row[1], row[2], row[3]), []).append(row)
    summary_rows = []
    for (method, lo, hi, snr), rows in sorted(
        groups.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][3] if kv[0][3] is not None else -np.inf)
    ):
        freqs = np.array([r[5] for r in rows], dtype=float)
        taus = np.array([r[6] for r in rows], dtype=float)
        for stat, freq, tau in (
            ("mean", freqs.mean(), taus.mean()),
            ("std", freqs.std(), taus.std()),
        ):
            summary_rows.append((stat, method, lo, hi, snr, None, freq, tau, None, None))

    def fmt_row(row_type, method, lo, hi, snr, seed, freq, tau, shift_m, peak_db):
        return (
            row_type,
            method,
            _fmt(lo, "%.6f"),
            _fmt(hi, "%.6f"),
            _fmt_db(snr),
            "" if seed is None else str(seed),
            _fmt(freq, "%.6f"),
            _fmt(tau, "%.9e"),
            "" if shift_m is None else str(shift_m),
            _fmt_db(peak_db),
        )

    out_rows = [fmt_row("sample", *row) for row in samples]
    out_rows += [fmt_row(*row) for row in summary_rows]
    path = out_dir / "estimate.csv"
    _write_csv(
        path,
        [
            "row_type",
            "method",
            "band_lo_hz",
            "band_hi_hz",
            "snr_db",
            "seed",
            "freq_hz",
            "tau_s",
            "shift_m",
            "peak_db",
        ],
        out_rows,
    )
    return path
