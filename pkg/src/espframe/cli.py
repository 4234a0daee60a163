"""Command-line entry point.

Every command takes its experiment description from a YAML config (see
README for the schema) and reports what it wrote, one path per line. Exit
codes: 0 on success, 2 for configuration or input problems, 3 when the
numerics fail (solver divergence, singular linear algebra).
"""

from __future__ import annotations

import argparse
import pathlib
import sys

import numpy as np

from . import tensorio
from .experiments import (
    ConfigError,
    build_frame,
    build_signal,
    load_config,
    load_signal_file,
    run_denoise,
    run_estimate,
    run_sweep,
    _section,
    _solve,
    _solve_config,
    _solver_section,
)
from .frame import EspFrame
from .prony import PronyConfig, prony_estimate
from .signals import write_signal_csv, write_signal_wav
from .solver import SolverDivergence
from .stft import StftFrame

__all__ = ["main"]


def _load_input_signal(args, cfg):
    configured_rate = _section(cfg, "signal").get("sample_rate")
    return load_signal_file(args.signal, configured_rate)


def _write_coeffs(path, frame_op, coeffs) -> None:
    if isinstance(frame_op, StftFrame):
        tensorio.write_stft_coeffs(path, coeffs)
    else:
        tensorio.write_esp_coeffs(path, coeffs)


def _cmd_gen(args) -> int:
    cfg = load_config(args.config)
    signal = build_signal(cfg)
    out = pathlib.Path(args.out)
    if out.suffix.lower() == ".wav":
        write_signal_wav(out, signal)
    else:
        write_signal_csv(out, signal)
    print(out)
    return 0


def _cmd_frame_info(args) -> int:
    cfg = load_config(args.config)
    signal = build_signal(cfg)
    frame_op = build_frame(cfg, signal.n, signal.sample_rate)
    if isinstance(frame_op, EspFrame):
        shape = frame_op.coeff_shape
        print("type: esp")
        print(f"samples: {frame_op.n}")
        print(f"envelopes: {frame_op.l_count}")
        print(f"atoms: {frame_op.l_count * frame_op.n * frame_op.n}")
        print(f"alpha: {frame_op.alpha:.10g}")
        print(f"parseval: {'yes' if frame_op.is_parseval else 'no'}")
        for i, env in enumerate(frame_op.envelope_set.envelopes):
            print(f"envelope[{i}]: {env.label}")
    else:
        shape = frame_op.coeff_shape
        print("type: stft")
        print(f"samples: {frame_op.n}")
        print(f"window_length: {frame_op.window_length}")
        print(f"hop: {frame_op.hop}")
        print(f"frames: {frame_op.frame_count}")
        print(f"alpha: {frame_op.alpha:.10g}")
    nbytes = int(np.prod(shape)) * np.dtype(frame_op.coeff_dtype).itemsize
    print(
        f"coefficients: {' x '.join(str(s) for s in shape)} "
        f"{np.dtype(frame_op.coeff_dtype).name} ({nbytes / 2**20:.1f} MiB)"
    )
    return 0


def _cmd_analyze(args) -> int:
    cfg = load_config(args.config)
    signal = _load_input_signal(args, cfg)
    frame_op = build_frame(cfg, signal.n, signal.sample_rate)
    coeffs = frame_op.analysis(signal.samples)
    _write_coeffs(args.out, frame_op, coeffs)
    print(args.out)
    return 0


def _cmd_solve(args) -> int:
    cfg = load_config(args.config)
    signal = _load_input_signal(args, cfg)
    frame_op = build_frame(cfg, signal.n, signal.sample_rate)
    sol = _solver_section(cfg)
    if args.history:
        sol["record_history"] = True
    config, lam_label = _solve_config(sol, frame_op, signal.samples)
    result = _solve(frame_op, signal.samples, config)
    _write_coeffs(args.out, frame_op, result.coefficients)
    print(args.out)
    if args.history:
        tensorio.write_history_csv(args.history, result)
        print(args.history)
    print(f"iterations: {result.iterations_run}", file=sys.stderr)
    print(f"lambda: {lam_label}", file=sys.stderr)
    return 0


def _cmd_denoise(args) -> int:
    cfg = load_config(args.config)
    for path in run_denoise(cfg, args.seed, args.out):
        print(path)
    return 0


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    print(run_sweep(cfg, args.seed, args.out))
    return 0


def _cmd_estimate(args) -> int:
    cfg = load_config(args.config)
    print(run_estimate(cfg, args.seed, args.out))
    return 0


def _cmd_prony(args) -> int:
    signal = load_signal_file(args.signal, args.sample_rate)
    config = PronyConfig(
        num_poles=args.poles,
        svd_keep=args.svd_keep,
        shift_samples=args.shift,
    )
    estimates = prony_estimate(signal, config)
    with open(args.out, "w", newline="") as fh:
        fh.write("frequency_hz,tau_s,amplitude_re,amplitude_im,stable_flag\n")
        for est in estimates:
            tau = "inf" if np.isinf(est.time_constant) else f"{est.time_constant:.17g}"
            fh.write(
                f"{est.frequency:.17g},{tau},"
                f"{est.amplitude.real:.17g},{est.amplitude.imag:.17g},"
                f"{int(est.stable)}\n"
            )
    print(args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="espframe",
        description="Sparse time-frequency analysis with enveloped-sinusoid frames.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("--config", required=True, help="YAML experiment config")
        return p

    p = with_config(sub.add_parser("gen", help="synthesize the configured clean signal"))
    p.add_argument("--out", required=True, help="output signal path (.csv or .wav)")
    p.set_defaults(func=_cmd_gen)

    p = with_config(sub.add_parser("frame-info", help="print frame dimensions and scaling"))
    p.set_defaults(func=_cmd_frame_info)

    p = with_config(sub.add_parser("analyze", help="forward transform of a signal file"))
    p.add_argument("--signal", required=True, help="input signal (.csv or .wav)")
    p.add_argument("--out", required=True, help="output coefficient tensor (binary)")
    p.set_defaults(func=_cmd_analyze)

    p = with_config(sub.add_parser("solve", help="sparse coefficient inference for a signal file"))
    p.add_argument("--signal", required=True, help="input signal (.csv or .wav)")
    p.add_argument("--out", required=True, help="output coefficient tensor (binary)")
    p.add_argument("--history", help="also write per-iteration residual/objective CSV")
    p.set_defaults(func=_cmd_solve)

    for name, fn, help_text in (
        ("denoise", _cmd_denoise, "noise/solve/reconstruct grid with quality report"),
        ("sweep", _cmd_sweep, "penalty sweep across frames and noise levels"),
        ("estimate", _cmd_estimate, "resonance parameter estimation grid"),
    ):
        p = with_config(sub.add_parser(name, help=help_text))
        p.add_argument("--seed", required=True, type=int, help="base seed for noise draws")
        p.add_argument("--out", required=True, help="output directory")
        p.set_defaults(func=fn)

    p = sub.add_parser("prony", help="pole estimation from a signal file")
    p.add_argument("--signal", required=True, help="input signal (.csv or .wav)")
    p.add_argument("--sample-rate", type=float, help="sample rate in Hz (required for CSV input)")
    p.add_argument("--poles", required=True, type=int, help="model order")
    p.add_argument("--svd-keep", type=int, help="singular values kept in the prediction solve")
    p.add_argument("--shift", type=int, default=0, help="samples dropped from the start")
    p.add_argument("--out", required=True, help="output pole table CSV")
    p.set_defaults(func=_cmd_prony)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SolverDivergence as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
