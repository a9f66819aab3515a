"""Command-line entry point orchestrating the end-to-end pipeline.

Subcommands: simulate, cluster, chi, windows, persist, ksweep.
Exit codes: 0 success, 2 usage or invalid parameters, 3 degenerate data
(no exceedances, infeasible k, no full window), 4 I/O or parse failure.
File-output commands write nothing to stdout; messages go to stderr.
The EXCO_THREADS environment variable caps the window worker count
(0 = one per CPU); results are bytewise independent of it.
"""

import argparse
from dataclasses import asdict, dataclass
import json
import os
import sys

import exco
from exco.clustering import extract_extreme_directions, k_sweep
from exco.dataio import (
    ResultDocument,
    WindowResult,
    read_csv,
    render_heatmap_svg,
    write_csv,
    write_matrix_csv,
    write_result,
)
from exco.errors import (
    DegenerateDataError,
    ExcoError,
    InfeasibleError,
    ParseError,
    PlanError,
)
from exco.evt import SignalMatrix, absolute_amplitude, chi_matrix, empirical_pareto_transform
from exco.signal import (
    WindowPlan,
    band_by_name,
    bandpass,
    persistence_matrix,
    run_pipeline,
    windowed_communities,
)
from exco.simulate import MaModel, StableParams, make_fig3_triplet, sample_symmetric_stable, \
    simulate_ma, synthetic_block_dataset

BAND_CHOICES = ["none", "delta", "theta", "alpha", "beta", "gamma"]
PHASE_CHOICES = ["interictal", "pre-ictal", "ictal"]

# Per-band cluster-count defaults by seizure phase, applied when both
# --band and --phase are given and --k is not.
PHASE_BAND_K = {
    ("alpha", "interictal"): 6,
    ("alpha", "pre-ictal"): 7,
    ("alpha", "ictal"): 5,
    ("beta", "interictal"): 6,
    ("beta", "pre-ictal"): 8,
    ("beta", "ictal"): 6,
}
DEFAULT_K = 5


@dataclass(frozen=True)
class RunConfig:
    """Resolved parameters of an analysis run; echoed into result metadata."""

    input_path: str
    sample_rate_hz: float
    band: str | None
    k: int
    quantile: float
    threshold_mode: str
    window_s: float | None
    stride_s: float | None
    seed: int
    restarts: int
    from_s: float | None = None
    to_s: float | None = None
    split_s: float | None = None

    def __post_init__(self):
        if not 0 < self.quantile < 1:
            raise ExcoError(f"quantile must lie in (0,1), got {self.quantile}")
        if self.k < 1:
            raise ExcoError(f"k must be >= 1, got {self.k}")
        if self.window_s is not None and self.window_s <= 0:
            raise ExcoError(f"window length must be positive, got {self.window_s}")


def _resolve_k(args) -> int:
    if args.k is not None:
        return args.k
    phase = getattr(args, "phase", None)
    if phase is not None and args.band_name in ("alpha", "beta"):
        return PHASE_BAND_K[(args.band_name, phase)]
    return DEFAULT_K


def _band_or_none(name: str):
    return None if name == "none" else band_by_name(name)


def _worker_count() -> int:
    raw = os.environ.get("EXCO_THREADS", "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ExcoError(f"EXCO_THREADS must be an integer, got {raw!r}") from None
    if workers < 0:
        raise ExcoError(f"EXCO_THREADS must be >= 0, got {workers}")
    return workers


def _load_input(args, config: RunConfig) -> SignalMatrix:
    x = read_csv(config.input_path, config.sample_rate_hz)
    start = 0 if config.from_s is None else round(config.from_s * config.sample_rate_hz)
    end = x.n_samples if config.to_s is None else round(config.to_s * config.sample_rate_hz)
    start = max(0, start)
    end = min(x.n_samples, end)
    if start >= end:
        raise DegenerateDataError(
            f"selected range [{config.from_s}, {config.to_s}] seconds holds no samples"
        )
    if start > 0 or end < x.n_samples:
        x = SignalMatrix(x.samples[start:end], x.channels, x.sample_rate_hz)
    return x


def _metadata(config: RunConfig, command: str, extra: dict | None = None) -> dict:
    echo = {"command": command, **asdict(config)}
    if extra:
        echo.update(extra)
    return {
        "input_path": config.input_path,
        "seed": config.seed,
        "tool_version": exco.__version__,
        "config": echo,
    }


def _write_sidecar(out_path: str, record: dict) -> None:
    with open(out_path + ".config.json", "w", encoding="utf-8") as handle:
        json.dump(record, handle, indent=2)
        handle.write("\n")


def cmd_simulate(args) -> int:
    if args.model == "fig3":
        signals = make_fig3_triplet(args.n_samples, args.seed, sample_rate_hz=args.rate)
    elif args.model == "blocks":
        sizes = [int(s) for s in args.blocks.split(",")]
        dataset = synthetic_block_dataset(
            sum(sizes), sizes, args.n_samples, args.alpha, args.seed, sample_rate_hz=args.rate
        )
        signals = dataset.signals
        with open(args.out + ".labels.json", "w", encoding="utf-8") as handle:
            json.dump(
                {"channels": signals.channels, "true_labels": dataset.true_labels.tolist()},
                handle, indent=2,
            )
            handle.write("\n")
    else:
        coeffs = tuple(float(c) for c in args.coeffs.split(","))
        innovations = sample_symmetric_stable(
            StableParams(args.alpha), args.n_samples + len(coeffs) - 1, args.seed
        )
        series = simulate_ma(MaModel(coeffs), innovations)
        signals = SignalMatrix(series[:, None], ["X"], args.rate)
    write_csv(signals, args.out)
    record = {
        "command": "simulate", "model": args.model, "n_samples": args.n_samples,
        "seed": args.seed, "rate": args.rate, "out": args.out,
        "tool_version": exco.__version__,
    }
    if args.model == "blocks":
        record["blocks"] = args.blocks
        record["alpha"] = args.alpha
    if args.model == "ma":
        record["coeffs"] = args.coeffs
        record["alpha"] = args.alpha
    _write_sidecar(args.out, record)
    return 0


def cmd_cluster(args) -> int:
    config = RunConfig(
        input_path=args.input, sample_rate_hz=args.rate, band=args.band_name,
        k=_resolve_k(args), quantile=args.quantile, threshold_mode=args.threshold_mode,
        window_s=None, stride_s=None, seed=args.seed, restarts=args.restarts,
        from_s=args.from_s, to_s=args.to_s,
    )
    x = _load_input(args, config)
    result = run_pipeline(
        x, band=_band_or_none(args.band_name), k=config.k, quantile=config.quantile,
        seed=config.seed, restarts=config.restarts, threshold_mode=config.threshold_mode,
    )
    doc = ResultDocument(
        metadata=_metadata(config, "cluster"),
        windows=[WindowResult(result.communities, result.model, 0, x.n_samples)],
    )
    write_result(doc, args.out)
    return 0


def cmd_chi(args) -> int:
    config = RunConfig(
        input_path=args.input, sample_rate_hz=args.rate, band=args.band_name,
        k=1, quantile=args.quantile, threshold_mode="norm",
        window_s=None, stride_s=None, seed=0, restarts=1,
        from_s=args.from_s, to_s=args.to_s,
    )
    x = _load_input(args, config)
    band = _band_or_none(args.band_name)
    if band is not None:
        x = bandpass(x, band)
    y = empirical_pareto_transform(absolute_amplitude(x))
    matrix = chi_matrix(y, config.quantile)
    write_matrix_csv(matrix, args.out)
    if args.svg is not None:
        render_heatmap_svg(matrix, args.svg, f"Tail correlation (q={config.quantile})")
    return 0


def cmd_windows(args) -> int:
    config = RunConfig(
        input_path=args.input, sample_rate_hz=args.rate, band=args.band_name,
        k=_resolve_k(args), quantile=args.quantile, threshold_mode=args.threshold_mode,
        window_s=args.window, stride_s=args.stride, seed=args.seed, restarts=args.restarts,
    )
    x = _load_input(args, config)
    plan = WindowPlan(config.window_s, config.stride_s, config.sample_rate_hz)
    run = windowed_communities(
        x, plan, band=_band_or_none(args.band_name), k=config.k, quantile=config.quantile,
        seed=config.seed, restarts=config.restarts, threshold_mode=config.threshold_mode,
        workers=_worker_count(),
    )
    window_results = [
        WindowResult(a, m, *run.windows[a.window_id])
        for a, m in zip(run.assignments, run.models)
    ]
    doc = ResultDocument(
        metadata=_metadata(config, "windows"),
        windows=window_results,
        failed_windows=run.failed_windows,
    )
    write_result(doc, args.out)
    return 0


def cmd_persist(args) -> int:
    config = RunConfig(
        input_path=args.input, sample_rate_hz=args.rate, band=args.band_name,
        k=_resolve_k(args), quantile=args.quantile, threshold_mode=args.threshold_mode,
        window_s=args.window, stride_s=args.stride, seed=args.seed, restarts=args.restarts,
        split_s=args.split,
    )
    x = _load_input(args, config)
    plan = WindowPlan(config.window_s, config.stride_s, config.sample_rate_hz)
    run = windowed_communities(
        x, plan, band=_band_or_none(args.band_name), k=config.k, quantile=config.quantile,
        seed=config.seed, restarts=config.restarts, threshold_mode=config.threshold_mode,
        workers=_worker_count(),
    )
    split_sample = round(config.split_s * config.sample_rate_hz)
    # a window belongs to the pre phase iff it starts before the split
    pre = [a for a in run.assignments if run.windows[a.window_id][0] < split_sample]
    post = [a for a in run.assignments if run.windows[a.window_id][0] >= split_sample]
    if not pre or not post:
        raise DegenerateDataError(
            f"split at {config.split_s}s leaves {len(pre)} pre and {len(post)} post windows"
        )
    for tag, assignments in (("pre", pre), ("post", post)):
        failed = [
            w for w in run.failed_windows
            if (run.windows[w][0] < split_sample) == (tag == "pre")
        ]
        matrix = persistence_matrix(assignments, failed)
        write_matrix_csv(matrix, f"{args.out_prefix}_{tag}.csv")
        render_heatmap_svg(
            matrix, f"{args.out_prefix}_{tag}.svg",
            f"Community persistence ({tag}-split {config.split_s}s, k={config.k})",
        )
    return 0


def cmd_ksweep(args) -> int:
    config = RunConfig(
        input_path=args.input, sample_rate_hz=args.rate, band=args.band_name,
        k=max(args.kmin, 1), quantile=args.quantile, threshold_mode=args.threshold_mode,
        window_s=None, stride_s=None, seed=args.seed, restarts=args.restarts,
    )
    if args.kmin > args.kmax:
        raise ExcoError(f"--kmin {args.kmin} exceeds --kmax {args.kmax}")
    x = _load_input(args, config)
    band = _band_or_none(args.band_name)
    if band is not None:
        x = bandpass(x, band)
    y = empirical_pareto_transform(absolute_amplitude(x))
    theta = extract_extreme_directions(y, config.quantile, threshold_mode=config.threshold_mode)
    sweep = k_sweep(theta, range(args.kmin, args.kmax + 1), config.seed, config.restarts)
    for k in sweep.skipped:
        print(f"warning: k={k} infeasible for {theta.n_directions} directions, skipped",
              file=sys.stderr)
    with open(args.out, "w", newline="", encoding="utf-8") as handle:
        handle.write("k,objective\n")
        for k, obj in sweep.entries:
            handle.write(f"{k},{obj!r}\n")
    return 0


def _add_io_flags(parser, with_range=True):
    parser.add_argument("--input", required=True, help="input CSV (header = channel labels)")
    parser.add_argument("--rate", type=float, required=True, help="sample rate in Hz")
    parser.add_argument("--band", dest="band_name", choices=BAND_CHOICES, default="none",
                        help="optional canonical band filter")
    if with_range:
        parser.add_argument("--from", dest="from_s", type=float, default=None,
                            help="start of analyzed range in seconds")
        parser.add_argument("--to", dest="to_s", type=float, default=None,
                            help="end of analyzed range in seconds")


def _add_cluster_flags(parser):
    parser.add_argument("--k", type=int, default=None,
                        help=f"number of clusters (default {DEFAULT_K}, or the per-phase "
                             "table when --band and --phase are given)")
    parser.add_argument("--phase", choices=PHASE_CHOICES, default=None,
                        help="seizure phase used for the per-band default of --k")
    parser.add_argument("--quantile", type=float, default=0.90,
                        help="exceedance quantile for extreme directions (default 0.90)")
    parser.add_argument("--threshold-mode", choices=["norm", "marginal"], default="norm",
                        help="interpret --quantile as a norm quantile or a marginal "
                             "Pareto level (default norm)")
    parser.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    parser.add_argument("--restarts", type=int, default=50,
                        help="spherical k-means restarts (default 50)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exco",
        description="Cluster channels of a multivariate time series into communities "
                    "whose extreme amplitudes co-occur.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {exco.__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic dataset CSV")
    p.add_argument("--model", choices=["fig3", "blocks", "ma"], required=True)
    p.add_argument("--T", dest="n_samples", type=int, required=True,
                   help="number of output samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rate", type=float, default=100.0, help="nominal sample rate (default 100)")
    p.add_argument("--blocks", default="4,4,4",
                   help="comma-separated block sizes for --model blocks")
    p.add_argument("--alpha", type=float, default=1.75,
                   help="stable tail index for blocks/ma models (default 1.75)")
    p.add_argument("--coeffs", default="1,0.5,-0.6,1.5",
                   help="comma-separated MA coefficients for --model ma")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("cluster", help="one-shot community clustering of a recording")
    _add_io_flags(p)
    _add_cluster_flags(p)
    p.add_argument("--out", required=True, help="output result JSON path")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("chi", help="pairwise tail-correlation matrix")
    _add_io_flags(p)
    p.add_argument("--quantile", type=float, default=0.998,
                   help="marginal quantile defining the tail (default 0.998)")
    p.add_argument("--out", required=True, help="output matrix CSV path")
    p.add_argument("--svg", default=None, help="optional heatmap SVG path")
    p.set_defaults(func=cmd_chi)

    p = sub.add_parser("windows", help="sliding-window community clustering")
    _add_io_flags(p, with_range=False)
    _add_cluster_flags(p)
    p.add_argument("--window", type=float, default=10.0, help="window length in seconds")
    p.add_argument("--stride", type=float, default=10.0, help="window stride in seconds")
    p.add_argument("--out", required=True, help="output result JSON path")
    p.set_defaults(func=cmd_windows)

    p = sub.add_parser("persist", help="pre/post-split community persistence matrices")
    _add_io_flags(p, with_range=False)
    _add_cluster_flags(p)
    p.add_argument("--window", type=float, default=10.0, help="window length in seconds")
    p.add_argument("--stride", type=float, default=10.0, help="window stride in seconds")
    p.add_argument("--split", type=float, required=True,
                   help="split second separating the pre and post phases")
    p.add_argument("--out-prefix", required=True,
                   help="prefix for <prefix>_{pre,post}.{csv,svg} outputs")
    p.set_defaults(func=cmd_persist)

    p = sub.add_parser("ksweep", help="objective values across a range of cluster counts")
    _add_io_flags(p, with_range=False)
    p.add_argument("--kmin", type=int, default=2)
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--quantile", type=float, default=0.90)
    p.add_argument("--threshold-mode", choices=["norm", "marginal"], default="norm")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--out", required=True, help="output CSV of (k, objective)")
    p.set_defaults(func=cmd_ksweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DegenerateDataError, InfeasibleError, PlanError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ExcoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
