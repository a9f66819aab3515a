"""Frequency-band filtering and sliding-window orchestration of the pipeline.

A window of signal runs through: optional band-pass filter, absolute
amplitude, unit-Pareto rank transform, norm-exceedance projection, and
spherical k-means. Repeating this over sliding windows and counting how
often channel pairs share a community yields the persistence matrix.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import os

import numpy as np
from scipy.signal import butter, sosfiltfilt

from exco.clustering import (
    ClusterModel,
    CommunityAssignment,
    ExtremeDirections,
    assign_communities,
    extract_extreme_directions,
    spherical_kmeans,
)
from exco.errors import (
    BandError,
    DegenerateDataError,
    InfeasibleError,
    InputError,
    ParameterError,
    PlanError,
)
from exco.evt import SignalMatrix, absolute_amplitude, empirical_pareto_transform

FILTER_ORDER = 4


@dataclass(frozen=True)
class BandSpec:
    """Named frequency band; low_hz = 0 means a pure low-pass band."""

    name: str
    low_hz: float
    high_hz: float

    def __post_init__(self):
        if self.low_hz < 0 or self.high_hz <= self.low_hz:
            raise BandError(f"invalid band {self.name}: [{self.low_hz}, {self.high_hz}] Hz")


def canonical_bands() -> list[BandSpec]:
    """The five canonical EEG bands: delta, theta, alpha, beta, gamma."""
    return [
        BandSpec("delta", 0.0, 4.0),
        BandSpec("theta", 4.0, 8.0),
        BandSpec("alpha", 8.0, 12.0),
        BandSpec("beta", 12.0, 30.0),
        BandSpec("gamma", 30.0, 50.0),
    ]


def band_by_name(name: str) -> BandSpec:
    for band in canonical_bands():
        if band.name == name:
            return band
    raise ParameterError(f"unknown band {name!r}; choose from "
                         + ", ".join(b.name for b in canonical_bands()))


def bandpass(x: SignalMatrix, band: BandSpec) -> SignalMatrix:
    """Zero-phase Butterworth band-pass of every channel.

    A 4th-order filter is applied forward and backward (squaring the
    magnitude response and removing phase distortion) with even
    reflect-padding of three filter lengths at both ends. A band with
    low_hz = 0 degenerates to a low-pass at high_hz.

    Raises
    ------
    BandError
        If high_hz reaches the Nyquist frequency.
    InputError
        If the signal is too short for the filter padding.
    """
    nyquist = x.sample_rate_hz / 2.0
    if band.high_hz >= nyquist:
        raise BandError(
            f"band {band.name} upper edge {band.high_hz} Hz reaches Nyquist {nyquist} Hz"
        )
    if band.low_hz > 0:
        sos = butter(FILTER_ORDER, [band.low_hz, band.high_hz], btype="bandpass",
                     fs=x.sample_rate_hz, output="sos")
        n_taps = 2 * FILTER_ORDER + 1
    else:
        sos = butter(FILTER_ORDER, band.high_hz, btype="lowpass",
                     fs=x.sample_rate_hz, output="sos")
        n_taps = FILTER_ORDER + 1
    pad = 3 * n_taps
    if x.n_samples <= pad:
        raise InputError(
            f"signal length {x.n_samples} too short for filter padding {pad}"
        )
    filtered = sosfiltfilt(sos, x.samples, axis=0, padtype="even", padlen=pad)
    return SignalMatrix(filtered, x.channels, x.sample_rate_hz)


@dataclass(frozen=True)
class WindowPlan:
    """Sliding-window geometry in seconds, resolved against a sample rate."""

    length_s: float
    stride_s: float
    sample_rate_hz: float

    def __post_init__(self):
        if self.stride_s <= 0:
            raise ParameterError(f"stride_s must be positive, got {self.stride_s}")
        if self.sample_rate_hz <= 0:
            raise ParameterError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        if self.length_samples < 2:
            raise ParameterError(
                f"window of {self.length_s}s at {self.sample_rate_hz}Hz holds fewer than 2 samples"
            )

    @property
    def length_samples(self) -> int:
        return round(self.length_s * self.sample_rate_hz)

    @property
    def stride_samples(self) -> int:
        return max(1, round(self.stride_s * self.sample_rate_hz))


def sliding_windows(n_samples: int, plan: WindowPlan) -> list[tuple[int, int]]:
    """Half-open (start, end) index ranges of all full windows.

    Windows start every `stride_samples`; a trailing partial window is
    discarded. Raises PlanError if not even one full window fits.
    """
    length = plan.length_samples
    stride = plan.stride_samples
    if length > n_samples:
        raise PlanError(
            f"window of {length} samples does not fit into {n_samples} samples"
        )
    return [(start, start + length) for start in range(0, n_samples - length + 1, stride)]


@dataclass(frozen=True)
class PipelineResult:
    """One window's worth of output: directions, fitted model, communities."""

    communities: CommunityAssignment
    model: ClusterModel
    directions: ExtremeDirections


def run_pipeline(
    x: SignalMatrix,
    band: BandSpec | None = None,
    k: int = 5,
    quantile: float = 0.90,
    seed: int = 0,
    restarts: int = 50,
    threshold_mode: str = "norm",
    window_id: int | None = None,
) -> PipelineResult:
    """Full single-segment pipeline from raw signal to channel communities.

    Order: optional band-pass, absolute amplitude (re-centered within
    the segment), unit-Pareto transform, norm-exceedance projection at
    `quantile`, spherical k-means with `k` clusters, channel labeling.
    """
    if band is not None:
        x = bandpass(x, band)
    y = empirical_pareto_transform(absolute_amplitude(x))
    theta = extract_extreme_directions(y, quantile, threshold_mode=threshold_mode)
    model = spherical_kmeans(theta, k, seed=seed, restarts=restarts)
    communities = assign_communities(model, x.channels, window_id=window_id)
    return PipelineResult(communities, model, theta)


@dataclass(frozen=True)
class WindowedRun:
    """Per-window community assignments plus records of failed windows."""

    assignments: list[CommunityAssignment]
    models: list[ClusterModel]
    windows: list[tuple[int, int]]
    failed_windows: list[int] = field(default_factory=list)


def _window_seed(seed: int, window_index: int) -> int:
    # derive a schedule-independent per-window seed from (seed, index)
    return int(np.random.SeedSequence([seed, window_index]).generate_state(1)[0])


def windowed_communities(
    x: SignalMatrix,
    plan: WindowPlan,
    band: BandSpec | None = None,
    k: int = 5,
    quantile: float = 0.90,
    seed: int = 0,
    restarts: int = 50,
    threshold_mode: str = "norm",
    workers: int = 1,
) -> WindowedRun:
    """Run the community pipeline independently on every sliding window.

    Windows whose exceedance set is empty or cannot support k clusters
    are recorded in `failed_windows` instead of aborting the run.
    Results are deterministic for fixed inputs regardless of `workers`
    (0 = one thread per CPU).
    """
    windows = sliding_windows(x.n_samples, plan)

    def one(indexed_window: tuple[int, tuple[int, int]]):
        w, (start, end) = indexed_window
        segment = SignalMatrix(x.samples[start:end], x.channels, x.sample_rate_hz)
        try:
            result = run_pipeline(
                segment, band=band, k=k, quantile=quantile,
                seed=_window_seed(seed, w), restarts=restarts,
                threshold_mode=threshold_mode, window_id=w,
            )
        except (DegenerateDataError, InfeasibleError):
            return w, None
        return w, result

    if workers == 0:
        workers = os.cpu_count() or 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, enumerate(windows)))
    else:
        outcomes = [one(item) for item in enumerate(windows)]

    assignments = []
    models = []
    failed = []
    for w, result in outcomes:
        if result is None:
            failed.append(w)
        else:
            assignments.append(result.communities)
            models.append(result.model)
    return WindowedRun(assignments, models, windows, failed)


@dataclass(frozen=True)
class PersistenceMatrix:
    """Fraction of windows in which each channel pair shares a community."""

    values: np.ndarray
    channels: list[str]
    n_windows: int
    failed_windows: list[int] = field(default_factory=list)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "channels", list(self.channels))
        d = len(self.channels)
        if values.shape != (d, d):
            raise InputError(f"expected a {d}-by-{d} matrix, got shape {values.shape}")
        if self.n_windows < 1:
            raise InputError("persistence requires at least one window")
        if not np.allclose(values, values.T, atol=0):
            raise InputError("persistence matrix must be symmetric")
        if np.any(values < 0) or np.any(values > 1) or not np.all(np.diag(values) == 1.0):
            raise InputError("persistence values must lie in [0,1] with unit diagonal")


def persistence_matrix(
    assignments: list[CommunityAssignment],
    failed_windows: list[int] | tuple[int, ...] = (),
) -> PersistenceMatrix:
    """Co-membership frequency of channel pairs across window assignments."""
    if len(assignments) == 0:
        raise InputError("need at least one community assignment")
    channels = assignments[0].channels
    for a in assignments[1:]:
        if a.channels != channels:
            raise InputError("all assignments must share the same channel set")
    counts = np.zeros((len(channels), len(channels)), dtype=int)
    for a in assignments:
        counts += a.labels[:, None] == a.labels[None, :]
    values = counts / len(assignments)
    return PersistenceMatrix(values, channels, len(assignments), list(failed_windows))
