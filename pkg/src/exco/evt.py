"""Marginal transforms, GEV evaluation, and pairwise tail-dependence estimation.

Amplitudes are standardised to unit Pareto margins through the empirical
rank transform; tail dependence between channels is then measured by the
conditional co-exceedance probability above a high marginal quantile.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.stats import rankdata

from exco.errors import DegenerateDataError, InputError, ParameterError

# Shape values below this magnitude are evaluated on the Gumbel branch to
# avoid catastrophic cancellation in (1 + xi*z)^(-1/xi).
GUMBEL_XI_EPS = 1e-12

# exp() overflows just above 709; exp(-exp(y)) is exactly 0.0 long before
# y reaches this, so clipping here only avoids the overflow, not accuracy.
_EXP_CLIP = 700.0


@dataclass(frozen=True)
class SignalMatrix:
    """T-by-D matrix of samples with channel labels and a sample rate.

    Rows are time points, columns are channels. Units are arbitrary
    (e.g. microvolts); all downstream estimates are rank-based.
    """

    samples: np.ndarray
    channels: list[str]
    sample_rate_hz: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "channels", list(self.channels))
        if samples.ndim != 2 or samples.shape[0] < 1 or samples.shape[1] < 1:
            raise InputError(f"samples must be a non-empty T-by-D matrix, got shape {samples.shape}")
        if samples.shape[1] != len(self.channels):
            raise InputError(
                f"{len(self.channels)} channel labels for {samples.shape[1]} columns"
            )
        if len(set(self.channels)) != len(self.channels):
            raise InputError("channel labels must be unique")
        if not np.all(np.isfinite(samples)):
            raise InputError("samples contain non-finite values")
        if not self.sample_rate_hz > 0:
            raise ParameterError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_channels(self) -> int:
        return self.samples.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate_hz


@dataclass(frozen=True)
class ParetoMatrix:
    """T-by-D matrix of marginally unit-Pareto values (all entries >= 1)."""

    values: np.ndarray
    channels: list[str]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "channels", list(self.channels))
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise InputError(f"values must be a non-empty T-by-D matrix, got shape {values.shape}")
        if values.shape[1] != len(self.channels):
            raise InputError(f"{len(self.channels)} channel labels for {values.shape[1]} columns")
        if not np.all(np.isfinite(values)):
            raise InputError("values contain non-finite entries")
        if np.any(values < 1.0):
            raise InputError("unit-Pareto values must be >= 1")

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class GevParams:
    """Location/scale/shape triple of a generalized extreme value law."""

    location: float = 0.0
    scale: float = 1.0
    shape: float = 0.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ParameterError(f"scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class ChiMatrix:
    """Symmetric D-by-D matrix of pairwise tail correlations with unit diagonal."""

    values: np.ndarray
    channels: list[str]
    quantile_level: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "channels", list(self.channels))
        d = len(self.channels)
        if values.shape != (d, d):
            raise InputError(f"expected a {d}-by-{d} matrix, got shape {values.shape}")
        if not 0 < self.quantile_level < 1:
            raise ParameterError(f"quantile_level must lie in (0,1), got {self.quantile_level}")
        if not np.allclose(values, values.T, atol=1e-12):
            raise InputError("chi matrix must be symmetric")
        if np.any(values < 0) or np.any(values > 1):
            raise InputError("chi values must lie in [0,1]")
        if not np.allclose(np.diag(values), 1.0):
            raise InputError("chi matrix diagonal must equal 1")


def absolute_amplitude(raw: SignalMatrix) -> SignalMatrix:
    """Absolute deviation of every channel from its temporal mean.

    Large positive and large negative swings carry the same information
    about extremes of an oscillatory signal, so both tails are folded
    into a single upper tail.
    """
    samples = raw.samples
    amplitudes = np.abs(samples - samples.mean(axis=0, keepdims=True))
    return SignalMatrix(amplitudes, raw.channels, raw.sample_rate_hz)


def empirical_pareto_transform(x: SignalMatrix) -> ParetoMatrix:
    """Transform each channel to unit-Pareto margins via its empirical CDF.

    Per column the empirical CDF is rank/(T+1) with mid-ranks for ties,
    and the output is Y = 1/(1 - rank/(T+1)). Dividing by T+1 rather
    than T keeps Y finite; the smallest attainable value is (T+1)/T.

    Parameters
    ----------
    x : SignalMatrix
        Typically the output of :func:`absolute_amplitude`.

    Returns
    -------
    ParetoMatrix
        Same shape and channel labels, entries on the unit-Pareto scale.
    """
    values = x.samples
    t = values.shape[0]
    ranks = rankdata(values, method="average", axis=0)
    cdf = ranks / (t + 1)
    return ParetoMatrix(1.0 / (1.0 - cdf), x.channels)


def gev_cdf(x: float, p: GevParams) -> float:
    """Cumulative distribution function of the GEV law.

    Returns exp(-(1 + shape*(x-loc)/scale)^(-1/shape)) on the support,
    the boundary limit outside it (0 below a Frechet lower bound, 1
    above a Weibull upper bound), and the Gumbel limit
    exp(-exp(-(x-loc)/scale)) for shape ~ 0.
    """
    z = (x - p.location) / p.scale
    if abs(p.shape) < GUMBEL_XI_EPS:
        if z < -_EXP_CLIP:
            return 0.0
        return math.exp(-math.exp(-z))
    w = 1.0 + p.shape * z
    if w <= 0.0:
        return 0.0 if p.shape > 0 else 1.0
    log_t = -math.log(w) / p.shape
    if log_t > _EXP_CLIP:
        return 0.0
    return math.exp(-math.exp(log_t))


def gev_pdf(x: float, p: GevParams) -> float:
    """Probability density of the GEV law; zero outside the support."""
    z = (x - p.location) / p.scale
    if abs(p.shape) < GUMBEL_XI_EPS:
        # Gumbel limit: exp(-z - exp(-z)) / scale
        if z < -_EXP_CLIP:
            return 0.0
        return math.exp(-z - math.exp(-z)) / p.scale
    w = 1.0 + p.shape * z
    if w <= 0.0:
        return 0.0
    log_t = -math.log(w) / p.shape
    if log_t > _EXP_CLIP:
        return 0.0
    t = math.exp(log_t)
    arg = (p.shape + 1.0) * log_t - t
    if arg > _EXP_CLIP:
        # shape < -1: the density genuinely diverges at the support boundary
        return math.inf
    return math.exp(arg) / p.scale


def empirical_chi(y1: np.ndarray, y2: np.ndarray, q: float) -> float:
    """Empirical tail correlation of two unit-Pareto columns.

    Estimates the limiting conditional probability that one variable
    exceeds its q-quantile given that the other does. The two
    conditioning directions are averaged so the estimate is exchangeable
    in its arguments.

    Parameters
    ----------
    y1, y2 : ndarray
        Columns of a :class:`ParetoMatrix` (same length). Because the
        estimator only compares against marginal quantiles it is
        invariant under strictly increasing transforms of either input.
    q : float
        Marginal quantile level in (0,1) defining the tail.

    Returns
    -------
    float
        Estimate in [0,1]; 0 is asymptotic independence, 1 perfect
        tail dependence.
    """
    y1 = np.asarray(y1, dtype=float).ravel()
    y2 = np.asarray(y2, dtype=float).ravel()
    if y1.shape != y2.shape:
        raise InputError(f"columns differ in length: {y1.shape[0]} vs {y2.shape[0]}")
    if not 0 < q < 1:
        raise ParameterError(f"quantile level must lie in (0,1), got {q}")
    tau1 = np.quantile(y1, q)
    tau2 = np.quantile(y2, q)
    exc1 = y1 > tau1
    exc2 = y2 > tau2
    n1 = int(exc1.sum())
    n2 = int(exc2.sum())
    if n1 == 0 or n2 == 0:
        raise DegenerateDataError(f"no exceedances above the {q}-quantile")
    joint = int(np.count_nonzero(exc1 & exc2))
    return 0.5 * (joint / n1 + joint / n2)


def chi_matrix(y: ParetoMatrix, q: float) -> ChiMatrix:
    """Pairwise tail correlations of all channel pairs; diagonal fixed at 1."""
    d = y.n_channels
    values = np.eye(d)
    for i in range(d):
        for j in range(i + 1, d):
            values[i, j] = values[j, i] = empirical_chi(y.values[:, i], y.values[:, j], q)
    return ChiMatrix(values, y.channels, q)
