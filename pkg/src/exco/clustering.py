"""Extreme-direction extraction and spherical k-means on the positive orthant.

Unit-Pareto observations whose Euclidean norm exceeds a high quantile are
projected onto the positive unit sphere; spherical k-means with cosine
dissimilarity then locates the directions where joint extremes
concentrate. Each centroid acts as an extremal prototype, and channels
are grouped by the prototype that loads most heavily on them.
"""

from dataclasses import dataclass

import numpy as np

from exco.errors import DegenerateDataError, InfeasibleError, InputError, ParameterError
from exco.evt import ParetoMatrix

DEFAULT_RESTARTS = 50
DEFAULT_MAX_ITER = 100
CONVERGENCE_TOL = 1e-10


@dataclass(frozen=True)
class ExtremeDirections:
    """Unit vectors on the positive orthant, one per norm exceedance."""

    directions: np.ndarray
    source_rows: np.ndarray
    norm_threshold: float
    quantile_level: float

    def __post_init__(self):
        directions = np.asarray(self.directions, dtype=float)
        source_rows = np.asarray(self.source_rows, dtype=int)
        object.__setattr__(self, "directions", directions)
        object.__setattr__(self, "source_rows", source_rows)
        if directions.ndim != 2 or directions.shape[0] < 1:
            raise InputError(f"directions must be a non-empty matrix, got shape {directions.shape}")
        if source_rows.shape != (directions.shape[0],):
            raise InputError("source_rows must record one time index per direction")
        norms = np.linalg.norm(directions, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise InputError("direction rows must have unit Euclidean norm")
        if np.any(directions < 0):
            raise InputError("direction coordinates must be nonnegative")
        if self.norm_threshold < 0:
            raise ParameterError(f"norm threshold must be >= 0, got {self.norm_threshold}")
        if not 0 <= self.quantile_level < 1:
            raise ParameterError(f"quantile level must lie in [0,1), got {self.quantile_level}")

    @property
    def n_directions(self) -> int:
        return self.directions.shape[0]

    @property
    def n_channels(self) -> int:
        return self.directions.shape[1]


@dataclass(frozen=True)
class ClusterModel:
    """Fitted spherical k-means model: centroids, assignments, objective."""

    centroids: np.ndarray
    assignments: np.ndarray
    objective: float
    iterations: int
    restarts_used: int
    seed: int

    def __post_init__(self):
        centroids = np.asarray(self.centroids, dtype=float)
        assignments = np.asarray(self.assignments, dtype=int)
        object.__setattr__(self, "centroids", centroids)
        object.__setattr__(self, "assignments", assignments)
        k = centroids.shape[0]
        norms = np.linalg.norm(centroids, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise InputError("centroid rows must have unit Euclidean norm")
        if np.any(centroids < 0):
            raise InputError("centroid coordinates must be nonnegative")
        if assignments.ndim != 1 or np.any(assignments < 0) or np.any(assignments >= k):
            raise InputError("assignments must be cluster indices in [0, k)")
        if len(np.unique(assignments)) != k:
            raise InputError("every cluster must be non-empty")
        if self.objective < 0:
            raise InputError(f"objective must be nonnegative, got {self.objective}")

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


@dataclass(frozen=True)
class CommunityAssignment:
    """Channel-level community labels derived from a cluster model."""

    labels: np.ndarray
    channels: list[str]
    k: int
    window_id: int | None = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "channels", list(self.channels))
        if labels.shape != (len(self.channels),):
            raise InputError("labels must assign one community per channel")
        if np.any(labels < 0) or np.any(labels >= self.k):
            raise InputError("labels must be cluster indices in [0, k)")


@dataclass(frozen=True)
class LloydResult:
    """Outcome of a single Lloyd run, with the per-iteration objective trace."""

    centroids: np.ndarray
    assignments: np.ndarray
    objective: float
    iterations: int
    objective_history: np.ndarray


def extract_extreme_directions(
    y: ParetoMatrix, quantile: float, threshold_mode: str = "norm"
) -> ExtremeDirections:
    """Project the norm exceedances of a unit-Pareto matrix onto the sphere.

    In "norm" mode the threshold is the empirical `quantile` of the row
    norms ||Y_t||_2; in "marginal" mode it is the unit-Pareto marginal
    quantile 1/(1-q), i.e. a fixed level on the Pareto scale. Rows
    strictly above the threshold are divided by their norm.
    `quantile = 0` is the degenerate keep-everything case (threshold 0).

    Raises
    ------
    DegenerateDataError
        If no row norm exceeds the threshold.
    """
    if not 0 <= quantile < 1:
        raise ParameterError(f"quantile must lie in [0,1), got {quantile}")
    norms = np.linalg.norm(y.values, axis=1)
    if quantile == 0:
        tau = 0.0
    elif threshold_mode == "norm":
        tau = float(np.quantile(norms, quantile))
    elif threshold_mode == "marginal":
        tau = 1.0 / (1.0 - quantile)
    else:
        raise ParameterError(f"threshold_mode must be 'norm' or 'marginal', got {threshold_mode!r}")
    keep = norms > tau
    if not np.any(keep):
        raise DegenerateDataError(f"no rows exceed the norm threshold {tau:.6g}")
    directions = y.values[keep] / norms[keep, None]
    return ExtremeDirections(directions, np.flatnonzero(keep), tau, quantile)


def _check_direction(v: np.ndarray, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    if abs(np.linalg.norm(v) - 1.0) > 1e-6:
        raise InputError(f"{name} is not a unit vector (norm {np.linalg.norm(v):.8g})")
    if np.any(v < 0):
        raise InputError(f"{name} has negative coordinates")
    return v


def cosine_dissimilarity(x: np.ndarray, a: np.ndarray) -> float:
    """1 - x.a for unit vectors on the positive orthant; 0 iff x = a."""
    x = _check_direction(x, "x")
    a = _check_direction(a, "a")
    return float(1.0 - x @ a)


def quadratic_dissimilarity(x: np.ndarray, a: np.ndarray) -> float:
    """1 - (x.a)^2; the dissimilarity used by quadratic k-means variants."""
    x = _check_direction(x, "x")
    a = _check_direction(a, "a")
    return float(1.0 - (x @ a) ** 2)


def _as_directions(theta: ExtremeDirections | np.ndarray) -> np.ndarray:
    if isinstance(theta, ExtremeDirections):
        return theta.directions
    return np.asarray(theta, dtype=float)


def objective(theta: ExtremeDirections | np.ndarray, centroids: np.ndarray) -> float:
    """Mean cosine dissimilarity of each direction to its nearest centroid."""
    directions = _as_directions(theta)
    centroids = np.atleast_2d(np.asarray(centroids, dtype=float))
    norms = np.linalg.norm(centroids, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-6):
        raise InputError("centroid rows must be unit vectors")
    # clip rounding noise: 1 - x.a can come out at -1e-16 when x == a
    dissim = np.maximum(1.0 - directions @ centroids.T, 0.0)
    return float(np.min(dissim, axis=1).mean())


def _repair_empty_clusters(
    directions: np.ndarray, centroids: np.ndarray, assignments: np.ndarray
) -> None:
    """Reseed each empty cluster with the direction farthest from its centroid.

    Mutates `centroids` and `assignments` in place. Directions that are
    their cluster's only member are never moved, so a repair cannot
    create a new empty cluster.
    """
    k = centroids.shape[0]
    for _ in range(k):
        counts = np.bincount(assignments, minlength=k)
        empty = np.flatnonzero(counts == 0)
        if empty.size == 0:
            return
        own_dissim = 1.0 - np.einsum("ij,ij->i", directions, centroids[assignments])
        own_dissim[counts[assignments] <= 1] = -np.inf
        t_star = int(np.argmax(own_dissim))
        if not np.isfinite(own_dissim[t_star]):
            raise DegenerateDataError("cannot repair empty cluster: all clusters are singletons")
        centroids[empty[0]] = directions[t_star]
        assignments[t_star] = empty[0]


def lloyd_iterations(
    directions: np.ndarray,
    initial_centroids: np.ndarray,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = CONVERGENCE_TOL,
) -> LloydResult:
    """Run spherical k-means from explicit starting centroids.

    Each iteration assigns every direction to the centroid with minimal
    cosine dissimilarity (ties to the lowest index), repairs empty
    clusters, then moves every centroid to the normalized coordinatewise
    mean of its members. Stops when assignments are stable, the
    objective improves by less than `tol`, or `max_iter` is reached.
    The objective trace starts with the value of the initial centroids
    and is non-increasing.
    """
    if max_iter < 1:
        raise ParameterError(f"max_iter must be >= 1, got {max_iter}")
    theta = np.asarray(directions, dtype=float)
    centroids = np.array(initial_centroids, dtype=float, copy=True)
    k = centroids.shape[0]
    history = [objective(theta, centroids)]
    assignments = None
    iterations = 0
    for _ in range(max_iter):
        similarity = theta @ centroids.T
        new_assignments = np.argmax(similarity, axis=1)
        _repair_empty_clusters(theta, centroids, new_assignments)
        for c in range(k):
            total = theta[new_assignments == c].sum(axis=0)
            centroids[c] = total / np.linalg.norm(total)
        iterations += 1
        history.append(objective(theta, centroids))
        if assignments is not None and np.array_equal(new_assignments, assignments):
            assignments = new_assignments
            break
        if history[-2] - history[-1] < tol:
            assignments = new_assignments
            break
        assignments = new_assignments
    return LloydResult(centroids, assignments, history[-1], iterations, np.asarray(history))


def _kmeans_pp_init(directions: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding under cosine dissimilarity.

    The first centroid is a uniformly drawn direction; each further one
    is drawn with probability proportional to the minimal dissimilarity
    to the centroids chosen so far.
    """
    n = directions.shape[0]
    chosen = [int(rng.integers(n))]
    min_dissim = np.maximum(1.0 - directions @ directions[chosen[0]], 0.0)
    for _ in range(1, k):
        total = min_dissim.sum()
        if total > 0:
            idx = int(rng.choice(n, p=min_dissim / total))
        else:
            idx = int(rng.integers(n))
        chosen.append(idx)
        min_dissim = np.minimum(min_dissim, np.maximum(1.0 - directions @ directions[idx], 0.0))
    return directions[chosen].copy()


def spherical_kmeans(
    theta: ExtremeDirections,
    k: int,
    seed: int,
    restarts: int = DEFAULT_RESTARTS,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ClusterModel:
    """Best-of-restarts spherical k-means over the extreme directions.

    Every restart draws its own k-means++ initialization from a random
    stream derived from (seed, restart index), so results do not depend
    on execution order. The restart with the lowest objective wins;
    ties go to the earliest restart.

    Raises
    ------
    InfeasibleError
        If k exceeds the number of directions.
    """
    directions = _as_directions(theta)
    n = directions.shape[0]
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if restarts < 1:
        raise ParameterError(f"restarts must be >= 1, got {restarts}")
    if seed < 0:
        raise ParameterError(f"seed must be a nonnegative integer, got {seed}")
    if k > n:
        raise InfeasibleError(f"k = {k} exceeds the {n} available directions")
    best: LloydResult | None = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        init = _kmeans_pp_init(directions, k, rng)
        run = lloyd_iterations(directions, init, max_iter=max_iter)
        if best is None or run.objective < best.objective:
            best = run
    return ClusterModel(
        centroids=best.centroids,
        assignments=best.assignments,
        objective=best.objective,
        iterations=best.iterations,
        restarts_used=restarts,
        seed=seed,
    )


def assign_communities(
    model: ClusterModel, channels: list[str], window_id: int | None = None
) -> CommunityAssignment:
    """Label each channel with the cluster whose centroid loads most on it.

    Channel d gets argmax over clusters of centroids[c][d]; ties break
    toward the lowest cluster index.
    """
    centroids = model.centroids
    if centroids.shape[1] != len(channels):
        raise InputError(f"{len(channels)} channel labels for {centroids.shape[1]} coordinates")
    labels = np.argmax(centroids, axis=0)
    return CommunityAssignment(labels, channels, model.k, window_id)


@dataclass(frozen=True)
class KSweepResult:
    """Best objective per cluster count, plus any skipped infeasible counts."""

    entries: list[tuple[int, float]]
    skipped: list[int]


def _farthest_first_completion(
    directions: np.ndarray, centroids: np.ndarray, k: int
) -> np.ndarray:
    """Grow a centroid set to size k by repeatedly adding the worst-fit direction."""
    centroids = np.array(centroids, dtype=float, copy=True)
    while centroids.shape[0] < k:
        min_dissim = np.min(1.0 - directions @ centroids.T, axis=1)
        centroids = np.vstack([centroids, directions[int(np.argmax(min_dissim))]])
    return centroids


def k_sweep(
    theta: ExtremeDirections,
    k_range: range | list[int],
    seed: int,
    restarts: int = DEFAULT_RESTARTS,
) -> KSweepResult:
    """Best objective for each cluster count in ascending order.

    Each k is fitted by restarted spherical k-means and additionally by
    a warm start that extends the previous k's centroids with
    farthest-first picks; the warm start guarantees the reported
    objective never increases in k. Counts below 1 or above the number
    of directions are skipped and reported.
    """
    directions = _as_directions(theta)
    n = directions.shape[0]
    entries: list[tuple[int, float]] = []
    skipped: list[int] = []
    previous: LloydResult | None = None
    for k in sorted(set(int(k) for k in k_range)):
        if k < 1 or k > n:
            skipped.append(k)
            continue
        model = spherical_kmeans(theta, k, seed, restarts)
        best = LloydResult(
            model.centroids,
            model.assignments,
            model.objective,
            model.iterations,
            np.asarray([model.objective]),
        )
        if previous is not None and previous.centroids.shape[0] < k:
            init = _farthest_first_completion(directions, previous.centroids, k)
            warm = lloyd_iterations(directions, init)
            if warm.objective < best.objective:
                best = warm
        entries.append((k, best.objective))
        previous = best
    return KSweepResult(entries, skipped)
