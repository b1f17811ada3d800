"""Seeded, mergeable, parallelizable replication harness for the divergence
experiments.

Determinism contract: replicate r of an experiment always consumes the
counter-based random stream keyed by (seed, r), and replicates are evaluated
in fixed-size chunks whose layout does not depend on the worker count, so a
given (seed, config) reproduces bit-identical results under 1, 2, or any
number of workers.  Within a chunk the arithmetic is vectorized across
replicates but is elementwise identical to evaluating each replicate alone.

Accumulation uses a count/mean/M2 running accumulator with the standard
parallel combination rule, merged over chunks in a fixed tree order.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import closed_form
from .divergence import kl_forward_paths, kl_reverse_paths
from .stickbreak import CLAMP_EPS, DEFAULT_TRUNCATION, ModelSpec, sample_beta

__all__ = [
    "CHUNK_SIZE",
    "RunningStats",
    "merge_stats",
    "ExperimentConfig",
    "ExperimentResult",
    "replicate_rng",
    "run_kl_experiment",
    "run_variance_curve",
    "run_dtheta_curve",
]

# Replicates are processed in fixed chunks of this size regardless of the
# worker count; changing it changes nothing statistically but reshuffles
# floating-point merge order, so it is a constant, not a knob.
CHUNK_SIZE = 4096


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for replicate `index` of experiment `seed`."""
    if seed < 0 or index < 0:
        raise ValueError("seed and replicate index must be nonnegative")
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass
class RunningStats:
    """Count / mean / sum-of-squared-deviations accumulator."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def update(self, value: float) -> None:
        self.count += 1
        delta = value - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (value - self.mean)

    @classmethod
    def from_values(cls, values: np.ndarray) -> "RunningStats":
        values = np.asarray(values, dtype=np.float64)
        if values.size == 0:
            return cls()
        mean = float(values.mean())
        m2 = float(np.sum((values - mean) ** 2))
        return cls(count=int(values.size), mean=mean, m2=m2)

    @property
    def variance(self) -> float:
        """Sample variance (ddof=1); requires count >= 2."""
        if self.count < 2:
            return float("nan")
        return self.m2 / (self.count - 1)

    @property
    def std_error(self) -> float:
        if self.count < 2:
            return float("nan")
        return float(np.sqrt(self.variance / self.count))


def merge_stats(s1: RunningStats, s2: RunningStats) -> RunningStats:
    """Combine two accumulators as if their samples were concatenated."""
    if s1.count == 0:
        return RunningStats(s2.count, s2.mean, s2.m2)
    if s2.count == 0:
        return RunningStats(s1.count, s1.mean, s1.m2)
    count = s1.count + s2.count
    delta = s2.mean - s1.mean
    mean = s1.mean + delta * s2.count / count
    m2 = s1.m2 + s2.m2 + delta * delta * s1.count * s2.count / count
    return RunningStats(count=count, mean=mean, m2=m2)


@dataclass(frozen=True)
class ExperimentConfig:
    """One divergence experiment.

    model_p is the stick-breaking process (dp or exchangeable_dp); model_q
    the geometric comparator.  direction "forward" evaluates KL(P||P'),
    "reverse" evaluates KL(P'||P).  Coupling "coupled" pins the comparator
    length to the first length variable of model_p, in which case model_q's
    (a, b) are not consumed.
    """

    model_p: ModelSpec
    model_q: ModelSpec | None = None
    direction: str = "forward"
    coupling: str = "uncoupled"
    reps: int = 100_000
    trunc: int = DEFAULT_TRUNCATION
    seed: int = 0
    trace_stride: int = 100

    def __post_init__(self):
        if self.model_p.variant not in ("dp", "exchangeable_dp"):
            raise ValueError("model_p must be a dp or exchangeable_dp model")
        if self.direction not in ("forward", "reverse"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.coupling not in ("coupled", "uncoupled"):
            raise ValueError(f"unknown coupling {self.coupling!r}")
        if self.coupling == "uncoupled":
            if self.model_q is None or self.model_q.variant != "geometric":
                raise ValueError("uncoupled experiments need a geometric model_q")
        if self.reps < 1 or self.trunc < 1 or self.trace_stride < 1:
            raise ValueError("reps, trunc and trace_stride must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass
class ExperimentResult:
    stats: RunningStats
    trace: list[tuple[int, float]]
    values: np.ndarray


def _sample_dp_chunk(config: ExperimentConfig, lo: int, hi: int):
    n = config.trunc
    theta = config.model_p.theta
    m = hi - lo
    u = np.empty((m, n))
    comp = np.empty(m)
    for i in range(m):
        rng = replicate_rng(config.seed, lo + i)
        u[i] = rng.random(n)
        if config.coupling == "uncoupled":
            comp[i] = sample_beta(config.model_q.a, config.model_q.b, rng)
    values = np.clip(1.0 - u ** (1.0 / theta), CLAMP_EPS, 1.0 - CLAMP_EPS)
    if config.coupling == "coupled":
        comp = values[:, 0].copy()
    return values, comp


def _sample_exchangeable_chunk(config: ExperimentConfig, lo: int, hi: int):
    n = config.trunc
    theta = config.model_p.theta
    beta = config.model_p.beta
    m = hi - lo
    u = np.empty((m, n, 3))
    comp = np.empty(m)
    for i in range(m):
        rng = replicate_rng(config.seed, lo + i)
        u[i] = rng.random((n, 3))
        if config.coupling == "uncoupled":
            comp[i] = sample_beta(config.model_q.a, config.model_q.b, rng)
    fresh = np.clip(1.0 - u[:, :, 2] ** (1.0 / theta), CLAMP_EPS, 1.0 - CLAMP_EPS)
    values = np.empty((m, n))
    values[:, 0] = fresh[:, 0]
    rows = np.arange(m)
    for i in range(1, n):
        take_fresh = u[:, i, 0] < beta / (beta + i)
        picks = np.minimum((u[:, i, 1] * i).astype(np.int64), i - 1)
        values[:, i] = np.where(take_fresh, fresh[:, i], values[rows, picks])
    if config.coupling == "coupled":
        comp = values[:, 0].copy()
    return values, comp


def _chunk_kl_values(config: ExperimentConfig, bounds: tuple[int, int]) -> np.ndarray:
    lo, hi = bounds
    if config.model_p.variant == "dp":
        values, comp = _sample_dp_chunk(config, lo, hi)
    else:
        values, comp = _sample_exchangeable_chunk(config, lo, hi)
    if config.direction == "forward":
        return kl_forward_paths(values, comp)
    return kl_reverse_paths(comp, values)


def _chunk_bounds(reps: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + CHUNK_SIZE, reps)) for lo in range(0, reps, CHUNK_SIZE)]


def _run_chunks(config: ExperimentConfig, workers: int) -> np.ndarray:
    bounds = _chunk_bounds(config.reps)
    fn = partial(_chunk_kl_values, config)
    if workers <= 1 or len(bounds) == 1:
        pieces = [fn(b) for b in bounds]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            pieces = list(pool.map(fn, bounds, chunksize=1))
    return np.concatenate(pieces)


def _tree_merge(stats: list[RunningStats]) -> RunningStats:
    if not stats:
        return RunningStats()
    layer = stats
    while len(layer) > 1:
        nxt = [merge_stats(layer[i], layer[i + 1]) for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    return layer[0]


def run_kl_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run the configured experiment; returns stats, a cumulative-mean trace,
    and the per-replicate divergence values in replicate order.

    The trace holds (replicate count, cumulative mean) at every
    ``trace_stride`` replicates, plus the final replicate.
    """
    values = _run_chunks(config, workers)
    chunk_stats = [
        RunningStats.from_values(values[lo:hi]) for lo, hi in _chunk_bounds(config.reps)
    ]
    stats = _tree_merge(chunk_stats)
    cumulative = np.cumsum(values)
    marks = list(range(config.trace_stride, config.reps + 1, config.trace_stride))
    if not marks or marks[-1] != config.reps:
        marks.append(config.reps)
    trace = [(i, float(cumulative[i - 1] / i)) for i in marks]
    return ExperimentResult(stats=stats, trace=trace, values=values)


def run_variance_curve(
    theta_grid,
    coupling: str = "uncoupled",
    reps: int = 100_000,
    trunc: int = DEFAULT_TRUNCATION,
    seed: int = 0,
    workers: int = 1,
) -> list[tuple[float, float, float]]:
    """Sample variance of the divergence along a theta grid, paired with the
    closed-form value.

    The comparator is geometric(1, theta) at each grid point, matching the
    variance study; grid point i runs with seed ``seed + i``.  Returns
    (theta, mc_variance, closed_form_variance) triples.
    """
    out = []
    for i, theta in enumerate(theta_grid):
        theta = float(theta)
        config = ExperimentConfig(
            model_p=ModelSpec.dp(theta),
            model_q=ModelSpec.geometric(1.0, theta),
            direction="forward",
            coupling=coupling,
            reps=reps,
            trunc=trunc,
            seed=seed + i,
        )
        result = run_kl_experiment(config, workers=workers)
        if coupling == "coupled":
            closed = closed_form.variance_kl_coupled(theta)
        else:
            closed = closed_form.variance_kl_uncoupled(theta, 1.0, theta)
        out.append((theta, result.stats.variance, closed))
    return out


def run_dtheta_curve(
    theta: float,
    beta_grid,
    reps: int = 100_000,
    trunc: int = DEFAULT_TRUNCATION,
    seed: int = 0,
    workers: int = 1,
) -> list[tuple[float, float, float]]:
    """Monte Carlo estimate of the Dirichlet-driven divergence expectation
    per beta, with the comparator coupled to the first length variable.

    Returns (beta, estimate, stderr) triples; grid point i runs with seed
    ``seed + i``.
    """
    out = []
    for i, beta in enumerate(beta_grid):
        beta = float(beta)
        config = ExperimentConfig(
            model_p=ModelSpec.exchangeable_dp(beta, theta),
            direction="forward",
            coupling="coupled",
            reps=reps,
            trunc=trunc,
            seed=seed + i,
        )
        result = run_kl_experiment(config, workers=workers)
        out.append((beta, result.stats.mean, result.stats.std_error))
    return out
