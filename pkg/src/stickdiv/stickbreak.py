"""Stick-breaking length variables and weights.

Three length-variable models are supported:

* independent lengths, iid Be(1, theta)  (Dirichlet process),
* a single shared length v ~ Be(a, b) replicated down the stick
  (geometric process, weights v (1-v)^(n-1)),
* exchangeable lengths drawn from a Dirichlet-driven urn with concentration
  beta and base measure Be(1, theta); beta = 0 collapses to the geometric
  case and large beta approaches iid sampling.

Weights follow w_1 = v_1, w_n = v_n * prod_{j<n} (1 - v_j); the residual
mass 1 - sum(w) equals prod_{j<=N} (1 - v_j) and is carried explicitly so
truncation error stays observable.

Samplers are pure given an explicit numpy Generator; parallel callers must
supply independent streams (see stickdiv.montecarlo.replicate_rng).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CLAMP_EPS",
    "DEFAULT_TRUNCATION",
    "ModelSpec",
    "LengthSequence",
    "WeightSequence",
    "weights_from_lengths",
    "sample_beta",
    "sample_dp_lengths",
    "sample_geometric_lengths",
    "sample_exchangeable_dp_lengths",
    "tail_mass",
]

# Lengths are clamped to [CLAMP_EPS, 1 - CLAMP_EPS] after sampling so that
# downstream logarithms stay finite; the clamp probability is negligible.
CLAMP_EPS = 1e-15

# Truncation level used throughout the experiments; 300 terms approximate the
# infinite stick well for the parameter ranges studied here.
DEFAULT_TRUNCATION = 300

# Prefix products below this switch weight construction to log space.
_LOG_SPACE_CUTOFF = 1e-300


@dataclass(frozen=True)
class ModelSpec:
    """Which length-variable model a sequence came from.

    variant is one of "dp", "geometric", "exchangeable_dp"; coupling records
    whether a paired geometric comparator shares the first length variable
    ("coupled") or draws its own ("uncoupled"); it only matters when the
    sequence is compared against a geometric process.
    """

    variant: str
    theta: float | None = None
    a: float | None = None
    b: float | None = None
    beta: float | None = None
    coupling: str = "uncoupled"

    def __post_init__(self):
        if self.variant not in ("dp", "geometric", "exchangeable_dp"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.coupling not in ("coupled", "uncoupled"):
            raise ValueError(f"unknown coupling {self.coupling!r}")
        if self.variant == "dp":
            if self.theta is None or self.theta <= 0:
                raise ValueError("dp model requires theta > 0")
        elif self.variant == "geometric":
            if self.a is None or self.b is None or self.a <= 0 or self.b <= 0:
                raise ValueError("geometric model requires a, b > 0")
        else:
            if self.beta is None or self.beta < 0:
                raise ValueError("exchangeable_dp model requires beta >= 0")
            if self.theta is None or self.theta <= 0:
                raise ValueError("exchangeable_dp model requires theta > 0")

    @classmethod
    def dp(cls, theta: float, coupling: str = "uncoupled") -> "ModelSpec":
        return cls(variant="dp", theta=theta, coupling=coupling)

    @classmethod
    def geometric(cls, a: float, b: float, coupling: str = "uncoupled") -> "ModelSpec":
        return cls(variant="geometric", a=a, b=b, coupling=coupling)

    @classmethod
    def exchangeable_dp(cls, beta: float, theta: float, coupling: str = "uncoupled") -> "ModelSpec":
        return cls(variant="exchangeable_dp", beta=beta, theta=theta, coupling=coupling)

    @property
    def tie_probability(self) -> float:
        """P(v_1 = v_2): 1/(1+beta) for the urn, 1/(theta+1) for the DP, 1 for geometric."""
        if self.variant == "geometric":
            return 1.0
        if self.variant == "exchangeable_dp":
            return 1.0 / (1.0 + self.beta)
        return 1.0 / (1.0 + self.theta)


@dataclass(frozen=True)
class LengthSequence:
    """Truncated sequence of length variables v_1..v_N, all strictly in (0, 1)."""

    values: np.ndarray
    model: ModelSpec

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("values must be a nonempty 1-d array")
        if np.any(values <= 0.0) or np.any(values >= 1.0):
            raise ValueError("length variables must lie strictly inside (0, 1)")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def truncation(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class WeightSequence:
    """Stick-breaking weights plus the residual mass 1 - sum(weights)."""

    weights: np.ndarray
    residual: float

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64))

    def __len__(self) -> int:
        return self.weights.size


def _clamp_unit(values: np.ndarray) -> np.ndarray:
    return np.clip(values, CLAMP_EPS, 1.0 - CLAMP_EPS)


def _length_values(lengths) -> np.ndarray:
    if isinstance(lengths, LengthSequence):
        return lengths.values
    return np.asarray(lengths, dtype=np.float64)


def weights_from_lengths(lengths) -> WeightSequence:
    """Build w_1 = v_1, w_n = v_n prod_{j<n}(1-v_j) and the residual mass.

    Accepts a LengthSequence or a plain array of values in (0, 1).  The
    running product switches to log space once a prefix product would drop
    below 1e-300, so very sticky sequences still produce finite weights.
    """
    v = _length_values(lengths)
    one_minus = 1.0 - v
    prefix = np.cumprod(one_minus)
    if prefix[-1] >= _LOG_SPACE_CUTOFF:
        shifted = np.concatenate(([1.0], prefix[:-1]))
        weights = v * shifted
        residual = float(prefix[-1])
    else:
        log_prefix = np.cumsum(np.log1p(-v))
        shifted = np.concatenate(([0.0], log_prefix[:-1]))
        weights = np.exp(np.log(v) + shifted)
        residual = float(np.exp(log_prefix[-1]))
    return WeightSequence(weights=weights, residual=residual)


def sample_beta(a: float, b: float, rng: np.random.Generator) -> float:
    """One draw from Be(a, b).

    The a = 1 case uses the exact inverse CDF v = 1 - U^(1/b); the general
    case uses the ratio of two standard gamma draws.  The result is clamped
    to the open unit interval.
    """
    if a <= 0 or b <= 0:
        raise ValueError(f"beta parameters must be positive, got a={a}, b={b}")
    if a == 1.0:
        v = 1.0 - rng.random() ** (1.0 / b)
    else:
        x = rng.standard_gamma(a)
        y = rng.standard_gamma(b)
        v = x / (x + y)
    return float(np.clip(v, CLAMP_EPS, 1.0 - CLAMP_EPS))


def sample_dp_lengths(theta: float, n: int, rng: np.random.Generator) -> LengthSequence:
    """n iid Be(1, theta) length variables."""
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    u = rng.random(n)
    values = _clamp_unit(1.0 - u ** (1.0 / theta))
    return LengthSequence(values=values, model=ModelSpec.dp(theta))


def sample_geometric_lengths(a: float, b: float, n: int, rng: np.random.Generator) -> LengthSequence:
    """A single Be(a, b) draw replicated n times (constant length sequence)."""
    v = sample_beta(a, b, rng)
    return LengthSequence(values=np.full(n, v), model=ModelSpec.geometric(a, b))


def sample_exchangeable_dp_lengths(
    beta: float, theta: float, n: int, rng: np.random.Generator
) -> LengthSequence:
    """n exchangeable length variables driven by a Dirichlet urn.

    v_1 ~ Be(1, theta); thereafter v_{i+1} repeats a uniformly chosen previous
    draw with probability i/(beta+i) and is a fresh Be(1, theta) draw with
    probability beta/(beta+i).  Repeated values are exact copies, so ties can
    be detected by float equality downstream.  beta = 0 yields a constant
    sequence.

    The three uniforms consumed per step (branch, pick, fresh) are drawn as
    one (n, 3) block up front, which keeps the stream layout identical to the
    vectorized Monte Carlo kernel.
    """
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    u = rng.random((n, 3))
    fresh = _clamp_unit(1.0 - u[:, 2] ** (1.0 / theta))
    values = np.empty(n)
    values[0] = fresh[0]
    for i in range(1, n):
        if u[i, 0] < beta / (beta + i):
            values[i] = fresh[i]
        else:
            # min() guards the measure-zero rounding of u*i up to i
            values[i] = values[min(int(u[i, 1] * i), i - 1)]
    return LengthSequence(values=values, model=ModelSpec.exchangeable_dp(beta, theta))


def tail_mass(lengths, k: int) -> float:
    """prod_{j<=k} (1 - v_j), the mass past position k; k = 0 gives 1.

    Almost surely equals the tail sum of the weights beyond k, for iid and
    for exchangeable length variables alike.
    """
    v = _length_values(lengths)
    if k < 0 or k > v.size:
        raise IndexError(f"k must lie in [0, {v.size}], got {k}")
    if k == 0:
        return 1.0
    return float(np.prod(1.0 - v[:k]))
