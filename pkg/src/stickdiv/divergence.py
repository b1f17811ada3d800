"""Pathwise divergence kernels between truncated stick-breaking measures.

Because both measures share atom locations by construction, every divergence
here reduces to a computation on the weight sequences.  Two equivalent
routes are provided for the forward direction:

* ``kl_direct``: the definition, sum of w_n log(w_n / w'_n) over the
  truncated support (residual mass excluded; it stays visible on the
  inputs' ``residual`` fields), and
* ``kl_forward_pathwise``: the rearranged form
  sum_n [prod_{j<n}(1-v_j)] d(v_n || v) in terms of length variables,

whose agreement on the same path is limited only by the geometric tail of
the truncation.  The reversed direction uses
sum_n (1-v)^(n-1) d(v || v_n).

All sums are compensated (Kahan) since they mix hundreds of terms of very
different magnitude.  The ``*_paths`` variants evaluate whole (paths, N)
matrices at once and return one value per row; each row's arithmetic is
identical to the 1-d call, term for term.
"""

from __future__ import annotations

import numpy as np

from .stickbreak import LengthSequence, WeightSequence

__all__ = [
    "binary_divergence",
    "kl_direct",
    "kl_forward_pathwise",
    "kl_reverse_pathwise",
    "kl_forward_paths",
    "kl_reverse_paths",
    "total_variation",
]


def _kahan_sum_lastaxis(terms: np.ndarray) -> np.ndarray:
    """Compensated sum over the last axis, in index order."""
    shape = terms.shape[:-1]
    total = np.zeros(shape)
    comp = np.zeros(shape)
    for i in range(terms.shape[-1]):
        y = terms[..., i] - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def _check_open_unit(x, name: str) -> None:
    arr = np.asarray(x)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError(f"{name} must lie strictly inside (0, 1)")


def binary_divergence(p, q):
    """d(p||q) = p log(p/q) + (1-p) log((1-p)/(1-q)), the Bernoulli KL.

    Nonnegative, and exactly zero when p == q.  Endpoints are rejected;
    upstream clamping guarantees they never occur on sampled paths.
    """
    _check_open_unit(p, "p")
    _check_open_unit(q, "q")
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    out = p * np.log(p / q) + (1.0 - p) * np.log((1.0 - p) / (1.0 - q))
    return float(out) if out.ndim == 0 else out


def kl_direct(w: WeightSequence, w_prime: WeightSequence) -> float:
    """sum_{n<=N} w_n log(w_n / w'_n) with the 0 log 0 := 0 convention.

    The residual masses are excluded from the sum; they remain available as
    ``w.residual`` and ``w_prime.residual`` so the truncation error of the
    infinite-sum identity stays observable.  Returns +inf if some w'_n
    underflowed to zero while w_n > 0.
    """
    wn = w.weights
    qn = w_prime.weights
    if wn.shape != qn.shape:
        raise ValueError("weight sequences must share the truncation level")
    if np.any((qn == 0.0) & (wn > 0.0)):
        return float("inf")
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(wn > 0.0, wn * (np.log(wn) - np.log(qn)), 0.0)
    return float(_kahan_sum_lastaxis(terms))


def kl_forward_paths(values: np.ndarray, v) -> np.ndarray:
    """Forward pathwise KL for one path (1-d) or a stack of paths (2-d).

    ``values`` holds length variables along the last axis; ``v`` is the
    geometric comparator length, broadcast against the leading axes.
    Exact ties contribute exactly zero, so coupled paths (v = v_1) have a
    vanishing first summand.
    """
    values = np.asarray(values, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    prefix = np.cumprod(1.0 - values[..., :-1], axis=-1)
    pad = np.ones(values.shape[:-1] + (1,))
    prefix = np.concatenate([pad, prefix], axis=-1)
    d = binary_divergence(values, v[..., None] if v.ndim < values.ndim else v)
    return _kahan_sum_lastaxis(prefix * d)


def kl_reverse_paths(v, values: np.ndarray) -> np.ndarray:
    """Reversed pathwise KL, sum_n (1-v)^(n-1) d(v || v_n), row-wise."""
    values = np.asarray(values, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    vb = v[..., None] if v.ndim < values.ndim else v
    n = values.shape[-1]
    ratios = np.broadcast_to(1.0 - vb, values.shape[:-1] + (n - 1,)) if n > 1 else None
    pad = np.ones(values.shape[:-1] + (1,))
    if n > 1:
        geo = np.concatenate([pad, np.cumprod(ratios, axis=-1)], axis=-1)
    else:
        geo = pad
    d = binary_divergence(vb, values)
    return _kahan_sum_lastaxis(geo * d)


def kl_forward_pathwise(lengths: LengthSequence, v: float) -> float:
    """Truncated sum_{n<=N} [prod_{j<n}(1-v_j)] d(v_n || v) for one path."""
    _check_open_unit(v, "v")
    return float(kl_forward_paths(lengths.values, v))


def kl_reverse_pathwise(v: float, lengths: LengthSequence) -> float:
    """Truncated sum_{n<=N} (1-v)^(n-1) d(v || v_n) for one path."""
    _check_open_unit(v, "v")
    return float(kl_reverse_paths(v, lengths.values))


def total_variation(w: WeightSequence, w_prime: WeightSequence) -> float:
    """Total variation between truncated measures, residuals included.

    0.5 sum |w_n - w'_n| + 0.5 |residual - residual'|; always in [0, 1], and
    bounded by sqrt(KL/2) pathwise (Pinsker).
    """
    if w.weights.shape != w_prime.weights.shape:
        raise ValueError("weight sequences must share the truncation level")
    diff = float(_kahan_sum_lastaxis(np.abs(w.weights - w_prime.weights)))
    return 0.5 * diff + 0.5 * abs(w.residual - w_prime.residual)
