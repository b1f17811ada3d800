"""Set partitions, the Dirichlet-process EPPF, and the partition-sum route to
the Dirichlet-driven divergence expectation.

A partition of {1..n} is kept in canonical form: blocks ordered by least
element, so 1 always sits in the first block.  The EPPF of a Dirichlet
process with concentration beta assigns

    p_beta(pi) = beta^k / beta^(n) * prod_j (|A_j| - 1)!

to a partition with block sizes |A_1|..|A_k|, where beta^(n) is the rising
factorial.

The partition functional F_theta(pi) is the expectation of the attenuated
binary divergence of the distinct length values under the coupled
convention (the geometric comparator equals the first distinct value):
it vanishes whenever n shares a block with 1, and otherwise factorizes as

    F_theta(pi) = prod_{middle blocks} theta/(theta + |A_j|)
                  * E[(1-V)^{|A_1|} (1-V')^{|A_m|-1} d(V'||V)],

with V, V' iid Be(1, theta) and A_m the block containing n.  Since both
F_theta and the EPPF depend only on (|A_1|, |A_m|, multiset of the other
sizes), the level sums collapse from Bell-number enumeration to composition
counting; full enumeration remains available for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .closed_form import expected_weighted_pair_divergence
from .special import log_rising_factorial

__all__ = [
    "MAX_PARTITION_N",
    "SetPartition",
    "PartitionSumResult",
    "bell_number",
    "enumerate_partitions",
    "eppf_dp",
    "f_theta",
    "dtheta_partition_sum",
]

# Bell(13) is ~27.6M; anything larger is a deliberate caller decision, not a
# default this module will walk into.
MAX_PARTITION_N = 13


@dataclass(frozen=True)
class SetPartition:
    """Blocks of {1..n} in least-element order; 1 is always in blocks[0]."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.blocks:
            raise ValueError("partition needs at least one block")
        seen: set[int] = set()
        for block in self.blocks:
            if not block:
                raise ValueError("blocks must be nonempty")
            if seen & set(block):
                raise ValueError("blocks must be disjoint")
            seen.update(block)
        n = max(seen)
        if seen != set(range(1, n + 1)):
            raise ValueError("blocks must cover {1..n} exactly")
        canonical = tuple(tuple(sorted(b)) for b in self.blocks)
        if list(canonical) != sorted(canonical, key=lambda b: b[0]):
            raise ValueError("blocks must be ordered by least element")
        object.__setattr__(self, "blocks", canonical)

    @classmethod
    def from_blocks(cls, blocks) -> "SetPartition":
        """Build a canonical partition from blocks in any order."""
        ordered = sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0] if b else 0)
        return cls(blocks=tuple(ordered))

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def block_index_of(self, element: int) -> int:
        for i, block in enumerate(self.blocks):
            if element in block:
                return i
        raise ValueError(f"{element} not in partition")


def bell_number(n: int) -> int:
    """Number of set partitions of an n-element set (Bell triangle)."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[0]


def _check_partition_size(n: int) -> None:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n > MAX_PARTITION_N:
        raise ValueError(
            f"n={n} exceeds the enumeration guard ({MAX_PARTITION_N}); "
            f"Bell({n}) partitions would be generated"
        )


def enumerate_partitions(n: int) -> Iterator[SetPartition]:
    """Yield every partition of {1..n} exactly once, in canonical form.

    Iterates restricted growth strings: position i may use any block label
    up to one past the maximum label seen so far, which is precisely the
    least-element canonical ordering.
    """
    _check_partition_size(n)
    codes = np.zeros(n, dtype=np.int64)
    maxes = np.zeros(n + 1, dtype=np.int64)
    while True:
        blocks: list[list[int]] = [[] for _ in range(int(codes.max()) + 1)]
        for i, c in enumerate(codes):
            blocks[c].append(i + 1)
        yield SetPartition(blocks=tuple(tuple(b) for b in blocks))
        i = n - 1
        while i > 0 and codes[i] > maxes[i]:
            i -= 1
        if i == 0:
            return
        codes[i] += 1
        maxes[i + 1] = max(maxes[i], codes[i])
        for j in range(i + 1, n):
            codes[j] = 0
            maxes[j + 1] = maxes[j]


def eppf_dp(partition: SetPartition, beta: float) -> float:
    """Dirichlet-process EPPF of a partition, computed in log space."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    return _eppf_from_sizes(partition.sizes, beta)


def _eppf_from_sizes(sizes, beta: float) -> float:
    n = sum(sizes)
    log_p = len(sizes) * math.log(beta) - log_rising_factorial(beta, n)
    log_p += sum(math.lgamma(s) for s in sizes)
    return math.exp(log_p)


def f_theta(partition: SetPartition, theta: float) -> float:
    """Partition functional F_theta under the coupled convention v = v*_1.

    Zero exactly when n lies in the block of 1 (in particular for the
    single-block partition); bounded by (1/theta) (theta/(theta+1))^k.
    """
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    n = partition.n
    m = partition.block_index_of(n)
    if m == 0:
        return 0.0
    sizes = partition.sizes
    middle = [size for i, size in enumerate(sizes) if i not in (0, m)]
    return _f_theta_from_profile(theta, sizes[0], sizes[m], middle)


def _f_theta_from_profile(theta: float, s: int, t: int, middle_sizes) -> float:
    value = expected_weighted_pair_divergence(theta, s, t - 1)
    for size in middle_sizes:
        value *= theta / (theta + size)
    return value


def _integer_partitions(total: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Nonincreasing integer partitions of `total`."""
    if max_part is None:
        max_part = total
    if total == 0:
        yield ()
        return
    for part in range(min(total, max_part), 0, -1):
        for rest in _integer_partitions(total - part, part):
            yield (part,) + rest


def _set_partition_count(r: int, sizes) -> int:
    """Ways to split r labeled elements into unlabeled blocks of the given sizes."""
    count = math.factorial(r)
    multiplicity: dict[int, int] = {}
    for s in sizes:
        count //= math.factorial(s)
        multiplicity[s] = multiplicity.get(s, 0) + 1
    for c in multiplicity.values():
        count //= math.factorial(c)
    return count


def _level_sum(n: int, theta: float, beta: float) -> float:
    """sum over partitions of {1..n} of F_theta(pi) p_beta(pi).

    Grouped by (size of block of 1, size of block of n, multiset of the
    remaining sizes); partitions with n in the block of 1 contribute zero
    and are skipped.
    """
    if n < 2:
        return 0.0
    total = 0.0
    for s in range(1, n):
        choose_s = math.comb(n - 2, s - 1)
        for t in range(1, n - s + 1):
            choose_t = math.comb(n - s - 1, t - 1)
            rest = n - s - t
            pair_base = expected_weighted_pair_divergence(theta, s, t - 1)
            for middle in _integer_partitions(rest):
                count = choose_s * choose_t * _set_partition_count(rest, middle)
                f_value = pair_base
                for size in middle:
                    f_value *= theta / (theta + size)
                p_value = _eppf_from_sizes((s, t) + middle, beta)
                total += count * f_value * p_value
    return total


class PartitionSumResult(NamedTuple):
    value: float
    last_level: float
    levels: np.ndarray


def dtheta_partition_sum(theta: float, beta: float, n_max: int) -> PartitionSumResult:
    """Truncated partition-sum evaluation of the divergence expectation,
    sum_{n<=n_max} sum_pi F_theta(pi) p_beta(pi).

    Levels are nonnegative, so the truncated value is a lower bound; the
    magnitude of the last level is returned as a truncation diagnostic,
    along with the whole per-level profile.
    """
    if theta <= 0 or beta <= 0:
        raise ValueError(f"theta and beta must be positive, got theta={theta}, beta={beta}")
    _check_partition_size(n_max)
    levels = np.array([_level_sum(n, theta, beta) for n in range(1, n_max + 1)])
    return PartitionSumResult(
        value=float(levels.sum()), last_level=float(levels[-1]), levels=levels
    )
