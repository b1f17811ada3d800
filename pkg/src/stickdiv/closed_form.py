"""Closed-form moments, series identities, and bounds for the random KL
divergence between the Dirichlet and geometric processes.

Uncoupled case (independent comparator v ~ Be(a, b)):

    E[KL]   = (theta+1) E[d(v_1||v)]
    Var[KL] = (theta+2)/2 E[d^2(v_1||v)]
              + (theta+1)(theta+2) E[(1-v_1) d(v_1||v) d(v_2||v)] - E[KL]^2

Coupled case (comparator pinned to the first length, v = v_1):

    E[KL]   = theta/(theta+1)
    Var[KL] = (theta+2)/2 E[(1-v_1)^2 d^2(v_2||v_1)]
              + (theta+1)(theta+2) E[(1-v_1)^2 (1-v_2) d(v_2||v_1) d(v_3||v_1)]
              - (theta/(theta+1))^2

The interior expectations expand, term by term, into products of weighted
log moments of independent beta variables.  Rather than transcribing the
long grouped expansions by hand, a small monomial engine multiplies out the
binary-divergence factors mechanically and evaluates each resulting monomial
through ``beta_weighted_log_moment``; the groupings are then asserted in the
test suite.  Both variances converge to pi^2/6 - 1 ~= 0.6449340668 as theta
grows, the uncoupled one from above and the coupled one from below.

The reversed divergence E[KL(P'||P)] has no elementary closed form; it is
summed as a series with a power-law tail-estimate stopping rule, and is
finite only for a > 1.
"""

from __future__ import annotations

import warnings
from typing import NamedTuple

import numpy as np

from .special import (
    EULER_GAMMA,
    beta_power_moment,
    beta_weighted_log_moment,
    digamma,
)

__all__ = [
    "VARIANCE_LIMIT",
    "DivergentSeriesError",
    "SeriesResult",
    "expected_binary_divergence",
    "expected_kl_uncoupled",
    "variance_kl_uncoupled",
    "expected_kl_coupled",
    "variance_kl_coupled",
    "expected_kl_reversed",
    "expected_weighted_pair_divergence",
    "series_inverse_rising",
    "series_quotient_rising",
    "inverse_rising_partial_sums",
    "quotient_rising_partial_sums",
    "dtheta_upper_bound",
]

# Common limit of both variance curves as theta -> infinity: pi^2/6 - 1,
# reported in the source analysis only as "approximately 0.6449".
VARIANCE_LIMIT = np.pi**2 / 6.0 - 1.0


class DivergentSeriesError(ValueError):
    """Raised when a series is evaluated outside its region of convergence."""


class SeriesResult(NamedTuple):
    value: float
    terms: int
    tail_estimate: float


def _check_positive(**params) -> None:
    for name, value in params.items():
        if value <= 0:
            raise ValueError(f"{name} must be positive, got {value}")


# ---------------------------------------------------------------------------
# Monomial engine: expectations of products of binary divergences with
# polynomial attenuation, over independent beta variables.
#
# A monomial is (coef, {var: (c, d, px, pq)}) representing
#     coef * prod_var  var^c (1-var)^d log(var)^px log(1-var)^pq
# and its expectation factorizes over the independent variables.
# ---------------------------------------------------------------------------

_KIND_BY_LOGS = {
    (1, 0): "logx",
    (0, 1): "log1mx",
    (2, 0): "log2x",
    (0, 2): "log21mx",
    (1, 1): "cross",
}


def _divergence_monomials(x: str, y: str):
    """Monomials of d(x||y) = x log x - x log y + (1-x) log(1-x) - (1-x) log(1-y)."""
    return [
        (1.0, {x: (1, 0, 1, 0)}),
        (-1.0, {x: (1, 0, 0, 0), y: (0, 0, 1, 0)}),
        (1.0, {x: (0, 1, 0, 1)}),
        (-1.0, {x: (0, 1, 0, 0), y: (0, 0, 0, 1)}),
    ]


def _merge_factors(m1: dict, m2: dict) -> dict:
    merged = dict(m1)
    for var, f2 in m2.items():
        f1 = merged.get(var)
        merged[var] = f2 if f1 is None else tuple(f1[i] + f2[i] for i in range(4))
    return merged


def _product(terms1, terms2):
    return [(c1 * c2, _merge_factors(m1, m2)) for c1, m1 in terms1 for c2, m2 in terms2]


def _factor_expectation(a: float, b: float, c: int, d: int, px: int, pq: int) -> float:
    if px == 0 and pq == 0:
        return beta_power_moment(a, b, c, d)
    return beta_weighted_log_moment(a, b, c, d, _KIND_BY_LOGS[(px, pq)])


def _expectation(terms, dists: dict) -> float:
    """Expectation of a monomial sum; dists maps var name -> (a, b)."""
    total = 0.0
    for coef, factors in terms:
        value = coef
        for var, (c, d, px, pq) in factors.items():
            a, b = dists[var]
            value *= _factor_expectation(a, b, c, d, px, pq)
        total += value
    return total


def _second_moment_terms(theta: float, a: float, b: float, coupled: bool):
    """E[d^2] and E[attenuated cross term] entering the variance formulas."""
    if coupled:
        dists = {"v1": (1.0, theta), "v2": (1.0, theta), "v3": (1.0, theta)}
        d_first = _divergence_monomials("v2", "v1")
        d_second = _divergence_monomials("v3", "v1")
        square_prefix = [(1.0, {"v1": (0, 2, 0, 0)})]
        cross_prefix = [(1.0, {"v1": (0, 2, 0, 0), "v2": (0, 1, 0, 0)})]
    else:
        dists = {"v1": (1.0, theta), "v2": (1.0, theta), "v": (a, b)}
        d_first = _divergence_monomials("v1", "v")
        d_second = _divergence_monomials("v2", "v")
        square_prefix = [(1.0, {})]
        cross_prefix = [(1.0, {"v1": (0, 1, 0, 0)})]
    e_square = _expectation(_product(square_prefix, _product(d_first, d_first)), dists)
    e_cross = _expectation(_product(cross_prefix, _product(d_first, d_second)), dists)
    return e_square, e_cross


# ---------------------------------------------------------------------------
# First and second moments
# ---------------------------------------------------------------------------


def expected_binary_divergence(theta: float, a: float, b: float) -> float:
    """E[d(v_1||v)] for v_1 ~ Be(1, theta) and v ~ Be(a, b) independent.

    rho [psi(2) - psi(theta+2) - psi(a) + psi(a+b)]
        + (1-rho) [-rho - psi(b) + psi(a+b)],   rho = 1/(theta+1).
    """
    _check_positive(theta=theta, a=a, b=b)
    rho = 1.0 / (theta + 1.0)
    return rho * (digamma(2.0) - digamma(theta + 2.0) - digamma(a) + digamma(a + b)) + (
        1.0 - rho
    ) * (-rho - digamma(b) + digamma(a + b))


def expected_kl_uncoupled(theta: float, a: float, b: float) -> float:
    """E[KL] for the uncoupled Dirichlet-vs-geometric pair: (theta+1) E[d(v_1||v)].

    Equals 1 exactly whenever (a, b) = (1, theta).
    """
    return (theta + 1.0) * expected_binary_divergence(theta, a, b)


def variance_kl_uncoupled(theta: float, a: float, b: float) -> float:
    """Variance of the uncoupled KL divergence; decreasing in theta for (1, theta)."""
    _check_positive(theta=theta, a=a, b=b)
    e_square, e_cross = _second_moment_terms(theta, a, b, coupled=False)
    mean = expected_kl_uncoupled(theta, a, b)
    return (theta + 2.0) / 2.0 * e_square + (theta + 1.0) * (theta + 2.0) * e_cross - mean**2


def expected_kl_coupled(theta: float) -> float:
    """E[KL] for the coupled pair (v = v_1): exactly theta/(theta+1)."""
    _check_positive(theta=theta)
    return theta / (theta + 1.0)


def variance_kl_coupled(theta: float) -> float:
    """Variance of the coupled KL divergence; increasing in theta."""
    _check_positive(theta=theta)
    e_square, e_cross = _second_moment_terms(theta, None, None, coupled=True)
    mean = expected_kl_coupled(theta)
    return (theta + 2.0) / 2.0 * e_square + (theta + 1.0) * (theta + 2.0) * e_cross - mean**2


def expected_weighted_pair_divergence(theta: float, s: int, t: int) -> float:
    """E[(1-V)^s (1-V')^t d(V'||V)] with V, V' iid Be(1, theta).

    At (s, t) = (1, 0) this equals theta/(theta+1)^2.  It is the innermost
    factor of the partition functional driving the Dirichlet-driven
    divergence expectation.
    """
    _check_positive(theta=theta)
    if s < 0 or t < 0:
        raise ValueError(f"exponents must be nonnegative, got s={s}, t={t}")
    dists = {"v": (1.0, theta), "vp": (1.0, theta)}
    prefix = [(1.0, {"v": (0, s, 0, 0), "vp": (0, t, 0, 0)})]
    return _expectation(_product(prefix, _divergence_monomials("vp", "v")), dists)


# ---------------------------------------------------------------------------
# Reversed divergence series
# ---------------------------------------------------------------------------


def expected_kl_reversed(
    a: float,
    b: float,
    theta: float,
    tol: float = 1e-8,
    max_terms: int = 10_000_000,
    _block: int = 65536,
) -> SeriesResult:
    """E[KL(P'||P)] for the geometric(a, b) against the Dirichlet(theta) process.

    Term n of the series is

        C1(n) [psi(a+1) - psi(a+b+n) + gamma + psi(theta+1)]
          + C2(n) [psi(b+n) - psi(a+b+n) + 1/theta]

    with C1(n) = a Gamma(b+n-1) Gamma(a+b) / (Gamma(b) Gamma(a+b+n)) and
    C2(n) = Gamma(b+n) Gamma(a+b) / (Gamma(b) Gamma(a+b+n)), both folded
    incrementally as ratios so no gamma overflows.  Terms decay like
    n^(-a), so summation stops once the power-law tail estimate
    term_n * n / (a-1) drops below ``tol``.  The expectation is finite only
    for a > 1; a near 1 converges slowly and triggers a RuntimeWarning.
    """
    if a <= 1.0:
        raise DivergentSeriesError(
            f"reversed KL expectation is finite only for a > 1, got a={a}"
        )
    _check_positive(b=b, theta=theta, tol=tol)
    if a < 1.2:
        warnings.warn(
            f"reversed KL series has tail ~ n^(-{a:g}); convergence will be slow",
            RuntimeWarning,
            stacklevel=2,
        )
    k1 = digamma(a + 1.0) + EULER_GAMMA + digamma(theta + 1.0)
    k2 = 1.0 / theta
    carry_c1 = a / (a + b)
    carry_c2 = b / (a + b)
    total = 0.0
    comp = 0.0
    start = 1
    tail = np.inf
    while start <= max_terms:
        length = min(_block, max_terms - start + 1)
        n = start + np.arange(length, dtype=np.float64)
        inner = n[:-1]
        c1 = carry_c1 * np.concatenate(([1.0], np.cumprod((b + inner - 1.0) / (a + b + inner))))
        c2 = carry_c2 * np.concatenate(([1.0], np.cumprod((b + inner) / (a + b + inner))))
        psi_abn = digamma(a + b + n)
        terms = c1 * (k1 - psi_abn) + c2 * (digamma(b + n) - psi_abn + k2)
        y = float(np.sum(terms)) - comp
        t = total + y
        comp = (t - total) - y
        total = t
        last_n = n[-1]
        tail = float(terms[-1]) * last_n / (a - 1.0)
        if tail < tol:
            return SeriesResult(total, int(last_n), tail)
        carry_c1 = c1[-1] * (b + last_n - 1.0) / (a + b + last_n)
        carry_c2 = c2[-1] * (b + last_n) / (a + b + last_n)
        start += length
    warnings.warn(
        f"reversed KL series stopped at {max_terms} terms with tail estimate "
        f"{tail:.3e} above tol={tol:.3e}",
        RuntimeWarning,
        stacklevel=2,
    )
    return SeriesResult(total, max_terms, tail)


# ---------------------------------------------------------------------------
# Rising-factorial series (with exact analytic tails)
# ---------------------------------------------------------------------------


def _inverse_rising_terms(beta: float, n_max: int) -> np.ndarray:
    n = np.arange(1, n_max, dtype=np.float64)
    ratios = n / (beta + n)
    return (1.0 / beta) * np.concatenate(([1.0], np.cumprod(ratios)))


def inverse_rising_partial_sums(beta: float, n_max: int) -> np.ndarray:
    """Partial sums of sum_n (n-1)!/beta^(n), n = 1..n_max (beta > 1)."""
    if beta <= 1.0:
        raise DivergentSeriesError(f"series diverges for beta <= 1, got beta={beta}")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    return np.cumsum(_inverse_rising_terms(beta, n_max))


def series_inverse_rising(beta: float, n_max: int) -> float:
    """sum_{n>=1} (n-1)!/beta^(n) evaluated from n_max terms; equals 1/(beta-1).

    The truncated tail is closed analytically: term_N * N / (beta-1) equals
    the beta-function tail B(N+1, beta-1) exactly, so the returned value
    reaches the limit at machine precision even for modest n_max.  The raw
    partial sums (see ``inverse_rising_partial_sums``) converge like
    n^(1-beta).
    """
    if beta <= 1.0:
        raise DivergentSeriesError(f"series diverges for beta <= 1, got beta={beta}")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    terms = _inverse_rising_terms(beta, n_max)
    tail = float(terms[-1]) * n_max / (beta - 1.0)
    return float(np.sum(terms)) + tail


def _quotient_rising_terms(lam: float, beta: float, n_max: int) -> np.ndarray:
    w = lam * beta
    n = np.arange(1, n_max, dtype=np.float64)
    ratios = (w + n) / (beta + n)
    return lam * np.concatenate(([1.0], np.cumprod(ratios)))


def _check_quotient_domain(lam: float, beta: float) -> None:
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    if (1.0 - lam) * beta <= 1.0:
        raise DivergentSeriesError(
            f"series diverges unless (1-lambda) beta > 1, got {(1.0 - lam) * beta}"
        )


def quotient_rising_partial_sums(lam: float, beta: float, n_max: int) -> np.ndarray:
    """Partial sums of sum_n (lam*beta)^(n) / beta^(n), n = 1..n_max."""
    _check_quotient_domain(lam, beta)
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    return np.cumsum(_quotient_rising_terms(lam, beta, n_max))


def series_quotient_rising(lam: float, beta: float, n_max: int) -> float:
    """sum_{n>=1} (lam*beta)^(n) / beta^(n); equals lam*beta/((1-lam)beta - 1).

    The ratio series telescopes, giving the exact truncated tail
    term_N (lam*beta + N) / ((1-lam) beta - 1), which is added to the
    partial sum; the result is exact up to rounding for any n_max.
    """
    _check_quotient_domain(lam, beta)
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    terms = _quotient_rising_terms(lam, beta, n_max)
    w = lam * beta
    tail = float(terms[-1]) * (w + n_max) / (beta - w - 1.0)
    return float(np.sum(terms)) + tail


def dtheta_upper_bound(theta: float, beta: float) -> float:
    """Upper bound for the Dirichlet-driven divergence expectation,
    theta/(theta+1) * beta^2 / ((beta-1)(beta-(theta+1))), valid for
    beta > theta + 1; tends to theta/(theta+1) as beta grows."""
    _check_positive(theta=theta)
    if beta <= theta + 1.0:
        raise ValueError(f"bound requires beta > theta + 1, got beta={beta}, theta={theta}")
    return theta / (theta + 1.0) * beta**2 / ((beta - 1.0) * (beta - (theta + 1.0)))
