"""Likelihood-based tests and their error rates.

The binary test rejects H0 when the average log-likelihood ratio

    T(x) = (1/n) sum_i [ln p1(x_i) - ln p0(x_i)]

strictly exceeds the threshold ``c``; equivalently when the likelihood ratio
exceeds ``exp(c n)``. The M-ary test picks the hypothesis of largest
likelihood.

Conventions fixed here (they are observable for discrete laws):

* ``T == c`` accepts H0. Values within ``TIE_RTOL`` (relative) of ``c`` count
  as equal, so that rounding in ``ln p1 - ln p0`` cannot flip exact ties.
* ``T = +inf`` (H0 assigns zero mass) always rejects, ``-inf`` never does.
* M-ary likelihood ties, again up to ``TIE_RTOL``, go to the lowest index and
  are counted.

For finite alphabets every statistic is computed from the category counts, so
exact enumeration and simulation see bit-identical values for the same counts.

Monte Carlo runs are cut into fixed chunks of ``CHUNK`` trials; chunk ``j`` of
stream ``h`` (the index of the generating hypothesis) draws from
``make_rng(seed, h, j)``. Tallies are integer sums, so results do not depend on
how many workers process the chunks.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .distributions import (
    Distribution,
    Gaussian,
    Sample,
    draw,
    is_finite,
    log_density,
    log_probs,
    make_rng,
)
from .errors import (
    EnumerationSizeError,
    FamilyMismatchError,
    SupportError,
    UnsupportedError,
    ValidationError,
)

__all__ = [
    "BinaryTestConfig",
    "ErrorRates",
    "EmpiricalCounts",
    "ConfusionMatrix",
    "Decision",
    "TIE_RTOL",
    "MAX_STATES",
    "CHUNK",
    "half_width",
    "empirical_counts",
    "enumerate_counts",
    "count_states",
    "lrt_statistic",
    "phi",
    "exact_binary",
    "simulate_binary",
    "classify_mary",
    "confusion_matrix",
]

TIE_RTOL = 1e-12
MAX_STATES = 2_000_000
CHUNK = 4096
Z95 = 1.96


@dataclass(frozen=True)
class BinaryTestConfig:
    c: float = 0.0
    n: int = 1

    def __post_init__(self):
        c = float(self.c)
        if math.isnan(c) or c < 0:
            raise ValidationError(f"threshold c must be >= 0, got {self.c!r}")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "n", int(self.n))

    @property
    def c_prime(self) -> float:
        """Equivalent threshold on the likelihood ratio, ``exp(c n)``."""
        try:
            return math.exp(self.c * self.n)
        except OverflowError:
            return math.inf


@dataclass(frozen=True)
class ErrorRates:
    """Type I / type II error rates.

    Half-widths are 95% normal-approximation intervals
    ``1.96 sqrt(p(1-p)/trials)``, floored at ``1.96/trials`` when the estimate
    is 0 or 1; they are 0 for exact results. ``half_width`` is the larger of
    the two.
    """

    alpha: float
    beta: float
    mode: str
    trials: int = 0
    alpha_half_width: float = 0.0
    beta_half_width: float = 0.0

    @property
    def half_width(self) -> float:
        return max(self.alpha_half_width, self.beta_half_width)


@dataclass(frozen=True)
class EmpiricalCounts:
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValidationError("counts must be nonnegative")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    def frequencies(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.n


@dataclass(frozen=True)
class ConfusionMatrix:
    """``matrix[i, j]`` estimates the probability of deciding ``j`` when data
    come from hypothesis ``i``.

    ``tie_rate[i]`` is the probability (exact) or fraction of trials (Monte
    Carlo) in which row ``i`` hit a likelihood tie; ``tie_count`` holds the raw
    Monte Carlo counts and is None in exact mode.
    """

    matrix: np.ndarray
    tie_rate: np.ndarray
    mode: str
    trials: int = 0
    tie_count: Optional[np.ndarray] = None

    @property
    def M(self) -> int:
        return self.matrix.shape[0]

    @property
    def alpha_vector(self) -> np.ndarray:
        return 1.0 - np.diag(self.matrix)

    @property
    def alpha_max(self) -> float:
        return float(self.alpha_vector.max())

    @property
    def alpha_half_widths(self) -> np.ndarray:
        if self.mode == "exact":
            return np.zeros(self.M)
        return np.array([half_width(a, self.trials) for a in self.alpha_vector])


@dataclass(frozen=True)
class Decision:
    index: int
    tie: bool


def half_width(p_hat: float, trials: int) -> float:
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    if p_hat <= 0.0 or p_hat >= 1.0:
        return Z95 / trials
    return Z95 * math.sqrt(p_hat * (1.0 - p_hat) / trials)


# -- helpers -----------------------------------------------------------------


def _check_pair(p0: Distribution, p1: Distribution):
    if is_finite(p0) and is_finite(p1):
        if p0.size != p1.size:
            raise FamilyMismatchError(f"alphabet sizes differ: {p0.size} vs {p1.size}")
    elif not (isinstance(p0, Gaussian) and isinstance(p1, Gaussian)):
        raise FamilyMismatchError(
            f"cannot test {type(p0).__name__} against {type(p1).__name__}"
        )


def _check_family(hypotheses: Sequence[Distribution]):
    if len(hypotheses) < 2:
        raise ValidationError("need at least two hypotheses")
    for h in hypotheses[1:]:
        _check_pair(hypotheses[0], h)


def _check_trials(trials):
    if isinstance(trials, bool) or int(trials) != trials or trials < 1:
        raise ValidationError(f"trials must be a positive integer, got {trials!r}")
    return int(trials)


def _counts_matrix(x: np.ndarray, K: int) -> np.ndarray:
    """Rows of category indices -> rows of counts."""
    x = np.atleast_2d(x)
    counts = np.empty((x.shape[0], K), dtype=np.int64)
    for k in range(K):
        counts[:, k] = np.count_nonzero(x == k, axis=1)
    return counts


def _weighted(counts: np.ndarray, logs: np.ndarray) -> np.ndarray:
    # sum_k counts_k * logs_k, skipping empty cells so 0 * -inf contributes 0
    with np.errstate(invalid="ignore"):
        terms = np.where(counts > 0, counts * logs, 0.0)
    return terms.sum(axis=-1)


def _stat_from_counts(counts, lp0, lp1, n):
    with np.errstate(invalid="ignore"):
        llr = lp1 - lp0  # nan where both are -inf; such cells have zero mass
    return _weighted(counts, llr) / n


def _rejects(stat, c):
    # strict: T > c; ties within TIE_RTOL accept, nan (zero-mass state) accepts
    return stat > c + TIE_RTOL * max(1.0, abs(c))


def _decide(ll: np.ndarray):
    """Row-wise argmax with lowest-index tie-breaking. Returns (index, tie)."""
    top = ll.max(axis=1)
    with np.errstate(invalid="ignore"):
        slack = TIE_RTOL * np.maximum(1.0, np.abs(top))
        near = ll >= (top - np.where(np.isfinite(slack), slack, 0.0))[:, None]
    return np.argmax(near, axis=1), near.sum(axis=1) > 1


def _multinomial_logpmf(counts: np.ndarray, lp: np.ndarray) -> np.ndarray:
    n = counts.sum(axis=1)
    return gammaln(n + 1.0) - gammaln(counts + 1.0).sum(axis=1) + _weighted(counts, lp)


# -- enumeration -------------------------------------------------------------


def count_states(K: int, n: int) -> int:
    """Number of count vectors of length ``K`` summing to ``n``."""
    return math.comb(n + K - 1, K - 1)


def enumerate_counts(K: int, n: int, max_states: int = MAX_STATES) -> np.ndarray:
    """All count vectors (rows) with ``K`` nonnegative entries summing to ``n``,
    by stars and bars."""
    total = count_states(K, n)
    if total > max_states:
        raise EnumerationSizeError(
            f"C({n + K - 1}, {K - 1}) = {total} count vectors exceeds the cap of {max_states}"
        )
    if K == 1:
        return np.array([[n]], dtype=np.int64)
    bars = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n + K - 1), K - 1)),
        dtype=np.int64,
        count=total * (K - 1),
    ).reshape(total, K - 1)
    edges = np.hstack(
        [np.full((total, 1), -1), bars, np.full((total, 1), n + K - 1)]
    )
    return np.diff(edges, axis=1) - 1


def empirical_counts(x: Sample, K: int) -> EmpiricalCounts:
    values = np.asarray(x.values)
    if np.any((values < 0) | (values >= K)) or np.any(values != np.floor(values)):
        raise ValidationError(f"observations must be category indices in 0..{K - 1}")
    return EmpiricalCounts(tuple(_counts_matrix(values.astype(np.int64), K)[0]))


# -- binary test -------------------------------------------------------------


def lrt_statistic(x: Sample, p0: Distribution, p1: Distribution) -> float:
    """Average log-likelihood ratio ln(p1/p0) per observation.

    May be +inf or -inf when one hypothesis assigns zero mass to the data.
    """
    _check_pair(p0, p1)
    if isinstance(p0, Gaussian):
        v = np.asarray(x.values, dtype=float)
        return float(np.sum(log_density(p1, v) - log_density(p0, v)) / x.n)
    lp0, lp1 = log_probs(p0), log_probs(p1)
    counts = np.asarray(empirical_counts(x, p0.size).counts)
    dead = (counts > 0) & np.isneginf(lp0) & np.isneginf(lp1)
    if np.any(dead):
        raise SupportError(
            f"categories {np.flatnonzero(dead).tolist()} have zero mass under both hypotheses"
        )
    stat = float(_stat_from_counts(counts, lp0, lp1, x.n))
    if math.isnan(stat):
        raise SupportError("the sample has zero likelihood under both hypotheses")
    return stat


def phi(x: Sample, p0: Distribution, p1: Distribution, cfg: BinaryTestConfig) -> int:
    """1 (reject H0) iff the statistic strictly exceeds ``cfg.c``."""
    if x.n != cfg.n:
        raise ValidationError(f"sample has n={x.n} but the test is configured for n={cfg.n}")
    return int(_rejects(lrt_statistic(x, p0, p1), cfg.c))


def exact_binary(
    p0: Distribution,
    p1: Distribution,
    cfg: BinaryTestConfig,
    max_states: int = MAX_STATES,
) -> ErrorRates:
    """Exact (alpha, beta) by summing multinomial probabilities over all count
    vectors, which are sufficient for the test."""
    _check_pair(p0, p1)
    if not is_finite(p0):
        raise UnsupportedError("exact enumeration needs finite alphabets")
    counts = enumerate_counts(p0.size, cfg.n, max_states)
    lp0, lp1 = log_probs(p0), log_probs(p1)
    reject = _rejects(_stat_from_counts(counts, lp0, lp1, cfg.n), cfg.c)
    w0 = np.exp(_multinomial_logpmf(counts, lp0))
    w1 = np.exp(_multinomial_logpmf(counts, lp1))
    return ErrorRates(_mass(w0, reject), _mass(w1, ~reject), "exact")


def _mass(w, mask):
    # sum over the lighter side so empty sets give exactly 0 or 1
    inside, outside = math.fsum(w[mask]), math.fsum(w[~mask])
    return min(1.0, inside) if inside <= outside else max(0.0, 1.0 - outside)


def _binary_chunk(p0, p1, cfg, seed, trials, chunk):
    m = min(CHUNK, trials - chunk * CHUNK)
    tallies = []
    for stream, d in enumerate((p0, p1)):
        x = draw(d, make_rng(seed, stream, chunk), (m, cfg.n))
        if isinstance(d, Gaussian):
            stat = (log_density(p1, x) - log_density(p0, x)).sum(axis=1) / cfg.n
        else:
            stat = _stat_from_counts(
                _counts_matrix(x, p0.size), log_probs(p0), log_probs(p1), cfg.n
            )
        tallies.append(int(np.count_nonzero(_rejects(stat, cfg.c))))
    # (rejections under H0, acceptances under H1)
    return tallies[0], m - tallies[1]


def _run_chunks(fn, n_chunks, jobs):
    if jobs is None or jobs <= 1 or n_chunks == 1:
        return [fn(j) for j in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=int(jobs)) as pool:
        return list(pool.map(fn, range(n_chunks)))


def simulate_binary(
    p0: Distribution,
    p1: Distribution,
    cfg: BinaryTestConfig,
    trials: int,
    seed: int,
    jobs: int = 1,
) -> ErrorRates:
    """Monte Carlo (alpha, beta): ``trials`` samples of size ``n`` under each
    hypothesis."""
    _check_pair(p0, p1)
    trials = _check_trials(trials)
    make_rng(seed)  # validates the seed up front
    n_chunks = -(-trials // CHUNK)
    parts = _run_chunks(
        lambda j: _binary_chunk(p0, p1, cfg, seed, trials, j), n_chunks, jobs
    )
    false_rej = sum(p[0] for p in parts)
    false_acc = sum(p[1] for p in parts)
    alpha, beta = false_rej / trials, false_acc / trials
    return ErrorRates(
        alpha,
        beta,
        "monte-carlo",
        trials,
        half_width(alpha, trials),
        half_width(beta, trials),
    )


# -- M-ary test --------------------------------------------------------------


def _loglik_rows(x: np.ndarray, hypotheses) -> np.ndarray:
    """(rows of observations) -> (rows, M) log-likelihoods."""
    if isinstance(hypotheses[0], Gaussian):
        return np.stack([log_density(h, x).sum(axis=1) for h in hypotheses], axis=1)
    counts = _counts_matrix(x, hypotheses[0].size)
    return np.stack([_weighted(counts, log_probs(h)) for h in hypotheses], axis=1)


def classify_mary(x: Sample, hypotheses: Sequence[Distribution]) -> Decision:
    """Maximum-likelihood decision among ``hypotheses``."""
    _check_family(hypotheses)
    values = np.asarray(x.values)
    if is_finite(hypotheses[0]):
        empirical_counts(x, hypotheses[0].size)  # range check
        values = values.astype(np.int64)
    ll = _loglik_rows(values[None, :], hypotheses)
    if np.all(np.isneginf(ll)):
        raise SupportError("the sample has zero likelihood under every hypothesis")
    index, tie = _decide(ll)
    return Decision(int(index[0]), bool(tie[0]))


def _mary_chunk(hypotheses, n, seed, trials, chunk):
    M = len(hypotheses)
    m = min(CHUNK, trials - chunk * CHUNK)
    tally = np.zeros((M, M), dtype=np.int64)
    ties = np.zeros(M, dtype=np.int64)
    for i, h in enumerate(hypotheses):
        x = draw(h, make_rng(seed, i, chunk), (m, n))
        index, tie = _decide(_loglik_rows(x, hypotheses))
        tally[i] = np.bincount(index, minlength=M)
        ties[i] = np.count_nonzero(tie)
    return tally, ties


def confusion_matrix(
    hypotheses: Sequence[Distribution],
    n: int,
    trials: Optional[int] = None,
    seed: int = 0,
    jobs: int = 1,
    max_states: int = MAX_STATES,
) -> ConfusionMatrix:
    """Decision probabilities of the maximum-likelihood classifier.

    Exact enumeration over count vectors when ``trials`` is None (finite
    alphabets only), Monte Carlo otherwise.
    """
    _check_family(hypotheses)
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    M = len(hypotheses)

    if trials is None:
        if not is_finite(hypotheses[0]):
            raise UnsupportedError("exact enumeration needs finite alphabets")
        counts = enumerate_counts(hypotheses[0].size, n, max_states)
        lps = [log_probs(h) for h in hypotheses]
        ll = np.stack([_weighted(counts, lp) for lp in lps], axis=1)
        index, tie = _decide(ll)
        matrix = np.zeros((M, M))
        tie_rate = np.zeros(M)
        for i, lp in enumerate(lps):
            w = np.exp(_multinomial_logpmf(counts, lp))
            matrix[i] = np.bincount(index, weights=w, minlength=M)
            tie_rate[i] = math.fsum(w[tie])
        return ConfusionMatrix(matrix, tie_rate, "exact")

    trials = _check_trials(trials)
    make_rng(seed)
    n_chunks = -(-trials // CHUNK)
    parts = _run_chunks(
        lambda j: _mary_chunk(hypotheses, n, seed, trials, j), n_chunks, jobs
    )
    tally = sum(p[0] for p in parts)
    ties = sum(p[1] for p in parts)
    return ConfusionMatrix(tally / trials, ties / trials, "monte-carlo", trials, ties)
