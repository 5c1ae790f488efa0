"""Candidate hypothesis laws: categorical, Bernoulli and univariate Gaussian.

All logarithms are natural (nats). Random draws use numpy's ``Philox``
counter-based generator (Philox-4x64-10) keyed through ``SeedSequence``, so a
given ``(seed, stream)`` produces the same bits on every platform. Finite laws
are sampled by inverse CDF on ``Generator.random`` doubles; Gaussians use
``Generator.standard_normal`` (ziggurat) scaled and shifted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import FamilyMismatchError, ValidationError

__all__ = [
    "Categorical",
    "Bernoulli",
    "Gaussian",
    "Distribution",
    "Sample",
    "is_finite",
    "probs_of",
    "log_probs",
    "log_density",
    "make_rng",
    "draw",
    "sample",
    "kl",
    "from_dict",
    "to_dict",
    "load",
]

PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Categorical:
    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if len(probs) < 1:
            raise ValidationError("categorical law needs at least one category")
        if any(not math.isfinite(p) or p < 0 for p in probs):
            raise ValidationError(f"categorical probabilities must be finite and >= 0, got {probs}")
        if abs(math.fsum(probs) - 1.0) > PROB_SUM_TOL:
            raise ValidationError(f"categorical probabilities sum to {math.fsum(probs)!r}, not 1")
        object.__setattr__(self, "probs", probs)

    @property
    def size(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class Bernoulli:
    """Two-point law on {0, 1} with ``P(1) = p``."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not 0.0 <= p <= 1.0:
            raise ValidationError(f"Bernoulli p must lie in [0, 1], got {p!r}")
        object.__setattr__(self, "p", p)

    @property
    def probs(self) -> tuple[float, float]:
        return (1.0 - self.p, self.p)

    @property
    def size(self) -> int:
        return 2


@dataclass(frozen=True)
class Gaussian:
    mean: float
    std: float

    def __post_init__(self):
        mean, std = float(self.mean), float(self.std)
        if not math.isfinite(mean):
            raise ValidationError(f"Gaussian mean must be finite, got {mean!r}")
        if not (math.isfinite(std) and std > 0):
            raise ValidationError(f"Gaussian std must be positive and finite, got {std!r}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)


Distribution = Union[Categorical, Bernoulli, Gaussian]


@dataclass(frozen=True)
class Sample:
    """``n`` i.i.d. observations. Values are category indices for finite laws,
    reals for Gaussians. The array is made read-only on construction."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values)
        if values.ndim != 1 or values.size < 1:
            raise ValidationError("a sample is a non-empty 1-d array of observations")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return int(self.values.size)


def is_finite(d: Distribution) -> bool:
    return isinstance(d, (Categorical, Bernoulli))


def probs_of(d: Distribution) -> np.ndarray:
    if not is_finite(d):
        raise FamilyMismatchError(f"{type(d).__name__} has no probability vector")
    return np.asarray(d.probs, dtype=float)


def log_probs(d: Distribution) -> np.ndarray:
    """Per-category log-probabilities, ``-inf`` on zero-mass cells."""
    with np.errstate(divide="ignore"):
        return np.log(probs_of(d))


def log_density(d: Distribution, x):
    """ln p(x) for a scalar or array of observations.

    Finite laws return ``-inf`` for zero-mass categories and for indices outside
    ``0..K-1``.
    """
    if isinstance(d, Gaussian):
        z = (np.asarray(x, dtype=float) - d.mean) / d.std
        out = -0.5 * z * z - math.log(d.std) - 0.5 * math.log(2 * math.pi)
        return float(out) if np.ndim(out) == 0 else out
    lp = log_probs(d)
    xi = np.asarray(x)
    if not np.issubdtype(xi.dtype, np.integer):
        if np.any(xi != np.floor(xi)):
            raise ValidationError("categorical observations must be integer indices")
        xi = xi.astype(np.int64)
    inside = (xi >= 0) & (xi < lp.size)
    out = np.where(inside, lp[np.clip(xi, 0, lp.size - 1)], -np.inf)
    return float(out) if np.ndim(out) == 0 else out


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Philox generator for ``seed`` on the (optional) sub-stream ``stream``.

    Distinct ``stream`` tuples give statistically independent generators; this
    is how Monte Carlo chunks get their own deterministic randomness.
    """
    if isinstance(seed, bool) or int(seed) != seed or seed < 0:
        raise ValidationError(f"seed must be a nonnegative integer, got {seed!r}")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


def draw(d: Distribution, rng: np.random.Generator, shape) -> np.ndarray:
    if isinstance(d, Gaussian):
        return d.mean + d.std * rng.standard_normal(shape)
    cdf = np.cumsum(probs_of(d))
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, rng.random(shape), side="right")
    return np.minimum(idx, cdf.size - 1).astype(np.int64)


def sample(d: Distribution, seed: int, n: int) -> Sample:
    if int(n) != n or n < 1:
        raise ValidationError(f"sample size must be a positive integer, got {n!r}")
    return Sample(draw(d, make_rng(seed), int(n)))


def _check_same_family(p: Distribution, q: Distribution):
    if is_finite(p) and is_finite(q):
        if p.size != q.size:
            raise FamilyMismatchError(f"alphabet sizes differ: {p.size} vs {q.size}")
    elif not (isinstance(p, Gaussian) and isinstance(q, Gaussian)):
        raise FamilyMismatchError(
            f"cannot compare {type(p).__name__} with {type(q).__name__}"
        )


def kl(p: Distribution, q: Distribution) -> float:
    """Exact D_KL(p || q) in nats; ``inf`` when p is not absolutely continuous
    with respect to q."""
    _check_same_family(p, q)
    if isinstance(p, Gaussian):
        return (
            math.log(q.std / p.std)
            + (p.std**2 + (p.mean - q.mean) ** 2) / (2 * q.std**2)
            - 0.5
        )
    pp, qq = probs_of(p), probs_of(q)
    on = pp > 0
    if np.any(qq[on] == 0):
        return math.inf
    # Clamp rounding noise; Gibbs guarantees >= 0.
    return max(0.0, math.fsum(pp[on] * np.log(pp[on] / qq[on])))


def from_dict(doc: dict) -> Distribution:
    """Parse ``{"type": "bernoulli", "p": ...}``, ``{"type": "categorical",
    "probs": [...]}`` or ``{"type": "gaussian", "mean": ..., "std": ...}``."""
    if not isinstance(doc, dict) or "type" not in doc:
        raise ValidationError("distribution spec must be a JSON object with a 'type' key")
    kind = str(doc["type"]).lower()
    fields = {k: v for k, v in doc.items() if k != "type"}
    expected = {"bernoulli": {"p"}, "categorical": {"probs"}, "gaussian": {"mean", "std"}}
    if kind not in expected:
        raise ValidationError(f"unknown distribution type {doc['type']!r}")
    if set(fields) != expected[kind]:
        raise ValidationError(
            f"{kind} spec needs exactly the keys {sorted(expected[kind])}, got {sorted(fields)}"
        )
    try:
        if kind == "bernoulli":
            return Bernoulli(fields["p"])
        if kind == "categorical":
            return Categorical(tuple(fields["probs"]))
        return Gaussian(fields["mean"], fields["std"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed {kind} spec: {exc}") from exc


def to_dict(d: Distribution) -> dict:
    if isinstance(d, Bernoulli):
        return {"type": "bernoulli", "p": d.p}
    if isinstance(d, Categorical):
        return {"type": "categorical", "probs": list(d.probs)}
    return {"type": "gaussian", "mean": d.mean, "std": d.std}


def load(path) -> Distribution:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read distribution file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc
    return from_dict(doc)
