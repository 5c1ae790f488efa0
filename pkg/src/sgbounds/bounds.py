"""Closed-form lower bounds on testing errors.

Binary testing (``n`` i.i.d. draws, ``kl_10 = D(P1 || P0)``):

* Pinsker:      alpha + beta >= 1 - sqrt(n kl_10 / 2)
* sub-Gaussian: alpha + beta >= 1 - sigma(alpha) sqrt(2 n kl_10)

where ``sigma(alpha)`` is the norm from :mod:`sgbounds.subgauss`. Because
``sigma <= 0.5`` with equality only at ``alpha = 0.5`` the second bound is never
weaker. Exchanging the hypotheses gives the same bound with ``sigma(beta)`` and
``kl_01 = D(P0 || P1)``, which constrains ``beta`` only implicitly.

M-ary testing with the maximum-likelihood classifier lower-bounds the worst
per-hypothesis error ``alpha_max``; the uniform-``delta`` version is compared
against Fano's inequality by :func:`dominance_map`.

Bounds are returned raw, so they can be negative (vacuous). Clamped values live
in separately named fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ValidationError
from .subgauss import solve_norm, subgaussian_norm

__all__ = [
    "BinaryBoundReport",
    "MaryBoundReport",
    "DominanceRow",
    "pinsker_binary",
    "gap_bound",
    "subgauss_binary",
    "subgauss_binary_symmetric",
    "uniform_delta_bound",
    "fano_bound",
    "mary_bounds",
    "dominance_map",
]

TIE_TOL = 1e-12


@dataclass(frozen=True)
class BinaryBoundReport:
    alpha: float
    n: int
    kl_10: float
    kl_01: Optional[float]
    pinsker: float
    subgauss: float
    beta_floor: float
    sigma_used: float


@dataclass(frozen=True)
class MaryBoundReport:
    """Entry ``(j, i)`` of ``kl_matrix`` is D(P_j || P_i). ``theorem3[j]`` is the
    bound with reference hypothesis ``j``; ``sigmas`` are the per-hypothesis
    norms used there (0.5 unless ``alphas`` were supplied). ``fano`` is None
    when M = 2."""

    M: int
    n: int
    kl_matrix: np.ndarray
    alphas: Optional[np.ndarray]
    sigmas: np.ndarray
    theorem3: np.ndarray
    theorem3_max: float
    mean_sqrt: float
    delta: float
    uniform_delta: float
    fano: Optional[float]

    @property
    def fano_applicable(self) -> bool:
        return self.fano is not None


@dataclass(frozen=True)
class DominanceRow:
    M: int
    n: int
    uniform_delta: float
    fano: Optional[float]
    winner: str


def _check_n(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    return int(n)


def _check_kl(kl, name="kl"):
    kl = float(kl)
    if math.isnan(kl) or kl < 0:
        raise ValidationError(f"{name} must be a nonnegative real or inf, got {kl!r}")
    return kl


def _check_alpha(alpha, name="alpha"):
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {alpha!r}")
    return alpha


def gap_bound(sigma: float, kl: float, n: int = 1) -> float:
    """Largest admissible mean gap ``sigma sqrt(2 n kl)`` of an indicator
    between two laws; ``inf`` when the KL divergence is infinite."""
    n = _check_n(n)
    kl = _check_kl(kl)
    sigma = float(sigma)
    if sigma < 0:
        raise ValidationError(f"sigma must be nonnegative, got {sigma!r}")
    if math.isinf(kl):
        return math.inf
    return sigma * math.sqrt(2.0 * n * kl)


def pinsker_binary(n: int, kl_10: float) -> float:
    n = _check_n(n)
    kl_10 = _check_kl(kl_10, "kl_10")
    return 1.0 - math.sqrt(n * kl_10 / 2.0)


def subgauss_binary(
    alpha: float, n: int, kl_10: float, kl_01: Optional[float] = None
) -> BinaryBoundReport:
    """Sub-Gaussian bound on ``alpha + beta`` at a given type I error.

    ``kl_01`` is carried through for reporting only.
    """
    alpha = _check_alpha(alpha)
    n = _check_n(n)
    kl_10 = _check_kl(kl_10, "kl_10")
    if kl_01 is not None:
        kl_01 = _check_kl(kl_01, "kl_01")
    sigma = solve_norm(alpha).sigma
    subgauss = 1.0 - gap_bound(sigma, kl_10, n)
    beta_floor = min(1.0, max(0.0, subgauss - alpha))
    return BinaryBoundReport(
        alpha=alpha,
        n=n,
        kl_10=kl_10,
        kl_01=kl_01,
        pinsker=pinsker_binary(n, kl_10),
        subgauss=subgauss,
        beta_floor=beta_floor,
        sigma_used=sigma,
    )


def subgauss_binary_symmetric(
    alpha: float, n: int, kl_01: float, resolution: float = 1e-4
) -> float:
    """Smallest ``beta`` on the grid ``0, resolution, ..., 1`` satisfying
    ``alpha + beta >= 1 - sigma(beta) sqrt(2 n kl_01)``.

    The right-hand side is not monotone in ``beta`` (``sigma`` peaks at 0.5),
    so the whole grid is scanned. Note ``sigma(0) = 0``: ``beta = 0`` only
    qualifies when ``alpha = 1``.
    """
    alpha = _check_alpha(alpha)
    n = _check_n(n)
    kl_01 = _check_kl(kl_01, "kl_01")
    resolution = float(resolution)
    if not (resolution > 0 and resolution <= 1):
        raise ValidationError(f"resolution must lie in (0, 1], got {resolution!r}")
    if math.isinf(kl_01):
        return 0.0
    steps = int(math.floor(1.0 / resolution + 1e-9))
    betas = np.arange(steps + 1) * resolution
    if betas[-1] < 1.0 - 1e-12:
        betas = np.append(betas, 1.0)
    betas = np.minimum(betas, 1.0)
    rhs = 1.0 - subgaussian_norm(betas) * math.sqrt(2.0 * n * kl_01)
    # slack absorbs grid rounding such as 0.05 + 0.95 != 1
    ok = alpha + betas >= rhs - 1e-12
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return 1.0
    return float(betas[hits[0]])


def uniform_delta_bound(M: int, n: int, delta: float) -> float:
    """alpha_max >= 1 - 1/M - sqrt(n delta / 2) when every pairwise KL <= delta."""
    M, n, delta = _check_M(M), _check_n(n), _check_kl(delta, "delta")
    return 1.0 - 1.0 / M - math.sqrt(n * delta / 2.0)


def fano_bound(M: int, n: int, delta: float) -> Optional[float]:
    """Fano: alpha_max >= 1 - (n delta + ln 2) / ln(M - 1); None for M = 2."""
    M, n, delta = _check_M(M), _check_n(n), _check_kl(delta, "delta")
    if M == 2:
        return None
    return 1.0 - (n * delta + math.log(2.0)) / math.log(M - 1)


def _check_M(M):
    if isinstance(M, bool) or int(M) != M or M < 2:
        raise ValidationError(f"M must be an integer >= 2, got {M!r}")
    return int(M)


def _sqrt_terms(kl, scale):
    # sqrt(scale * kl) with the 0 * inf cases resolved to inf
    with np.errstate(invalid="ignore"):
        return np.sqrt(scale * kl)


def mary_bounds(
    kl_matrix,
    n: int,
    alphas: Optional[Sequence[float]] = None,
    delta: Optional[float] = None,
) -> MaryBoundReport:
    """All M-ary bounds for a matrix of pairwise divergences.

    With ``alphas`` (per-hypothesis error rates, e.g. from a confusion matrix)
    the reference-``j`` bound uses the exact norms ``sigma(alpha_i)``; without
    them it falls back to the universal 0.5. ``delta`` defaults to the largest
    off-diagonal divergence; a larger value may be supplied, a smaller one is
    rejected.
    """
    n = _check_n(n)
    kl = np.array(kl_matrix, dtype=float)
    if kl.ndim != 2 or kl.shape[0] != kl.shape[1]:
        raise ValidationError(f"kl_matrix must be square, got shape {kl.shape}")
    M = _check_M(kl.shape[0])
    if np.any(np.isnan(kl)) or np.any(kl < 0):
        raise ValidationError("kl_matrix entries must be nonnegative")
    if np.any(np.abs(np.diag(kl)) > 1e-12):
        raise ValidationError("kl_matrix diagonal must be zero")
    np.fill_diagonal(kl, 0.0)
    kl.setflags(write=False)

    if alphas is None:
        alpha_arr = None
        sigmas = np.full(M, 0.5)
    else:
        alpha_arr = np.array(alphas, dtype=float).ravel()
        if alpha_arr.size != M:
            raise ValidationError(f"need {M} alphas, got {alpha_arr.size}")
        if np.any(~((alpha_arr >= 0) & (alpha_arr <= 1))):
            raise ValidationError("alphas must lie in [0, 1]")
        sigmas = np.asarray(subgaussian_norm(alpha_arr), dtype=float)

    roots = _sqrt_terms(kl, 2.0 * n)  # roots[j, i] = sqrt(2 n D(P_j || P_i))
    with np.errstate(invalid="ignore"):
        terms = sigmas[None, :] * roots
    terms[np.isinf(roots)] = np.inf
    theorem3 = 1.0 - 1.0 / M - terms.sum(axis=1) / M
    mean_sqrt = 1.0 - 1.0 / M - float(_sqrt_terms(kl, n / 2.0).sum()) / M**2

    off = kl[~np.eye(M, dtype=bool)]
    max_off = float(off.max())
    if delta is None:
        delta = max_off
    else:
        delta = _check_kl(delta, "delta")
        if delta < max_off:
            raise ValidationError(
                f"delta={delta!r} is below the largest pairwise divergence {max_off!r}"
            )

    return MaryBoundReport(
        M=M,
        n=n,
        kl_matrix=kl,
        alphas=alpha_arr,
        sigmas=sigmas,
        theorem3=theorem3,
        theorem3_max=float(theorem3.max()),
        mean_sqrt=mean_sqrt,
        delta=delta,
        uniform_delta=uniform_delta_bound(M, n, delta),
        fano=fano_bound(M, n, delta),
    )


def dominance_map(M_values, n_values, delta: float) -> list[DominanceRow]:
    """Which of the uniform-delta and Fano bounds is larger at each (M, n).

    ``winner`` is ``"subgauss"``, ``"fano"`` or ``"tie"``; Fano is not defined
    at M = 2, where the sub-Gaussian bound wins by default.
    """
    delta = _check_kl(delta, "delta")
    rows = []
    for M in M_values:
        for n in n_values:
            ours = uniform_delta_bound(M, n, delta)
            fano = fano_bound(M, n, delta)
            if fano is None or ours - fano > TIE_TOL:
                winner = "subgauss"
            elif fano - ours > TIE_TOL:
                winner = "fano"
            else:
                winner = "tie"
            rows.append(DominanceRow(int(M), int(n), ours, fano, winner))
    return rows
