"""Sub-Gaussian norm of a {0, 1}-valued test indicator with mean ``alpha``.

For an indicator with ``P(1) = alpha`` the centered log-MGF is

    f(s) = ln(alpha e^{s(1-alpha)} + (1-alpha) e^{-s alpha})

and the norm is the smallest ``sigma`` with ``f(s) <= sigma^2 s^2 / 2`` for all
real ``s``. For ``0 < alpha < 0.5`` the optimum touches the parabola at a single
``s* > 0`` where ``f = sigma^2 s^2/2`` and ``f' = sigma^2 s``. Eliminating
``sigma`` leaves the scalar residual ``r(s) = f(s) - s f'(s)/2``, which is
negative on ``(0, s*)`` and positive beyond, so ``s*`` is found by bisection and
``sigma = sqrt(f'(s*)/s*)``. ``alpha > 0.5`` is mapped to ``1 - alpha`` (the
problem is invariant under ``alpha -> 1-alpha, s -> -s``).

Numerics: with ``d = 0.5 - alpha`` and ``t = tanh(s/2)`` we evaluate, for
``s >= 0``,

    f  = d s + ln cosh(s/2) + ln(1 - 2 d t)

with ``1 - 2 d t`` formed as ``(1 - t) + 2 alpha t`` (a sum of nonnegative
terms), and ``f' = alpha beta (1 - e^{-s}) / (alpha + beta e^{-s})`` with
``beta = 1 - alpha``. This keeps ``f`` accurate to a few ulps for large ``s``
(no overflow) and near ``alpha = 0.5``, where ``s*`` shrinks towards 0 and the
textbook ``s(1-alpha) + ln(alpha + (1-alpha)e^{-s})`` form loses the sign of
``r``. Small ``alpha`` or ``beta`` switch to the shifted log1p/expm1 forms, and
``|s| < 1e-2`` uses the cumulant series, where ``r`` is summed without the
cancelling ``kappa_2`` terms. Negative ``s`` is mirrored with ``alpha`` and
``beta`` swapped, never recomputed as ``1 - alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SolverError, ValidationError

__all__ = [
    "SubGaussFit",
    "DEFAULT_TOL",
    "BRACKET_CAP",
    "TINY_ALPHA",
    "log_mgf_centered",
    "log_mgf_derivative",
    "tangency_residual",
    "solve_norm",
    "norm_table",
    "subgaussian_norm",
]

DEFAULT_TOL = 1e-10
BRACKET_CAP = 1e6
TINY_ALPHA = 1e-12
_MAX_BISECT = 2000
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class SubGaussFit:
    """Solved norm for one ``alpha``.

    ``s_star`` is the positive tangency point of the reduced problem
    ``min(alpha, 1-alpha)``; for ``alpha > 0.5`` the actual touch point is at
    ``-s_star``. It is 0 for ``alpha`` in {0, 0.5, 1}.
    """

    alpha: float
    sigma: float
    s_star: float
    residual: float
    iterations: int


def _check_open_alpha(alpha):
    a = np.asarray(alpha, dtype=float)
    if np.any(~((a > 0) & (a < 1))):
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha!r}")
    return a


def _lncosh_half(s):
    # ln cosh(s/2) for s >= 0
    x = 0.5 * s
    with np.errstate(over="ignore"):
        small = np.log1p(2.0 * np.sinh(0.5 * np.minimum(x, 1.0)) ** 2)
    big = x + np.log1p(np.exp(-2.0 * x)) - _LN2
    return np.where(x < 1.0, small, big)


def _cumulants(alpha, beta):
    # Bernoulli cumulants kappa_2 .. kappa_9, with beta = 1 - alpha
    v = alpha * beta
    skew = beta - alpha
    return (
        v,
        v * skew,
        v * (1.0 - 6.0 * v),
        v * skew * (1.0 - 12.0 * v),
        v * (1.0 - 30.0 * v + 120.0 * v * v),
        v * skew * (1.0 - 60.0 * v + 360.0 * v * v),
        v * (1.0 - 126.0 * v + 1680.0 * v * v - 5040.0 * v**3),
        v * skew * (1.0 - 252.0 * v + 5040.0 * v * v - 20160.0 * v**3),
    )


_SERIES_MAX = 1e-2
_TOP = 9


def _series(alpha, beta, s):
    # truncated after s^9; only used for s < _SERIES_MAX
    k = _cumulants(alpha, beta)
    f = np.zeros_like(s)
    fp = np.zeros_like(s)
    for order, kappa in zip(range(_TOP, 1, -1), k[::-1]):
        f = (f + kappa / math.factorial(order)) * s
        fp = (fp + kappa / math.factorial(order - 1)) * s
    return f * s, fp


def _branch(alpha, beta, s):
    """(f, f') for s >= 0 with beta = 1 - alpha supplied exactly."""
    alpha, beta, s = np.broadcast_arrays(alpha, beta, s)
    e = np.exp(-s)
    fp = alpha * beta * -np.expm1(-s) / (alpha + beta * e)

    d = 0.5 * (beta - alpha)
    t = np.tanh(0.5 * s)
    den = 2.0 * e / (1.0 + e) + 2.0 * alpha * t
    u = 2.0 * d * t
    with np.errstate(divide="ignore", invalid="ignore"):
        log_den = np.where(np.abs(u) <= 0.5, np.log1p(-np.minimum(u, 0.5)), np.log(den))
    f = d * s + _lncosh_half(s) + log_den

    # When alpha or beta is small f is O(min(alpha, beta)) while the terms
    # above are O(s); the shifted forms keep full relative precision there.
    small_a = alpha < 0.25
    if np.any(small_a):
        sc = np.minimum(s, 700.0)
        f_small = np.where(
            s <= 700.0,
            -alpha * sc + np.log1p(alpha * np.expm1(sc)),
            s * beta + np.log(alpha + beta * e),
        )
        f = np.where(small_a, f_small, f)
    small_b = beta < 0.25
    if np.any(small_b):
        f = np.where(small_b, s * beta + np.log1p(beta * np.expm1(-s)), f)

    tiny_s = s < _SERIES_MAX
    if np.any(tiny_s):
        f_ser, fp_ser = _series(alpha, beta, s)
        f = np.where(tiny_s, f_ser, f)
        fp = np.where(tiny_s, fp_ser, fp)
    return f, fp


def _residual(alpha, beta, s):
    """f - s f'/2 for s >= 0. Near 0 the kappa_2 terms cancel exactly, so the
    series is summed directly without them."""
    alpha, beta, s = np.broadcast_arrays(alpha, beta, s)
    f, fp = _branch(alpha, beta, s)
    r = f - 0.5 * s * fp
    tiny_s = s < _SERIES_MAX
    if np.any(tiny_s):
        k = _cumulants(alpha, beta)
        acc = np.zeros_like(s)
        for order, kappa in zip(range(_TOP, 2, -1), k[:0:-1]):
            acc = (acc - (order - 2) * kappa / (2.0 * math.factorial(order))) * s
        r = np.where(tiny_s, acc * s * s, r)
    return r


def _mirror(alpha, s):
    # f(s; alpha) = f(-s; 1 - alpha): evaluate every point on s >= 0
    alpha, s = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(s, float))
    neg = s < 0
    beta = 1.0 - alpha
    return np.where(neg, beta, alpha), np.where(neg, alpha, beta), np.abs(s), neg


def _f_fp(alpha, s):
    a, b, s_abs, neg = _mirror(alpha, s)
    f, fp = _branch(a, b, s_abs)
    return f, np.where(neg, -fp, fp)


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def log_mgf_centered(alpha, s):
    """f(s) = ln E exp(s (Phi - alpha)) for Phi ~ Bernoulli(alpha)."""
    a = _check_open_alpha(alpha)
    return _scalar_or_array(_f_fp(a, s)[0])


def log_mgf_derivative(alpha, s):
    """f'(s) = -alpha + alpha e^s / (1 - alpha + alpha e^s)."""
    a = _check_open_alpha(alpha)
    return _scalar_or_array(_f_fp(a, s)[1])


def tangency_residual(alpha, s):
    """r(s) = f(s) - s f'(s) / 2; zero exactly where both tangency equations
    hold with ``sigma^2 = f'(s)/s``."""
    a, b, s_abs, _ = _mirror(_check_open_alpha(alpha), s)
    return _scalar_or_array(_residual(a, b, s_abs))


def _bisect_tangency(a, b, tol):
    """Vectorized bisection for 0 < a < 0.5, b = 1 - a.

    Returns (s*, sigma, |r(s*)|, iterations).
    """

    def resid(s, idx):
        return _residual(a[idx], b[idx], s)

    all_idx = np.arange(a.size)
    hi = np.ones_like(a)
    r_hi = resid(hi, all_idx)
    while np.any(r_hi <= 0):
        grow = r_hi <= 0
        hi[grow] *= 2.0
        if np.any(hi > BRACKET_CAP):
            bad = a[hi > BRACKET_CAP]
            raise SolverError(
                f"no sign change of the tangency residual below s={BRACKET_CAP:g} "
                f"for alpha={bad[0]!r}"
            )
        r_hi[grow] = resid(hi[grow], all_idx[grow])

    # r(0) = 0 and r < 0 on (0, s*), so 0 serves as the negative end.
    lo = np.zeros_like(a)
    iterations = np.zeros(a.size, dtype=int)
    active = np.ones(a.size, dtype=bool)
    eps = np.finfo(float).eps
    for _ in range(_MAX_BISECT):
        if not active.any():
            break
        idx = all_idx[active]
        mid = 0.5 * (lo[idx] + hi[idx])
        neg = resid(mid, idx) < 0
        lo[idx] = np.where(neg, mid, lo[idx])
        hi[idx] = np.where(neg, hi[idx], mid)
        iterations[idx] += 1
        active[idx] = (hi[idx] - lo[idx]) > 4.0 * eps * hi[idx]
    else:
        raise SolverError("bisection did not converge")

    s = 0.5 * (lo + hi)
    _, fp = _branch(a, b, s)
    residual = np.abs(_residual(a, b, s))
    if np.any(residual > tol):
        worst = int(np.argmax(residual))
        raise SolverError(
            f"tangency residual {residual[worst]:.3e} exceeds tol={tol:g} at alpha={float(a[worst])!r}"
        )
    return s, np.sqrt(fp / s), residual, iterations


def _solve_many(alphas, tol):
    a = np.asarray(alphas, dtype=float)
    if not (tol > 0):
        raise ValidationError(f"tol must be positive, got {tol!r}")
    if np.any(~((a >= 0) & (a <= 1))):
        raise ValidationError(f"alpha must lie in [0, 1], got {alphas!r}")
    a = a.ravel()
    comp = 1.0 - a
    red = np.minimum(a, comp)
    red_comp = np.maximum(a, comp)
    sigma = np.zeros_like(a)
    s_star = np.zeros_like(a)
    residual = np.zeros_like(a)
    iterations = np.zeros(a.size, dtype=int)

    sigma[red == 0.5] = 0.5
    # red < TINY_ALPHA: a.s.-constant indicator, norm 0
    inner = (red >= TINY_ALPHA) & (red < 0.5)
    if inner.any():
        s, sg, res, it = _bisect_tangency(red[inner], red_comp[inner], tol)
        s_star[inner], sigma[inner], residual[inner], iterations[inner] = s, sg, res, it
    return a, sigma, s_star, residual, iterations


def solve_norm(alpha: float, tol: float = DEFAULT_TOL) -> SubGaussFit:
    """Sub-Gaussian norm of an indicator whose mean under the null is ``alpha``.

    >>> solve_norm(0.5).sigma
    0.5
    """
    if np.ndim(alpha) != 0:
        raise ValidationError("solve_norm takes a scalar alpha; use norm_table for arrays")
    a, sigma, s, res, it = _solve_many([alpha], tol)
    return SubGaussFit(float(a[0]), float(sigma[0]), float(s[0]), float(res[0]), int(it[0]))


def norm_table(alphas, tol: float = DEFAULT_TOL) -> list[SubGaussFit]:
    """Element-wise :func:`solve_norm`, solved in one vectorized pass."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    for i, a in enumerate(alphas):
        if not 0.0 <= a <= 1.0:
            raise ValidationError(f"alphas[{i}]={a!r} lies outside [0, 1]")
    try:
        a, sigma, s, res, it = _solve_many(alphas, tol)
    except SolverError as exc:
        raise SolverError(f"norm_table: {exc}") from exc
    return [
        SubGaussFit(float(a[i]), float(sigma[i]), float(s[i]), float(res[i]), int(it[i]))
        for i in range(a.size)
    ]


def subgaussian_norm(alpha, tol: float = DEFAULT_TOL):
    """Just the norm values, for scalars or arrays of ``alpha``."""
    shape = np.shape(alpha)
    _, sigma, _, _, _ = _solve_many(alpha, tol)
    return float(sigma[0]) if shape == () else sigma.reshape(shape)
