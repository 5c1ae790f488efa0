"""Check computed or simulated error rates against the bounds.

Exact results are compared with a float slack of ``EXACT_SLACK``. Monte Carlo
results get three half-widths of slack: for ``alpha + beta`` and the mean gap
that is ``3 * (alpha_half_width + beta_half_width)``, for ``alpha_max`` three
half-widths of the worst row.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .bounds import BinaryBoundReport, MaryBoundReport, gap_bound
from .errors import ValidationError
from .testing import ConfusionMatrix, ErrorRates

__all__ = ["BinaryValidity", "MaryValidity", "verify_binary", "verify_mary", "verify_bounds"]

EXACT_SLACK = 1e-12
MC_WIDTHS = 3.0


@dataclass(frozen=True)
class BinaryValidity:
    error_sum: float
    mean_gap: float
    subgauss: float
    pinsker: float
    gap_limit: float
    slack: float
    subgauss_ok: bool
    pinsker_ok: bool
    gap_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.subgauss_ok and self.pinsker_ok and self.gap_ok


@dataclass(frozen=True)
class MaryValidity:
    alpha_max: float
    slack: float
    bounds: dict = field(default_factory=dict)
    ok: dict = field(default_factory=dict)

    @property
    def all_ok(self) -> bool:
        return all(self.ok.values())


def verify_binary(rates: ErrorRates, report: BinaryBoundReport) -> BinaryValidity:
    if abs(rates.alpha - report.alpha) > 1e-15:
        raise ValidationError(
            f"bound report was built for alpha={report.alpha!r}, rates have {rates.alpha!r}"
        )
    if rates.mode == "exact":
        slack = EXACT_SLACK
    else:
        slack = MC_WIDTHS * (rates.alpha_half_width + rates.beta_half_width)
    error_sum = rates.alpha + rates.beta
    mean_gap = abs(rates.alpha - (1.0 - rates.beta))
    gap_limit = gap_bound(report.sigma_used, report.kl_10, report.n)
    return BinaryValidity(
        error_sum=error_sum,
        mean_gap=mean_gap,
        subgauss=report.subgauss,
        pinsker=report.pinsker,
        gap_limit=gap_limit,
        slack=slack,
        subgauss_ok=error_sum >= report.subgauss - slack,
        pinsker_ok=error_sum >= report.pinsker - slack,
        gap_ok=mean_gap <= gap_limit + slack,
    )


def verify_mary(cm: ConfusionMatrix, report: MaryBoundReport) -> MaryValidity:
    if cm.M != report.M:
        raise ValidationError(f"confusion matrix is {cm.M}x{cm.M} but the report has M={report.M}")
    alpha_max = cm.alpha_max
    slack = EXACT_SLACK if cm.mode == "exact" else MC_WIDTHS * float(cm.alpha_half_widths.max())
    bounds = {
        "theorem3": report.theorem3_max,
        "mean_sqrt": report.mean_sqrt,
        "uniform_delta": report.uniform_delta,
    }
    if report.fano_applicable:
        bounds["fano"] = report.fano
    ok = {name: alpha_max >= value - slack for name, value in bounds.items()}
    return MaryValidity(alpha_max, slack, bounds, ok)


def verify_bounds(
    result: Union[ErrorRates, ConfusionMatrix],
    report: Union[BinaryBoundReport, MaryBoundReport],
) -> Union[BinaryValidity, MaryValidity]:
    """Dispatch on the (result, report) pair; mismatched kinds are rejected."""
    if isinstance(result, ErrorRates) and isinstance(report, BinaryBoundReport):
        return verify_binary(result, report)
    if isinstance(result, ConfusionMatrix) and isinstance(report, MaryBoundReport):
        return verify_mary(result, report)
    raise ValidationError(
        f"cannot verify {type(result).__name__} against {type(report).__name__}"
    )
