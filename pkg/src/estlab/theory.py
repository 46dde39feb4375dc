"""First-order mean squared error theory for the estimator family.

All results are design-based under SRSWOR and truncated at the first order
of a Taylor expansion in (p - P, ybar - Ybar).  Writing fpc = (1 - n/N)/n:

* variance of the sample mean:      V(ybar) = fpc * S_y2
* plain ratio estimator (NG):       MSE = fpc * (S_y2 + R1^2 S_phi2 - 2 R1 S_yphi)
* family member with constant R:    MSE = fpc * (R^2 S_phi2 + S_y2 (1 - rho^2))

where R1 = Ybar/P and each member's ratio constant is

    R = Ybar * m1 / (m1 * P + m2).

The two family expressions above are the same identity in two algebraic
outfits: expanding (R + B_phi)^2 S_phi2 - 2 (R + B_phi) S_yphi + S_y2 with
B_phi = S_yphi/S_phi2 collapses the cross terms and leaves
R^2 S_phi2 + S_y2 (1 - rho^2).  Both routes are implemented
(:func:`mse_proposed` and :func:`mse_from_linearization`) and must agree.

Efficiency comparisons come in two equivalent statements: the direct MSE
difference, and a threshold inequality on the squared point-biserial
correlation.  Against the sample mean the two are algebraically identical.
Against the plain ratio estimator the classical threshold form drops a
factor of R1 on its correlation cross term, so the direct difference is
authoritative and any sign disagreement is reported as a flag.

Percent relative efficiency (PRE) is 100 * V(ybar) / MSE; the fpc factor
cancels, so PRE needs neither n nor N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DegeneratePopulationError,
    InvalidSampleSizeError,
    MissingPopulationSizeError,
    UndefinedConstantError,
    UndefinedPreError,
)
from .estimators import FAMILY_FORMS, EstimatorForm, EstimatorId, resolve_form
from .population import PopulationParams, variance_sample_mean

__all__ = [
    "DISPLAY_ORDER",
    "ComparisonResult",
    "EfficiencyReport",
    "MseReport",
    "PreRow",
    "RatioConstant",
    "efficiency_report",
    "efficiency_vs_mean",
    "efficiency_vs_ng",
    "form_ratio_constant",
    "k_yp",
    "linearization_coefficients",
    "mse_from_linearization",
    "mse_naik_gupta",
    "mse_proposed",
    "mse_report",
    "pre_table",
    "pre_vs_mean",
    "rank_pre_rows",
    "ratio_constant",
    "ratio_constants",
]

#: Fixed display order for efficiency tables: the sample mean first, then the
#: plain ratio estimator, then the family members by index.
DISPLAY_ORDER: tuple[str, ...] = ("mean", "ng") + tuple(f"t{i}" for i in range(1, 11))

_FAMILY_IDS: tuple[EstimatorId, ...] = tuple(
    e for e in EstimatorId if e is not EstimatorId.NG
)


@dataclass(frozen=True)
class RatioConstant:
    """A family member together with its resolved ratio constant."""

    estimator: EstimatorId
    value: float


@dataclass(frozen=True)
class MseReport:
    """First-order MSE of one estimator at sample size n, with its PRE."""

    estimator: EstimatorId
    mse: float
    n: int
    pre_vs_mean: float


@dataclass(frozen=True)
class ComparisonResult:
    """Outcome of one efficiency comparison.

    ``margin`` is the MSE difference (baseline minus estimator) with the
    common fpc factor normalised to 1; nonnegative means the estimator wins.
    ``threshold_margin`` is the slack in the equivalent correlation-threshold
    inequality, and ``threshold_agrees`` records whether the two statements
    agree in sign.
    """

    beats: bool
    margin: float
    threshold_margin: float
    threshold_agrees: bool


@dataclass(frozen=True)
class EfficiencyReport:
    """Both efficiency comparisons for one family member.

    ``ng_threshold_agrees`` is False when the classical correlation-threshold
    statement of the comparison against the plain ratio estimator disagrees
    in sign with the direct MSE difference (the difference is authoritative).
    """

    estimator: EstimatorId
    beats_mean: bool
    beats_ng: bool
    margin_vs_mean: float
    margin_vs_ng: float
    k_yp: float
    ng_threshold_agrees: bool


@dataclass(frozen=True)
class PreRow:
    """One row of a percent-relative-efficiency table."""

    estimator: str
    pre: float


def _fpc(params: PopulationParams, n: int) -> float:
    """(1 - n/N)/n, validating n against a known population size."""
    if params.N is None:
        raise MissingPopulationSizeError("mean squared error needs the population size N")
    if not 1 <= n <= params.N:
        raise InvalidSampleSizeError(f"sample size must satisfy 1 <= n <= {params.N}, got {n}")
    return (1.0 - n / params.N) / n


def form_ratio_constant(params: PopulationParams, form: EstimatorForm) -> float:
    """Ratio constant R = Ybar * m1 / (m1 * P + m2) for an arbitrary form."""
    m1, m2 = resolve_form(form, params)
    denominator = m1 * params.P + m2
    if denominator == 0.0:
        raise UndefinedConstantError(f"zero denominator: m1*P + m2 = 0 for form ({m1}, {m2})")
    return params.Ybar * m1 / denominator


def ratio_constant(estimator: EstimatorId, params: PopulationParams) -> float:
    """Ratio constant of a named family member (t1..t10)."""
    if estimator is EstimatorId.NG:
        raise ValueError("the plain ratio estimator shares t1's constant Ybar/P; ask for t1")
    return form_ratio_constant(params, FAMILY_FORMS[estimator])


def ratio_constants(params: PopulationParams) -> tuple[RatioConstant, ...]:
    """Resolved ratio constants for every family member, in index order."""
    return tuple(RatioConstant(e, ratio_constant(e, params)) for e in _FAMILY_IDS)


def k_yp(params: PopulationParams) -> float:
    """Scaled correlation rho_pb * C_y / C_p used in the NG comparison."""
    return params.rho_pb * params.C_y / params.C_p


def _unit_mse_ng(params: PopulationParams) -> float:
    r1 = params.Ybar / params.P
    return params.S_y2 + r1 * r1 * params.S_phi2 - 2.0 * r1 * params.S_yphi


def _unit_mse_family(params: PopulationParams, ratio: float) -> float:
    return ratio * ratio * params.S_phi2 + params.S_y2 * (1.0 - params.rho_pb**2)


def mse_naik_gupta(params: PopulationParams, n: int) -> float:
    """First-order MSE of the plain ratio estimator ybar * P / p."""
    return _fpc(params, n) * _unit_mse_ng(params)


def mse_proposed(params: PopulationParams, n: int, estimator: EstimatorId) -> float:
    """First-order MSE of a family member: fpc * (R^2 S_phi2 + S_y2 (1 - rho^2))."""
    if estimator is EstimatorId.NG:
        raise ValueError("use mse_naik_gupta for the plain ratio estimator")
    return _fpc(params, n) * _unit_mse_family(params, ratio_constant(estimator, params))


def mse_from_linearization(params: PopulationParams, n: int, form: EstimatorForm) -> float:
    """First-order MSE via the expanded Taylor route.

    Computes fpc * (S_y2 + G^2 S_phi2 - 2 G S_yphi) with G = R + B_phi.
    Algebraically identical to :func:`mse_proposed` on the matching form.
    """
    if params.S_phi2 == 0.0:
        raise DegeneratePopulationError("attribute variance is zero; B_phi undefined")
    g = form_ratio_constant(params, form) + params.B_phi
    return _fpc(params, n) * (
        params.S_y2 + g * g * params.S_phi2 - 2.0 * g * params.S_yphi
    )


def linearization_coefficients(
    params: PopulationParams, form: EstimatorForm
) -> tuple[float, float]:
    """First-order expansion coefficients of the family estimator.

    With b_phi held at its population value B_phi,

        t - Ybar  ~=  coef_ybar * (ybar - Ybar) + coef_p * (p - P)

    where coef_ybar = 1 and coef_p = -(B_phi + R).  Returned as
    (coef_p, coef_ybar).
    """
    ratio = form_ratio_constant(params, form)
    return -(params.B_phi + ratio), 1.0


def pre_vs_mean(
    params: PopulationParams, estimator: EstimatorId, n: int | None = None
) -> float:
    """Percent relative efficiency 100 * V(ybar) / MSE(estimator).

    The fpc factor cancels, so the result does not depend on n; passing n
    merely validates it against a known N.
    """
    if n is not None and params.N is not None:
        _fpc(params, n)
    if estimator is EstimatorId.NG:
        unit_mse = _unit_mse_ng(params)
    else:
        unit_mse = _unit_mse_family(params, ratio_constant(estimator, params))
    if unit_mse == 0.0:
        raise UndefinedPreError(f"{estimator.value} has zero mean squared error")
    return 100.0 * params.S_y2 / unit_mse


def efficiency_vs_mean(params: PopulationParams, estimator: EstimatorId) -> ComparisonResult:
    """Does the family member beat the sample mean?

    Evaluates both the direct MSE difference V(ybar) - MSE(t) and the
    equivalent threshold inequality rho^2 > (S_phi2/S_y2) R^2; the two are
    the same expression scaled by S_y2 and must agree in sign.
    """
    if estimator is EstimatorId.NG:
        raise ValueError("the comparison is defined for the family members t1..t10")
    ratio = ratio_constant(estimator, params)
    margin = params.S_y2 - _unit_mse_family(params, ratio)
    threshold_margin = params.rho_pb**2 - (params.S_phi2 / params.S_y2) * ratio * ratio
    return ComparisonResult(
        beats=margin >= 0.0,
        margin=margin,
        threshold_margin=threshold_margin,
        threshold_agrees=(margin >= 0.0) == (threshold_margin >= 0.0),
    )


def efficiency_vs_ng(params: PopulationParams, estimator: EstimatorId) -> ComparisonResult:
    """Does the family member beat the plain ratio estimator?

    Ground truth is the direct difference MSE(NG) - MSE(t).  The classical
    threshold statement rho^2 >= (S_phi2/S_y2)(R^2 - R1^2 + 2 R1 K_yp) is
    also evaluated; it drops a factor of R1 on the cross term, so a sign
    disagreement is possible and is reported via ``threshold_agrees`` rather
    than altering the predicate.
    """
    if estimator is EstimatorId.NG:
        raise ValueError("the comparison is defined for the family members t1..t10")
    ratio = ratio_constant(estimator, params)
    r1 = params.Ybar / params.P
    margin = _unit_mse_ng(params) - _unit_mse_family(params, ratio)
    threshold_margin = params.rho_pb**2 - (params.S_phi2 / params.S_y2) * (
        ratio * ratio - r1 * r1 + 2.0 * r1 * k_yp(params)
    )
    return ComparisonResult(
        beats=margin >= 0.0,
        margin=margin,
        threshold_margin=threshold_margin,
        threshold_agrees=(margin >= 0.0) == (threshold_margin >= 0.0),
    )


def efficiency_report(params: PopulationParams, estimator: EstimatorId) -> EfficiencyReport:
    """Bundle both comparisons for one family member."""
    vs_mean = efficiency_vs_mean(params, estimator)
    vs_ng = efficiency_vs_ng(params, estimator)
    return EfficiencyReport(
        estimator=estimator,
        beats_mean=vs_mean.beats,
        beats_ng=vs_ng.beats,
        margin_vs_mean=vs_mean.margin,
        margin_vs_ng=vs_ng.margin,
        k_yp=k_yp(params),
        ng_threshold_agrees=vs_ng.threshold_agrees,
    )


def mse_report(params: PopulationParams, n: int, estimator: EstimatorId) -> MseReport:
    """MSE and PRE of one estimator at sample size n."""
    if estimator is EstimatorId.NG:
        mse = mse_naik_gupta(params, n)
    else:
        mse = mse_proposed(params, n, estimator)
    return MseReport(estimator=estimator, mse=mse, n=n, pre_vs_mean=pre_vs_mean(params, estimator, n))


def pre_table(params: PopulationParams, n: int | None = None) -> tuple[PreRow, ...]:
    """PRE of every estimator against the sample mean, in fixed display order.

    The first row is the sample mean itself (100 by definition), then the
    plain ratio estimator, then t1..t10.  Rows are never sorted here; see
    :func:`rank_pre_rows` for the ranking view.
    """
    rows = [PreRow("mean", 100.0), PreRow("ng", pre_vs_mean(params, EstimatorId.NG, n))]
    rows.extend(PreRow(e.value, pre_vs_mean(params, e, n)) for e in _FAMILY_IDS)
    return tuple(rows)


def rank_pre_rows(rows: tuple[PreRow, ...]) -> tuple[PreRow, ...]:
    """Sort PRE rows descending; ties break toward the earlier display position."""
    order = {label: i for i, label in enumerate(DISPLAY_ORDER)}
    return tuple(sorted(rows, key=lambda r: (-r.pre, order.get(r.estimator, math.inf))))
