"""Per-sample statistics and the attribute-assisted estimator family.

Given a sample of n units with mean ``ybar`` and attribute proportion ``p``,
and a population with known proportion ``P``, the family estimates the
population mean Ybar by

    t = (ybar + b_phi * (P - p)) / (m1 * p + m2) * (m1 * P + m2)

where ``b_phi`` is the sample regression coefficient of y on the attribute
and the constants ``m1`` (nonzero) and ``m2`` are either plain numbers or
known population constants of the attribute (its kurtosis, its coefficient
of variation, or the point-biserial correlation).  Ten named members
``t1 .. t10`` pin particular choices; the plain ratio estimator
``t_NG = ybar * P / p`` (Naik-Gupta) is the b_phi = 0 special case of t1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSampleError,
    PopulationParseError,
    SampleTooSmallError,
    UndefinedConstantError,
    UndefinedEstimateError,
)
from .population import PopulationParams

__all__ = [
    "FAMILY_FORMS",
    "EstimatorForm",
    "EstimatorId",
    "ParamValue",
    "SampleData",
    "SampleStats",
    "Symbol",
    "adjusted_ratio",
    "compute_sample_stats",
    "estimate_general",
    "estimate_naik_gupta",
    "estimate_named",
    "resolve_form",
    "resolve_param",
]


class EstimatorId(str, enum.Enum):
    """Named members of the estimator family."""

    NG = "ng"
    T1 = "t1"
    T2 = "t2"
    T3 = "t3"
    T4 = "t4"
    T5 = "t5"
    T6 = "t6"
    T7 = "t7"
    T8 = "t8"
    T9 = "t9"
    T10 = "t10"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


class Symbol(str, enum.Enum):
    """Known population constants usable as m1 or m2.

    Each value names the :class:`PopulationParams` field it resolves to.
    """

    BETA2_PHI = "beta2_phi"
    CP = "C_p"
    RHO_PB = "rho_pb"


# A form constant is either a plain number or a named population constant.
ParamValue = float | int | Symbol


@dataclass(frozen=True)
class EstimatorForm:
    """The (m1, m2) pair defining one member of the family; m1 must resolve nonzero."""

    m1: ParamValue
    m2: ParamValue


#: (m1, m2) for the named members t1..t10.  t1 divides by p alone, making it
#: the pure shift-free form; the other nine shift the denominator by known
#: attribute constants.
FAMILY_FORMS: dict[EstimatorId, EstimatorForm] = {
    EstimatorId.T1: EstimatorForm(1.0, 0.0),
    EstimatorId.T2: EstimatorForm(1.0, Symbol.BETA2_PHI),
    EstimatorId.T3: EstimatorForm(1.0, Symbol.CP),
    EstimatorId.T4: EstimatorForm(1.0, Symbol.RHO_PB),
    EstimatorId.T5: EstimatorForm(Symbol.BETA2_PHI, Symbol.CP),
    EstimatorId.T6: EstimatorForm(Symbol.CP, Symbol.BETA2_PHI),
    EstimatorId.T7: EstimatorForm(Symbol.CP, Symbol.RHO_PB),
    EstimatorId.T8: EstimatorForm(Symbol.RHO_PB, Symbol.CP),
    EstimatorId.T9: EstimatorForm(Symbol.BETA2_PHI, Symbol.RHO_PB),
    EstimatorId.T10: EstimatorForm(Symbol.RHO_PB, Symbol.BETA2_PHI),
}


@dataclass(frozen=True)
class SampleData:
    """A drawn sample: paired y values and 0/1 attribute values, n >= 2."""

    y: np.ndarray
    phi: np.ndarray

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=np.float64)
        phi = np.asarray(self.phi)
        if len(y) != len(phi):
            raise PopulationParseError(
                f"length mismatch: {len(y)} study values vs {len(phi)} attribute values"
            )
        if len(y) < 2:
            raise SampleTooSmallError(f"sample needs at least 2 units, got {len(y)}")
        if not np.isin(np.asarray(phi, dtype=np.float64), (0.0, 1.0)).all():
            raise PopulationParseError("sample attribute values must be 0 or 1")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "phi", phi.astype(np.int64))

    @property
    def n(self) -> int:
        return len(self.y)


@dataclass(frozen=True)
class SampleStats:
    """Per-sample quantities feeding every estimator.

    ``s_phi2`` and ``s_yphi`` use divisor n-1 and are centred at the sample
    means.  ``b_phi`` is s_yphi/s_phi2, or None when the sample attribute is
    constant (s_phi2 = 0) and the coefficient is undefined.
    """

    ybar: float
    p: float
    s_phi2: float
    s_yphi: float
    b_phi: float | None


def compute_sample_stats(sample: SampleData) -> SampleStats:
    """Compute divisor-(n-1) sample statistics.

    Raises SampleTooSmallError for n < 2 (also enforced by SampleData).
    """
    n = sample.n
    if n < 2:
        raise SampleTooSmallError(f"sample statistics need n >= 2, got {n}")
    ybar = float(sample.y.mean())
    a = int(sample.phi.sum())
    p = a / n
    dev_phi = sample.phi - p
    s_phi2 = float(dev_phi @ dev_phi) / (n - 1)
    s_yphi = float((sample.y - ybar) @ dev_phi) / (n - 1)
    b_phi = s_yphi / s_phi2 if s_phi2 > 0.0 else None
    return SampleStats(ybar=ybar, p=p, s_phi2=s_phi2, s_yphi=s_yphi, b_phi=b_phi)


def resolve_param(value: ParamValue, params: PopulationParams) -> float:
    """Resolve a form constant to a number, looking symbols up in ``params``."""
    if isinstance(value, Symbol):
        return float(getattr(params, value.value))
    return float(value)


def resolve_form(form: EstimatorForm, params: PopulationParams) -> tuple[float, float]:
    """Resolve (m1, m2) against population constants; m1 must be nonzero."""
    m1 = resolve_param(form.m1, params)
    m2 = resolve_param(form.m2, params)
    if m1 == 0.0:
        raise UndefinedConstantError("m1 resolved to zero; the family requires m1 != 0")
    return m1, m2


def estimate_naik_gupta(stats: SampleStats, P: float) -> float:
    """Plain attribute ratio estimate ybar * P / p.

    Undefined when the sample proportion is zero.
    """
    if stats.p == 0.0:
        raise UndefinedEstimateError("zero sample proportion")
    if stats.p == P:
        return float(stats.ybar)
    # Evaluate as (ybar / p) * P, matching the family path so that t1 with
    # b_phi = 0 reproduces this value bit for bit.
    return (stats.ybar / stats.p) * P


def adjusted_ratio(stats: SampleStats, P: float) -> float:
    """Regression-adjusted ratio (ybar + b_phi*(P - p)) / p.

    This is the intermediate the shift-free member t1 rescales by P.
    """
    if stats.p == 0.0:
        raise UndefinedEstimateError("zero sample proportion")
    b_phi = stats.b_phi
    if b_phi is None:
        if stats.p != P:
            raise DegenerateSampleError("b_phi undefined on this sample (constant attribute)")
        b_phi = 0.0
    return (stats.ybar + b_phi * (P - stats.p)) / stats.p


def estimate_general(
    stats: SampleStats, P: float, form: EstimatorForm, params: PopulationParams
) -> float:
    """Evaluate the family estimator for an arbitrary (m1, m2) form.

    Exact collapse: when p equals P both correction factors are 1 and the
    estimate is ybar, returned without touching b_phi or the denominator.
    """
    if stats.p == P:
        return float(stats.ybar)
    b_phi = stats.b_phi
    if b_phi is None:
        raise DegenerateSampleError("b_phi undefined on this sample (constant attribute)")
    m1, m2 = resolve_form(form, params)
    denominator = m1 * stats.p + m2
    if denominator == 0.0:
        raise UndefinedEstimateError(f"zero denominator: m1*p + m2 = 0 at p = {stats.p}")
    numerator = stats.ybar + b_phi * (P - stats.p)
    return (numerator / denominator) * (m1 * P + m2)


def estimate_named(
    stats: SampleStats, P: float, estimator: EstimatorId, params: PopulationParams
) -> float:
    """Evaluate a named family member (or the plain ratio estimator for NG)."""
    if estimator is EstimatorId.NG:
        return estimate_naik_gupta(stats, P)
    return estimate_general(stats, P, FAMILY_FORMS[estimator], params)
