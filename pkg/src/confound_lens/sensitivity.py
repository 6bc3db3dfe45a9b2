"""Robustness-value sensitivity statistics for a treatment coefficient.

Everything is a function of the treatment t-statistic and the residual
degrees of freedom, through the partial Cohen f of the treatment,
f = |t| / sqrt(df).  The robustness value RV solves RV^2 / (1 - RV) = f^2:
it is the share of residual variance (of both treatment and outcome) that an
unmeasured confounder would need to explain away the stated fraction q of the
estimate.  The alpha variant subtracts the critical f for significance at
level alpha (two-sided, df - 1) before applying the same map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Integral

from .distributions import t_quantile
from .errors import DomainError
from .ols import OlsFit


@dataclass(frozen=True)
class TreatmentSummary:
    """The treatment row of a regression summary: t-value and df, with the
    estimate and standard error carried along when known."""

    t_value: float
    df: int
    estimate: float | None = None
    std_error: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.t_value):
            raise DomainError(f"t_value must be finite, got {self.t_value!r}")
        if not isinstance(self.df, Integral) or isinstance(self.df, bool) or self.df < 1:
            raise DomainError(f"df must be a positive integer, got {self.df!r}")
        object.__setattr__(self, "df", int(self.df))
        if self.std_error is not None:
            if self.std_error < 0.0:
                raise DomainError(f"std_error must be >= 0, got {self.std_error}")
            if self.std_error > 0.0 and self.estimate is not None:
                implied = self.estimate / self.std_error
                if abs(implied - self.t_value) > 1e-8 * max(1.0, abs(self.t_value)):
                    raise DomainError(
                        f"t_value {self.t_value} does not match estimate/std_error "
                        f"= {implied}"
                    )

    @classmethod
    def from_ols(cls, fit: OlsFit, treatment: str) -> "TreatmentSummary":
        return cls(
            t_value=fit.t_value(treatment),
            df=fit.df_residual,
            estimate=fit.coefficient(treatment),
            std_error=fit.std_error(treatment),
        )


@dataclass(frozen=True)
class SensitivityReport:
    partial_r2: float
    rv_q: float
    rv_q_alpha: float
    q: float
    alpha: float

    def __post_init__(self):
        for name in ("partial_r2", "rv_q", "rv_q_alpha"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise DomainError(f"{name} must lie in [0, 1), got {v}")
        if self.rv_q_alpha > self.rv_q:
            raise DomainError("rv_q_alpha cannot exceed rv_q")


def _check_q(q: float) -> float:
    q = float(q)
    if not (math.isfinite(q) and q > 0.0):
        raise DomainError(f"q must be > 0, got {q!r}")
    return q


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (math.isfinite(alpha) and 0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return alpha


def _rv_from_f(f: float) -> float:
    # Rationalized form of (sqrt(f^4 + 4 f^2) - f^2) / 2: exact for small f
    # and strictly below 1 for any finite f.
    if f <= 0.0:
        return 0.0
    f2 = f * f
    if f2 == 0.0:  # f*f underflowed; RV -> f in this limit
        return f
    return 2.0 / (1.0 + math.sqrt(1.0 + 4.0 / f2))


def partial_r2(ts: TreatmentSummary) -> float:
    """t^2 / (t^2 + df): the treatment's partial R^2 with the outcome."""
    t2 = ts.t_value * ts.t_value
    return t2 / (t2 + ts.df)


def robustness_value(ts: TreatmentSummary, q: float = 1.0) -> float:
    """Confounder strength (as partial R^2 with treatment and outcome) that
    would remove a fraction q of the point estimate."""
    q = _check_q(q)
    f_q = q * abs(ts.t_value) / math.sqrt(ts.df)
    return _rv_from_f(f_q)


def robustness_value_alpha(ts: TreatmentSummary, q: float = 1.0,
                           alpha: float = 0.05) -> float:
    """Confounder strength that would make the q-reduced estimate lose
    significance at level alpha (two-sided)."""
    q = _check_q(q)
    alpha = _check_alpha(alpha)
    if ts.df < 2:
        raise DomainError("robustness_value_alpha needs df >= 2")
    f_q = q * abs(ts.t_value) / math.sqrt(ts.df)
    f_crit = t_quantile(1.0 - alpha / 2.0, ts.df - 1) / math.sqrt(ts.df - 1)
    f_qa = f_q - f_crit
    if f_qa <= 0.0:
        return 0.0
    return min(_rv_from_f(f_qa), math.nextafter(1.0, 0.0))


def sensitivity_report(ts: TreatmentSummary, q: float = 1.0,
                       alpha: float = 0.05) -> SensitivityReport:
    return SensitivityReport(
        partial_r2=partial_r2(ts),
        rv_q=robustness_value(ts, q),
        rv_q_alpha=robustness_value_alpha(ts, q, alpha),
        q=_check_q(q),
        alpha=_check_alpha(alpha),
    )
