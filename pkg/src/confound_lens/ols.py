"""Ordinary least squares with full inference output.

The solver goes through a QR factorization rather than the normal equations:
the whole point of this package is diagnosing strongly collinear designs, and
squaring the design matrix would throw away half the usable precision exactly
where it matters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .distributions import t_cdf
from .errors import DomainError, InsufficientRowsError, RankDeficientError

INTERCEPT = "intercept"

# Smallest acceptable ratio of design singular values.  Below this the design
# is treated as exactly collinear; "merely strong" multicollinearity (VIFs in
# the tens or hundreds) sits far above it.
RANK_TOL = 1e-10


@dataclass(frozen=True)
class OlsFit:
    """Coefficients and inference for one least-squares fit."""

    outcome: str
    names: tuple[str, ...]
    coefficients: np.ndarray
    standard_errors: np.ndarray
    t_values: np.ndarray
    p_values: np.ndarray
    r_squared: float
    residual_variance: float
    df_residual: int
    residuals: np.ndarray
    n: int
    include_intercept: bool

    def _index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no coefficient {name!r}; have {', '.join(self.names)}") from None

    def coefficient(self, name: str) -> float:
        return float(self.coefficients[self._index(name)])

    def std_error(self, name: str) -> float:
        return float(self.standard_errors[self._index(name)])

    def t_value(self, name: str) -> float:
        return float(self.t_values[self._index(name)])

    def p_value(self, name: str) -> float:
        return float(self.p_values[self._index(name)])


def _design(data: Dataset, regressors: list[str] | tuple[str, ...],
            include_intercept: bool) -> tuple[np.ndarray, tuple[str, ...]]:
    X = data.matrix(list(regressors))
    names = tuple(regressors)
    if include_intercept:
        X = np.column_stack([np.ones(data.n), X])
        names = (INTERCEPT,) + names
    return X, names


def _check_rank(X: np.ndarray) -> None:
    svals = np.linalg.svd(X, compute_uv=False)
    if svals[0] == 0.0 or svals[-1] / svals[0] < RANK_TOL:
        raise RankDeficientError(
            f"design is numerically rank deficient (singular value ratio "
            f"{0.0 if svals[0] == 0.0 else svals[-1] / svals[0]:.2e} < {RANK_TOL:g})"
        )


def fit_ols(data: Dataset, outcome: str, regressors: list[str] | tuple[str, ...],
            include_intercept: bool = True) -> OlsFit:
    """Least-squares fit of `outcome` on `regressors`.

    p-values are two-sided from the t distribution with n - p degrees of
    freedom.  r_squared is centered when an intercept is included and is
    computed against the zero model otherwise.
    """
    y = data.column(outcome)
    X, names = _design(data, regressors, include_intercept)
    n, p = X.shape
    if p == 0:
        raise DomainError("at least one regressor or an intercept is required")
    if n - p < 1:
        raise InsufficientRowsError(f"n={n} rows leave no residual degrees of freedom for p={p}")
    _check_rank(X)

    Q, R = np.linalg.qr(X)
    beta = np.linalg.solve(R, Q.T @ y)
    fitted = X @ beta
    residuals = y - fitted
    rss = float(residuals @ residuals)
    df_residual = n - p
    residual_variance = rss / df_residual

    r_inv = np.linalg.inv(R)
    xtx_inv_diag = np.einsum("ij,ij->i", r_inv, r_inv)
    standard_errors = np.sqrt(residual_variance * xtx_inv_diag)

    with np.errstate(divide="ignore", invalid="ignore"):
        t_values = np.where(standard_errors > 0.0, beta / standard_errors,
                            np.sign(beta) * np.inf)
    t_values = np.where((standard_errors == 0.0) & (beta == 0.0), 0.0, t_values)
    p_values = np.array([2.0 * (1.0 - t_cdf(abs(t), df_residual)) for t in t_values])

    if include_intercept:
        tss = float(np.sum((y - y.mean()) ** 2))
    else:
        tss = float(y @ y)
    r_squared = 0.0 if tss <= 0.0 else min(max(1.0 - rss / tss, 0.0), 1.0)

    return OlsFit(
        outcome=outcome,
        names=names,
        coefficients=beta,
        standard_errors=standard_errors,
        t_values=t_values,
        p_values=p_values,
        r_squared=r_squared,
        residual_variance=residual_variance,
        df_residual=df_residual,
        residuals=residuals,
        n=n,
        include_intercept=include_intercept,
    )


def residual_variance_of(fit: OlsFit) -> float:
    """RSS / (n - p), the denominator convention used throughout."""
    return fit.residual_variance


def vif(data: Dataset, regressors: list[str] | tuple[str, ...]) -> list[float]:
    """Variance inflation factor 1 / (1 - R^2_j) for each regressor.

    Each auxiliary regression of one regressor on the others includes an
    intercept, the usual convention.
    """
    regressors = list(regressors)
    if len(regressors) < 2:
        raise DomainError("vif needs at least two regressors")
    X, _ = _design(data, regressors, include_intercept=True)
    _check_rank(X)
    out = []
    for j, name in enumerate(regressors):
        others = regressors[:j] + regressors[j + 1:]
        aux = fit_ols(data, name, others, include_intercept=True)
        slack = 1.0 - aux.r_squared
        out.append(float("inf") if slack <= 0.0 else 1.0 / slack)
    return out
