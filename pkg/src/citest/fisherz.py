"""Gaussian CI testing with Fisher's z-transform of partial correlation.

The partial correlation of (u, v) given C is read off the inverse of the
correlation submatrix over [u, v] + C. Fisher's transform
z = 0.5 * ln((1 + r) / (1 - r)) scaled by sqrt(n - |C| - 3) is compared with
the two-sided normal quantile at level alpha.
"""

import logging
from dataclasses import dataclass
from math import log, sqrt
from typing import Optional, Sequence

import numpy as np
from scipy.stats import norm

from citest.base import CiQuery, CiTester
from utils.errors import ConfigurationError, InsufficientSamplesError, SingularCovarianceError

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
R_CLAMP = 1.0 - 1e-12


@dataclass
class PValueResult:
    """Test statistic and two-sided p-value of one Fisher-z test."""
    statistic: float
    pvalue: float


def _check_alpha(alpha: float):
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError("alpha must be in (0, 1)", str(alpha))


def correlation_matrix(data: np.ndarray) -> np.ndarray:
    """Column correlation matrix of an n x p sample matrix."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ConfigurationError("Data must be a 2-D sample matrix", f"got shape {data.shape}")
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.atleast_2d(np.corrcoef(data, rowvar=False))


def covariance_to_correlation(cov: np.ndarray) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    scale = np.sqrt(np.diag(cov))
    if np.any(scale <= 0):
        raise SingularCovarianceError("Covariance has a non-positive variance")
    return cov / np.outer(scale, scale)


def partial_correlation(corr: np.ndarray, u: int, v: int, cond: Sequence[int]) -> float:
    """Partial correlation of u and v given cond, clamped away from +-1.

    Raises:
        SingularCovarianceError: If the submatrix is non-finite or its
            condition number exceeds the limit
    """
    idx = [u, v, *cond]
    sub = corr[np.ix_(idx, idx)]
    if not np.all(np.isfinite(sub)):
        raise SingularCovarianceError("Correlation submatrix is not finite",
                                      f"variables {idx} (constant column?)")

    condition = np.linalg.cond(sub)
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise SingularCovarianceError("Conditioning covariance is singular",
                                      f"condition number {condition:.3g} for variables {idx}")
    try:
        precision = np.linalg.inv(sub)
    except np.linalg.LinAlgError:
        precision = np.linalg.pinv(sub)

    r = -precision[0, 1] / sqrt(precision[0, 0] * precision[1, 1])
    return float(np.clip(r, -R_CLAMP, R_CLAMP))


def fisherz_test(corr: np.ndarray, query: CiQuery, n: int) -> PValueResult:
    """Fisher-z statistic and p-value for a query on a correlation matrix.

    Args:
        corr: p x p correlation matrix
        query: Canonical CI query
        n: Sample size the matrix was estimated from

    Returns:
        PValueResult

    Raises:
        InsufficientSamplesError: If n <= |cond| + 3
        SingularCovarianceError: If the conditioning covariance is singular
    """
    dof = n - len(query.cond) - 3
    if dof <= 0:
        raise InsufficientSamplesError("Too few samples for conditioning set",
                                       f"n={n}, |cond|={len(query.cond)}")

    r = partial_correlation(corr, query.u, query.v, query.cond)
    z = 0.5 * log((1 + r) / (1 - r))
    statistic = sqrt(dof) * abs(z)
    return PValueResult(statistic=statistic, pvalue=float(2 * norm.sf(statistic)))


def fisherz_independent(data: np.ndarray, query: CiQuery, alpha: float = 0.05) -> bool:
    """Decide a query on raw samples at significance alpha."""
    _check_alpha(alpha)
    data = np.asarray(data, dtype=float)
    result = fisherz_test(correlation_matrix(data), query, data.shape[0])
    return result.statistic <= norm.ppf(1 - alpha / 2)


class FisherZTester(CiTester):
    """Partial-correlation tester for linear Gaussian data.

    The correlation matrix is computed once at construction; each query only
    inverts a small submatrix.
    """

    name = "fisherz"
    description = "Fisher-z partial correlation test"
    exact = False

    def __init__(self, data: Optional[np.ndarray] = None, alpha: float = 0.05, *,
                 corr: Optional[np.ndarray] = None, n: Optional[int] = None, **kwargs):
        """Initialize from an n x p sample matrix or a precomputed correlation.

        Args:
            data: Samples, one row per observation, columns indexed by node id
            alpha: Significance level
            corr: Correlation matrix to use instead of data (requires n)
            n: Sample size behind corr
            **kwargs: Passed to CiTester

        Raises:
            ConfigurationError: If neither data nor (corr, n) is given, or alpha is invalid
        """
        _check_alpha(alpha)
        if data is not None:
            data = np.asarray(data, dtype=float)
            corr = correlation_matrix(data)
            n = data.shape[0]
        elif corr is None or n is None:
            raise ConfigurationError("FisherZTester needs data or a correlation matrix with n")

        super().__init__(corr.shape[0], **kwargs)
        self.corr = np.asarray(corr, dtype=float)
        self.n = int(n)
        self.alpha = alpha
        self.threshold = float(norm.ppf(1 - alpha / 2))

    @classmethod
    def from_covariance(cls, cov: np.ndarray, n: int, alpha: float = 0.05,
                        **kwargs) -> "FisherZTester":
        """Tester on an exact covariance matrix with a nominal sample size."""
        return cls(alpha=alpha, corr=covariance_to_correlation(cov), n=n, **kwargs)

    def test(self, query: CiQuery) -> PValueResult:
        """Statistic and p-value without accounting."""
        return fisherz_test(self.corr, query, self.n)

    def decide(self, query: CiQuery) -> bool:
        return self.test(query).statistic <= self.threshold
