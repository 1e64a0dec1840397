"""
Fits of block entropy growth models.

The power-law model H(n) = h0 + h_mu n^mu + h n is linear in (h0, h_mu, h)
once mu is fixed, so mu is profiled over a grid and the rest is a
non-negative least squares fit. The exponential-convergence model
H(n) = h n + (h0 - h) n exp(-n / n0) is handled the same way over n0.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field
from sklearn.linear_model import LinearRegression

from .config import settings
from .entropy import BlockEntropyTable
from .errors import InsufficientDataError

logger = logging.getLogger(__name__)

_DEGENERATE_FLOOR = 1e-6


class HilbergFit(BaseModel):
    """Best power-law fit of a block entropy table."""
    h0: float = Field(..., description="Constant term in bits")
    h_mu: float = Field(..., ge=0, description="Coefficient of n^mu in bits")
    mu: float = Field(..., gt=0, lt=1, description="Exponent of the power term")
    h: float = Field(..., ge=0, description="Entropy rate in bits per symbol")
    sse: float = Field(..., ge=0, description="Sum of squared residuals in bits^2")
    degenerate: bool = Field(False, description="The power term is indistinguishable from zero")
    rows_used: int = 0


class ExponentialFit(BaseModel):
    """Fit of H(n)/n = (h0 - h) exp(-n/n0) + h."""
    h0: float
    h: float = Field(..., ge=0)
    n0: float = Field(..., gt=0)
    sse: float = Field(..., ge=0)


def _select_rows(
    table: BlockEntropyTable, n_range: Optional[Tuple[int, int]]
) -> Tuple[np.ndarray, np.ndarray]:
    low, high = n_range if n_range is not None else (1, table.n_max)
    rows = [
        row for row in table.rows
        if max(low, 1) <= row.n <= high and row.reliable
    ]
    if len(rows) < settings.min_reliable_rows:
        raise InsufficientDataError(
            f"{len(rows)} reliable rows in [{low}, {high}], "
            f"at least {settings.min_reliable_rows} needed"
        )
    n = np.array([row.n for row in rows], dtype=np.float64)
    y = np.array([row.H for row in rows], dtype=np.float64)
    return n, y


def mu_grid(step: Optional[float] = None) -> np.ndarray:
    step = settings.mu_step if step is None else step
    count = int(round(1.0 / step))
    return np.round(np.arange(1, count) * step, 10)


def fit_hilberg(
    table: BlockEntropyTable, n_range: Optional[Tuple[int, int]] = None
) -> HilbergFit:
    """Grid search over mu with non-negative h_mu and h at every grid point."""
    n, y = _select_rows(table, n_range)
    best = None
    for mu in mu_grid():
        X = np.column_stack([n ** mu, n])
        model = LinearRegression(positive=True).fit(X, y)
        sse = float(np.sum((model.predict(X) - y) ** 2))
        if best is None or sse < best[0]:
            best = (sse, float(mu), model)
    sse, mu, model = best
    h_mu, h = (max(float(c), 0.0) for c in model.coef_)

    # the power term must explain more than the residual noise over the range
    spread = h_mu * (n.max() ** mu - n.min() ** mu)
    rms = np.sqrt(sse / len(n))
    degenerate = bool(spread <= _DEGENERATE_FLOOR + 2.0 * rms)
    if degenerate:
        logger.info("Hilberg fit is degenerate: h_mu=%.3g, rms=%.3g", h_mu, rms)

    return HilbergFit(
        h0=float(model.intercept_),
        h_mu=h_mu,
        mu=mu,
        h=h,
        sse=sse,
        degenerate=degenerate,
        rows_used=len(n),
    )


def hilberg_excess_entropy(n: float, fit: HilbergFit) -> float:
    """E(n) = 2H(n) - H(2n) under the fitted model: h0 + (2 - 2^mu) h_mu n^mu."""
    return fit.h0 + (2.0 - 2.0 ** fit.mu) * fit.h_mu * n ** fit.mu


def fit_exponential_convergence(
    table: BlockEntropyTable, n_range: Optional[Tuple[int, int]] = None
) -> ExponentialFit:
    """Grid search over n0 for the exponential-convergence model."""
    n, y = _select_rows(table, n_range)
    best = None
    for n0 in np.logspace(-1, 3, 241):
        X = np.column_stack([n * np.exp(-n / n0), n])
        model = LinearRegression(fit_intercept=False, positive=True).fit(X, y)
        sse = float(np.sum((model.predict(X) - y) ** 2))
        if best is None or sse < best[0]:
            best = (sse, float(n0), model)
    sse, n0, model = best
    excess, h = (float(c) for c in model.coef_)
    return ExponentialFit(h0=excess + h, h=max(h, 0.0), n0=n0, sse=sse)
