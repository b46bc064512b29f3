"""Online autoregressive predictor estimated with Givens-rotation QRD-RLS.

One instance per monitored sensor: the filter maintains an upper-triangular
factor of the exponentially weighted data matrix and recovers the AR
coefficients by back-substitution after every sample.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular
from sklearn.base import BaseEstimator

from .errors import ConfigurationError, DimensionError, NumericInputError

# Relative diagonal threshold below which the triangular factor is treated
# as singular and the coefficients are frozen instead of re-solved.
_SINGULAR_RTOL = 1e-12


@dataclass
class ArStepResult:
    """One-step outcome: prediction made before the sample was absorbed."""

    predicted: float
    error: float  # signed: measured - predicted
    coefficients: np.ndarray
    singular: bool = False


class ArPredictor(BaseEstimator):
    """Recursive AR(n) predictor of a scalar series.

    Parameters
    ----------
    order : lag count n of the autoregression.
    forgetting : exponential forgetting factor in (0, 1].
    init_scale : initial diagonal of the triangular factor (regularization).
    include_intercept : append a constant regressor for non-zero-mean series.
    """

    def __init__(self, order=3, forgetting=0.98, init_scale=1e-3,
                 include_intercept=True):
        self.order = order
        self.forgetting = forgetting
        self.init_scale = init_scale
        self.include_intercept = include_intercept

    # -- state management ------------------------------------------------

    @property
    def dim(self):
        return self.order + (1 if self.include_intercept else 0)

    def reset(self):
        """Validate parameters and (re)allocate all filter state."""
        if not isinstance(self.order, (int, np.integer)) or self.order < 1:
            raise ConfigurationError(f"order must be a positive integer, got {self.order!r}")
        if not (0.0 < self.forgetting <= 1.0):
            raise ConfigurationError(f"forgetting must be in (0, 1], got {self.forgetting!r}")
        if not (self.init_scale > 0.0):
            raise ConfigurationError(f"init_scale must be positive, got {self.init_scale!r}")
        d = self.dim
        self.r_factor_ = np.eye(d) * self.init_scale
        self.rhs_ = np.zeros(d)
        self.coefficients_ = np.zeros(d)
        self.history_ = []  # most recent first, at most `order` values
        self.updates_seen_ = 0
        self.singular_ = False
        return self

    def _ensure_state(self):
        if not hasattr(self, "r_factor_"):
            self.reset()

    # -- core operations -------------------------------------------------

    def update(self, regressor, target):
        """Absorb one (regressor, target) pair into the triangular factor.

        Scales by sqrt(forgetting), annihilates the appended row with plane
        rotations, then re-solves the coefficients by back-substitution
        (frozen if the factor is numerically singular).
        """
        self._ensure_state()
        row = np.asarray(regressor, dtype=float).copy()
        if row.shape != (self.dim,):
            raise DimensionError(f"regressor must have length {self.dim}, got shape {row.shape}")
        if not (np.all(np.isfinite(row)) and np.isfinite(target)):
            raise NumericInputError("non-finite regressor or target")

        sqrt_lam = np.sqrt(self.forgetting)
        R = self.r_factor_
        z = self.rhs_
        R *= sqrt_lam
        z *= sqrt_lam
        t = float(target)
        for i in range(self.dim):
            b = row[i]
            if b == 0.0:
                continue
            a = R[i, i]
            rad = np.hypot(a, b)
            c, s = a / rad, b / rad
            Ri = R[i, i:].copy()
            R[i, i:] = c * Ri + s * row[i:]
            row[i:] = c * row[i:] - s * Ri
            zi = z[i]
            z[i] = c * zi + s * t
            t = c * t - s * zi

        diag = np.diag(R)
        self.singular_ = bool(np.min(diag) <= _SINGULAR_RTOL * max(1.0, float(np.max(diag))))
        if not self.singular_:
            self.coefficients_ = solve_triangular(R, z, lower=False)
        self.updates_seen_ += 1
        return self

    def predict_from(self, history):
        """Dot product of the current coefficients with a lag vector."""
        self._ensure_state()
        h = np.asarray(history, dtype=float)
        if h.shape != (self.order,):
            raise DimensionError(f"history must have length {self.order}, got shape {h.shape}")
        if self.include_intercept:
            h = np.append(h, 1.0)
        return float(self.coefficients_ @ h)

    def step(self, measured):
        """Feed one measurement; predict-then-update.

        Returns None while warming up (fewer than `order` samples seen),
        otherwise an ArStepResult whose prediction was computed from
        coefficients estimated strictly before this sample.
        """
        self._ensure_state()
        if not np.isfinite(measured):
            raise NumericInputError(f"non-finite measurement: {measured!r}")
        measured = float(measured)
        if len(self.history_) < self.order:
            self.history_.insert(0, measured)
            return None
        predicted = self.predict_from(self.history_)
        error = measured - predicted
        regressor = list(self.history_)
        if self.include_intercept:
            regressor.append(1.0)
        self.update(regressor, measured)
        self.history_.insert(0, measured)
        self.history_.pop()
        return ArStepResult(predicted=predicted, error=error,
                           coefficients=self.coefficients_.copy(),
                           singular=self.singular_)

    # -- sklearn-style batch interface -----------------------------------

    def fit(self, series):
        """Run the filter over a 1-D series; stores per-step results."""
        self.reset()
        x = np.asarray(series, dtype=float).ravel()
        self.step_results_ = [self.step(v) for v in x]
        return self

    def predict_next(self):
        """One-step-ahead forecast from the current history."""
        self._ensure_state()
        if len(self.history_) < self.order:
            raise DimensionError("not enough history for a prediction")
        return self.predict_from(self.history_)
