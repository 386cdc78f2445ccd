"""Binary soft-margin SVM with an RBF kernel.

The dual problem

    min  0.5 * a' Q a - sum(a)   s.t.  0 <= a_i <= C,  sum(a_i y_i) = 0,
    with Q_ij = y_i y_j K(x_i, x_j),  K(u, v) = exp(-gamma ||u - v||^2)

is solved by sequential minimal optimization over maximal-KKT-violating
pairs, the same working-set rule the classic solvers use. No matrix
factorization, no randomness: identical inputs give bit-identical models.
"""

from __future__ import annotations

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyDatasetError,
    NonPositiveGammaError,
    NonPositiveParameterError,
    SingleClassDatasetError,
)

log = logging.getLogger(__name__)

# Multipliers below this are treated as zero when picking support vectors.
ALPHA_EPSILON = 1e-12

DEFAULT_TOL = 1e-3
DEFAULT_KERNEL_BUDGET = 10_000_000  # kernel evaluations before giving up
GRAM_LIMIT = 2000  # full Gram matrix kept in memory up to this many rows

# The canonical exponential grids for (C, gamma).
DEFAULT_C_GRID = tuple(2.0 ** e for e in range(-5, 16, 2))
DEFAULT_GAMMA_GRID = tuple(2.0 ** e for e in range(-15, 4, 2))


@dataclass
class LabeledDataset:
    """Feature vectors with labels in {+1, -1} and per-item ids."""

    vectors: np.ndarray
    labels: np.ndarray
    ids: list

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.vectors.ndim != 2:
            raise ValueError("vectors must be a 2-D array")
        if not (len(self.vectors) == len(self.labels) == len(self.ids)):
            raise ValueError("vectors, labels, and ids must have equal length")
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("dataset contains non-finite feature values")
        if len(self.labels) and not np.all(np.isin(self.labels, (-1, 1))):
            raise ValueError("labels must be +1 or -1")

    def __len__(self):
        return len(self.labels)

    def subset(self, indices) -> "LabeledDataset":
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.vectors[idx], self.labels[idx],
                              [self.ids[i] for i in idx])


@dataclass
class FeatureScaler:
    """Per-dimension linear map of training values into [-1, 1].

    Constant training dimensions map to 0 for any input. Test-time values
    outside the training range simply land outside [-1, 1].
    """

    mins: np.ndarray
    maxs: np.ndarray

    @classmethod
    def identity(cls, dim: int) -> "FeatureScaler":
        return cls(np.full(dim, -1.0), np.full(dim, 1.0))

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        span = self.maxs - self.mins
        safe = np.where(span > 0, span, 1.0)
        scaled = 2.0 * (X - self.mins) / safe - 1.0
        return np.where(span > 0, scaled, 0.0)


def fit_scaler(train: LabeledDataset) -> FeatureScaler:
    """Record per-dimension min/max of the training rows."""
    if len(train) == 0:
        raise EmptyDatasetError("cannot fit a scaler on an empty dataset")
    return FeatureScaler(train.vectors.min(axis=0), train.vectors.max(axis=0))


def rbf_kernel(x, y, gamma: float) -> float:
    """exp(-gamma * ||x - y||^2) for two equally sized vectors."""
    if gamma <= 0:
        raise NonPositiveGammaError(f"gamma must be > 0, got {gamma}")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"shapes {x.shape} vs {y.shape}")
    d = x - y
    return float(np.exp(-gamma * np.dot(d, d)))


def _rbf_rows(X: np.ndarray, v: np.ndarray, gamma: float) -> np.ndarray:
    """Kernel values between every row of X and the single vector v."""
    d = X - v
    return np.exp(-gamma * np.einsum("ij,ij->i", d, d))


class _KernelCache:
    """Row cache for the training Gram matrix.

    Materializes the full matrix for small problems; otherwise keeps an
    LRU of rows bounded by a memory budget.
    """

    def __init__(self, X: np.ndarray, gamma: float,
                 cache_mb: float = 256.0, gram_limit: int = GRAM_LIMIT):
        self.X = X
        self.gamma = gamma
        n = len(X)
        self.full = None
        self.rows: OrderedDict[int, np.ndarray] = OrderedDict()
        self.max_rows = max(2, int(cache_mb * 2**20 / (8 * max(n, 1))))
        if n <= gram_limit and self.max_rows >= n:
            # row-by-row with the same arithmetic as the cache-miss path,
            # so both cache modes follow bit-identical trajectories
            self.full = np.vstack([_rbf_rows(X, X[i], gamma)
                                   for i in range(n)])

    def row(self, i: int) -> np.ndarray:
        if self.full is not None:
            return self.full[i]
        cached = self.rows.get(i)
        if cached is not None:
            self.rows.move_to_end(i)
            return cached
        r = _rbf_rows(self.X, self.X[i], self.gamma)
        self.rows[i] = r
        if len(self.rows) > self.max_rows:
            self.rows.popitem(last=False)
        return r


@dataclass
class SvmModel:
    """Trained classifier: support vectors in scaled space plus the scaler.

    dual_coeffs holds alpha_i * y_i per support vector. converged is False
    when training stopped on its evaluation budget instead of the KKT
    tolerance; the model is still usable, just flagged.
    """

    support_vectors: np.ndarray
    dual_coeffs: np.ndarray
    bias: float
    gamma: float
    C: float
    scaler: FeatureScaler
    converged: bool = True
    iterations: int = 0
    objective_history: list | None = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.support_vectors) == 0:
            raise ValueError("a model must have at least one support vector")


def train_smo(train: LabeledDataset, C: float, gamma: float,
              tol: float = DEFAULT_TOL,
              max_kernel_evals: int = DEFAULT_KERNEL_BUDGET,
              scaler: FeatureScaler | None = None,
              cache_mb: float = 256.0,
              record_objective: bool = False) -> SvmModel:
    """Solve the RBF-SVM dual on an already scaled dataset.

    Each step picks the pair (i, j) violating the KKT conditions most,
    moves the two multipliers to the constrained optimum of their
    two-variable subproblem, and updates the dual gradient. Optimization
    stops when the maximal violation falls below tol, or soft-fails with
    converged=False once the kernel-evaluation budget runs out.

    The bias comes from averaging over free support vectors (0 < a < C),
    falling back to the midpoint of the final violation bounds when every
    multiplier sits on the box.

    Raises:
        NonPositiveParameterError / NonPositiveGammaError: bad C or gamma.
        SingleClassDatasetError: training labels are all the same.
    """
    if C <= 0:
        raise NonPositiveParameterError(f"C must be > 0, got {C}")
    if gamma <= 0:
        raise NonPositiveGammaError(f"gamma must be > 0, got {gamma}")
    y = train.labels.astype(np.float64)
    if not (np.any(y > 0) and np.any(y < 0)):
        raise SingleClassDatasetError("training set holds a single class")

    X = train.vectors
    n = len(X)
    cache = _KernelCache(X, gamma, cache_mb=cache_mb)
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of the dual objective being minimized
    history: list | None = [] if record_objective else None

    max_iter = max(1, max_kernel_evals // (2 * n))
    converged = False
    m_up = m_low = 0.0
    updates = 0
    for _ in range(max_iter):
        vals = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not (up.any() and low.any()):
            converged = True
            break
        i = int(np.argmax(np.where(up, vals, -np.inf)))
        j = int(np.argmin(np.where(low, vals, np.inf)))
        m_up, m_low = vals[i], vals[j]
        if m_up - m_low <= tol:
            converged = True
            break

        k_i = cache.row(i)
        k_j = cache.row(j)
        eta = k_i[i] + k_j[j] - 2.0 * k_i[j]
        t = (m_up - m_low) / max(eta, 1e-12)
        t_max_i = (C - alpha[i]) if y[i] > 0 else alpha[i]
        t_max_j = alpha[j] if y[j] > 0 else (C - alpha[j])
        t = min(t, t_max_i, t_max_j)

        alpha[i] = min(max(alpha[i] + y[i] * t, 0.0), C)
        alpha[j] = min(max(alpha[j] - y[j] * t, 0.0), C)
        grad += t * y * (k_i - k_j)
        updates += 1

        if history is not None:
            history.append(_dual_value(alpha, grad))
    else:
        log.warning("SMO stopped after %d iterations without reaching "
                    "tol=%g (final violation %.3g)", max_iter, tol,
                    m_up - m_low)

    # Restore the equality constraint exactly; pair updates preserve it up
    # to rounding, and downstream feasibility checks demand <= 1e-8.
    drift = math.fsum(alpha * y)
    if drift != 0.0:
        room = np.minimum(alpha, C - alpha)
        k = int(np.argmax(room))
        alpha[k] = min(max(alpha[k] - y[k] * drift, 0.0), C)

    _check_feasibility(alpha, y, C)

    sv_mask = alpha > ALPHA_EPSILON
    free = sv_mask & (C - alpha > ALPHA_EPSILON)
    vals = -y * grad
    if free.any():
        bias = float(vals[free].mean())
    else:
        bias = float((m_up + m_low) / 2.0)

    if scaler is None:
        scaler = FeatureScaler.identity(X.shape[1])
    return SvmModel(
        support_vectors=X[sv_mask].copy(),
        dual_coeffs=(alpha * y)[sv_mask],
        bias=bias,
        gamma=gamma,
        C=C,
        scaler=scaler,
        converged=converged,
        iterations=updates,
        objective_history=history,
    )


def _dual_value(alpha: np.ndarray, grad: np.ndarray) -> float:
    # W(a) = sum(a) - 0.5 a'Qa; with grad = Qa - 1 this is (sum(a) - a'grad)/2
    return 0.5 * (alpha.sum() - float(alpha @ grad))


def _check_feasibility(alpha: np.ndarray, y: np.ndarray, C: float) -> None:
    if np.any(alpha < 0) or np.any(alpha > C):
        raise RuntimeError("SMO produced multipliers outside [0, C]")
    residual = abs(math.fsum(alpha * y))
    if residual > 1e-8:
        raise RuntimeError(
            f"SMO equality constraint violated: |sum(a*y)| = {residual:.3g}"
        )


def dual_objective(model: SvmModel) -> float:
    """Dual objective of a trained model, recomputed from its support set."""
    coeffs = model.dual_coeffs
    sv = model.support_vectors
    sq = np.einsum("ij,ij->i", sv, sv)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (sv @ sv.T), 0.0)
    gram = np.exp(-model.gamma * d2)
    return float(np.sum(np.abs(coeffs)) - 0.5 * coeffs @ gram @ coeffs)


def decision_value(model: SvmModel, x) -> float:
    """Signed distance-like score; positive means the positive class."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.support_vectors.shape[1],):
        raise DimensionMismatchError(
            f"expected {model.support_vectors.shape[1]} features, "
            f"got {x.shape}"
        )
    xs = model.scaler.transform(x)
    k = _rbf_rows(model.support_vectors, xs, model.gamma)
    return float(model.dual_coeffs @ k + model.bias)


def decision_values(model: SvmModel, X) -> np.ndarray:
    """decision_value for every row of X."""
    X = np.asarray(X, dtype=np.float64)
    return np.array([decision_value(model, row) for row in X])


def predict(model: SvmModel, x) -> int:
    """Class label: +1 when the decision value is >= 0, else -1."""
    return 1 if decision_value(model, x) >= 0 else -1


def predict_many(model: SvmModel, X) -> np.ndarray:
    return np.where(decision_values(model, X) >= 0, 1, -1)


@dataclass
class GridSearchResult:
    best_c: float
    best_gamma: float
    cv_accuracy: float
    points: list  # (C, gamma, accuracy) for every grid point


def grid_search(train: LabeledDataset, c_grid=None, gamma_grid=None,
                folds: int = 10, seed: int = 0,
                tol: float = DEFAULT_TOL) -> GridSearchResult:
    """Pick (C, gamma) by cross-validated accuracy over a parameter grid.

    Folds are fixed by the seed, so every grid point sees the same splits.
    Ties go to the smaller C, then the smaller gamma.
    """
    from .evaluation import cross_validate  # deferred: evaluation imports svm

    c_grid = sorted(c_grid) if c_grid else list(DEFAULT_C_GRID)
    gamma_grid = sorted(gamma_grid) if gamma_grid else list(DEFAULT_GAMMA_GRID)

    best = None
    points = []
    for c in c_grid:
        for g in gamma_grid:
            report = cross_validate(train, c, g, folds, seed, tol=tol)
            points.append((c, g, report.accuracy))
            if best is None or report.accuracy > best[2]:
                best = (c, g, report.accuracy)
    return GridSearchResult(best[0], best[1], best[2], points)


def fit_svm(train: LabeledDataset, C: float, gamma: float,
            tol: float = DEFAULT_TOL, cache_mb: float = 256.0) -> SvmModel:
    """Fit scaler on the training rows, scale them, and train."""
    scaler = fit_scaler(train)
    scaled = LabeledDataset(scaler.transform(train.vectors), train.labels,
                            list(train.ids))
    return train_smo(scaled, C, gamma, tol=tol, scaler=scaler,
                     cache_mb=cache_mb)
