"""Dense least-squares core.

Production path: column-pivoted Householder QR (see ``_kernels``) with
rank detection.  Rank deficiency is an error carrying the pivot-rejected
column labels, never silently zeroed coefficients.  A direct
normal-equations solver is provided as an independent test oracle only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels


class LeastSquaresError(ValueError):
    """Base error for solver failures."""


class UnderdeterminedError(LeastSquaresError):
    """Fewer rows than columns."""


class RankDeficiencyError(LeastSquaresError):
    """Columns are linearly dependent.

    ``dependent_columns`` holds the pivot-rejected original column
    indices; ``dependent_labels`` the matching labels when the caller
    supplied any.  Callers may drop those columns and re-fit.
    """

    def __init__(self, rank: int, dependent_columns, dependent_labels):
        self.rank = rank
        self.dependent_columns = tuple(int(j) for j in dependent_columns)
        self.dependent_labels = tuple(dependent_labels)
        named = ", ".join(self.dependent_labels) or ", ".join(
            str(j) for j in self.dependent_columns
        )
        super().__init__(f"rank-deficient design (rank {rank}): dependent columns: {named}")


@dataclass(frozen=True)
class LsFit:
    """Solver output: coefficients aligned to the input column order,
    residual machinery, and (X^T X)^-1 for downstream inference."""

    coefficients: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray
    rank: int
    rss: float
    xtx_inverse: np.ndarray
    dof: int


def _check_inputs(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise LeastSquaresError(f"shape mismatch: X {X.shape}, y {y.shape}")
    n, p = X.shape
    if p < 1:
        raise LeastSquaresError("X needs at least one column")
    if n < p:
        raise UnderdeterminedError(f"underdetermined system: n={n} < p={p}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise LeastSquaresError("non-finite entries in X or y")
    return X, y


def solve_least_squares(
    X: np.ndarray, y: np.ndarray, column_labels: tuple[str, ...] | None = None
) -> LsFit:
    """Minimize ||y - X b||^2 via column-pivoted Householder QR.

    Rank is decided against the pivot threshold
    ``max(n, p) * machine_eps * |largest pivot|``; a deficient design
    raises :class:`RankDeficiencyError` naming the rejected columns.
    """
    X, y = _check_inputs(X, y)
    n, p = X.shape
    if column_labels is not None and len(column_labels) != p:
        raise LeastSquaresError("column_labels length does not match X")

    r_store, qty, jpvt, _qraux = _kernels.qr_pivot_decompose(X, y)
    diag = np.abs(np.diag(r_store)[:p])
    tol = max(n, p) * np.finfo(np.float64).eps * (diag[0] if diag.size else 0.0)
    # pivoting orders the diagonal by magnitude: rank is the prefix of
    # pivots above the threshold, and jpvt[rank:] are the rejects
    rank = p
    for k in range(p):
        if diag[k] <= tol:
            rank = k
            break
    if rank < p:
        rejected = jpvt[rank:]
        labels = (
            tuple(column_labels[j] for j in rejected) if column_labels is not None else ()
        )
        raise RankDeficiencyError(rank, rejected, labels)

    # back-substitute R b = Q^T y, then undo the column pivoting
    r_upper = np.triu(r_store[:p, :p])
    beta_pivoted = scipy.linalg.solve_triangular(r_upper, qty[:p], lower=False)
    beta = np.empty(p)
    beta[jpvt] = beta_pivoted

    r_inv = scipy.linalg.solve_triangular(r_upper, np.eye(p), lower=False)
    gram_inv_pivoted = r_inv @ r_inv.T
    xtx_inverse = np.empty((p, p))
    xtx_inverse[np.ix_(jpvt, jpvt)] = gram_inv_pivoted

    fitted = X @ beta
    residuals = y - fitted
    rss = float(residuals @ residuals)
    return LsFit(
        coefficients=beta,
        residuals=residuals,
        fitted=fitted,
        rank=rank,
        rss=rss,
        xtx_inverse=xtx_inverse,
        dof=n - rank,
    )


def solve_normal_equations_oracle(X: np.ndarray, y: np.ndarray) -> LsFit:
    """Brute-force reference: b = (X^T X)^-1 X^T y via Cholesky.

    Oracle only -- numerically inferior to the QR path on collinear
    designs; used to cross-check it, never in production pipelines.
    """
    X, y = _check_inputs(X, y)
    n, p = X.shape
    xtx = X.T @ X
    try:
        cho = scipy.linalg.cho_factor(xtx)
    except scipy.linalg.LinAlgError as exc:
        raise LeastSquaresError(f"singular normal equations: {exc}") from exc
    beta = scipy.linalg.cho_solve(cho, X.T @ y)
    xtx_inverse = scipy.linalg.cho_solve(cho, np.eye(p))
    fitted = X @ beta
    residuals = y - fitted
    return LsFit(
        coefficients=beta,
        residuals=residuals,
        fitted=fitted,
        rank=p,
        rss=float(residuals @ residuals),
        xtx_inverse=xtx_inverse,
        dof=n - p,
    )
