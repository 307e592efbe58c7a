"""Ordinary least-squares fits of models linear in their parameters.

Two families are supported: the expected-DTV curve ``m(N) = a*N + b*sqrt(N)``
and general fits over any ordered subset of the basis ``{N, sqrt(N), 1}``.
Both go through the normal equations, followed by two steps of iterative
refinement.  Columns are rescaled by powers of two
before solving, which leaves integer-valued inputs exact while making the
singularity test independent of the scale of N.
"""
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np

from .errors import InsufficientPoints, InvalidParams, SingularSystem

SINGULAR_TOL = 1e-12
_REFINE_STEPS = 2

BASIS_TERMS = ("N", "sqrtN", "1")
AFFINE = ("N", "1")
SQRT_AFFINE = ("N", "sqrtN", "1")
EXPECTED_DTV = ("N", "sqrtN")

# CLI spellings
BASIS_NAMES = {"n1": AFFINE, "n-sqrt-1": SQRT_AFFINE, "n-sqrt": EXPECTED_DTV}


@dataclass(frozen=True)
class ExpectedDtvFit:
    a: float
    b: float
    point_count: int
    residual_sum_squares: float

    def __call__(self, n):
        return eval_expected_dtv(self, n)


@dataclass(frozen=True)
class BasisFit:
    basis: Tuple[str, ...]
    coefficients: Tuple[float, ...]
    point_count: int
    residual_sum_squares: float

    def coefficient(self, term: str) -> float:
        return self.coefficients[self.basis.index(term)]

    def __call__(self, n):
        return eval_basis(self, n)


def _check_basis(basis) -> Tuple[str, ...]:
    basis = tuple(basis)
    if not basis:
        raise InvalidParams("basis must be non-empty")
    for term in basis:
        if term not in BASIS_TERMS:
            raise InvalidParams(f"unknown basis term {term!r}; choose from {BASIS_TERMS}")
    if len(set(basis)) != len(basis):
        raise InvalidParams(f"repeated term in basis {basis}")
    return basis


def design_matrix(n, basis) -> np.ndarray:
    n = np.asarray(n, dtype=np.float64)
    cols = []
    for term in basis:
        if term == "N":
            cols.append(n)
        elif term == "sqrtN":
            cols.append(np.sqrt(n))
        else:
            cols.append(np.ones_like(n))
    return np.column_stack(cols)


def _det(A: np.ndarray) -> float:
    k = A.shape[0]
    if k == 1:
        return A[0, 0]
    if k == 2:
        return A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    return (A[0, 0] * (A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1])
            - A[0, 1] * (A[1, 0] * A[2, 2] - A[1, 2] * A[2, 0])
            + A[0, 2] * (A[1, 0] * A[2, 1] - A[1, 1] * A[2, 0]))


def _solve_small(A: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Cramer's rule for 1x1..3x3 systems; exact on small integer data."""
    k = A.shape[0]
    det = _det(A)
    out = np.empty(k)
    for j in range(k):
        Aj = A.copy()
        Aj[:, j] = r
        out[j] = _det(Aj) / det
    return out


def _least_squares(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, float]:
    k = X.shape[1]
    if X.shape[0] < k:
        raise InsufficientPoints(f"need at least {k} points for {k} parameters, got {X.shape[0]}")
    # power-of-two equilibration keeps the scaling exact in floating point
    norms = np.sqrt((X * X).sum(axis=0))
    if np.any(norms == 0):
        raise SingularSystem("design matrix has an all-zero column")
    scale = np.exp2(-np.round(np.log2(norms)))
    Xs = X * scale
    A = Xs.T @ Xs
    r = Xs.T @ y
    det = _det(A)
    if not np.isfinite(det) or abs(det) < SINGULAR_TOL * np.abs(A).max() ** k:
        raise SingularSystem(
            f"normal matrix is singular (relative determinant {abs(det) / np.abs(A).max() ** k:.3g})"
        )
    x = _solve_small(A, r)
    # refinement against the true residual undoes the conditioning loss
    # of forming X^T X; a zero residual leaves x untouched
    for _ in range(_REFINE_STEPS):
        x = x + _solve_small(A, Xs.T @ (y - Xs @ x))
    coef = x * scale
    resid = y - X @ coef
    return coef, float(resid @ resid)


def _points_array(points) -> Tuple[np.ndarray, np.ndarray]:
    pts = np.asarray(list(points), dtype=np.float64)
    if pts.size == 0:
        return np.zeros(0), np.zeros(0)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InvalidParams("points must be a sequence of (N, value) pairs")
    n, y = pts[:, 0], pts[:, 1]
    if np.any(n < 1):
        raise InvalidParams("every point needs N >= 1")
    return n, y


def fit_expected_dtv(points: Iterable[Tuple[float, float]]) -> ExpectedDtvFit:
    """Fit ``m(N) = a*N + b*sqrt(N)`` to ``(N, dtv)`` pairs."""
    n, y = _points_array(points)
    if n.shape[0] < 2:
        raise InsufficientPoints(f"expected-DTV fit needs >= 2 points, got {n.shape[0]}")
    coef, rss = _least_squares(design_matrix(n, EXPECTED_DTV), y)
    return ExpectedDtvFit(float(coef[0]), float(coef[1]), int(n.shape[0]), rss)


def eval_expected_dtv(fit: ExpectedDtvFit, n):
    if np.ndim(n) == 0:
        return fit.a * n + fit.b * math.sqrt(n)
    n = np.asarray(n, dtype=np.float64)
    return fit.a * n + fit.b * np.sqrt(n)


def fit_basis(points: Iterable[Tuple[float, float]], basis: Sequence[str] = AFFINE) -> BasisFit:
    basis = _check_basis(basis)
    n, y = _points_array(points)
    coef, rss = _least_squares(design_matrix(n, basis), y)
    return BasisFit(basis, tuple(float(c) for c in coef), int(n.shape[0]), rss)


def eval_basis(fit: BasisFit, n):
    scalar = np.ndim(n) == 0
    vals = design_matrix(np.atleast_1d(n), fit.basis) @ np.asarray(fit.coefficients)
    return float(vals[0]) if scalar else vals
