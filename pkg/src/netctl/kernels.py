"""Dense symmetric-matrix primitives with explicit numerical contracts.

Everything here operates on small dense float64 matrices. Eigensolves and
factorizations are delegated to LAPACK through numpy/scipy; the wrappers pin
down ordering, sign conventions and failure behavior so callers get
deterministic, checkable results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, DimensionMismatch, NotPositiveDefinite

# Acceptable asymmetry on construction, relative to max(1, max |entry|).
SYMMETRY_TOL = 1e-10
# A matrix counts as positive definite when lambda_min > SPD_RTOL * max(lambda_max, 1).
SPD_RTOL = 1e-12

CSV_FORMAT = "%.17g"


class SymMatrix:
    """Symmetric float64 matrix. Storage is symmetrized once on construction.

    Construction rejects inputs whose asymmetry exceeds SYMMETRY_TOL relative
    to the largest entry magnitude.
    """

    __slots__ = ("_a",)

    def __init__(self, data):
        a = np.array(data, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
        scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
        skew = float(np.max(np.abs(a - a.T))) if a.size else 0.0
        if skew > SYMMETRY_TOL * scale:
            raise ValueError(
                f"matrix is not symmetric: max |a - a.T| = {skew:.3e} "
                f"exceeds {SYMMETRY_TOL:.0e} * {scale:.3e}"
            )
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        self._a = a

    @property
    def order(self) -> int:
        return self._a.shape[0]

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the underlying (order, order) array."""
        return self._a

    def submatrix(self, ids) -> "SymMatrix":
        """Principal submatrix on the given row/column indices (in order)."""
        idx = np.asarray(ids, dtype=int)
        return SymMatrix(self._a[np.ix_(idx, idx)])

    def __repr__(self):
        return f"SymMatrix(order={self.order})"


@dataclass(frozen=True)
class EigenPairs:
    """Full eigendecomposition of a symmetric matrix.

    values are ascending; vectors holds orthonormal eigenvectors as columns,
    each sign-normalized so its largest-magnitude entry is nonnegative.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def lambda_min(self) -> float:
        return float(self.values[0])

    @property
    def lambda_max(self) -> float:
        return float(self.values[-1])

    @property
    def dominant(self) -> np.ndarray:
        """Unit eigenvector for the largest eigenvalue."""
        return self.vectors[:, -1]


def _as_sym_array(m) -> np.ndarray:
    if isinstance(m, SymMatrix):
        return m.array
    return SymMatrix(m).array


def _canonical_signs(vectors: np.ndarray) -> np.ndarray:
    v = vectors.copy()
    for j in range(v.shape[1]):
        k = int(np.argmax(np.abs(v[:, j])))
        if v[k, j] < 0.0:
            v[:, j] = -v[:, j]
    return v


def sym_eig(m) -> EigenPairs:
    """Eigendecomposition of a symmetric matrix with canonical ordering.

    Eigenvalues come back ascending and each eigenvector is flipped, if
    needed, so that its entry of largest magnitude is nonnegative. Raises
    ConvergenceFailure if the underlying LAPACK iteration does not converge.
    """
    a = _as_sym_array(m)
    try:
        values, vectors = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"symmetric eigensolve failed: {exc}") from exc
    vectors = _canonical_signs(vectors)
    values.setflags(write=False)
    vectors.setflags(write=False)
    return EigenPairs(values=values, vectors=vectors)


def spd_check(m) -> tuple[float, float]:
    """Return (lambda_min, lambda_max); raise NotPositiveDefinite if not SPD.

    The test is relative: lambda_min must exceed SPD_RTOL * max(lambda_max, 1).
    """
    a = _as_sym_array(m)
    values = np.linalg.eigvalsh(a)
    lo, hi = float(values[0]), float(values[-1])
    if not lo > SPD_RTOL * max(hi, 1.0):
        raise NotPositiveDefinite(lo)
    return lo, hi


def _cho_factor(a: np.ndarray):
    try:
        return scipy.linalg.cho_factor(a, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - guarded by spd_check
        raise NotPositiveDefinite(float("nan")) from exc


def solve_spd(m, b) -> np.ndarray:
    """Solve M x = b for symmetric positive definite M.

    Uses a Cholesky factorization plus one step of iterative refinement.
    Raises NotPositiveDefinite when the spectrum fails the SPD_RTOL test.
    """
    a = _as_sym_array(m)
    rhs = np.asarray(b, dtype=float)
    if rhs.shape[0] != a.shape[0]:
        raise DimensionMismatch(
            f"right-hand side of length {rhs.shape[0]} for order {a.shape[0]}"
        )
    spd_check(a)
    factor = _cho_factor(a)
    x = scipy.linalg.cho_solve(factor, rhs, check_finite=False)
    # One refinement pass keeps the residual near roundoff for the
    # moderately conditioned matrices this package produces.
    x = x + scipy.linalg.cho_solve(factor, rhs - a @ x, check_finite=False)
    return x


def explicit_inverse(m) -> SymMatrix:
    """Dense inverse of a symmetric positive definite matrix, symmetrized."""
    a = _as_sym_array(m)
    spd_check(a)
    factor = _cho_factor(a)
    inv = scipy.linalg.cho_solve(factor, np.eye(a.shape[0]), check_finite=False)
    return SymMatrix(0.5 * (inv + inv.T))


def connected_undirected(adjacency) -> bool:
    """Whether a 0-1 symmetric adjacency pattern forms one connected component.

    The diagonal is ignored. A single vertex with no edges is connected.
    """
    pat = np.asarray(adjacency)
    if pat.ndim != 2 or pat.shape[0] != pat.shape[1]:
        raise DimensionMismatch(f"expected a square pattern, got shape {pat.shape}")
    pat = pat != 0
    if not np.array_equal(pat, pat.T):
        raise ValueError("adjacency pattern is not symmetric")
    k = pat.shape[0]
    if k == 0:
        return True
    seen = np.zeros(k, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        u = stack.pop()
        for v in np.flatnonzero(pat[u]):
            if not seen[v]:
                seen[v] = True
                stack.append(int(v))
    return bool(seen.all())


def save_matrix_csv(path, matrix) -> None:
    """Write a dense matrix as CSV, one row per line, 17 significant digits."""
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    np.savetxt(path, a, fmt=CSV_FORMAT, delimiter=",")


def load_matrix_csv(path) -> np.ndarray:
    """Read a dense matrix written by save_matrix_csv. Always returns 2-D.

    ndmin=2 keeps a k-line single-column file as a (k, 1) column, so the
    save/load pair round-trips shapes faithfully.
    """
    return np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
