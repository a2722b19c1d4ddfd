"""Dense numerical kernels shared by all estimators.

Pairwise Euclidean distances, covariance eigenvalue spectra (with a Gram-matrix
path for high ambient dimension), and symmetric eigendecomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

# Eigenvalues of a covariance matrix below this fraction of the largest one are
# treated as exact zeros (rank-deficient covariances produce tiny negatives).
CLAMP_REL = 1e-10

# Maximum tolerated relative asymmetry of an "exactly symmetric" input.
SYMMETRY_RTOL = 1e-10


@dataclass(frozen=True)
class PointSet:
    """N points in a D-dimensional ambient space.

    Parameters
    ----------
    points : array-like of shape (n, dim)
        One point per row. Coordinates must be finite; n >= 1 and dim >= 1.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2-d array, got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"need at least one point and one coordinate, got shape {pts.shape}")
        if not np.isfinite(pts).all():
            raise ValueError("points contain NaN or Inf")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n

    def subset(self, indices) -> "PointSet":
        """Return the points at the given indices as a new PointSet."""
        return PointSet(self.points[np.asarray(indices, dtype=np.intp)])


@dataclass(frozen=True)
class Spectrum:
    """Descending eigenvalue list of a covariance matrix.

    ``eigenvalues`` holds the min(n, D) eigenvalues that can be nonzero for a
    subset of ``subset_size`` points; values are clamped to be >= 0.
    """

    eigenvalues: np.ndarray
    subset_size: int

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        if lam.ndim != 1 or lam.size < 1:
            raise ValueError("eigenvalues must be a non-empty 1-d array")
        if not np.isfinite(lam).all():
            raise ValueError("eigenvalues contain NaN or Inf")
        scale = max(float(lam[0]), 0.0)
        tol = 1e-9 * scale
        if np.any(np.diff(lam) > tol):
            raise ValueError("eigenvalues must be in non-increasing order")
        if lam.min(initial=0.0) < -tol:
            raise ValueError("eigenvalues must be non-negative")
        object.__setattr__(self, "eigenvalues", np.maximum(lam, 0.0))
        if self.subset_size < 1:
            raise ValueError("subset_size must be >= 1")

    @property
    def m(self) -> int:
        """Spectrum length."""
        return self.eigenvalues.size

    @property
    def total_variance(self) -> float:
        return float(self.eigenvalues.sum())


def distance_matrix(points: PointSet) -> np.ndarray:
    """Compute the full symmetric matrix of pairwise Euclidean distances.

    Each pair is computed once and mirrored, so the result is exactly
    symmetric with an exactly zero diagonal.
    """
    if points.n == 1:
        return np.zeros((1, 1))
    return squareform(pdist(points.points))


def _clamp_spectrum(lam: np.ndarray) -> np.ndarray:
    """Zero out numerically-negligible eigenvalues of a PSD matrix.

    Values in (-CLAMP_REL * lam_max, CLAMP_REL * lam_max) are set to 0; values
    more negative than that indicate a broken input and raise.
    """
    lam = np.array(lam, dtype=float)
    lam_max = max(float(lam.max(initial=0.0)), 0.0)
    if lam_max <= 0.0:
        return np.zeros_like(lam)
    tol = CLAMP_REL * lam_max
    if lam.min() < -tol:
        raise ArithmeticError(
            f"covariance eigenvalue {lam.min():.3e} below -{tol:.3e}; input is not PSD"
        )
    lam[lam < tol] = 0.0
    return lam


def covariance_spectrum(points: PointSet, method: str = "auto") -> Spectrum:
    """Eigenvalue spectrum of the covariance matrix of a point set.

    The covariance uses the 1/n normalization. Returns the m = min(n, D)
    largest eigenvalues in descending order, clamped to >= 0.

    When D > n the spectrum is computed from the n x n Gram matrix of the
    centered points, whose eigenvalues (scaled by 1/n) coincide with the
    nonzero eigenvalues of the D x D covariance. This keeps image-sized
    ambient dimensions (e.g. 4096) tractable for small subsets.

    Parameters
    ----------
    points : PointSet
    method : {"auto", "gram", "direct"}
        "auto" picks the Gram path when D > n. The explicit values exist so
        both paths can be cross-checked against each other.
    """
    x = points.points
    n, dim = x.shape
    m = min(n, dim)
    centered = x - x.mean(axis=0)
    if method == "auto":
        method = "gram" if dim > n else "direct"
    if method == "gram":
        mat = centered @ centered.T / n
    elif method == "direct":
        mat = centered.T @ centered / n
    else:
        raise ValueError(f"unknown method {method!r}")
    lam = np.linalg.eigvalsh(mat)[::-1]
    lam = _clamp_spectrum(lam)
    return Spectrum(lam[:m], subset_size=n)


def eigendecompose_symmetric(matrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecompose a symmetric real matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues in descending
    order and eigenvectors as orthonormal columns, so that
    ``matrix == eigenvectors @ diag(eigenvalues) @ eigenvectors.T``.

    The sign of each eigenvector is fixed so its largest-magnitude component
    is positive, which makes the output deterministic.

    Raises
    ------
    ValueError
        If the input is not square, contains non-finite entries, or is
        asymmetric beyond SYMMETRY_RTOL relative to its largest entry.
    """
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if not np.isfinite(mat).all():
        raise ValueError("matrix contains NaN or Inf")
    scale = float(np.abs(mat).max(initial=0.0))
    if float(np.abs(mat - mat.T).max(initial=0.0)) > SYMMETRY_RTOL * max(scale, 1e-300):
        raise ValueError("matrix is not symmetric")

    eigvals, eigvecs = np.linalg.eigh(mat)
    order = np.arange(eigvals.size - 1, -1, -1)
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    # Deterministic sign: largest-magnitude component of each column positive.
    flip = eigvecs[np.abs(eigvecs).argmax(axis=0), np.arange(eigvecs.shape[1])] < 0
    eigvecs[:, flip] *= -1.0
    return eigvals, eigvecs
