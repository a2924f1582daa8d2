"""Network data model and the diagonally balanced matrix class.

Pair-indexed storage: quantities attached to unordered node pairs live in
flat arrays of length n*(n-1)/2, ordered row-major over the strict lower
triangle, i.e. pair (i, j) with i > j sits at offset i*(i-1)/2 + j.  This is
the order produced by ``numpy.tril_indices(n, -1)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError


def pair_count(n):
    return n * (n - 1) // 2


def pair_offset(i, j, n=None):
    """Flat offset of unordered pair {i, j} in lower-triangle row-major order."""
    i = np.asarray(i)
    j = np.asarray(j)
    if np.any(i == j):
        raise DataError("self-pairs have no offset")
    hi = np.maximum(i, j)
    lo = np.minimum(i, j)
    return hi * (hi - 1) // 2 + lo


def pair_indices(n):
    """(rows, cols) node ids for all pairs in storage order; rows > cols."""
    return np.tril_indices(n, -1)


class NetworkData:
    """An undirected network with pair covariates.

    Parameters
    ----------
    adjacency : (n, n) array
        Symmetric edge weights with zero diagonal (self-loops rejected).
    covariates : (n*(n-1)/2, p) array
        One covariate vector per unordered pair, in lower-triangle
        row-major order; p >= 1.

    Immutable after construction: both arrays are copied and marked
    read-only, so instances are safe for concurrent reads.
    """

    def __init__(self, adjacency, covariates):
        a = np.array(adjacency, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DataError(f"adjacency must be square, got shape {a.shape}")
        n = a.shape[0]
        if n < 2:
            raise DataError("a network needs at least two nodes")
        if not np.all(np.isfinite(a)):
            raise DataError("adjacency contains non-finite entries")
        if np.any(np.diag(a) != 0.0):
            bad = np.nonzero(np.diag(a))[0]
            raise DataError(f"self-loops are not allowed (nodes {bad.tolist()})")
        if not np.array_equal(a, a.T):
            raise DataError("adjacency must be exactly symmetric")

        z = np.array(covariates, dtype=float)
        if z.ndim == 1:
            z = z[:, None]
        if z.ndim != 2 or z.shape[0] != pair_count(n) or z.shape[1] < 1:
            raise DataError(
                f"covariates must have shape ({pair_count(n)}, p>=1), got {z.shape}"
            )
        if not np.all(np.isfinite(z)):
            raise DataError("covariates contain non-finite entries")

        a.setflags(write=False)
        z.setflags(write=False)
        self.adjacency = a
        self.covariates = z
        self.n = n
        self.rows, self.cols = pair_indices(n)

    @property
    def n_pairs(self):
        return pair_count(self.n)

    @property
    def n_covariates(self):
        return self.covariates.shape[1]

    @property
    def pair_weights(self):
        """Edge weights in pair storage order."""
        return self.adjacency[self.rows, self.cols]

    @property
    def degrees(self):
        """d_i = sum of row i of the adjacency (diagonal is zero)."""
        return self.adjacency.sum(axis=1)

    def node_pair_sums(self, pair_values):
        """Per-node sums over incident pairs of a pair-indexed array.

        For values x indexed by unordered pairs, returns the vector with
        entries sum_{j != i} x_ij.  Accepts shape (n_pairs,) or (n_pairs, k).
        """
        x = np.asarray(pair_values)
        if x.ndim == 1:
            return np.bincount(self.rows, weights=x, minlength=self.n) + np.bincount(
                self.cols, weights=x, minlength=self.n
            )
        out = np.empty((self.n, x.shape[1]))
        for k in range(x.shape[1]):
            out[:, k] = np.bincount(
                self.rows, weights=x[:, k], minlength=self.n
            ) + np.bincount(self.cols, weights=x[:, k], minlength=self.n)
        return out


def degrees(data):
    """Degree sequence of a network."""
    return data.degrees


def covariate_magnitude(data):
    """Largest absolute covariate entry over all pairs (design magnitude)."""
    z = data.covariates
    if z.size == 0:
        raise DataError("network has no covariates")
    return float(np.abs(z).max())


def support_violations(data, family):
    """Pair offsets whose edge weight lies outside the family's support.

    Binary families expect weights in {0, 1}; count families expect
    nonnegative integers.  Returns an index array (empty when clean).
    Fractional pseudo-networks built from exact edge means intentionally
    violate binary support, so violations are reported, not raised.
    """
    w = data.pair_weights
    if family.support == "binary":
        bad = ~np.isin(w, (0.0, 1.0))
    else:
        bad = (w < 0) | (w != np.floor(w))
    return np.nonzero(bad)[0]


@dataclass(frozen=True)
class BalanceCheck:
    """Result of a diagonally-balanced-class membership test."""

    is_member: bool
    min_offdiag: float
    max_offdiag: float


def check_diagonally_balanced(v, rel_tol=1e-10):
    """Test membership in the diagonally balanced positive matrix class.

    A member has strictly positive off-diagonal entries and each diagonal
    entry equal to the sum of the off-diagonal entries in its row, up to an
    accumulated-rounding allowance of n * max_offdiag * rel_tol.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise DataError(f"expected a square matrix, got shape {v.shape}")
    n = v.shape[0]
    if n < 2:
        raise DataError("balance is undefined for matrices smaller than 2x2")
    off_mask = ~np.eye(n, dtype=bool)
    off = v[off_mask]
    m_n = float(off.min())
    M_n = float(off.max())
    if m_n <= 0.0:
        return BalanceCheck(False, m_n, M_n)
    row_off_sums = v.sum(axis=1) - np.diag(v)
    tol = n * M_n * rel_tol
    balanced = bool(np.all(np.abs(np.diag(v) - row_off_sums) <= tol))
    return BalanceCheck(balanced, m_n, M_n)


def diagonal_inverse_approx(v):
    """Diagonal approximation to the inverse of a balanced matrix.

    Returns diag(1/v_11, ..., 1/v_nn).  For members of the balanced class
    the max-norm error against the true inverse shrinks as n grows.
    """
    v = np.asarray(v, dtype=float)
    d = np.diag(v)
    if np.any(d <= 0.0):
        raise DataError("diagonal entries must be strictly positive")
    return np.diag(1.0 / d)


def random_balanced_matrix(n, low, high, rng):
    """Random member of the balanced class with off-diagonals in [low, high]."""
    if not 0 < low <= high:
        raise DataError("need 0 < low <= high")
    v = np.zeros((n, n))
    rows, cols = pair_indices(n)
    off = rng.uniform(low, high, size=rows.size)
    v[rows, cols] = off
    v[cols, rows] = off
    v[np.diag_indices(n)] = v.sum(axis=1)
    return v
