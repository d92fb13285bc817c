"""Linear algebra for the signature-(d,d) Minkowski space R^d_d.

Points are vectors ``v = (v+, v-)`` in R^{2d}; the pseudoscalar product
is ``<u, v> = <u+, v+> - <u-, v->`` with Euclidean products on each
block.  The module provides the product itself, complementary isotropic
splits with their projections, the Vandermonde-free moment curve, exact
and floating linear solves against the Delta/Sigma pairing, a QL
factorization, and affine-rank tests.

Everything here is a pure function over immutable values and works for
both scalar backends; only :func:`ql_decompose` is float-only (it needs
square roots).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from gmpy2 import mpq

from .errors import DimensionMismatch, RankDeficientRows
from .scalars import DEFAULT_TOLERANCES, Tolerances, is_exact


@dataclass(frozen=True)
class MinkVector:
    """A point of R^d_d: ``coords[:d]`` is the positive block, the rest
    the negative block."""

    d: int
    coords: tuple

    def __post_init__(self):
        if self.d < 1:
            raise DimensionMismatch(f"d must be >= 1, got {self.d}")
        if len(self.coords) != 2 * self.d:
            raise DimensionMismatch(
                f"expected {2 * self.d} coordinates, got {len(self.coords)}"
            )

    @property
    def pos(self) -> tuple:
        return self.coords[: self.d]

    @property
    def neg(self) -> tuple:
        return self.coords[self.d :]

    def __add__(self, other: "MinkVector") -> "MinkVector":
        _check_same_space(self, other)
        return MinkVector(self.d, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "MinkVector") -> "MinkVector":
        _check_same_space(self, other)
        return MinkVector(self.d, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def scale(self, factor) -> "MinkVector":
        return MinkVector(self.d, tuple(factor * c for c in self.coords))

    def as_floats(self) -> "MinkVector":
        return MinkVector(self.d, tuple(float(c) for c in self.coords))


def _check_same_space(u: MinkVector, v: MinkVector) -> None:
    if u.d != v.d:
        raise DimensionMismatch(f"mixed signature halves: {u.d} vs {v.d}")


def mink_inner(u: MinkVector, v: MinkVector):
    """Pseudoscalar product ``<u+, v+> - <u-, v->``."""
    _check_same_space(u, v)
    d = u.d
    uc, vc = u.coords, v.coords
    total = uc[0] * vc[0]
    for i in range(1, d):
        total += uc[i] * vc[i]
    for i in range(d, 2 * d):
        total -= uc[i] * vc[i]
    return total


def squared_length(u: MinkVector, v: MinkVector):
    """Squared length ``<u - v, u - v>`` of the segment from v to u."""
    _check_same_space(u, v)
    d = u.d
    uc, vc = u.coords, v.coords
    total = None
    for i in range(d):
        t = uc[i] - vc[i]
        total = t * t if total is None else total + t * t
    for i in range(d, 2 * d):
        t = uc[i] - vc[i]
        total -= t * t
    return total


@dataclass(frozen=True)
class IsotropicSplit:
    """A pair of complementary isotropic d-subspaces (Sigma, Delta).

    ``transform`` is the 2d x 2d ortho-Lorentz matrix F mapping this
    split onto the standard one (Sigma -> diagonal, Delta ->
    antidiagonal); ``None`` means the identity, i.e. the standard split
    itself.  ``inverse`` is F^-1, stored explicitly.
    """

    d: int
    transform: Optional[tuple] = None  # rows of F, or None for identity
    inverse: Optional[tuple] = None

    def to_standard(self, v: MinkVector) -> MinkVector:
        if self.transform is None:
            return v
        return MinkVector(self.d, _mat_vec(self.transform, v.coords))

    def from_standard(self, v: MinkVector) -> MinkVector:
        if self.transform is None:
            return v
        return MinkVector(self.d, _mat_vec(self.inverse, v.coords))


def _mat_vec(rows: tuple, vec: Sequence) -> tuple:
    out = []
    for row in rows:
        acc = row[0] * vec[0]
        for a, b in zip(row[1:], vec[1:]):
            acc += a * b
        out.append(acc)
    return tuple(out)


def standard_split(d: int) -> IsotropicSplit:
    """The split Sigma = {(v,v)}, Delta = {(v,-v)}; F is the identity."""
    if d < 1:
        raise DimensionMismatch(f"d must be >= 1, got {d}")
    return IsotropicSplit(d=d)


def _half(x):
    # exact scalars divide by mpq(2) to stay exact; floats just halve
    if isinstance(x, float):
        return x * 0.5
    return mpq(x) / 2


def project_delta(split: IsotropicSplit, v: MinkVector) -> MinkVector:
    """Projection onto Delta along Sigma: (v+, v-) -> ((v+ - v-)/2, (v- - v+)/2)
    in standard coordinates, conjugated through F for other splits."""
    w = split.to_standard(v)
    d = w.d
    half_diff = tuple(_half(w.coords[i] - w.coords[d + i]) for i in range(d))
    out = MinkVector(d, half_diff + tuple(-x for x in half_diff))
    return split.from_standard(out)


def project_sigma(split: IsotropicSplit, v: MinkVector) -> MinkVector:
    """Projection onto Sigma along Delta; complements project_delta."""
    w = split.to_standard(v)
    d = w.d
    half_sum = tuple(_half(w.coords[i] + w.coords[d + i]) for i in range(d))
    out = MinkVector(d, half_sum + half_sum)
    return split.from_standard(out)


def delta_point(split: IsotropicSplit, w: Sequence) -> MinkVector:
    """The Delta point with standard-split representative (w, -w)."""
    d = split.d
    if len(w) != d:
        raise DimensionMismatch(f"expected {d} coordinates, got {len(w)}")
    std = MinkVector(d, tuple(w) + tuple(-x for x in w))
    return split.from_standard(std)


def sigma_point(split: IsotropicSplit, s: Sequence) -> MinkVector:
    """The Sigma point with standard-split representative (s, s)."""
    d = split.d
    if len(s) != d:
        raise DimensionMismatch(f"expected {d} coordinates, got {len(s)}")
    std = MinkVector(d, tuple(s) + tuple(s))
    return split.from_standard(std)


def delta_coordinates(split: IsotropicSplit, v: MinkVector) -> tuple:
    """Coordinates w of P_Delta(v) in the split's frame, i.e. the w with
    P_Delta(v) = delta_point(split, w)."""
    w = split.to_standard(v)
    d = w.d
    return tuple(_half(w.coords[i] - w.coords[d + i]) for i in range(d))


def sigma_coordinates(split: IsotropicSplit, v: MinkVector) -> tuple:
    """Coordinates s of P_Sigma(v) in the split's frame."""
    w = split.to_standard(v)
    d = w.d
    return tuple(_half(w.coords[i] + w.coords[d + i]) for i in range(d))


def moment_curve_point(t, d: int) -> tuple:
    """The point (t, t^2, ..., t^d) of the moment curve in R^d."""
    out = []
    acc = t
    for _ in range(d):
        out.append(acc)
        acc = acc * t
    return tuple(out)


def lorentz_defect(split: IsotropicSplit) -> float:
    """Max deviation of <Fe_i, Fe_j> from <e_i, e_j> over basis pairs.

    Zero (up to roundoff) certifies that the split's transform is a
    Lorentz map of R^d_d.
    """
    d = split.d
    if split.transform is None:
        return 0.0
    basis = []
    for i in range(2 * d):
        coords = [0.0] * (2 * d)
        coords[i] = 1.0
        basis.append(split.to_standard(MinkVector(d, tuple(coords))))
    worst = 0.0
    for i in range(2 * d):
        for j in range(i, 2 * d):
            expected = 0.0
            if i == j:
                expected = 1.0 if i < d else -1.0
            got = mink_inner(basis[i], basis[j])
            worst = max(worst, abs(float(got) - expected))
    return worst


# ---------------------------------------------------------------------------
# rank and solving


def _coords_of(point) -> Sequence:
    if isinstance(point, MinkVector):
        return point.coords
    return point


def _is_float_data(rows) -> bool:
    for row in rows:
        for x in row:
            if isinstance(x, float):
                return True
    return False


def _echelon(rows, float_mode: bool, rank_rel: float):
    """Reduce rows in order; return (rank, first_dependent_index).

    Rows are processed in input order so the reported dependent index is
    the first row lying in the span of its predecessors.
    """
    work = [list(r) for r in rows]
    if not work:
        return 0, None
    width = len(work[0])
    threshold = 0
    if float_mode:
        scale = max((abs(x) for r in work for x in r), default=0.0)
        threshold = rank_rel * scale
    pivots = []  # (col, row) with row normalized to pivot 1
    rank = 0
    first_dep = None
    for idx, row in enumerate(work):
        for col, prow in pivots:
            factor = row[col]
            if factor:
                for t in range(width):
                    row[t] -= factor * prow[t]
        # pick pivot column: largest magnitude for floats, first nonzero exact
        pivot_col = -1
        if float_mode:
            best = threshold
            for t in range(width):
                a = abs(row[t])
                if a > best:
                    best = a
                    pivot_col = t
        else:
            for t in range(width):
                if row[t]:
                    pivot_col = t
                    break
        if pivot_col < 0:
            if first_dep is None:
                first_dep = idx
            continue
        pivot = row[pivot_col]
        normalized = [x / pivot for x in row]
        pivots.append((pivot_col, normalized))
        rank += 1
    return rank, first_dep


def matrix_rank(rows, tolerances: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Rank of a list of row vectors (exact or float per the data)."""
    rows = [list(_coords_of(r)) for r in rows]
    rank, _ = _echelon(rows, _is_float_data(rows), tolerances.rank_rel)
    return rank


def affine_rank(points, tolerances: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Rank of {p_i - p_0}; len(points) - 1 iff affinely independent."""
    if not points:
        raise ValueError("affine_rank of empty point list")
    coords = [_coords_of(p) for p in points]
    base = coords[0]
    width = len(base)
    for c in coords[1:]:
        if len(c) != width:
            raise DimensionMismatch("points of mixed dimension")
    diffs = [[c[t] - base[t] for t in range(width)] for c in coords[1:]]
    return matrix_rank(diffs, tolerances)


def is_affinely_independent(points, tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
    return affine_rank(points, tolerances) == len(points) - 1


def _gauss_solve(matrix, rhs, float_mode: bool, rank_rel: float):
    """Solve a small dense square system by Gaussian elimination.

    Partial pivoting for floats, first-nonzero pivoting for exact
    scalars; deterministic either way.
    """
    k = len(matrix)
    aug = [list(matrix[i]) + [rhs[i]] for i in range(k)]
    threshold = 0
    if float_mode:
        scale = max((abs(x) for row in matrix for x in row), default=0.0)
        threshold = rank_rel * scale
    for col in range(k):
        pivot_row = -1
        if float_mode:
            best = threshold
            for r in range(col, k):
                a = abs(aug[r][col])
                if a > best:
                    best = a
                    pivot_row = r
        else:
            for r in range(col, k):
                if aug[r][col]:
                    pivot_row = r
                    break
        if pivot_row < 0:
            raise RankDeficientRows(col, "singular system")
        if pivot_row != col:
            aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        pivot = aug[col][col]
        for r in range(col + 1, k):
            factor = aug[r][col]
            if factor:
                factor = factor / pivot
                for t in range(col, k + 1):
                    aug[r][t] -= factor * aug[col][t]
    out = [None] * k
    for col in range(k - 1, -1, -1):
        acc = aug[col][k]
        for t in range(col + 1, k):
            acc -= aug[col][t] * out[t]
        out[col] = acc / aug[col][col]
    return out


def solve_pairing_system(rows, rhs, d: Optional[int] = None,
                         tolerances: Tolerances = DEFAULT_TOLERANCES) -> tuple:
    """Solve ``rows . x = rhs`` for x in R^d, k = len(rows) <= d.

    Returns the unique solution when k = d and the minimum-Euclidean-
    norm solution when k < d (x = A^T (A A^T)^-1 b, computed by exact or
    pivoted elimination on the Gram matrix).  Raises
    :class:`RankDeficientRows` carrying the first dependent row index
    when the rows are not linearly independent.
    """
    rows = [list(r) for r in rows]
    k = len(rows)
    if k == 0:
        if d is None:
            raise ValueError("empty system needs an explicit dimension d")
        return tuple([0] * d)  # int zeros coerce under either backend
    if d is None:
        d = len(rows[0])
    for row in rows:
        if len(row) != d:
            raise DimensionMismatch("row length differs from d")
    if len(rhs) != k:
        raise DimensionMismatch("rhs length differs from row count")
    if k > d:
        raise RankDeficientRows(d, f"{k} rows cannot be independent in R^{d}")
    float_mode = _is_float_data(rows) or any(isinstance(x, float) for x in rhs)
    rank, dep = _echelon(rows, float_mode, tolerances.rank_rel)
    if dep is not None:
        raise RankDeficientRows(dep)
    gram = [[_dot(rows[i], rows[j]) for j in range(k)] for i in range(k)]
    y = _gauss_solve(gram, list(rhs), float_mode, tolerances.rank_rel)
    out = []
    for t in range(d):
        acc = y[0] * rows[0][t]
        for j in range(1, k):
            acc += y[j] * rows[j][t]
        out.append(acc)
    return tuple(out)


def _dot(a, b):
    acc = a[0] * b[0]
    for x, y in zip(a[1:], b[1:]):
        acc += x * y
    return acc


# ---------------------------------------------------------------------------
# QL decomposition (float only: needs square roots)


@dataclass(frozen=True)
class QLResult:
    """Factorization A = Q L, Q orthogonal, L lower-triangular with
    non-negative diagonal."""

    q: np.ndarray
    l: np.ndarray


# residual-norm fraction below which a column counts as dependent and a
# replacement direction is drafted from the standard basis
_QL_DEGENERATE = 1e-12


def ql_decompose(a) -> QLResult:
    """QL factorization by orthogonalizing columns from last to first.

    Modified Gram-Schmidt with one re-orthogonalization pass; the
    residual norm becomes the diagonal entry, so the diagonal is
    non-negative and the trailing entries are strictly positive exactly
    when the trailing columns of A are linearly independent.  Columns
    that are (numerically) combinations of later ones get a tiny or zero
    diagonal and an arbitrary orthonormal completion direction.
    """
    A = np.asarray(a, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    d = A.shape[0]
    Q = np.zeros((d, d))
    L = np.zeros((d, d))
    for j in range(d - 1, -1, -1):
        v = A[:, j].copy()
        col_norm = float(np.linalg.norm(v))
        for _ in range(2):  # second pass restores orthogonality
            for i in range(d - 1, j, -1):
                c = float(Q[:, i] @ v)
                v -= c * Q[:, i]
                L[i, j] += c
        norm = float(np.linalg.norm(v))
        L[j, j] = norm
        if norm > _QL_DEGENERATE * max(col_norm, 1e-300):
            Q[:, j] = v / norm
        else:
            Q[:, j] = _completion_direction(Q, j, d)
    return QLResult(q=Q, l=L)


def _completion_direction(Q: np.ndarray, j: int, d: int) -> np.ndarray:
    # the complement of the columns built so far is nonempty, so the best
    # basis-vector residual has norm at least 1/sqrt(d); take that one
    best = None
    best_norm = 0.0
    for t in range(d):
        v = np.zeros(d)
        v[t] = 1.0
        for _ in range(2):
            for i in range(d - 1, j, -1):
                v -= float(Q[:, i] @ v) * Q[:, i]
        norm = float(np.linalg.norm(v))
        if norm > best_norm:
            best, best_norm = v / norm, norm
            if best_norm > 0.5:
                break
    return best
