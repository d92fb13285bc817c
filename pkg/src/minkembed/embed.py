"""Constructing isometric embeddings into R^d_d.

Two construction routes:

* :func:`embed_polyhedron` embeds a whole polyhedron from scratch along
  a smallest-last vertex ordering, with one standard isotropic split
  shared by every placement.  It works exactly over rationals or fast
  over floats and needs d at least the degeneracy of the 1-skeleton.

* :func:`extend_embedding` completes a partial embedding without moving
  the placed points.  Each missing vertex gets a fresh isotropic split
  adapted to its placed neighbors plus a generically drawn start point.
  This route is float-only (building a split takes square roots) and
  needs d at least the max vertex degree.

Both reduce every placement to one linear solve: writing the unknown
point as start + h with h in the sigma subspace, the squared-length
conditions become linear in h because sigma is isotropic:

    <u0 - ui, u0 - ui> = <v0 - ui, v0 - ui> + 2<v0 - ui, h>.

In the split's frame h = (s, s) and <x, (s, s)> = <x+ - x-, s>, so each
neighbor contributes the row delta(v0) - delta(ui) and the right side
(target - <v0 - ui, v0 - ui>) / 4.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from gmpy2 import mpq

from .errors import (ConfigError, GenericPointError, InvalidPolyhedron,
                     PlacementError, PreconditionError, RankDeficientRows)
from .linalg import (IsotropicSplit, MinkVector, delta_coordinates,
                     delta_point, is_affinely_independent, matrix_rank,
                     moment_curve_point, ql_decompose, sigma_point,
                     solve_pairing_system, squared_length, standard_split)
from .polyhedron import IndefiniteMetricPolyhedron
from .scalars import (DEFAULT_TOLERANCES, FLOAT, RATIONAL, Tolerances,
                      coerce, is_exact)
from .verify import (SUBSET_BUDGET, VERDICT_FAILED, verify_general_position,
                     verify_isometry)

ANCHOR_AUTO = "auto"
ANCHOR_MOMENT = "moment"
ANCHOR_RANDOM = "random"
ANCHOR_SCHEMES = (ANCHOR_AUTO, ANCHOR_MOMENT, ANCHOR_RANDOM)


@dataclass(frozen=True)
class EmbedConfig:
    """Knobs for both construction routes.

    ``d=None`` means the smallest admissible dimension (the skeleton
    degeneracy, at least 1).  ``backend="auto"`` picks rationals when
    every squared length is exact, floats otherwise.  ``anchors="auto"``
    puts start points on the moment curve for the rational backend and
    draws them uniformly at random for the float backend, where
    moment-curve coordinates grow like n^d and their roundoff would
    drown the verifier.
    """

    d: Optional[int] = None
    backend: str = "auto"
    anchors: str = ANCHOR_AUTO
    seed: int = 0
    certify: bool = False
    retry_budget: int = 100
    certify_budget: int = 20000
    samples: int = 200
    tolerances: Tolerances = DEFAULT_TOLERANCES
    ordering: Optional[Tuple[int, ...]] = None  # precomputed build order


@dataclass
class Embedding:
    """Vertex images in R^d_d plus enough metadata to replay the run."""

    d: int
    backend: str
    points: Dict[int, MinkVector]
    ordering: Optional[Tuple[int, ...]] = None
    degeneracy: Optional[int] = None
    anchor_scheme: Optional[str] = None
    seed: Optional[int] = None
    splits: Optional[Dict[int, IsotropicSplit]] = None

    def vertices(self) -> List[int]:
        return sorted(self.points)

    def point(self, vertex: int) -> MinkVector:
        return self.points[vertex]


def resolve_backend(poly: IndefiniteMetricPolyhedron, requested: str) -> str:
    if requested == "auto":
        if all(is_exact(value) for value in poly.lengths.values()):
            return RATIONAL
        return FLOAT
    if requested in (RATIONAL, FLOAT):
        return requested
    raise ConfigError(f"unknown backend {requested!r}")


def _resolve_anchors(requested: str, backend: str) -> str:
    if requested == ANCHOR_AUTO:
        return ANCHOR_MOMENT if backend == RATIONAL else ANCHOR_RANDOM
    if requested in (ANCHOR_MOMENT, ANCHOR_RANDOM):
        return requested
    raise ConfigError(f"unknown anchor scheme {requested!r}")


def _validated(poly: IndefiniteMetricPolyhedron) -> None:
    defects = poly.validate()
    if defects:
        raise InvalidPolyhedron(defects)


def _dot(a, b):
    acc = a[0] * b[0]
    for x, y in zip(a[1:], b[1:]):
        acc += x * y
    return acc


def _quarter(x):
    if isinstance(x, float):
        return x / 4.0
    return mpq(x) / 4


# random rational anchors use dyadic coordinates in [-1, 1]
_DYADIC = 1 << 30


def _anchor(scheme: str, backend: str, position: int, d: int,
            rng: random.Random) -> tuple:
    if scheme == ANCHOR_MOMENT:
        t = position + 1  # distinct parameters keep any d+1 anchors affinely independent
        if backend == RATIONAL:
            return moment_curve_point(mpq(t), d)
        return moment_curve_point(float(t), d)
    if backend == RATIONAL:
        return tuple(mpq(rng.randrange(-_DYADIC, _DYADIC + 1), _DYADIC)
                     for _ in range(d))
    return tuple(rng.uniform(-1.0, 1.0) for _ in range(d))


# ---------------------------------------------------------------------------
# whole-polyhedron construction (single standard split)


def embed_polyhedron(poly: IndefiniteMetricPolyhedron,
                     config: EmbedConfig = EmbedConfig()) -> Embedding:
    """Isometrically embed ``poly`` into R^d_d.

    Vertices are placed along a smallest-last ordering; every vertex
    gets an anchor in the delta subspace (its image's delta projection,
    fixed up front) and a sigma offset solving the squared-length
    conditions against its already-placed neighbors.  Needs d at least
    the skeleton degeneracy: each vertex then has at most d placed
    neighbors, and distinct moment-curve anchors make the placement
    rows independent.  A vertex with no placed neighbors keeps sigma
    offset zero, so its image is the anchor itself.
    """
    _validated(poly)
    backend = resolve_backend(poly, config.backend)
    scheme = _resolve_anchors(config.anchors, backend)

    if config.ordering is not None:
        order = list(config.ordering)
        if sorted(order) != list(range(poly.n_vertices)):
            raise ConfigError("ordering must be a permutation of the vertices")
        k = poly.back_degree(order)
    else:
        order, k = poly.degeneracy_ordering()

    d = config.d if config.d is not None else max(1, k)
    if d < 1:
        raise ConfigError(f"d must be >= 1, got {d}")
    if k > d:
        raise PreconditionError(
            f"build order needs {k} placed neighbors per vertex but d={d}",
            witness={"degeneracy": k, "d": d})

    rng = random.Random(config.seed)
    if backend == RATIONAL:
        points = _place_all_exact(poly, order, d, scheme, rng, config)
    else:
        points = _place_all_float(poly, order, d, scheme, rng, config)
    return Embedding(d=d, backend=backend, points=points,
                     ordering=tuple(order), degeneracy=k,
                     anchor_scheme=scheme, seed=config.seed)


def _place_all_exact(poly, order, d, scheme, rng, config) -> Dict[int, MinkVector]:
    w: Dict[int, tuple] = {}
    s: Dict[int, tuple] = {}
    for position, v in enumerate(order):
        back = [u for u in poly.neighbors(v) if u in s]
        targets = [coerce(poly.edge_length(v, u), RATIONAL) for u in back]
        # solve for the deviation from the neighbors' mean sigma; the
        # constraints are the same but the numbers stay small
        if back:
            s0 = tuple(sum(s[u][t] for u in back) / len(back)
                       for t in range(d))
        else:
            s0 = tuple([mpq(0)] * d)
        attempts = 0
        while True:
            if v not in w:
                w[v] = _anchor(scheme, RATIONAL, position, d, rng)
            rows = [tuple(w[v][t] - w[u][t] for t in range(d)) for u in back]
            rhs = [targets[j] / 4
                   + _dot(rows[j], tuple(s[back[j]][t] - s0[t]
                                         for t in range(d)))
                   for j in range(len(back))]
            try:
                offset = solve_pairing_system(rows, rhs, d, config.tolerances)
                s[v] = tuple(s0[t] + offset[t] for t in range(d))
                break
            except RankDeficientRows as exc:
                del w[v]
                attempts += 1
                if scheme != ANCHOR_RANDOM or attempts > config.retry_budget:
                    raise PlacementError(
                        v, f"anchor of vertex {v} is affinely dependent on "
                           f"its placed neighbors (row {exc.row_index})") from exc
    points = {}
    for v in order:
        coords = tuple(w[v][t] + s[v][t] for t in range(d)) \
            + tuple(-w[v][t] + s[v][t] for t in range(d))
        points[v] = MinkVector(d, coords)
    return points


# Candidates drawn per vertex on the float backend.  The sigma offset is
# solved as a deviation from the placed neighbors' mean, and among the
# candidate anchors the smallest deviation wins; without that selection
# the deviations compound multiplicatively along the build order and the
# coordinates explode, taking float precision with them.
_FLOAT_TRIALS = 32


def _place_all_float(poly, order, d, scheme, rng, config) -> Dict[int, MinkVector]:
    n = poly.n_vertices
    position = {v: i for i, v in enumerate(order)}
    W = np.empty((n, d), dtype=float)
    S = np.zeros((n, d), dtype=float)
    nprng = np.random.default_rng(config.seed)
    randomized = scheme == ANCHOR_RANDOM

    def draw(count):
        if randomized:
            return nprng.uniform(-1.0, 1.0, (count, d))
        return np.array([_anchor(scheme, FLOAT, pos, d, rng)])

    for pos, v in enumerate(order):
        back = [u for u in poly.neighbors(v) if position[u] < pos]
        if not back:
            W[v] = draw(1)[0]
            continue  # sigma offset stays zero
        idx = np.array(back)
        targets = np.array([float(poly.edge_length(v, u)) for u in back])
        s0 = S[idx].mean(axis=0)
        deviations = S[idx] - s0[None, :]
        attempts = 0
        placed = False
        while not placed:
            cand = draw(_FLOAT_TRIALS if randomized else 1)
            A = cand[:, None, :] - W[idx][None, :, :]
            b = (targets[None, :] / 4.0
                 + np.einsum("tkd,kd->tk", A, deviations))
            gram = A @ A.transpose(0, 2, 1)
            try:
                y = np.linalg.solve(gram, b[..., None])
                t = (A.transpose(0, 2, 1) @ y)[..., 0]
                # one refinement step: the Gram solve squares the
                # conditioning, refinement wins the lost digits back
                r = b - np.einsum("tkd,td->tk", A, t)
                y = np.linalg.solve(gram, r[..., None])
                t = t + (A.transpose(0, 2, 1) @ y)[..., 0]
            except np.linalg.LinAlgError:
                t = np.stack([np.linalg.lstsq(A[i], b[i], rcond=None)[0]
                              for i in range(len(cand))])
            gaps = np.abs(np.einsum("tkd,td->tk", A, t) - b).max(axis=1)
            scale = np.maximum(1.0, np.abs(b).max(axis=1))
            ok = np.isfinite(t).all(axis=1) & (gaps <= 1e-12 * scale)
            if ok.any():
                norms = np.where(ok, np.linalg.norm(t, axis=1), np.inf)
                best = int(np.argmin(norms))
                W[v] = cand[best]
                S[v] = s0 + t[best]
                placed = True
                continue
            attempts += len(cand)
            if randomized and attempts <= config.retry_budget * _FLOAT_TRIALS:
                continue
            rank = matrix_rank([list(row) for row in A[0]], config.tolerances)
            raise PlacementError(
                v, f"placement system for vertex {v} has rank {rank} "
                   f"with {len(back)} placed neighbors")
    points = {}
    for v in order:
        coords = tuple((W[v] + S[v]).tolist()) + tuple((-W[v] + S[v]).tolist())
        points[v] = MinkVector(d, coords)
    return points


# ---------------------------------------------------------------------------
# single placements against an explicit split


@dataclass(frozen=True)
class PlacementProblem:
    """One vertex placement: a split, a start point whose delta
    projection the placed point will keep, the placed neighbor images,
    and the target squared lengths (one per neighbor)."""

    split: IsotropicSplit
    start: MinkVector
    neighbors: Tuple[MinkVector, ...]
    targets: tuple

    def __post_init__(self):
        if len(self.neighbors) != len(self.targets):
            raise ConfigError("one target squared length per neighbor")


def place_vertex(problem: PlacementProblem,
                 tolerances: Tolerances = DEFAULT_TOLERANCES) -> MinkVector:
    """Solve one placement: returns u0 = start + h with h in the sigma
    subspace, squared_length(u0, neighbor_j) == target_j for all j, and
    the delta projection of u0 equal to the start's.

    Needs the start's delta projection affinely independent of the
    neighbors'; otherwise :class:`RankDeficientRows` carries the index
    of the first offending neighbor.  With fewer neighbors than d the
    minimum-norm offset is chosen, so placements are deterministic.
    """
    split = problem.split
    d = split.d
    w0 = delta_coordinates(split, problem.start)
    rows = []
    rhs = []
    for u, c in zip(problem.neighbors, problem.targets):
        wj = delta_coordinates(split, u)
        rows.append(tuple(w0[t] - wj[t] for t in range(d)))
        rhs.append(_quarter(c - squared_length(problem.start, u)))
    offset = solve_pairing_system(rows, rhs, d, tolerances)
    return problem.start + sigma_point(split, offset)


@dataclass(frozen=True)
class SplitCertificate:
    """Witness that a constructed split separates the spanned subspace
    from its sigma part.

    ``matrix`` is (positive block) + (lower-triangularized negative
    block) of the spanned directions in the split's frame; it is lower
    triangular with strictly positive diagonal, hence invertible, which
    says precisely that the span meets the sigma subspace only at 0.
    """

    matrix: tuple
    rank_plus: int
    padded: int


def isotropic_pair_for(points: Sequence[MinkVector], d: int,
                       tolerances: Tolerances = DEFAULT_TOLERANCES
                       ) -> Tuple[IsotropicSplit, SplitCertificate]:
    """Build an isotropic split whose delta projection keeps ``points``
    (at most d+1, affinely independent) affinely independent.

    Following the underlying construction: translate so the first point
    is the origin, pad the difference directions with standard basis
    vectors to a d-dimensional subspace W, rotate the positive blocks so
    W's positive part becomes span(e_1..e_k), then rotate the negative
    blocks by the transposed QL factor so the frame representation of W
    becomes lower triangular with positive diagonal.  That matrix is
    returned as the certificate; its invertibility means W meets the
    new sigma subspace only at 0, so projecting along sigma cannot
    collapse any direction of W.
    """
    if len(points) > d + 1:
        raise PreconditionError(
            f"at most {d + 1} points can be affinely independent in a "
            f"d={d} projection, got {len(points)}")
    two_d = 2 * d
    for p in points:
        if p.d != d:
            raise PreconditionError(f"point dimension {p.d} does not match d={d}")

    cols: List[np.ndarray] = []
    ortho: List[np.ndarray] = []

    def accept(candidate: np.ndarray) -> bool:
        v = candidate.astype(float).copy()
        scale = max(float(np.linalg.norm(v)), 1.0)
        for _ in range(2):
            for q in ortho:
                v -= float(q @ v) * q
        norm = float(np.linalg.norm(v))
        if norm <= tolerances.rank_rel * scale:
            return False
        cols.append(candidate.astype(float))
        ortho.append(v / norm)
        return True

    floats = [p.as_floats() for p in points]
    if floats:
        base = np.array(floats[0].coords)
        for index, p in enumerate(floats[1:], start=1):
            if not accept(np.array(p.coords) - base):
                raise PreconditionError(
                    "input points are affinely dependent",
                    witness={"point_index": index})
    padded = 0
    for i in range(two_d):
        if len(cols) == d:
            break
        e = np.zeros(two_d)
        e[i] = 1.0
        if accept(e):
            padded += 1

    B = np.column_stack(cols)
    Bplus, Bminus = B[:d, :], B[d:, :]
    U, sigma, Vt = np.linalg.svd(Bplus)
    V = Vt.T
    k = 0
    if sigma.size and sigma[0] > 0.0:
        k = int(np.sum(sigma > tolerances.rank_rel * sigma[0]))
    if k:
        C = np.column_stack([V[:, :k] / sigma[:k], V[:, k:]])
    else:
        C = V
    R = U.T
    Splus = R @ Bplus @ C   # approximately [[I_k, 0], [0, 0]]
    Sminus = Bminus @ C
    ql = ql_decompose(-Sminus)
    Fminus = ql.q.T
    M = Splus + ql.l

    F = np.zeros((two_d, two_d))
    F[:d, :d] = R
    F[d:, d:] = Fminus
    split = IsotropicSplit(
        d=d,
        transform=tuple(tuple(row) for row in F.tolist()),
        inverse=tuple(tuple(row) for row in F.T.tolist()))
    certificate = SplitCertificate(
        matrix=tuple(tuple(row) for row in M.tolist()),
        rank_plus=k, padded=padded)
    return split, certificate


def choose_generic_delta_point(split: IsotropicSplit,
                               neighbor_points: Sequence[MinkVector],
                               rng: random.Random, *,
                               placed_points: Sequence[MinkVector] = (),
                               certify: bool = False,
                               retry_budget: int = 100,
                               certify_budget: int = 20000,
                               tolerances: Tolerances = DEFAULT_TOLERANCES
                               ) -> MinkVector:
    """Draw a start point in the split's delta subspace whose projection
    is affinely independent of the neighbors' (a probability-1 event,
    lazily re-drawn on failure).

    Default draws are floats in a box matched to the neighbor
    projections, keeping coordinates (and so verification roundoff)
    small.  With ``certify`` the draw uses integer coordinates in
    [-B, B], B = 10*(placed+d)^2, and every subset of ``placed_points``
    of size up to d is checked as well, so the new point provably avoids
    the affine hulls spanned by placed projections; the subset count is
    capped by ``certify_budget``.
    """
    d = split.d
    nbr_w = [delta_coordinates(split, p.as_floats()) for p in neighbor_points]
    if certify:
        placed_w = [delta_coordinates(split, p.as_floats()) for p in placed_points]
        subset_size = min(d, len(placed_w))
        n_subsets = comb(len(placed_w), subset_size)
        if n_subsets > certify_budget:
            raise GenericPointError(
                0, f"certification needs {n_subsets} subset checks, "
                   f"budget is {certify_budget}")
        bound = 10 * (len(placed_w) + d) ** 2
    else:
        # a box centered on the neighbor projections keeps the start
        # close to them, which keeps the linear system's right-hand
        # sides (and so the final coordinates) small
        if nbr_w:
            center = tuple(sum(wj[t] for wj in nbr_w) / len(nbr_w)
                           for t in range(d))
            spread = max([1.0] + [abs(wj[t] - center[t])
                                  for wj in nbr_w for t in range(d)])
        else:
            center = (0.0,) * d
            spread = 1.0
        box = 2.0 * spread

    for attempt in range(1, retry_budget + 1):
        if certify:
            w0 = tuple(float(rng.randint(-bound, bound)) for _ in range(d))
        else:
            w0 = tuple(center[t] + rng.uniform(-box, box) for t in range(d))
        rows = [[w0[t] - wj[t] for t in range(d)] for wj in nbr_w]
        if rows and matrix_rank(rows, tolerances) < len(rows):
            continue
        if certify and placed_w and subset_size:
            ok = True
            for subset in itertools.combinations(placed_w, subset_size):
                if not is_affinely_independent([w0] + list(subset), tolerances):
                    ok = False
                    break
            if not ok:
                continue
        return delta_point(split, w0)
    raise GenericPointError(retry_budget,
                            "no generic start point within the retry budget")


# ---------------------------------------------------------------------------
# extension of partial embeddings


def extend_embedding(poly: IndefiniteMetricPolyhedron, partial: Embedding,
                     config: EmbedConfig = EmbedConfig()) -> Embedding:
    """Complete ``partial`` to all vertices without moving placed points.

    Preconditions (all checked): max vertex degree <= d, the placed
    points honor every squared length between them, and the placed
    images are in d-general position (exhaustively when the subset count
    is within budget, sampled otherwise).  Missing vertices are
    processed in index order; each gets its own isotropic split adapted
    to its placed neighbors, a generic start point, and one linear
    solve.  The carried-over points are the exact same values as in
    ``partial``, whatever their scalar type.
    """
    _validated(poly)
    d = partial.d
    if config.d is not None and config.d != d:
        raise ConfigError(f"config.d={config.d} but the partial embedding has d={d}")
    if config.backend == RATIONAL:
        raise ConfigError("extension is float-only; use embed_polyhedron "
                          "for the exact route")
    max_deg = poly.max_degree()
    if max_deg > d:
        raise PreconditionError(
            f"max vertex degree {max_deg} exceeds d={d}",
            witness={"max_degree": max_deg, "d": d})
    for v in partial.points:
        if not 0 <= v < poly.n_vertices:
            raise PreconditionError(f"partial embedding places unknown vertex {v}")
        if partial.points[v].d != d:
            raise PreconditionError(f"placed point {v} lives in d={partial.points[v].d}")

    iso = verify_isometry(poly, partial, mode="partial")
    if not iso.passed:
        raise PreconditionError(
            f"partial embedding violates edge {iso.worst_edge} by relative "
            f"residual {iso.max_residual:.3e}",
            witness={"edge": iso.worst_edge, "residual": iso.max_residual})
    _check_general_position(list(partial.points.values()), d,
                            sorted(partial.points), config,
                            "partial embedding")

    points: Dict[int, MinkVector] = dict(partial.points)
    splits: Dict[int, IsotropicSplit] = {}
    rng = random.Random(config.seed)
    missing = [v for v in range(poly.n_vertices) if v not in points]

    for v in missing:
        neighbors = [u for u in poly.neighbors(v) if u in points]
        images = [points[u] for u in neighbors]
        targets = tuple(float(coerce(poly.edge_length(v, u), FLOAT))
                        for u in neighbors)
        split, _certificate = isotropic_pair_for(images, d, config.tolerances)
        splits[v] = split
        image_floats = tuple(p.as_floats() for p in images)
        last_error: Optional[Exception] = None
        best = None
        best_worst = float("inf")
        # keep the best start point out of several draws; the residual
        # scale matches the verifier's (relative to the edge length)
        for _ in range(config.retry_budget):
            start = choose_generic_delta_point(
                split, images, rng,
                placed_points=tuple(points.values()) if config.certify else (),
                certify=config.certify,
                retry_budget=config.retry_budget,
                certify_budget=config.certify_budget,
                tolerances=config.tolerances)
            try:
                candidate = place_vertex(
                    PlacementProblem(split, start, image_floats, targets),
                    config.tolerances)
            except RankDeficientRows as exc:
                last_error = exc
                continue
            worst = 0.0
            for u_img, c in zip(image_floats, targets):
                got = squared_length(candidate, u_img)
                worst = max(worst, abs(got - c) / max(1.0, abs(c)))
            if worst < best_worst:
                best, best_worst = candidate, worst
            if worst <= 1e-12:
                break
        if best is None or best_worst > 1e-10:
            raise PlacementError(
                v, f"could not place vertex {v} within the retry budget "
                   f"(best residual {best_worst:.3e})"
            ) from last_error
        points[v] = best

    result = Embedding(d=d, backend=FLOAT, points=points,
                       anchor_scheme=ANCHOR_RANDOM, seed=config.seed,
                       splits=splits)
    _check_general_position(list(points.values()), d, sorted(points), config,
                            "extended embedding")
    return result


def _check_general_position(images, d, vertex_ids, config, label) -> None:
    size = min(len(images), d + 1)
    feasible = len(images) <= 1 or comb(len(images), size) <= SUBSET_BUDGET
    mode = "exhaustive" if feasible else "sampled"
    report = verify_general_position(images, d, mode=mode,
                                     samples=config.samples,
                                     seed=config.seed,
                                     tolerances=config.tolerances)
    if report.verdict == VERDICT_FAILED:
        witness = tuple(vertex_ids[i] for i in report.witness)
        raise PreconditionError(
            f"{label} is not in {d}-general position: vertices {witness} "
            f"have affinely dependent images",
            witness={"vertices": witness})
