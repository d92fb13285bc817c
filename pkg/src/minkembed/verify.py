"""Independent checking of embeddings.

Everything here recomputes inner products from raw coordinates; nothing
trusts intermediates of the construction pipeline.  Three checks, each
with its own report fragment, plus an assembler:

* edge isometry: per-edge residuals against the squared lengths,
  relative to max(1, |target|);
* general position: affine independence of every (d+1)-subset of the
  images, exhaustively within a subset budget or sampled beyond it,
  never silently passing;
* injectivity: dimension gate d >= 2n+1 plus certified general position
  imply the map is injective on the whole polyhedron; direct spot
  checks (distinct vertex images, barycentric samples on vertex-disjoint
  simplex faces) run regardless.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import PreconditionError
from .linalg import MinkVector, affine_rank, squared_length
from .polyhedron import IndefiniteMetricPolyhedron
from .scalars import DEFAULT_TOLERANCES, Tolerances, format_number, is_exact

DEFAULT_TOLERANCE = 1e-9
SUBSET_BUDGET = 200_000

VERDICT_CERTIFIED = "certified"
VERDICT_SAMPLED_PASS = "sampled_pass"
VERDICT_NOT_CERTIFIED = "not_certified"
VERDICT_FAILED = "failed"
VERDICT_EMBEDDING = "embedding"
VERDICT_INAPPLICABLE = "inapplicable"


def _edge_key(i: int, j: int) -> str:
    return f"{min(i, j)}-{max(i, j)}"


@dataclass
class IsometryReport:
    passed: bool
    residuals: Dict[Tuple[int, int], object]
    max_residual: float
    worst_edge: Optional[Tuple[int, int]]
    tolerance: float
    mode: str
    missing_vertices: Tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "residuals": {_edge_key(*e): format_number(r)
                          for e, r in self.residuals.items()},
            "max_residual": format_number(self.max_residual),
            "worst_edge": list(self.worst_edge) if self.worst_edge else None,
            "tolerance": format_number(self.tolerance),
            "mode": self.mode,
            "missing_vertices": list(self.missing_vertices),
        }


@dataclass
class GeneralPositionReport:
    mode: str
    verdict: str
    witness: Optional[Tuple[int, ...]]
    subsets_checked: int
    budget: int

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "verdict": self.verdict,
            "witness": list(self.witness) if self.witness else None,
            "subsets_checked": self.subsets_checked,
            "budget": self.budget,
        }


@dataclass
class InjectivityReport:
    applicable: bool
    verdict: str
    distinct_images: bool
    samples_checked: int
    min_separation: Optional[float]
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "applicable": self.applicable,
            "verdict": self.verdict,
            "distinct_images": self.distinct_images,
            "samples_checked": self.samples_checked,
            "min_separation": None if self.min_separation is None
            else format_number(self.min_separation),
            "witness": self.witness,
        }


@dataclass
class VerificationReport:
    isometry: IsometryReport
    general_position: GeneralPositionReport
    injectivity: InjectivityReport
    passed: bool

    def to_dict(self) -> dict:
        return {
            "isometry": self.isometry.to_dict(),
            "general_position": self.general_position.to_dict(),
            "injectivity": self.injectivity.to_dict(),
            "passed": self.passed,
        }


# ---------------------------------------------------------------------------
# isometry


def verify_isometry(poly: IndefiniteMetricPolyhedron, embedding,
                    tolerance: float = DEFAULT_TOLERANCE,
                    mode: str = "total") -> IsometryReport:
    """Residual r_e = squared_length(images) - g(e) for every skeleton
    edge; passes iff every |r_e| <= tolerance * max(1, |g(e)|).

    Exact scalar data is compared exactly (the reported relative
    residual is then 0.0 or the exact gap).  In "partial" mode edges
    with an unplaced endpoint are skipped and reported; in "total" mode
    an unplaced endpoint is an error.
    """
    points = embedding.points
    residuals: Dict[Tuple[int, int], object] = {}
    missing = set()
    worst = 0.0
    worst_edge = None
    for (a, b) in poly.skeleton_edges():
        if a not in points or b not in points:
            if mode == "total":
                absent = a if a not in points else b
                raise PreconditionError(
                    f"vertex {absent} has no image but edge ({a},{b}) needs one")
            missing.update(v for v in (a, b) if v not in points)
            continue
        target = poly.edge_length(a, b)
        u, v = points[a], points[b]
        exact = (is_exact(target) and all(is_exact(c) for c in u.coords)
                 and all(is_exact(c) for c in v.coords))
        if exact:
            r = squared_length(u, v) - target
        else:
            r = squared_length(u.as_floats(), v.as_floats()) - float(target)
        residuals[(a, b)] = r
        rel = abs(float(r)) / max(1.0, abs(float(target)))
        if rel >= worst:
            worst = rel
            worst_edge = (a, b)
    passed = worst <= tolerance
    return IsometryReport(passed=passed, residuals=residuals,
                          max_residual=worst, worst_edge=worst_edge,
                          tolerance=tolerance, mode=mode,
                          missing_vertices=tuple(sorted(missing)))


# ---------------------------------------------------------------------------
# general position


def _dependent(points: Sequence) -> bool:
    return affine_rank(points) < len(points) - 1


def _minimal_dependent(points: Sequence, indices: List[int]) -> Tuple[int, ...]:
    """Shrink a dependent index set while it stays dependent, so the
    witness is re-checkable and as small as possible."""
    current = list(indices)
    shrunk = True
    while shrunk and len(current) > 1:
        shrunk = False
        for drop in list(current):
            trial = [i for i in current if i != drop]
            if _dependent([points[i] for i in trial]):
                current = trial
                shrunk = True
                break
    return tuple(current)


def verify_general_position(points: Sequence, d: int,
                            mode: str = "exhaustive",
                            budget: int = SUBSET_BUDGET,
                            samples: int = 1000,
                            seed: int = 0,
                            tolerances: Tolerances = DEFAULT_TOLERANCES
                            ) -> GeneralPositionReport:
    """Check that every subset of at most d+1 points is affinely
    independent.

    Only subsets of size exactly min(len(points), d+1) are tested: a
    dependent smaller subset stays dependent inside any superset, so the
    verdicts coincide.  Exhaustive mode refuses to exceed ``budget``
    subsets and reports "not_certified" instead of silently sampling.
    """
    n = len(points)
    size = min(n, d + 1)
    if n <= 1 or size <= 1:
        return GeneralPositionReport(mode=mode, verdict=VERDICT_CERTIFIED,
                                     witness=None, subsets_checked=0,
                                     budget=budget)
    if mode == "exhaustive":
        total = comb(n, size)
        if total > budget:
            return GeneralPositionReport(mode=mode,
                                         verdict=VERDICT_NOT_CERTIFIED,
                                         witness=None, subsets_checked=0,
                                         budget=budget)
        subset_iter = itertools.combinations(range(n), size)
        pass_verdict = VERDICT_CERTIFIED
    elif mode == "sampled":
        rng = random.Random(seed)
        subset_iter = (tuple(sorted(rng.sample(range(n), size)))
                       for _ in range(samples))
        pass_verdict = VERDICT_SAMPLED_PASS
    else:
        raise ValueError(f"unknown mode {mode!r}")

    checked = 0
    for subset in subset_iter:
        checked += 1
        chosen = [points[i] for i in subset]
        if affine_rank(chosen, tolerances) < size - 1:
            witness = _minimal_dependent(points, list(subset))
            return GeneralPositionReport(mode=mode, verdict=VERDICT_FAILED,
                                         witness=witness,
                                         subsets_checked=checked,
                                         budget=budget)
    return GeneralPositionReport(mode=mode, verdict=pass_verdict,
                                 witness=None, subsets_checked=checked,
                                 budget=budget)


# ---------------------------------------------------------------------------
# injectivity


def _face_point(images: List[MinkVector], weights: List) -> MinkVector:
    acc = images[0].scale(weights[0])
    for img, lam in zip(images[1:], weights[1:]):
        acc = acc + img.scale(lam)
    return acc


def _separation(x: MinkVector, y: MinkVector) -> float:
    return max(abs(float(a) - float(b)) for a, b in zip(x.coords, y.coords))


def verify_injectivity(poly: IndefiniteMetricPolyhedron, embedding,
                       samples: int = 1000, seed: int = 0,
                       tolerance: float = DEFAULT_TOLERANCE,
                       general_position: Optional[GeneralPositionReport] = None,
                       tolerances: Tolerances = DEFAULT_TOLERANCES
                       ) -> InjectivityReport:
    """Injectivity verdict plus direct spot checks.

    With d >= 2n+1 (n the complex dimension) and certified general
    position of the images, the map is injective on the whole
    polyhedron: images of vertex-disjoint simplices cannot meet, since
    a common point would force an affine dependence among at most
    2(n+1) <= d+1 vertex images.  The spot checks run in any case:
    pairwise-distinct vertex images and ``samples`` random barycentric
    points on vertex-disjoint simplex-face pairs.
    """
    for v in range(poly.n_vertices):
        if v not in embedding.points:
            raise PreconditionError(f"vertex {v} has no image; injectivity "
                                    "needs a total assignment")
    n_dim = poly.dimension()
    applicable = embedding.d >= 2 * n_dim + 1
    if general_position is None:
        vertices = sorted(embedding.points)
        images_all = [embedding.points[v] for v in vertices]
        size = min(len(images_all), embedding.d + 1)
        mode = "exhaustive" if comb(len(images_all), size) <= SUBSET_BUDGET \
            else "sampled"
        general_position = verify_general_position(
            images_all, embedding.d, mode=mode, seed=seed,
            tolerances=tolerances)

    exact_points = all(is_exact(c) for p in embedding.points.values()
                       for c in p.coords)
    rng = random.Random(seed)

    # spot check 1: pairwise distinct vertex images
    distinct = True
    witness = None
    min_sep: Optional[float] = None
    vertices = sorted(embedding.points)
    for a, b in itertools.combinations(vertices, 2):
        x, y = embedding.points[a], embedding.points[b]
        sep = _separation(x, y)
        min_sep = sep if min_sep is None else min(min_sep, sep)
        same = (x.coords == y.coords) if exact_points else sep <= tolerance
        if same:
            distinct = False
            witness = {"kind": "vertex_pair", "vertices": [a, b]}
            break

    # spot check 2: barycentric samples on vertex-disjoint faces
    checked = 0
    if distinct and len(poly.simplices) >= 2:
        attempts = 0
        while checked < samples and attempts < 20 * samples:
            attempts += 1
            sa = rng.choice(poly.simplices)
            sb = rng.choice(poly.simplices)
            fa = tuple(sorted(rng.sample(sa, rng.randint(1, len(sa)))))
            fb = tuple(sorted(rng.sample(sb, rng.randint(1, len(sb)))))
            if set(fa) & set(fb):
                continue
            if exact_points:
                wa = _exact_weights(rng, len(fa))
                wb = _exact_weights(rng, len(fb))
            else:
                wa = _float_weights(rng, len(fa))
                wb = _float_weights(rng, len(fb))
            pa = _face_point([embedding.points[v] for v in fa], wa)
            pb = _face_point([embedding.points[v] for v in fb], wb)
            checked += 1
            sep = _separation(pa, pb)
            min_sep = sep if min_sep is None else min(min_sep, sep)
            same = (pa.coords == pb.coords) if exact_points else sep <= tolerance
            if same:
                witness = {
                    "kind": "sample_pair",
                    "faces": [list(fa), list(fb)],
                    "weights": [[format_number(w) for w in wa],
                                [format_number(w) for w in wb]],
                }
                break

    failed = witness is not None
    if failed:
        verdict = VERDICT_FAILED
    elif not applicable:
        verdict = VERDICT_INAPPLICABLE
    elif general_position.verdict == VERDICT_CERTIFIED:
        verdict = VERDICT_EMBEDDING
    else:
        verdict = VERDICT_NOT_CERTIFIED
    return InjectivityReport(applicable=applicable, verdict=verdict,
                             distinct_images=distinct,
                             samples_checked=checked,
                             min_separation=min_sep, witness=witness)


def _exact_weights(rng: random.Random, count: int) -> List:
    from gmpy2 import mpq
    raw = [rng.randrange(1, 9) for _ in range(count)]
    total = sum(raw)
    return [mpq(r, total) for r in raw]


def _float_weights(rng: random.Random, count: int) -> List[float]:
    raw = [rng.uniform(0.05, 1.0) for _ in range(count)]
    total = sum(raw)
    return [r / total for r in raw]


# ---------------------------------------------------------------------------
# assembled report


def verify_embedding(poly: IndefiniteMetricPolyhedron, embedding,
                     tolerance: float = DEFAULT_TOLERANCE,
                     gp_mode: Optional[str] = None,
                     samples: int = 1000, seed: int = 0,
                     tolerances: Tolerances = DEFAULT_TOLERANCES
                     ) -> VerificationReport:
    """Run all three checks and aggregate the verdicts.

    Overall pass means: isometry within tolerance and no *failed*
    verdict anywhere; "not_certified" outcomes keep the pass but stay
    visible in the report.
    """
    iso = verify_isometry(poly, embedding, tolerance=tolerance, mode="total")
    vertices = sorted(embedding.points)
    images = [embedding.points[v] for v in vertices]
    if gp_mode is None:
        size = min(len(images), embedding.d + 1)
        feasible = len(images) <= 1 or comb(len(images), size) <= SUBSET_BUDGET
        gp_mode = "exhaustive" if feasible else "sampled"
    gp = verify_general_position(images, embedding.d, mode=gp_mode,
                                 seed=seed, tolerances=tolerances)
    if gp.witness is not None:
        gp.witness = tuple(vertices[i] for i in gp.witness)  # as vertex ids
    inj = verify_injectivity(poly, embedding, samples=samples, seed=seed,
                             tolerance=tolerance, general_position=gp,
                             tolerances=tolerances)
    passed = (iso.passed and gp.verdict != VERDICT_FAILED
              and inj.verdict != VERDICT_FAILED)
    return VerificationReport(isometry=iso, general_position=gp,
                              injectivity=inj, passed=passed)
