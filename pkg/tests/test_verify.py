"""Tests for the independent verifier.

The verifier only reads coordinates, so every case here is built from
explicit points; nothing routes through the construction code except
the end-to-end checks at the bottom.
"""

import itertools
import json
import math
import random

import pytest
from gmpy2 import mpq

from minkembed.embed import EmbedConfig, Embedding, embed_polyhedron
from minkembed.errors import PreconditionError
from minkembed.gen import simplex_skeleton, stacked_tetrahedra
from minkembed.linalg import MinkVector, affine_rank
from minkembed.polyhedron import IndefiniteMetricPolyhedron
from minkembed.scalars import FLOAT, RATIONAL
from minkembed.verify import (SUBSET_BUDGET, VERDICT_CERTIFIED,
                              VERDICT_EMBEDDING, VERDICT_FAILED,
                              VERDICT_INAPPLICABLE, VERDICT_NOT_CERTIFIED,
                              VERDICT_SAMPLED_PASS, verify_embedding,
                              verify_general_position, verify_injectivity,
                              verify_isometry)


def _segment_poly(length=1):
    return IndefiniteMetricPolyhedron(2, [(0, 1)], {(0, 1): length})


def _points(d, *coord_tuples):
    return {i: MinkVector(d, c) for i, c in enumerate(coord_tuples)}


# ---------------------------------------------------------------------------
# isometry


def test_isometry_exact_pass():
    emb = Embedding(d=1, backend=RATIONAL,
                    points=_points(1, (mpq(0), mpq(0)), (mpq(1), mpq(0))))
    report = verify_isometry(_segment_poly(mpq(1)), emb)
    assert report.passed
    assert report.max_residual == 0.0
    assert report.residuals[(0, 1)] == 0
    assert report.worst_edge == (0, 1)
    assert report.missing_vertices == ()


def test_isometry_detects_a_violation():
    emb = Embedding(d=1, backend=RATIONAL,
                    points=_points(1, (0, 0), (2, 0)))
    report = verify_isometry(_segment_poly(1), emb)
    assert not report.passed
    assert report.worst_edge == (0, 1)
    assert report.residuals[(0, 1)] == 3  # got 4, wanted 1
    assert report.max_residual == 3.0


def test_isometry_tolerance_is_honored():
    emb = Embedding(d=1, backend=FLOAT,
                    points=_points(1, (0.0, 0.0), (1.0 + 1e-7, 0.0)))
    poly = _segment_poly(1.0)
    assert not verify_isometry(poly, emb, tolerance=1e-9).passed
    assert verify_isometry(poly, emb, tolerance=1e-5).passed


def test_isometry_residuals_are_relative_to_the_target():
    # the same absolute gap counts for less on a long edge
    emb = Embedding(d=1, backend=FLOAT,
                    points=_points(1, (0.0, 0.0), (100.0, 0.0)))
    poly = _segment_poly(10000.0 - 1e-5)
    report = verify_isometry(poly, emb, tolerance=1e-8)
    assert report.passed
    assert math.isclose(report.max_residual, 1e-9, rel_tol=1e-2)


def test_isometry_partial_mode_skips_missing_vertices():
    poly = IndefiniteMetricPolyhedron(3, [(0, 1), (1, 2)],
                                      {(0, 1): 1, (1, 2): 1})
    emb = Embedding(d=1, backend=RATIONAL,
                    points={0: MinkVector(1, (0, 0)), 1: MinkVector(1, (1, 0))})
    report = verify_isometry(poly, emb, mode="partial")
    assert report.passed
    assert report.missing_vertices == (2,)
    assert set(report.residuals) == {(0, 1)}
    with pytest.raises(PreconditionError):
        verify_isometry(poly, emb, mode="total")


def test_isometry_mixed_scalars_compare_as_floats():
    emb = Embedding(d=1, backend=FLOAT,
                    points=_points(1, (0.0, 0.0), (1.0, 0.0)))
    report = verify_isometry(_segment_poly(mpq(1)), emb)
    assert report.passed
    assert isinstance(report.residuals[(0, 1)], float)


# ---------------------------------------------------------------------------
# general position


def _moment_points(ts, d):
    out = []
    for t in ts:
        acc, coords = t, []
        for _ in range(d):
            coords.append(acc)
            acc *= t
        out.append(tuple(coords))
    return out


def test_general_position_certified_on_moment_points():
    pts = _moment_points([mpq(t) for t in range(1, 6)], 2)
    report = verify_general_position(pts, 2)
    assert report.verdict == VERDICT_CERTIFIED
    assert report.subsets_checked == math.comb(5, 3)
    assert report.witness is None


def test_general_position_catches_a_repeated_point():
    pts = _moment_points([mpq(t) for t in range(1, 5)], 2)
    pts.append(pts[1])
    report = verify_general_position(pts, 2)
    assert report.verdict == VERDICT_FAILED
    assert report.witness == (1, 4)  # shrunk to the duplicated pair


def test_general_position_minimizes_the_witness():
    pts = [(mpq(0), mpq(0)), (mpq(1), mpq(1)), (mpq(2), mpq(2)),
           (mpq(1), mpq(7)), (mpq(5), mpq(2))]
    report = verify_general_position(pts, 2)
    assert report.verdict == VERDICT_FAILED
    assert report.witness == (0, 1, 2)  # the collinear triple


def test_general_position_sampled_mode():
    pts = _moment_points([float(t) for t in range(1, 30)], 3)
    report = verify_general_position(pts, 3, mode="sampled", samples=50, seed=1)
    assert report.verdict == VERDICT_SAMPLED_PASS
    assert report.subsets_checked == 50


def test_general_position_respects_the_budget():
    pts = _moment_points([float(t) for t in range(1, 30)], 3)
    report = verify_general_position(pts, 3, budget=10)
    assert report.verdict == VERDICT_NOT_CERTIFIED
    assert report.subsets_checked == 0


def test_general_position_trivial_cases():
    assert verify_general_position([], 3).verdict == VERDICT_CERTIFIED
    assert verify_general_position([(1.0, 2.0)], 3).verdict == VERDICT_CERTIFIED


def test_general_position_unknown_mode():
    with pytest.raises(ValueError):
        verify_general_position([(0, 0), (1, 1)], 1, mode="guess")


def test_general_position_accepts_mink_vectors():
    pts = [MinkVector(1, (0, 0)), MinkVector(1, (1, 0)), MinkVector(1, (0, 1))]
    report = verify_general_position(pts, 1)
    assert report.verdict == VERDICT_CERTIFIED


def test_general_position_against_exhaustive_oracle():
    rng = random.Random(71)
    for trial in range(25):
        d = rng.randint(1, 3)
        n = rng.randint(2, 6)
        pts = [tuple(mpq(rng.randint(-3, 3)) for _ in range(d))
               for _ in range(n)]
        report = verify_general_position(pts, d)
        size = min(n, d + 1)
        dependent_exists = any(
            affine_rank([pts[i] for i in subset]) < size - 1
            for subset in itertools.combinations(range(n), size))
        assert (report.verdict == VERDICT_FAILED) == dependent_exists
        if report.verdict == VERDICT_FAILED:
            chosen = [pts[i] for i in report.witness]
            assert affine_rank(chosen) < len(chosen) - 1


# ---------------------------------------------------------------------------
# injectivity


def test_injectivity_requires_a_total_assignment():
    poly = simplex_skeleton(2)
    emb = Embedding(d=3, backend=FLOAT, points={0: MinkVector(3, (0.0,) * 6)})
    with pytest.raises(PreconditionError):
        verify_injectivity(poly, emb)


def test_injectivity_embedding_verdict_needs_dimension_and_certification():
    poly = simplex_skeleton(3)
    emb = embed_polyhedron(poly)  # d = 3 = 2 * dim(K4 skeleton) + 1
    assert poly.dimension() == 1
    report = verify_injectivity(poly, emb, samples=200)
    assert report.applicable
    assert report.verdict == VERDICT_EMBEDDING
    assert report.distinct_images
    assert report.samples_checked == 200
    assert report.min_separation > 0


def test_injectivity_inapplicable_below_the_dimension_gate():
    poly = IndefiniteMetricPolyhedron(3, [(0, 1), (1, 2)],
                                      {(0, 1): 1, (1, 2): 1})
    emb = embed_polyhedron(poly)  # d = 1 < 2 * 1 + 1
    report = verify_injectivity(poly, emb, samples=50)
    assert not report.applicable
    assert report.verdict == VERDICT_INAPPLICABLE


def test_injectivity_flags_coincident_vertex_images():
    poly = _segment_poly(mpq(0))  # a zero-length edge permits coincidence
    emb = Embedding(d=1, backend=RATIONAL,
                    points=_points(1, (mpq(1), mpq(2)), (mpq(1), mpq(2))))
    assert verify_isometry(poly, emb).passed
    report = verify_injectivity(poly, emb)
    assert report.verdict == VERDICT_FAILED
    assert not report.distinct_images
    assert report.witness == {"kind": "vertex_pair", "vertices": [0, 1]}


def test_injectivity_samples_disjoint_faces():
    poly = stacked_tetrahedra(7)
    emb = embed_polyhedron(poly, EmbedConfig(d=7))
    report = verify_injectivity(poly, emb, samples=300, seed=2)
    assert report.samples_checked == 300
    assert report.witness is None
    assert report.min_separation > 1e-9


# ---------------------------------------------------------------------------
# assembled verification


def test_verify_embedding_end_to_end_exact():
    poly = simplex_skeleton(3)
    emb = embed_polyhedron(poly)
    report = verify_embedding(poly, emb)
    assert report.passed
    assert report.isometry.max_residual == 0.0
    assert report.general_position.verdict == VERDICT_CERTIFIED
    assert report.injectivity.verdict == VERDICT_EMBEDDING


def test_verify_embedding_maps_witnesses_to_vertex_ids():
    poly = IndefiniteMetricPolyhedron(4, [(0, 1), (2, 3)],
                                      {(0, 1): mpq(1), (2, 3): mpq(1)})
    emb = Embedding(d=1, backend=RATIONAL, points=_points(
        1, (mpq(0), mpq(0)), (mpq(1), mpq(0)),
        (mpq(0), mpq(0)), (mpq(1), mpq(0))))
    report = verify_embedding(poly, emb)
    assert not report.passed
    assert report.general_position.verdict == VERDICT_FAILED
    assert report.general_position.witness in ((0, 2), (1, 3))


def test_verify_embedding_not_certified_still_passes():
    poly = simplex_skeleton(2)
    emb = embed_polyhedron(poly)
    report = verify_embedding(poly, emb, gp_mode="exhaustive")
    assert report.general_position.verdict == VERDICT_CERTIFIED
    budget_report = verify_embedding(poly, emb, gp_mode="sampled")
    assert budget_report.general_position.verdict == VERDICT_SAMPLED_PASS
    assert budget_report.passed


def test_verification_report_serializes_to_json():
    poly = simplex_skeleton(2)
    emb = embed_polyhedron(poly)
    report = verify_embedding(poly, emb)
    data = report.to_dict()
    text = json.dumps(data)
    parsed = json.loads(text)
    assert parsed["passed"] is True
    assert parsed["isometry"]["residuals"]["0-1"] == "0"
    assert parsed["isometry"]["max_residual"] == "0.0"
    assert parsed["general_position"]["verdict"] == VERDICT_CERTIFIED
    assert parsed["injectivity"]["applicable"] in (True, False)


def test_subset_budget_is_large_enough_for_small_instances():
    # ten points in d=3 need C(10, 4) subset checks
    assert math.comb(10, 4) <= SUBSET_BUDGET
