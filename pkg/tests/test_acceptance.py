"""Acceptance checks: one test per shipped guarantee.

Each test exercises a complete path (generator, construction, verifier,
CLI) at the advertised scale and tolerance, so a green run here is the
package's contract: exact zeros on the rational backend, bounded
relative residuals on the float backend, certified general position,
and the stated performance envelope.
"""

import itertools
import json
import math
import random
import time

import numpy as np
import pytest
from gmpy2 import mpq

from minkembed import cli
from minkembed.embed import (EmbedConfig, Embedding, embed_polyhedron,
                             extend_embedding, isotropic_pair_for)
from minkembed.fileformat import (parse_embedding, polyhedron_file_for,
                                  serialize_polyhedron)
from minkembed.gen import (GenSpec, KIND_BOUNDED, KIND_DEGENERATE,
                           euclidean_mesh, random_polyhedron,
                           simplex_skeleton, stacked_tetrahedra)
from minkembed.linalg import (MinkVector, affine_rank, is_affinely_independent,
                              lorentz_defect, mink_inner, project_delta,
                              project_sigma, ql_decompose, sigma_point,
                              squared_length, standard_split)
from minkembed.polyhedron import IndefiniteMetricPolyhedron
from minkembed.scalars import FLOAT, RATIONAL, format_number, is_exact
from minkembed.verify import verify_embedding, verify_isometry


def test_criterion_01_unit_simplices_embed_exactly(tmp_path):
    """K_{d+1} with unit lengths, d = 1..8, through the CLI on the exact
    backend: every residual is literally zero, in under a second each."""
    for d in range(1, 9):
        path = tmp_path / f"simplex{d}.json"
        out = tmp_path / f"simplex{d}.emb.json"
        path.write_text(
            serialize_polyhedron(polyhedron_file_for(simplex_skeleton(d))),
            encoding="utf-8")
        t0 = time.perf_counter()
        rc = cli.main(["embed", str(path), "--backend", "rational",
                       "-o", str(out)])
        elapsed = time.perf_counter() - t0
        assert rc == 0
        assert elapsed < 1.0, f"d={d} took {elapsed:.3f}s"
        ef = parse_embedding(out.read_text(encoding="utf-8"))
        assert ef.backend == RATIONAL
        residuals = ef.report["isometry"]["residuals"]
        assert len(residuals) == math.comb(d + 1, 2)
        assert all(r == "0" for r in residuals.values())


def test_criterion_02_mixed_sign_complexes_embed_exactly():
    """100 seeded graphs, 50 vertices, degeneracy at most 5, rational
    lengths across [-10, 10] with zeros present: exact zero residuals on
    every edge, all 100 in under ten seconds."""
    t0 = time.perf_counter()
    zeros = negatives = 0
    for seed in range(100):
        poly = random_polyhedron(GenSpec(
            kind=KIND_DEGENERATE, n_vertices=50, dim=1, bound=5,
            length_low=-10, length_high=10, seed=seed))
        _, k = poly.degeneracy_ordering()
        assert k <= 5
        emb = embed_polyhedron(poly, EmbedConfig(seed=seed))
        assert emb.backend == RATIONAL
        report = verify_isometry(poly, emb)
        assert report.max_residual == 0.0
        assert all(r == 0 for r in report.residuals.values())
        zeros += sum(1 for v in poly.lengths.values() if v == 0)
        negatives += sum(1 for v in poly.lengths.values() if v < 0)
    elapsed = time.perf_counter() - t0
    assert zeros > 0 and negatives > 0
    assert elapsed < 10.0, f"took {elapsed:.3f}s"


def test_criterion_03_extension_preserves_placed_points():
    """50 instances, d = 3..8: embed, forget a random half, extend.  The
    restriction to the kept vertices is byte-identical and every edge
    residual stays within 1e-9 relative on the float route."""
    for i in range(50):
        d = 3 + i % 6
        poly = random_polyhedron(GenSpec(
            kind=KIND_BOUNDED, n_vertices=30, bound=d, seed=300 + i))
        assert poly.max_degree() <= d
        full = embed_polyhedron(poly, EmbedConfig(d=d, backend=FLOAT, seed=i))
        rng = random.Random(i)
        keep = rng.sample(range(poly.n_vertices), poly.n_vertices // 2)
        partial = Embedding(d=d, backend=FLOAT,
                            points={v: full.points[v] for v in keep})
        ext = extend_embedding(poly, partial, EmbedConfig(seed=i))
        assert ext.backend == FLOAT
        for v in keep:
            assert ext.points[v].coords == partial.points[v].coords
            got = tuple(format_number(c) for c in ext.points[v].coords)
            want = tuple(format_number(c) for c in partial.points[v].coords)
            assert got == want
        report = verify_isometry(poly, ext)
        assert report.max_residual <= 1e-9, (i, report.max_residual)


def test_criterion_04_adapted_splits_separate_any_point_set():
    """200 affinely independent point sets with at most d+1 points,
    d up to 8, every third one engineered so the standard split would
    collapse it: the adapted split is Lorentz to 1e-10, keeps the
    projected set affinely independent, and certifies itself with a
    lower-triangular matrix whose diagonal clears 1e-12."""
    for i in range(200):
        rng = random.Random(5000 + i)
        d = rng.randint(1, 8)
        m = rng.randint(1, d + 1)
        std = standard_split(d)
        if i % 3 == 0 and m >= 2:
            # all points share one standard-split delta projection, and
            # share it exactly: mirrored blocks make it the zero vector
            half = tuple(rng.uniform(-2, 2) for _ in range(d))
            base = MinkVector(d, half + half)
            pts = [base]
            while len(pts) < m:
                s = tuple(rng.gauss(0, 1) for _ in range(d))
                cand = base + sigma_point(std, s)
                if is_affinely_independent([p.coords for p in pts + [cand]]):
                    pts.append(cand)
            assert affine_rank([project_delta(std, p) for p in pts]) == 0
        else:
            while True:
                pts = [MinkVector(d, tuple(rng.gauss(0, 2)
                                           for _ in range(2 * d)))
                       for _ in range(m)]
                if is_affinely_independent([p.coords for p in pts]):
                    break
        split, cert = isotropic_pair_for(pts, d)
        assert lorentz_defect(split) <= 1e-10
        images = [project_delta(split, p) for p in pts]
        assert affine_rank(images) == m - 1
        scale = max(abs(x) for row in cert.matrix for x in row)
        for a in range(d):
            assert cert.matrix[a][a] > 1e-12
            for b in range(a + 1, d):
                assert abs(cert.matrix[a][b]) <= 1e-9 * max(1.0, scale)


def test_criterion_05_ql_factorization_meets_its_bounds():
    """500 random square matrices up to 16x16, a fifth of them with a
    leading column forced into the span of the later ones: A = QL to
    1e-10 of the largest entry, Q orthogonal to 1e-10, diagonal of L
    non-negative, and strictly positive on every suffix of columns that
    is linearly independent."""
    rng = np.random.default_rng(2024)
    for trial in range(500):
        d = 1 + trial % 16
        a = rng.normal(size=(d, d)) * 10.0 ** rng.uniform(-3, 3)
        planted = trial % 5 == 0 and d >= 2
        if planted:
            coeffs = rng.normal(size=d - 1)
            a[:, 0] = a[:, 1:] @ coeffs
        res = ql_decompose(a)
        scale = np.abs(a).max()
        assert np.abs(res.q @ res.l - a).max() <= 1e-10 * scale
        assert np.abs(res.q.T @ res.q - np.eye(d)).max() <= 1e-10
        diag = np.diag(res.l)
        assert (diag >= 0.0).all()
        for j in range(d):
            if np.linalg.matrix_rank(a[:, j:]) == d - j:
                assert (diag[j:] > 0.0).all()
                break


def test_criterion_06_splitting_identity():
    """1000 vectors against every kind of split the pipeline uses:
    <v, v> equals 2 <P_delta v, P_sigma v>, exactly on the rational
    standard split and to 1e-10 of the squared Euclidean norm on floats,
    including splits adapted to random point sets."""
    rng = random.Random(77)
    adapted = {}
    for d in range(1, 9):
        while True:
            pts = [MinkVector(d, tuple(rng.gauss(0, 2) for _ in range(2 * d)))
                   for _ in range(d + 1)]
            if is_affinely_independent([p.coords for p in pts]):
                break
        adapted[d], _ = isotropic_pair_for(pts, d)
    for i in range(1000):
        d = rng.randint(1, 8)
        if i % 5 < 2:
            split = standard_split(d)
            v = MinkVector(d, tuple(mpq(rng.randint(-50, 50), rng.randint(1, 9))
                                    for _ in range(2 * d)))
            lhs = mink_inner(v, v)
            rhs = 2 * mink_inner(project_delta(split, v), project_sigma(split, v))
            assert lhs == rhs
            assert lhs - rhs == 0
        else:
            split = standard_split(d) if i % 5 < 4 else adapted[d]
            v = MinkVector(d, tuple(rng.uniform(-10, 10) for _ in range(2 * d)))
            norm_sq = sum(c * c for c in v.coords)
            lhs = mink_inner(v, v)
            rhs = 2 * mink_inner(project_delta(split, v), project_sigma(split, v))
            assert abs(lhs - rhs) <= 1e-10 * norm_sq


def test_criterion_07_stacked_tetrahedra_certified_injective():
    """An 11-vertex stack of tetrahedra (a 3-complex) in d = 7: the
    general-position check certifies all 165 subsets, the injectivity
    verdict is "embedding", and 10000 barycentric samples on vertex-
    disjoint faces never come within 1e-9 of a coincidence."""
    poly = stacked_tetrahedra(7)
    assert poly.n_vertices == 11
    assert poly.dimension() == 3
    _, k = poly.degeneracy_ordering()
    d = max(k, 7)
    assert d == 7
    emb = embed_polyhedron(poly, EmbedConfig(d=d))
    report = verify_embedding(poly, emb, gp_mode="exhaustive", samples=10000)
    assert report.passed
    assert report.isometry.max_residual == 0.0
    gp = report.general_position
    assert gp.verdict == "certified"
    assert gp.subsets_checked == math.comb(11, 8) == 165
    inj = report.injectivity
    assert inj.applicable
    assert inj.verdict == "embedding"
    assert inj.samples_checked == 10000
    assert inj.witness is None
    assert inj.min_separation > 1e-9


def _degeneracies_of_all_graphs(n):
    """Degeneracy of every labeled graph on n vertices by subset DP
    (the exact minimum over all orderings of the max back degree),
    plus the edge list and a connectivity mask."""
    pairs = list(itertools.combinations(range(n), 2))
    m = len(pairs)
    n_graphs = 1 << m
    full = (1 << n) - 1
    masks = np.arange(n_graphs, dtype=np.uint32)
    adj = np.zeros((n_graphs, n), dtype=np.uint8)
    for e, (a, b) in enumerate(pairs):
        has = ((masks >> e) & 1).astype(np.uint8)
        adj[:, a] |= has << b
        adj[:, b] |= has << a
    reach = np.full(n_graphs, 1, dtype=np.uint8)  # start from vertex 0
    for _ in range(n):
        grown = reach.copy()
        for v in range(n):
            member = ((reach >> v) & 1).astype(bool)
            grown[member] |= adj[member, v]
        reach = grown
    connected = reach == full
    pc = np.array([bin(s).count("1") for s in range(1 << n)], dtype=np.uint8)
    subsets = sorted(range(1 << n), key=lambda s: int(pc[s]))
    out = np.zeros(n_graphs, dtype=np.uint8)
    chunk = 1 << 18
    for lo in range(0, n_graphs, chunk):
        hi = min(lo + chunk, n_graphs)
        f = np.zeros((hi - lo, 1 << n), dtype=np.uint8)
        block = adj[lo:hi]
        for s in subsets:
            if s == 0:
                continue
            best = None
            for v in range(n):
                if not (s >> v) & 1:
                    continue
                deg = pc[block[:, v] & s]
                cand = np.maximum(deg, f[:, s ^ (1 << v)])
                best = cand if best is None else np.minimum(best, cand)
            f[:, s] = best
        out[lo:hi] = f[:, full]
    return pairs, connected, out


def test_criterion_08_ordering_is_optimal_on_all_small_graphs():
    """The smallest-last ordering achieves the true degeneracy (the
    minimum over every vertex ordering of the max back degree) on every
    connected graph with up to 7 vertices, checked by exhaustive
    enumeration against a subset-DP oracle."""
    checked = 0
    for n in range(1, 8):
        pairs, connected, oracle = _degeneracies_of_all_graphs(n)
        m = len(pairs)
        for g in np.flatnonzero(connected):
            mask = int(g)
            edges = [pairs[e] for e in range(m) if (mask >> e) & 1]
            poly = IndefiniteMetricPolyhedron(n, edges if edges else [(0,)], {})
            order, k = poly.degeneracy_ordering()
            assert k == int(oracle[mask]), (n, mask)
            if checked % 997 == 0:
                assert poly.back_degree(order) == k
            checked += 1
    assert checked == 1 + 1 + 4 + 38 + 728 + 26704 + 1866256


def test_criterion_09_euclidean_mesh_embeds_exactly_at_its_degeneracy():
    """A 10x10 triangulated grid (all squared lengths positive) embeds
    on the exact backend at d equal to its skeleton degeneracy, with
    literally zero residuals."""
    poly = euclidean_mesh(10, 10)
    assert all(v > 0 for v in poly.lengths.values())
    _, k = poly.degeneracy_ordering()
    emb = embed_polyhedron(poly)
    assert emb.d == k
    assert emb.backend == RATIONAL
    report = verify_isometry(poly, emb)
    assert report.max_residual == 0.0
    assert all(r == 0 and is_exact(r) for r in report.residuals.values())


def test_criterion_10_bench_meets_the_performance_envelope(tmp_path):
    """The bench command embeds a random 10-degenerate graph on 10000
    vertices in under five seconds of ordering plus placement with a max
    relative residual of 1e-8, and the smaller grid cells stay under
    1e-9; the CSV header is stable."""
    small = tmp_path / "small.csv"
    rc = cli.main(["bench", "--n", "100", "1000", "--d", "4", "8",
                   "--seed", "0", "-o", str(small)])
    assert rc == 0
    lines = small.read_text(encoding="utf-8").strip().split("\n")
    assert lines[0] == ("n,d,backend,phase_order_ms,phase_place_ms,"
                        "phase_verify_ms,max_residual")
    assert len(lines) == 5
    for line in lines[1:]:
        fields = line.split(",")
        assert float(fields[-1]) <= 1e-9, line

    big = tmp_path / "big.csv"
    rc = cli.main(["bench", "--n", "10000", "--d", "10",
                   "--seed", "0", "-o", str(big)])
    assert rc == 0
    lines = big.read_text(encoding="utf-8").strip().split("\n")
    assert lines[0] == ("n,d,backend,phase_order_ms,phase_place_ms,"
                        "phase_verify_ms,max_residual")
    n, d, backend, order_ms, place_ms, verify_ms, residual = lines[1].split(",")
    assert (n, d, backend) == ("10000", "10", "float")
    assert float(order_ms) + float(place_ms) < 5000.0
    assert float(residual) <= 1e-8
