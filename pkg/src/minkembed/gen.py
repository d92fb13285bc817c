"""Instance generators: canned fixtures and seeded random polyhedra.

All generators return :class:`IndefiniteMetricPolyhedron` values that
pass validation, and the same spec always yields the same instance.
Random squared lengths are gmpy2 rationals with bounded denominators
(so exact embeddings stay cheap) unless float lengths are requested;
ranges spanning zero give the sign mix, and a configurable fraction of
edges gets squared length exactly 0.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from gmpy2 import mpq

from .errors import ConfigError
from .polyhedron import IndefiniteMetricPolyhedron

KIND_COMPLETE = "complete_skeleton"
KIND_MESH = "euclidean_mesh"
KIND_BOUNDED = "random_bounded_degree"
KIND_DEGENERATE = "random_d_degenerate"
KINDS = (KIND_COMPLETE, KIND_MESH, KIND_BOUNDED, KIND_DEGENERATE)


def simplex_skeleton(d: int) -> IndefiniteMetricPolyhedron:
    """The 1-skeleton of the standard d-simplex: complete graph K_{d+1}
    with every squared length 1 (a regular simplex's edge frame)."""
    if d < 1:
        raise ConfigError(f"simplex dimension must be >= 1, got {d}")
    n = d + 1
    simplices = []
    lengths = {}
    for i in range(n):
        for j in range(i + 1, n):
            simplices.append((i, j))
            lengths[(i, j)] = 1
    return IndefiniteMetricPolyhedron(n, simplices, lengths)


def euclidean_mesh(rows: int, cols: int) -> IndefiniteMetricPolyhedron:
    """A rows x cols vertex lattice of unit squares, each split into two
    triangles; squared lengths come from the flat realization (1 on the
    sides, 2 on the diagonals), all positive."""
    if rows < 2 or cols < 2:
        raise ConfigError("mesh needs at least 2 rows and 2 columns of vertices")

    def vid(r: int, c: int) -> int:
        return r * cols + c

    simplices: List[Tuple[int, ...]] = []
    lengths = {}
    for r in range(rows - 1):
        for c in range(cols - 1):
            a, b = vid(r, c), vid(r, c + 1)
            e, f = vid(r + 1, c), vid(r + 1, c + 1)
            simplices.append((a, b, e))
            simplices.append((b, e, f))
            lengths[(a, b)] = 1
            lengths[(a, e)] = 1
            lengths[(b, f)] = 1
            lengths[(e, f)] = 1
            lengths[(b, e)] = 2  # diagonal
    return IndefiniteMetricPolyhedron(rows * cols, simplices, lengths)


def stacked_tetrahedra(n_extra: int, squared_length=1,
                       seed: Optional[int] = None) -> IndefiniteMetricPolyhedron:
    """A 3-dimensional stack: one base tetrahedron plus ``n_extra``
    vertices, each glued onto a facet of an earlier tetrahedron.

    Without a seed each new vertex attaches to the three newest
    vertices; with a seed the facet is chosen at random.  All edges get
    the same squared length.  The 1-skeleton is 3-degenerate.
    """
    if n_extra < 0:
        raise ConfigError(f"n_extra must be >= 0, got {n_extra}")
    simplices: List[Tuple[int, ...]] = [(0, 1, 2, 3)]
    facets: List[Tuple[int, int, int]] = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    rng = random.Random(seed) if seed is not None else None
    for t in range(n_extra):
        v = 4 + t
        if rng is None:
            base = tuple(sorted((v - 3, v - 2, v - 1)))
        else:
            base = rng.choice(facets)
        simplices.append(tuple(sorted(base + (v,))))
        facets.extend([
            tuple(sorted((base[0], base[1], v))),
            tuple(sorted((base[0], base[2], v))),
            tuple(sorted((base[1], base[2], v))),
        ])
    n_vertices = 4 + n_extra
    skeleton = IndefiniteMetricPolyhedron(n_vertices, simplices, {})
    lengths = {edge: squared_length for edge in skeleton.skeleton_edges()}
    return IndefiniteMetricPolyhedron(n_vertices, simplices, lengths)


@dataclass(frozen=True)
class GenSpec:
    """Parameters for :func:`random_polyhedron`.

    ``bound`` is the degeneracy bound for random_d_degenerate, the max
    vertex degree for random_bounded_degree, and the simplex dimension
    for complete_skeleton.  ``dim`` caps clique lifting: attachment sets
    become simplices of dimension at most dim, and only when all their
    pairwise edges already exist, so the stated bounds survive lifting.
    """

    kind: str = KIND_DEGENERATE
    n_vertices: int = 12
    dim: int = 1
    bound: int = 3
    rows: int = 3
    cols: int = 3
    length_low: int = -4
    length_high: int = 4
    zero_fraction: float = 1.0 / 16.0
    denominator_bound: int = 16
    float_lengths: bool = False
    seed: int = 0


def _random_length(rng: random.Random, spec: GenSpec):
    if rng.random() < spec.zero_fraction:
        return 0.0 if spec.float_lengths else mpq(0)
    if spec.float_lengths:
        return rng.uniform(float(spec.length_low), float(spec.length_high))
    den = rng.randrange(1, spec.denominator_bound + 1)
    num = rng.randrange(spec.length_low * den, spec.length_high * den + 1)
    return mpq(num, den)


def random_polyhedron(spec: GenSpec) -> IndefiniteMetricPolyhedron:
    """Seeded instance per ``spec``; identical specs yield identical
    complexes, lengths included."""
    if spec.kind == KIND_COMPLETE:
        return simplex_skeleton(spec.bound)
    if spec.kind == KIND_MESH:
        return euclidean_mesh(spec.rows, spec.cols)
    rng = random.Random(spec.seed)
    if spec.n_vertices < 1:
        raise ConfigError(f"need at least one vertex, got {spec.n_vertices}")
    if spec.bound < 1:
        raise ConfigError(f"bound must be >= 1, got {spec.bound}")
    if spec.kind == KIND_DEGENERATE:
        skeleton = _insert_degenerate(rng, spec)
    elif spec.kind == KIND_BOUNDED:
        skeleton = _insert_bounded(rng, spec)
    else:
        raise ConfigError(f"unknown generator kind {spec.kind!r}")
    lengths = {edge: _random_length(rng, spec) for edge in skeleton.skeleton_edges()}
    return IndefiniteMetricPolyhedron(skeleton.n_vertices, skeleton.simplices, lengths)


def _lift_clique(rng: random.Random, v: int, back: List[int],
                 adjacency: Dict[int, Set[int]], dim: int) -> Optional[Tuple[int, ...]]:
    """A simplex of dimension <= dim on {v} + a clique inside ``back``;
    only mutually adjacent members join, so no new edges appear."""
    if dim < 2 or len(back) < 2:
        return None
    members = [v]
    for u in rng.sample(back, len(back)):
        if len(members) == dim + 1:
            break
        if all(u in adjacency[m] or m == v for m in members):
            members.append(u)
    if len(members) >= 3:
        return tuple(sorted(members))
    return None


def _insert_degenerate(rng: random.Random, spec: GenSpec) -> IndefiniteMetricPolyhedron:
    """Each vertex joins min(bound, #earlier) random earlier vertices,
    so the graph degeneracy is at most the bound."""
    n = spec.n_vertices
    simplices: List[Tuple[int, ...]] = []
    adjacency: Dict[int, Set[int]] = {v: set() for v in range(n)}
    for v in range(1, n):
        back = rng.sample(range(v), min(spec.bound, v))
        for u in back:
            simplices.append((u, v))
            adjacency[u].add(v)
            adjacency[v].add(u)
        lifted = _lift_clique(rng, v, back, adjacency, spec.dim)
        if lifted is not None:
            simplices.append(lifted)
    if not simplices:
        simplices.append((0,))
    return IndefiniteMetricPolyhedron(n, simplices, {})


def _insert_bounded(rng: random.Random, spec: GenSpec) -> IndefiniteMetricPolyhedron:
    """Each vertex joins earlier vertices that still have spare degree,
    keeping every vertex degree at most the bound."""
    n = spec.n_vertices
    simplices: List[Tuple[int, ...]] = []
    adjacency: Dict[int, Set[int]] = {v: set() for v in range(n)}
    degree = [0] * n
    for v in range(1, n):
        candidates = [u for u in range(v) if degree[u] < spec.bound]
        want = rng.randint(1, spec.bound) if candidates else 0
        back = rng.sample(candidates, min(want, len(candidates)))
        for u in back:
            simplices.append((u, v))
            adjacency[u].add(v)
            adjacency[v].add(u)
            degree[u] += 1
            degree[v] += 1
        lifted = _lift_clique(rng, v, back, adjacency, spec.dim)
        if lifted is not None:
            simplices.append(lifted)
    if not simplices:
        simplices.append((0,))
    return IndefiniteMetricPolyhedron(n, simplices, {})
