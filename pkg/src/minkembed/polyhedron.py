"""Indefinite metric polyhedra: simplicial complexes whose edges carry
arbitrary real squared lengths (negative and zero allowed).

Vertices are integers 0..n-1.  Simplices are stored as sorted vertex
tuples; every pair of vertices inside a simplex is an edge of the
1-skeleton and must carry a squared length for the polyhedron to be
valid.  Validation reports defects instead of raising so callers can
show all problems at once.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Defect:
    """One validation problem; ``code`` is machine-readable."""

    code: str
    detail: str


def _edge_key(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


class IndefiniteMetricPolyhedron:
    """A finite simplicial complex with squared edge lengths.

    ``lengths`` maps vertex pairs to squared lengths; keys may be given
    in either order and are normalized to (min, max).  The values can be
    ints, fractions, gmpy2 rationals, or floats; the embedding layer
    decides the numeric backend from them.
    """

    def __init__(self, n_vertices: int,
                 simplices: Iterable[Sequence[int]],
                 lengths) -> None:
        self.n_vertices = int(n_vertices)
        seen = set()
        normalized: List[Tuple[int, ...]] = []
        for simplex in simplices:
            key = tuple(sorted(int(v) for v in simplex))
            if key not in seen:
                seen.add(key)
                normalized.append(key)
        self.simplices: Tuple[Tuple[int, ...], ...] = tuple(normalized)

        items = lengths.items() if hasattr(lengths, "items") else lengths
        self.lengths: Dict[Edge, object] = {}
        self._length_conflicts: List[Edge] = []
        for pair, value in items:
            i, j = pair
            key = _edge_key(int(i), int(j))
            if key in self.lengths and self.lengths[key] != value:
                self._length_conflicts.append(key)
            self.lengths[key] = value

        self._adjacency: Dict[int, set] = {v: set() for v in range(self.n_vertices)}
        for simplex in self.simplices:
            for a in range(len(simplex)):
                for b in range(a + 1, len(simplex)):
                    u, v = simplex[a], simplex[b]
                    if u == v:
                        continue
                    if 0 <= u < self.n_vertices and 0 <= v < self.n_vertices:
                        self._adjacency[u].add(v)
                        self._adjacency[v].add(u)

    # -- structure ---------------------------------------------------

    def skeleton_edges(self) -> List[Edge]:
        """All 1-skeleton edges, sorted."""
        edges = set()
        for simplex in self.simplices:
            for a in range(len(simplex)):
                for b in range(a + 1, len(simplex)):
                    if simplex[a] != simplex[b]:
                        edges.add(_edge_key(simplex[a], simplex[b]))
        return sorted(edges)

    def neighbors(self, vertex: int) -> Tuple[int, ...]:
        return tuple(sorted(self._adjacency[vertex]))

    def vertex_degree(self, vertex: int) -> int:
        return len(self._adjacency[vertex])

    def max_degree(self) -> int:
        if self.n_vertices == 0:
            return 0
        return max(len(nbrs) for nbrs in self._adjacency.values())

    def dimension(self) -> int:
        if not self.simplices:
            return 0
        return max(len(s) for s in self.simplices) - 1

    def edge_length(self, i: int, j: int):
        return self.lengths[_edge_key(i, j)]

    # -- validation ----------------------------------------------------

    def validate(self) -> List[Defect]:
        """Return all defects; an empty list means the polyhedron is
        well formed and fully measured."""
        defects: List[Defect] = []
        if self.n_vertices < 0:
            defects.append(Defect("bad_vertex_count",
                                  f"negative vertex count {self.n_vertices}"))
        for simplex in self.simplices:
            for v in simplex:
                if not 0 <= v < self.n_vertices:
                    defects.append(Defect(
                        "bad_vertex",
                        f"simplex {simplex} references vertex {v} outside 0..{self.n_vertices - 1}"))
            if len(set(simplex)) != len(simplex):
                defects.append(Defect(
                    "degenerate_simplex",
                    f"simplex {simplex} repeats a vertex"))
        edges = set(self.skeleton_edges())
        for edge in sorted(edges):
            if edge not in self.lengths:
                defects.append(Defect(
                    "missing_length",
                    f"edge {edge} has no squared length"))
        for key in sorted(self.lengths):
            i, j = key
            if not (0 <= i < self.n_vertices and 0 <= j < self.n_vertices) or i == j:
                defects.append(Defect(
                    "orphan_length",
                    f"length given for invalid pair {key}"))
            elif key not in edges:
                defects.append(Defect(
                    "orphan_length",
                    f"length given for non-edge {key}"))
        for key in self._length_conflicts:
            defects.append(Defect(
                "conflicting_length",
                f"edge {key} given two different squared lengths"))
        return defects

    # -- ordering ------------------------------------------------------

    def degeneracy_ordering(self) -> Tuple[List[int], int]:
        """Smallest-last vertex ordering and the graph degeneracy k.

        Repeatedly removes a vertex of minimum remaining degree (lowest
        index on ties); the build order is the reverse of the removal
        order, so every vertex has at most k neighbors earlier in it.
        """
        remaining = {v: set(nbrs) for v, nbrs in self._adjacency.items()}
        heap = [(len(nbrs), v) for v, nbrs in remaining.items()]
        heapq.heapify(heap)
        removed = set()
        removal_order: List[int] = []
        k = 0
        while heap:
            degree, v = heapq.heappop(heap)
            if v in removed or degree != len(remaining[v]):
                continue  # stale entry; a fresh one is in the heap
            removed.add(v)
            removal_order.append(v)
            k = max(k, degree)
            for u in remaining[v]:
                remaining[u].discard(v)
                heapq.heappush(heap, (len(remaining[u]), u))
            remaining[v] = set()
        removal_order.reverse()
        return removal_order, k

    def back_degree(self, order: Sequence[int]) -> int:
        """Max number of neighbors a vertex has before it in ``order``."""
        position = {v: i for i, v in enumerate(order)}
        worst = 0
        for v in order:
            back = sum(1 for u in self._adjacency[v] if position[u] < position[v])
            worst = max(worst, back)
        return worst

    def __repr__(self) -> str:
        return (f"IndefiniteMetricPolyhedron(n_vertices={self.n_vertices}, "
                f"simplices={len(self.simplices)}, edges={len(self.skeleton_edges())})")
