"""JSON interchange for polyhedra, embeddings, and reports.

Every number travels as a string: "p/q" or a plain integer string for
exact rationals, a decimal/exponent literal for floats.  JSON numbers
would silently round the exact backend, so they are never used for
coordinates or lengths.  Serialization is canonical (sorted keys,
two-space indent, LF, trailing newline) and parsed files keep their
coordinate strings verbatim, so parse and serialize are mutually
inverse at the byte level.

Vertex ids in files are strings; internally vertices are indices into
the file's ``vertices`` array.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .embed import Embedding
from .errors import ConfigError
from .linalg import MinkVector
from .polyhedron import IndefiniteMetricPolyhedron
from .scalars import FLOAT, RATIONAL, format_number, is_exact, parse_number

FORMAT_VERSION = "1"


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _fail(message: str) -> ConfigError:
    return ConfigError(f"bad file: {message}")


@dataclass
class PolyhedronFile:
    """A polyhedron plus its file-level extras: string vertex ids, an
    optional requested d, and an optional partial embedding (kept as
    raw coordinate strings until a backend is chosen)."""

    polyhedron: IndefiniteMetricPolyhedron
    vertex_ids: Tuple[str, ...]
    d: Optional[int] = None
    partial: Optional[Dict[str, Tuple[str, ...]]] = None
    version: str = FORMAT_VERSION

    def index_of(self, vertex_id: str) -> int:
        return self.vertex_ids.index(vertex_id)

    def partial_embedding(self, d: int, backend: Optional[str] = None) -> Embedding:
        """The partial assignment as an Embedding over internal indices.

        With backend=None the label is inferred: rational when every
        coordinate parses exactly, float otherwise.
        """
        if self.partial is None:
            raise _fail("no partial_embedding present")
        points = {}
        index = {vid: i for i, vid in enumerate(self.vertex_ids)}
        all_exact = True
        for vid, coord_strings in self.partial.items():
            if len(coord_strings) != 2 * d:
                raise _fail(f"partial point {vid!r} has {len(coord_strings)} "
                            f"coordinates, expected {2 * d}")
            coords = tuple(parse_number(s) for s in coord_strings)
            all_exact = all_exact and all(is_exact(c) for c in coords)
            points[index[vid]] = MinkVector(d, coords)
        if backend is None:
            backend = RATIONAL if all_exact else FLOAT
        return Embedding(d=d, backend=backend, points=points)


def parse_polyhedron(text: str) -> PolyhedronFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _fail(f"invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise _fail("top level must be an object")
    vertices = data.get("vertices")
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise _fail("'vertices' must be an array of string ids")
    if len(set(vertices)) != len(vertices):
        raise _fail("duplicate vertex ids")
    index = {vid: i for i, vid in enumerate(vertices)}

    simplices_raw = data.get("maximal_simplices", [])
    simplices: List[Tuple[int, ...]] = []
    for simplex in simplices_raw:
        if not isinstance(simplex, list):
            raise _fail("each maximal simplex must be an array of ids")
        try:
            simplices.append(tuple(index[v] for v in simplex))
        except KeyError as exc:
            raise _fail(f"simplex references unknown vertex {exc.args[0]!r}")

    lengths = {}
    for entry in data.get("squared_lengths", []):
        if not isinstance(entry, dict) or "edge" not in entry or "value" not in entry:
            raise _fail("each squared_lengths entry needs 'edge' and 'value'")
        edge = entry["edge"]
        if not isinstance(edge, list) or len(edge) != 2:
            raise _fail(f"edge must be a pair of ids, got {edge!r}")
        try:
            i, j = index[edge[0]], index[edge[1]]
        except KeyError as exc:
            raise _fail(f"edge references unknown vertex {exc.args[0]!r}")
        if not isinstance(entry["value"], str):
            raise _fail("squared lengths must be strings ('p/q' or decimal)")
        key = (min(i, j), max(i, j))
        value = parse_number(entry["value"])
        if key in lengths and lengths[key] != value:
            raise _fail(f"edge {edge!r} given two different lengths")
        lengths[key] = value

    d = data.get("d")
    if d is not None and (not isinstance(d, int) or d < 1):
        raise _fail(f"d must be a positive integer, got {d!r}")

    partial = None
    if "partial_embedding" in data and data["partial_embedding"] is not None:
        raw = data["partial_embedding"]
        if not isinstance(raw, dict):
            raise _fail("partial_embedding must map vertex ids to coordinate arrays")
        partial = {}
        for vid, coords in raw.items():
            if vid not in index:
                raise _fail(f"partial_embedding references unknown vertex {vid!r}")
            if (not isinstance(coords, list)
                    or not all(isinstance(c, str) for c in coords)):
                raise _fail(f"coordinates of {vid!r} must be an array of strings")
            for c in coords:
                parse_number(c)  # fail early on malformed numbers
            partial[vid] = tuple(coords)

    poly = IndefiniteMetricPolyhedron(len(vertices), simplices, lengths)
    return PolyhedronFile(polyhedron=poly, vertex_ids=tuple(vertices),
                          d=d, partial=partial,
                          version=str(data.get("version", FORMAT_VERSION)))


def serialize_polyhedron(pf: PolyhedronFile) -> str:
    ids = pf.vertex_ids
    data = {
        "version": pf.version,
        "d": pf.d,
        "vertices": list(ids),
        "maximal_simplices": [[ids[v] for v in simplex]
                              for simplex in pf.polyhedron.simplices],
        "squared_lengths": [
            {"edge": [ids[i], ids[j]], "value": format_number(value)}
            for (i, j), value in sorted(pf.polyhedron.lengths.items())
        ],
    }
    if pf.partial is not None:
        data["partial_embedding"] = {vid: list(coords)
                                     for vid, coords in pf.partial.items()}
    return canonical_json(data)


def polyhedron_file_for(poly: IndefiniteMetricPolyhedron,
                        d: Optional[int] = None) -> PolyhedronFile:
    """Wrap a generated polyhedron with stringified vertex ids."""
    width = len(str(max(poly.n_vertices - 1, 0)))
    ids = tuple(f"v{str(i).zfill(width)}" for i in range(poly.n_vertices))
    return PolyhedronFile(polyhedron=poly, vertex_ids=ids, d=d)


@dataclass
class EmbeddingFile:
    """An embedding in wire form: coordinates as verbatim strings."""

    d: int
    backend: str
    assignment: Dict[str, Tuple[str, ...]]
    meta: dict = field(default_factory=dict)
    report: Optional[dict] = None
    version: str = FORMAT_VERSION

    def to_embedding(self, vertex_ids: Tuple[str, ...]) -> Embedding:
        index = {vid: i for i, vid in enumerate(vertex_ids)}
        points = {}
        for vid, coord_strings in self.assignment.items():
            if vid not in index:
                raise _fail(f"assignment references unknown vertex {vid!r}")
            if len(coord_strings) != 2 * self.d:
                raise _fail(f"point {vid!r} has {len(coord_strings)} "
                            f"coordinates, expected {2 * self.d}")
            coords = tuple(parse_number(s) for s in coord_strings)
            points[index[vid]] = MinkVector(self.d, coords)
        ordering = self.meta.get("ordering")
        if ordering is not None:
            ordering = tuple(index[vid] for vid in ordering)
        return Embedding(d=self.d, backend=self.backend, points=points,
                         ordering=ordering,
                         degeneracy=self.meta.get("degeneracy"),
                         anchor_scheme=self.meta.get("anchors"),
                         seed=self.meta.get("seed"))


def embedding_file_for(embedding: Embedding, vertex_ids: Tuple[str, ...],
                       report: Optional[dict] = None) -> EmbeddingFile:
    assignment = {
        vertex_ids[v]: tuple(format_number(c) for c in point.coords)
        for v, point in embedding.points.items()
    }
    meta = {
        "seed": embedding.seed,
        "anchors": embedding.anchor_scheme,
        "degeneracy": embedding.degeneracy,
        "ordering": None if embedding.ordering is None
        else [vertex_ids[v] for v in embedding.ordering],
    }
    return EmbeddingFile(d=embedding.d, backend=embedding.backend,
                         assignment=assignment, meta=meta, report=report)


def parse_embedding(text: str) -> EmbeddingFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _fail(f"invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise _fail("top level must be an object")
    d = data.get("d")
    if not isinstance(d, int) or d < 1:
        raise _fail(f"d must be a positive integer, got {d!r}")
    backend = data.get("backend")
    if backend not in ("rational", "float"):
        raise _fail(f"unknown backend {backend!r}")
    raw = data.get("assignment")
    if not isinstance(raw, dict):
        raise _fail("'assignment' must map vertex ids to coordinate arrays")
    assignment = {}
    for vid, coords in raw.items():
        if (not isinstance(coords, list)
                or not all(isinstance(c, str) for c in coords)):
            raise _fail(f"coordinates of {vid!r} must be an array of strings")
        for c in coords:
            parse_number(c)
        assignment[vid] = tuple(coords)
    meta = data.get("meta", {})
    if not isinstance(meta, dict):
        raise _fail("'meta' must be an object")
    return EmbeddingFile(d=d, backend=backend, assignment=assignment,
                         meta=meta, report=data.get("report"),
                         version=str(data.get("version", FORMAT_VERSION)))


def serialize_embedding(ef: EmbeddingFile) -> str:
    data = {
        "version": ef.version,
        "d": ef.d,
        "backend": ef.backend,
        "assignment": {vid: list(coords) for vid, coords in ef.assignment.items()},
        "meta": ef.meta,
        "report": ef.report,
    }
    return canonical_json(data)
