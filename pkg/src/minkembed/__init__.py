"""Isometric embeddings of indefinite metric polyhedra into Minkowski space.

An indefinite metric polyhedron is a simplicial complex whose edges carry
arbitrary real squared lengths (negative and zero allowed).  This package
embeds any such complex into the flat space R^{d,d} (d plus and d minus
squares), where d is the degeneracy of the edge skeleton, and verifies
the result: exact residuals on the rational backend, relative residual
bounds on the float backend, plus general-position and injectivity
checks.
"""

from .embed import (ANCHOR_AUTO, ANCHOR_MOMENT, ANCHOR_RANDOM,
                    ANCHOR_SCHEMES, EmbedConfig, Embedding, PlacementProblem,
                    SplitCertificate, choose_generic_delta_point,
                    embed_polyhedron, extend_embedding, isotropic_pair_for,
                    place_vertex, resolve_backend)
from .errors import (AffineDependenceError, ConfigError, DimensionMismatch,
                     GenericPointError, InvalidPolyhedron, MinkembedError,
                     PlacementError, PreconditionError, RankDeficientRows)
from .fileformat import (EmbeddingFile, PolyhedronFile, canonical_json,
                         embedding_file_for, parse_embedding,
                         parse_polyhedron, polyhedron_file_for,
                         serialize_embedding, serialize_polyhedron)
from .gen import (GenSpec, KIND_BOUNDED, KIND_COMPLETE, KIND_DEGENERATE,
                  KIND_MESH, KINDS, euclidean_mesh, random_polyhedron,
                  simplex_skeleton, stacked_tetrahedra)
from .linalg import (IsotropicSplit, MinkVector, QLResult, affine_rank,
                     delta_coordinates, delta_point, is_affinely_independent,
                     lorentz_defect, matrix_rank, mink_inner,
                     moment_curve_point, project_delta, project_sigma,
                     ql_decompose, sigma_coordinates, sigma_point,
                     solve_pairing_system, squared_length, standard_split)
from .polyhedron import Defect, IndefiniteMetricPolyhedron
from .scalars import (BACKENDS, DEFAULT_TOLERANCES, FLOAT, RATIONAL,
                      Tolerances, format_number, is_exact, parse_number)
from .verify import (DEFAULT_TOLERANCE, GeneralPositionReport,
                     InjectivityReport, IsometryReport, VerificationReport,
                     verify_embedding, verify_general_position,
                     verify_injectivity, verify_isometry)

__version__ = "0.1.0"

__all__ = [
    "ANCHOR_AUTO", "ANCHOR_MOMENT", "ANCHOR_RANDOM", "ANCHOR_SCHEMES",
    "AffineDependenceError", "BACKENDS", "ConfigError", "DEFAULT_TOLERANCE",
    "DEFAULT_TOLERANCES", "Defect", "DimensionMismatch", "EmbedConfig",
    "Embedding", "EmbeddingFile", "FLOAT", "GenSpec", "GeneralPositionReport",
    "GenericPointError", "IndefiniteMetricPolyhedron", "InjectivityReport",
    "InvalidPolyhedron", "IsometryReport", "IsotropicSplit", "KIND_BOUNDED",
    "KIND_COMPLETE", "KIND_DEGENERATE", "KIND_MESH", "KINDS", "MinkVector",
    "MinkembedError", "PlacementError", "PlacementProblem", "PolyhedronFile",
    "PreconditionError", "QLResult", "RATIONAL", "RankDeficientRows",
    "SplitCertificate", "Tolerances", "VerificationReport", "affine_rank",
    "canonical_json", "choose_generic_delta_point", "delta_coordinates",
    "delta_point", "embed_polyhedron", "embedding_file_for", "euclidean_mesh",
    "extend_embedding", "format_number", "is_affinely_independent", "is_exact",
    "isotropic_pair_for", "lorentz_defect", "matrix_rank", "mink_inner",
    "moment_curve_point", "parse_embedding", "parse_number",
    "parse_polyhedron", "place_vertex", "polyhedron_file_for", "project_delta",
    "project_sigma", "ql_decompose", "random_polyhedron", "resolve_backend",
    "serialize_embedding", "serialize_polyhedron", "sigma_coordinates",
    "sigma_point", "simplex_skeleton", "solve_pairing_system",
    "squared_length", "stacked_tetrahedra", "standard_split",
    "verify_embedding", "verify_general_position", "verify_injectivity",
    "verify_isometry",
]
