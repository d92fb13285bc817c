"""Command line surface: embed, extend, verify, gen, bench, info.

Exit codes are a stable contract: 0 success, 2 usage or parse problems
(including infeasible flags), 3 verification or construction failure.
The default numeric backend may be set through the MINKEMBED_BACKEND
environment variable; the --backend flag overrides it.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Optional

from . import __version__
from .embed import (ANCHOR_SCHEMES, EmbedConfig, Embedding, embed_polyhedron,
                    extend_embedding)
from .errors import (ConfigError, GenericPointError, InvalidPolyhedron,
                     MinkembedError, PlacementError, PreconditionError)
from .fileformat import (FORMAT_VERSION, EmbeddingFile, PolyhedronFile,
                         canonical_json, embedding_file_for, parse_embedding,
                         parse_polyhedron, polyhedron_file_for,
                         serialize_embedding, serialize_polyhedron)
from .gen import (GenSpec, KIND_BOUNDED, KIND_COMPLETE, KIND_DEGENERATE,
                  KIND_MESH, euclidean_mesh, random_polyhedron,
                  simplex_skeleton, stacked_tetrahedra)
from .scalars import DEFAULT_TOLERANCES, FLOAT, RATIONAL
from .verify import DEFAULT_TOLERANCE, verify_embedding, verify_isometry

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY = 3

ENV_BACKEND = "MINKEMBED_BACKEND"

BENCH_HEADER = "n,d,backend,phase_order_ms,phase_place_ms,phase_verify_ms,max_residual"

_GEN_KINDS = {
    "complete": KIND_COMPLETE,
    "mesh": KIND_MESH,
    "degenerate": KIND_DEGENERATE,
    "bounded": KIND_BOUNDED,
    "stacked": "stacked",
}


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _write_output(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)


def _fail(message: str, code: int) -> int:
    sys.stderr.write(f"minkembed: {message}\n")
    return code


def _default_backend(flag_value: Optional[str]) -> str:
    if flag_value is not None:
        return flag_value
    return os.environ.get(ENV_BACKEND, "auto")


def _embed_config(args, ordering=None) -> EmbedConfig:
    return EmbedConfig(
        d=args.d,
        backend=_default_backend(args.backend),
        anchors=getattr(args, "anchors", "auto"),
        seed=args.seed,
        certify=getattr(args, "certify", False),
        samples=getattr(args, "samples", 200),
        ordering=ordering,
    )


# ---------------------------------------------------------------------------
# commands


def cmd_embed(args) -> int:
    try:
        pf = parse_polyhedron(_read_input(args.input))
        config = _embed_config(args)
        if config.d is None and pf.d is not None:
            config = EmbedConfig(**{**config.__dict__, "d": pf.d})
        embedding = embed_polyhedron(pf.polyhedron, config)
    except (ConfigError, InvalidPolyhedron, PreconditionError, OSError) as exc:
        return _fail(str(exc), EXIT_USAGE)
    except (PlacementError, GenericPointError) as exc:
        return _fail(str(exc), EXIT_VERIFY)
    report = verify_embedding(pf.polyhedron, embedding, tolerance=args.tol,
                              samples=args.samples, seed=args.seed,
                              gp_mode="exhaustive" if args.certify else None)
    ef = embedding_file_for(embedding, pf.vertex_ids, report=report.to_dict())
    _write_output(serialize_embedding(ef), args.out)
    if not report.passed:
        return _fail(f"verification failed (worst edge {report.isometry.worst_edge}, "
                     f"max residual {report.isometry.max_residual:.3e})", EXIT_VERIFY)
    return EXIT_OK


def cmd_extend(args) -> int:
    try:
        pf = parse_polyhedron(_read_input(args.input))
        if pf.partial is None:
            return _fail("input file has no partial_embedding", EXIT_USAGE)
        d = args.d if args.d is not None else pf.d
        if d is None:
            some = next(iter(pf.partial.values()))
            d = len(some) // 2
        partial = pf.partial_embedding(d)
        config = _embed_config(args)
        if config.d is None:
            config = EmbedConfig(**{**config.__dict__, "d": d})
    except (ConfigError, InvalidPolyhedron, OSError) as exc:
        return _fail(str(exc), EXIT_USAGE)
    try:
        embedding = extend_embedding(pf.polyhedron, partial, config)
    except ConfigError as exc:
        return _fail(str(exc), EXIT_USAGE)
    except (PreconditionError, PlacementError, GenericPointError) as exc:
        detail = getattr(exc, "witness", None)
        suffix = f" (witness: {detail})" if detail else ""
        return _fail(f"{exc}{suffix}", EXIT_VERIFY)
    report = verify_embedding(pf.polyhedron, embedding, tolerance=args.tol,
                              samples=args.samples, seed=args.seed)
    ef = embedding_file_for(embedding, pf.vertex_ids, report=report.to_dict())
    # carried-over coordinates must match the input bytes, not a reprint
    for vid, coords in pf.partial.items():
        ef.assignment[vid] = tuple(coords)
    _write_output(serialize_embedding(ef), args.out)
    if not report.passed:
        return _fail(f"verification failed (max residual "
                     f"{report.isometry.max_residual:.3e})", EXIT_VERIFY)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        pf = parse_polyhedron(_read_input(args.polyhedron))
        ef = parse_embedding(_read_input(args.embedding))
        unknown = set(ef.assignment) - set(pf.vertex_ids)
        if unknown:
            return _fail(f"embedding references unknown vertices {sorted(unknown)}",
                         EXIT_USAGE)
        embedding = ef.to_embedding(pf.vertex_ids)
    except (ConfigError, InvalidPolyhedron, OSError) as exc:
        return _fail(str(exc), EXIT_USAGE)
    try:
        report = verify_embedding(pf.polyhedron, embedding, tolerance=args.tol,
                                  samples=args.samples, seed=args.seed,
                                  gp_mode=None if args.gp_mode == "auto"
                                  else args.gp_mode)
    except PreconditionError as exc:
        return _fail(str(exc), EXIT_USAGE)
    _write_output(canonical_json(report.to_dict()), args.out)
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_gen(args) -> int:
    try:
        kind = _GEN_KINDS[args.kind]
        if kind == KIND_COMPLETE:
            poly = simplex_skeleton(args.d if args.d is not None else 3)
        elif kind == KIND_MESH:
            poly = euclidean_mesh(args.rows, args.cols)
        elif kind == "stacked":
            poly = stacked_tetrahedra(args.extra, seed=args.seed)
        else:
            poly = random_polyhedron(GenSpec(
                kind=kind, n_vertices=args.n, dim=args.dim, bound=args.bound,
                length_low=args.length_low, length_high=args.length_high,
                float_lengths=args.float_lengths, seed=args.seed))
    except ConfigError as exc:
        return _fail(str(exc), EXIT_USAGE)
    pf = polyhedron_file_for(poly, d=None)
    _write_output(serialize_polyhedron(pf), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    backend = _default_backend(args.backend)
    if backend == "auto":
        backend = FLOAT
    lines = [BENCH_HEADER]
    for n in args.n:
        for d in args.d:
            spec = GenSpec(kind=KIND_DEGENERATE, n_vertices=n, dim=1,
                           bound=d, seed=args.seed)
            poly = random_polyhedron(spec)
            t0 = time.perf_counter()
            order, _k = poly.degeneracy_ordering()
            t1 = time.perf_counter()
            config = EmbedConfig(d=d, backend=backend, seed=args.seed,
                                 ordering=tuple(order))
            try:
                embedding = embed_polyhedron(poly, config)
            except MinkembedError as exc:
                return _fail(f"bench cell n={n} d={d}: {exc}", EXIT_VERIFY)
            t2 = time.perf_counter()
            iso = verify_isometry(poly, embedding, tolerance=args.tol)
            t3 = time.perf_counter()
            lines.append(f"{n},{d},{backend},"
                         f"{(t1 - t0) * 1000.0:.3f},{(t2 - t1) * 1000.0:.3f},"
                         f"{(t3 - t2) * 1000.0:.3f},{iso.max_residual:.6e}")
            if not iso.passed:
                lines.append("")
                _write_output("\n".join(lines), args.out)
                return _fail(f"bench cell n={n} d={d} failed isometry "
                             f"(max residual {iso.max_residual:.3e})", EXIT_VERIFY)
    lines.append("")
    _write_output("\n".join(lines), args.out)
    return EXIT_OK


def cmd_info(args) -> int:
    info = {
        "version": __version__,
        "format_version": FORMAT_VERSION,
        "backends": [RATIONAL, FLOAT],
        "default_tolerance": DEFAULT_TOLERANCE,
        "rank_tolerance": DEFAULT_TOLERANCES.rank_rel,
        "backend_env_var": ENV_BACKEND,
    }
    _write_output(canonical_json(info), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minkembed",
        description="Isometric embeddings of indefinite metric polyhedra "
                    "into Minkowski space of signature (d,d).")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_out(p):
        p.add_argument("--out", "-o", default=None,
                       help="output path (default stdout)")

    p = sub.add_parser("embed", help="embed a polyhedron from scratch")
    p.add_argument("input", help="polyhedron JSON file, or - for stdin")
    p.add_argument("--d", type=int, default=None,
                   help="signature half-dimension (default: skeleton degeneracy)")
    p.add_argument("--backend", choices=["auto", RATIONAL, FLOAT], default=None)
    p.add_argument("--anchors", choices=list(ANCHOR_SCHEMES), default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--certify", action="store_true",
                   help="exhaustive general-position verification")
    p.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--samples", type=int, default=200,
                   help="injectivity spot-check samples")
    common_out(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extend", help="complete a partial embedding")
    p.add_argument("input", help="polyhedron JSON file with partial_embedding")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--backend", choices=["auto", FLOAT], default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--certify", action="store_true")
    p.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--samples", type=int, default=200)
    common_out(p)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("verify", help="verify an embedding against a polyhedron")
    p.add_argument("polyhedron")
    p.add_argument("embedding")
    p.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--gp-mode", choices=["auto", "exhaustive", "sampled"],
                   default="auto")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    common_out(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate fixture polyhedra")
    p.add_argument("--kind", choices=sorted(_GEN_KINDS), default="degenerate")
    p.add_argument("--d", type=int, default=None,
                   help="simplex dimension for --kind complete")
    p.add_argument("--n", type=int, default=12, help="vertex count")
    p.add_argument("--dim", type=int, default=1,
                   help="max simplex dimension for clique lifting")
    p.add_argument("--bound", type=int, default=3,
                   help="degeneracy/degree bound")
    p.add_argument("--rows", type=int, default=3)
    p.add_argument("--cols", type=int, default=3)
    p.add_argument("--extra", type=int, default=3,
                   help="extra vertices for --kind stacked")
    p.add_argument("--length-low", type=int, default=-4)
    p.add_argument("--length-high", type=int, default=4)
    p.add_argument("--float-lengths", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    common_out(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time the pipeline phases, emit CSV")
    p.add_argument("--n", type=int, nargs="+", default=[1000])
    p.add_argument("--d", type=int, nargs="+", default=[4])
    p.add_argument("--backend", choices=["auto", RATIONAL, FLOAT], default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    common_out(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("info", help="print version and configuration")
    common_out(p)
    p.set_defaults(func=cmd_info)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MinkembedError as exc:
        return _fail(str(exc), EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
