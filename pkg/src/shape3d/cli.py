"""Command-line interface: index, query, eval, export-facts, serve.

The SHAPE3D_INDEX environment variable, when set, overrides --index for every
command that reads an index.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path

from .config import DEFAULT_CLUSTERS, DEFAULT_KNN_K, DEFAULT_RESULT_COUNT
from .errors import ShapeEngineError
from .indexing import Config, _class_lookup, build_index
from .offio import parse_off
from .retrieval import (
    RetrievalIndex,
    WeightProfile,
    evaluate_pr,
    load_index,
    parse_cla,
    pr_to_csv,
    results_to_json,
    retrieve,
)
from .service import serve


def _parse_weights(text: str) -> WeightProfile:
    try:
        m, i, o = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("weights must be three comma-separated numbers") from None
    return WeightProfile(m, i, o)


def _index_path(args) -> Path:
    env = os.environ.get("SHAPE3D_INDEX")
    if env:
        return Path(env)
    if args.index is None:
        raise SystemExit("--index is required (or set SHAPE3D_INDEX)")
    return Path(args.index)


def _apply_cla(index: RetrievalIndex, cla_path: Path, rollup: bool) -> RetrievalIndex:
    """Re-map model classes from a classification file for evaluation."""
    classes = parse_cla(cla_path.read_text())
    if rollup:
        classes = classes.rolled_up()
    lookup = _class_lookup(classes, set(index.models))
    models = {
        mid: dataclasses.replace(rec, class_name=lookup.get(mid))
        for mid, rec in index.models.items()
    }
    return dataclasses.replace(index, models=models)


def cmd_index(args) -> int:
    cfg = Config(
        corpus_dir=Path(args.corpus),
        index_path=Path(args.out),
        clusters=args.clusters,
        knn_k=args.knn,
        seed=args.seed,
        cla_path=Path(args.cla) if args.cla else None,
        epsilon_rel=args.epsilon_rel,
    )
    index, report = build_index(cfg)
    print(f"indexed {len(index.models)} models -> {cfg.index_path}")
    print(f"per-model time: mean {report.mean_seconds:.4f}s, max {report.max_seconds:.4f}s")
    for entry in report.skipped:
        print(f"skipped {entry['file']}: {entry['reason']}")
    return 0


def cmd_query(args) -> int:
    index = load_index(_index_path(args))
    if args.model:
        query = parse_off(Path(args.model).read_text(), Path(args.model).stem)
    else:
        query = args.id
    results = retrieve(
        query,
        index,
        w=args.weights or WeightProfile(),
        k_results=args.k,
        use_classifier=not args.no_classify,
        use_ontology=not args.no_ontology,
    )
    if args.json:
        print(results_to_json(results))
        return 0
    print(f"{'rank':>4}  {'model':<24} {'distance':>12}  {'class':<16} filter")
    for rank, r in enumerate(results, start=1):
        print(
            f"{rank:>4}  {r.model_id:<24} {r.distance:>12.6f}  "
            f"{(r.predicted_class or '-'):<16} {'in' if r.passed_filter else 'out'}"
        )
    return 0


def cmd_eval(args) -> int:
    index = load_index(_index_path(args))
    index = _apply_cla(index, Path(args.cla), args.rollup)
    curve = evaluate_pr(
        index,
        class_name=args.cls,
        use_classifier=not args.no_classify,
        use_ontology=not args.no_ontology,
    )
    csv = pr_to_csv(curve)
    if args.out:
        Path(args.out).write_text(csv)
        print(f"wrote {args.out}")
    else:
        print(csv, end="")
    return 0


def cmd_export_facts(args) -> int:
    index = load_index(_index_path(args))
    Path(args.out).write_text(index.store.export(), encoding="utf-8")
    print(f"wrote {len(index.store.facts)} facts -> {args.out}")
    return 0


def cmd_serve(args) -> int:
    index = load_index(_index_path(args))
    print(f"serving {len(index.models)} models on port {args.port}")
    serve(index, args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shape3d",
        description="3D model indexing and query-by-example retrieval",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build a retrieval index from a corpus of OFF files")
    p.add_argument("--corpus", required=True, help="directory of .off models")
    p.add_argument("--out", required=True, help="index file to write")
    p.add_argument("--clusters", type=int, default=DEFAULT_CLUSTERS)
    p.add_argument("--knn", type=int, default=DEFAULT_KNN_K)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cla", help="optional PSB classification file")
    p.add_argument("--epsilon-rel", type=float, default=0.05, dest="epsilon_rel")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", help="rank models similar to a query")
    p.add_argument("--index", help="index file (SHAPE3D_INDEX overrides)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--model", help="path to a query OFF file")
    group.add_argument("--id", help="ID of an indexed model")
    p.add_argument("--k", type=int, default=DEFAULT_RESULT_COUNT)
    p.add_argument("--weights", type=_parse_weights, help="group weights m,i,o")
    p.add_argument("--no-classify", action="store_true")
    p.add_argument("--no-ontology", action="store_true")
    p.add_argument("--json", action="store_true", help="canonical JSON output")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("eval", help="precision-recall evaluation against a .cla")
    p.add_argument("--index", help="index file (SHAPE3D_INDEX overrides)")
    p.add_argument("--cla", required=True)
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--class", dest="cls", help="restrict to one class")
    p.add_argument("--rollup", action="store_true", help="merge classes into their roots")
    p.add_argument("--no-classify", action="store_true")
    p.add_argument("--no-ontology", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export-facts", help="dump the fact store as plain triples")
    p.add_argument("--index", help="index file (SHAPE3D_INDEX overrides)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_facts)

    p = sub.add_parser("serve", help="serve the HTTP API over a frozen index")
    p.add_argument("--index", help="index file (SHAPE3D_INDEX overrides)")
    p.add_argument("--port", type=int, default=8371)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ShapeEngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
