"""Command-line driver: ``unlrdf {parse,serialize,convert,extract,check,pipeline,serve}``.

Exit codes: 0 ok, 1 syntax error, 2 validation error, 3 inconsistency found,
4 I/O error.  Every option can also be set through a ``UNLRDF_*`` variable.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .checker import check, format_lines, format_text
from .core import UnlError, VocabularyError
from .parser import UnlSyntaxError, format_unl_document
from .pipeline import (
    PipelineConfig,
    ValidationFailed,
    collect_axioms,
    extract,
    load_rdf_file,
    parse_and_validate,
    run_pipeline,
    serialize,
    unl_to_rdf_text,
)
from .quadstore import QuadStore, StoreError, TurtleSyntaxError, emit_turtle
from .rdf_unl import ScopeMode, convert_scope_mode
from .rules import format_axioms

EXIT_OK = 0
EXIT_SYNTAX = 1
EXIT_VALIDATION = 2
EXIT_INCONSISTENT = 3
EXIT_IO = 4


def _write(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_all(paths: list[str]) -> QuadStore:
    store = QuadStore()
    for path in paths:
        store = store.union(load_rdf_file(path))
    return store


def cmd_parse(args, config: PipelineConfig) -> int:
    doc = parse_and_validate(_read(args.input), config)
    _write(format_unl_document(doc), args.output)
    return EXIT_OK


def cmd_serialize(args, config: PipelineConfig) -> int:
    _write(unl_to_rdf_text(_read(args.input), config), args.output)
    return EXIT_OK


def cmd_convert(args, config: PipelineConfig) -> int:
    target = ScopeMode(args.to)
    store = convert_scope_mode(load_rdf_file(args.input), target)
    _write(serialize(store, target), args.output)
    return EXIT_OK


def cmd_extract(args, config: PipelineConfig) -> int:
    axioms, store = extract(_load_all(args.inputs), config)
    _write(emit_turtle(store), args.output)
    if args.report:
        Path(args.report).write_text(format_axioms(axioms), encoding="utf-8")
    return EXIT_OK


def cmd_check(args, config: PipelineConfig) -> int:
    axioms = []
    for path in args.inputs:
        axioms += collect_axioms(load_rdf_file(path), config)
    reports = check(list(dict.fromkeys(axioms)))
    _write(format_lines(reports) + format_text(reports), args.output)
    return EXIT_INCONSISTENT if reports else EXIT_OK


def cmd_pipeline(args, config: PipelineConfig) -> int:
    result = run_pipeline([_read(p) for p in args.inputs], config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in result.files.items():
        (out / name).write_text(text, encoding="utf-8")
    sys.stdout.write(format_lines(result.reports))
    return EXIT_INCONSISTENT if result.reports else EXIT_OK


def cmd_serve(args, config: PipelineConfig) -> int:
    from .service import serve

    host, _, port = args.listen.rpartition(":")
    serve(host or "127.0.0.1", int(port), config)
    return EXIT_OK


def build_parser(environ=None) -> argparse.ArgumentParser:
    env_config = PipelineConfig.from_env(environ)
    env = {} if environ is None else environ

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=[m.value for m in ScopeMode], default=env_config.scope_mode.value,
                        help="scope encoding (default: %(default)s)")
    common.add_argument("--base", default=env_config.base, help="namespace for instance IRIs")
    strictness = common.add_mutually_exclusive_group()
    strictness.add_argument("--strict", dest="strict", action="store_true", default=env_config.strict)
    strictness.add_argument("--lax", dest="strict", action="store_false")
    common.add_argument("--vocab", default=env_config.vocab_path, metavar="PATH", help="relation/attribute vocabulary")
    common.add_argument("--volume", default=env_config.volume_path, metavar="PATH", help="UW volume file")
    common.add_argument("--counter-base", type=int, default=env_config.counter_base, metavar="N")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="unlrdf", description="UNL to RDF conversion, axiom extraction and checking.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="validate UNL text and print it in canonical form")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("serialize", parents=[common], help="UNL text to TriG (named graphs) or Turtle (reified)")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_serialize)

    p = sub.add_parser("convert", parents=[common], help="switch an RDF-UNL file between scope encodings")
    p.add_argument("input")
    p.add_argument("--to", required=True, choices=[m.value for m in ScopeMode])
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("extract", parents=[common], help="run the axiom extraction rules")
    p.add_argument("inputs", nargs="*")
    p.add_argument("-o", "--output", help="axiom Turtle destination")
    p.add_argument("--report", help="write the line-oriented axiom report here")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("check", parents=[common], help="check RDF-UNL or axiom files for inconsistencies")
    p.add_argument("inputs", nargs="*")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("pipeline", parents=[common], help="parse, serialize, extract and check in one go")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", default=env.get("UNLRDF_OUT", "unlrdf-out"), metavar="DIR")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.add_argument("--listen", default=env.get("UNLRDF_LISTEN", "127.0.0.1:8000"), metavar="HOST:PORT")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None, environ=None) -> int:
    environ = os.environ if environ is None else environ
    args = build_parser(environ).parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    config = PipelineConfig(ScopeMode(args.mode), args.strict, args.base, args.vocab, args.volume, args.counter_base)
    try:
        return args.func(args, config)
    except (UnlSyntaxError, TurtleSyntaxError) as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    except ValidationFailed as exc:
        print(f"invalid document:\n{exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UnlError, VocabularyError, StoreError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
