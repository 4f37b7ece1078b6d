"""Command line entry point: ``prep parse|sst|gold``."""

from __future__ import annotations

import argparse
import sys

from .backends import get_backend
from .gold import convert_gold
from .parse import parse_corpus
from .sst import SstConversionError, convert_sst

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prep",
        description="Offline corpus preparation; emits a provenance "
                    "manifest as one JSON line on stdout.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_parse = sub.add_parser(
        "parse", help="parse raw sentences (one per line) to enriched CoNLL-U")
    p_parse.add_argument("--in", dest="input", required=True,
                         help="sentences file, one per line, UTF-8")
    p_parse.add_argument("--out", dest="output", required=True,
                         help="CoNLL-U output path")
    p_parse.add_argument("--backend", default="auto",
                         choices=("auto", "spacy", "heuristic"))

    p_sst = sub.add_parser(
        "sst", help="convert a sentiment treebank release to "
                    "toks/parents/labels files")
    p_sst.add_argument("--in", dest="input", required=True,
                       help="release directory")
    p_sst.add_argument("--out", dest="output", required=True,
                       help="output directory")
    p_sst.add_argument("--stem", default="sst")
    p_sst.add_argument("--backend", default="auto",
                       choices=("auto", "spacy", "heuristic"))

    p_gold = sub.add_parser(
        "gold", help="normalize a '####'-annotated triplet file to JSONL")
    p_gold.add_argument("--in", dest="input", required=True)
    p_gold.add_argument("--out", dest="output", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "parse":
            manifest = parse_corpus(args.input, args.output,
                                    get_backend(args.backend))
        elif args.command == "sst":
            manifest = convert_sst(args.input, args.output,
                                   get_backend(args.backend),
                                   stem=args.stem)
        else:
            manifest, issues = convert_gold(args.input, args.output)
            for issue in issues:
                print(f"skipped {issue}", file=sys.stderr)
    except FileNotFoundError as exc:
        print(f"prep: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SstConversionError, OSError, ValueError) as exc:
        print(f"prep: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(manifest.to_json_line())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
