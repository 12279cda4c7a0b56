"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 validation error,
3 search exhausted, 4 internal inconsistency.
"""

import argparse
import json
import sys

from .analysis import analyze, verify_paper
from .checks import run_crosscheck
from .diagnosis import Category, parse_table, parse_table_text
from .errors import InconsistencyError, ParseError, ValidationError
from .randgen import MASK64, GenConfig, search_category
from .serialize import table_to_dict

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_EXHAUSTED = 3
EXIT_INCONSISTENT = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _u64(text):
    value = int(text)
    if not 0 <= value <= MASK64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default=argparse.SUPPRESS,
                        help="text (default) or one structured JSON document on stdout")
    common.add_argument("--output", metavar="PATH", default=argparse.SUPPRESS,
                        help="also write the structured document to PATH")

    # parents share action objects, so defaults are filled in after parsing
    parser = _Parser(prog="markov-kernels", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="analyse one S-table")
    p.add_argument("path", nargs="?", help="table file, or - for stdin")
    p.add_argument("--counts", nargs=16, type=int, metavar="N",
                   help="inline table: 16 counts, top row first")

    sub.add_parser("verify-paper", parents=[common], help="check the three published tables")

    p = sub.add_parser("search", parents=[common], help="look for a table in a category")
    p.add_argument("--category", required=True, choices=[c.value for c in Category])
    p.add_argument("--seed", type=_u64, required=True)
    p.add_argument("--budget", type=_positive, required=True)
    p.add_argument("--max-count", type=_positive, default=10, help="largest cell count drawn")

    p = sub.add_parser("crosscheck", parents=[common], help="randomised route and invariant checks")
    p.add_argument("--seed", type=_u64, required=True)
    p.add_argument("--iters", type=_positive, required=True)
    return parser


def read_table(text: str):
    """Parse the two-line text format, or JSON ``{"counts": [16 ints]}`` / ``{"grid": ...}``."""
    stripped = text.lstrip()
    if stripped.startswith(("{", "[")):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        if isinstance(doc, dict):
            doc = doc.get("counts", doc.get("grid", doc.get("table")))
        if not isinstance(doc, list):
            raise ParseError("structured input needs a 'counts' list of 16 integers")
        flat = [v for row in doc for v in row] if doc and isinstance(doc[0], list) else doc
        if len(flat) != 16:
            raise ParseError(f"expected 16 counts, found {len(flat)}")
        return parse_table(doc)
    return parse_table_text(text)


def _emit(args, doc, text, out):
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    if args.format == "structured":
        json.dump(doc, out, indent=2)
        out.write("\n")
    else:
        out.write(text)


def cmd_analyze(args, out):
    if args.counts is not None:
        table = parse_table(args.counts)
    elif args.path is None:
        raise UsageError("analyze: give a table path, '-' or --counts")
    elif args.path == "-":
        table = read_table(sys.stdin.read())
    else:
        with open(args.path) as fh:
            table = read_table(fh.read())
    rep = analyze(table)
    doc = {"command": "analyze", **rep.to_dict()}
    _emit(args, doc, rep.to_text(), out)
    return EXIT_OK if rep.routes_agree else EXIT_INCONSISTENT


def cmd_verify_paper(args, out, tables=None):
    results = verify_paper(tables)
    lines = []
    docs = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        observed = r.observed.value if r.observed else f"error: {r.error}"
        lines.append(f"{status} {r.name}: expected {r.expected.value}, observed {observed}")
        entry = {"name": r.name, "expected": r.expected.value,
                 "observed": r.observed.value if r.observed else None, "passed": r.passed}
        if r.report is not None:
            lines.append("     " + r.report.to_text().replace("\n", "\n     ").rstrip())
            entry["report"] = r.report.to_dict()
        docs.append(entry)
    ok = all(r.passed for r in results)
    lines.append("verify-paper: " + ("all tables match" if ok else "MISMATCH"))
    _emit(args, {"command": "verify-paper", "passed": ok, "tables": docs}, "\n".join(lines) + "\n", out)
    return EXIT_OK if ok else EXIT_INCONSISTENT


def cmd_search(args, out):
    cfg = GenConfig(seed=args.seed, max_count=args.max_count)
    outcome = search_category(cfg, args.category, args.budget)
    doc = {
        "command": "search",
        "category": outcome.target.value,
        "seed": args.seed,
        "budget": args.budget,
        "max_count": args.max_count,
        "attempts": outcome.attempts,
        "found": not outcome.exhausted,
    }
    if outcome.exhausted:
        text = f"exhausted: no {outcome.target.value} table in {outcome.attempts} attempts (seed {args.seed})\n"
        _emit(args, doc, text, out)
        return EXIT_EXHAUSTED
    rep = analyze(outcome.found)
    doc["table"] = table_to_dict(outcome.found)["grid"]
    doc["report"] = rep.to_dict()
    text = (
        f"found {outcome.target.value} after {outcome.attempts} attempts (seed {args.seed}):\n"
        + outcome.found.to_text() + "\n" + rep.to_text()
    )
    _emit(args, doc, text, out)
    return EXIT_OK


def cmd_crosscheck(args, out):
    summary = run_crosscheck(args.seed, args.iters)
    doc = summary.to_dict()
    lines = [f"crosscheck seed={args.seed} iterations={args.iters}"]
    for name, counts in doc["checks"].items():
        lines.append(f"  {name:<24} checked {counts['checked']:>6}  failed {counts['failed']}")
    for bundle in summary.failures:
        lines.append("FAILURE " + json.dumps(bundle, sort_keys=True))
    lines.append("crosscheck: " + ("0 failures" if summary.ok else f"{doc['total_failed']} failures"))
    _emit(args, doc, "\n".join(lines) + "\n", out)
    return EXIT_OK if summary.ok else EXIT_INCONSISTENT


COMMANDS = {
    "analyze": cmd_analyze,
    "verify-paper": cmd_verify_paper,
    "search": cmd_search,
    "crosscheck": cmd_crosscheck,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        args.format = getattr(args, "format", "text")
        args.output = getattr(args, "output", None)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InconsistencyError as exc:
        print(f"INTERNAL INCONSISTENCY: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry_point():
    sys.exit(main())
