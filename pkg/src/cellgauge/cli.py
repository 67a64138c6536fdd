"""Command-line front end: per-file analysis and corpus runs.

Exit codes: 0 ok, 1 internal error, 2 bad input, 3 bad arguments.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .analytics import (
    EmptyCorpusError,
    HistogramSpec,
    NoDataError,
    aggregate,
    correlation_matrix,
    histogram,
)
from .graph import build_graph
from .interchange import SchemaError, read_interchange_file
from .metrics import (
    DEFAULT_CONDITIONAL_FUNCTIONS,
    METRIC_IDS,
    MetricRecord,
    compute_record,
)
from .model import Workbook, classify_cells
from .reports import render_report, write_report
from .xlsx import XlsxError, read_xlsx

logger = logging.getLogger("cellgauge")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_BAD_INPUT = 2
EXIT_BAD_ARGS = 3

_SKIP_EXTENSIONS = {".xls", ".ods"}  # legacy formats: logged and counted, never read


class BadInputError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; bad arguments are 3 here
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_ARGS, f"{self.prog}: error: {message}\n")


def load_workbook(path: str | Path, input_format: str | None = None) -> Workbook:
    """Read a workbook, auto-detecting the format from the extension."""
    path = Path(path)
    fmt = input_format
    if fmt is None:
        suffix = path.suffix.lower()
        if suffix == ".xlsx":
            fmt = "xlsx"
        elif suffix == ".json":
            fmt = "json"
        else:
            raise BadInputError(f"cannot determine input format of {path} (use --input-format)")
    if fmt == "xlsx":
        return read_xlsx(path)
    return read_interchange_file(path)


def analyze_workbook(
    workbook: Workbook,
    *,
    conditional_functions: frozenset[str] = DEFAULT_CONDITIONAL_FUNCTIONS,
    workbook_id: str | None = None,
) -> MetricRecord:
    graph = build_graph(workbook)
    classification = classify_cells(workbook, graph)
    return compute_record(
        workbook,
        graph,
        classification,
        conditional_functions=conditional_functions,
        workbook_id=workbook_id,
    )


def _parse_conditional_set(option: str | None) -> frozenset[str]:
    if option is None:
        return DEFAULT_CONDITIONAL_FUNCTIONS
    return frozenset(name.strip().upper() for name in option.split(",") if name.strip())


def _parallelism(option: int | None) -> int:
    if option is not None:
        return max(1, option)
    env = os.environ.get("CELLGAUGE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            logger.warning("ignoring non-integer CELLGAUGE_THREADS=%r", env)
    return os.cpu_count() or 1


def _corpus_worker(args: tuple[str, str, tuple[str, ...]]) -> tuple[str, str, object]:
    path, relative, conditional = args
    try:
        workbook = load_workbook(path)
        record = analyze_workbook(
            workbook,
            conditional_functions=frozenset(conditional),
            workbook_id=relative,
        )
        return ("ok", relative, record)
    except (XlsxError, SchemaError, BadInputError, OSError, ValueError) as exc:
        return ("error", relative, f"{type(exc).__name__}: {exc}")


def _artifact_path(out: Path, label: str, fmt: str) -> Path:
    return out.with_name(f"{out.stem}.{label}.{fmt}")


def _emit(payload, fmt: str, out: Path | None, label: str | None, to_stdout_sections: list) -> None:
    if out is None:
        to_stdout_sections.append((label, payload))
    elif label is None:
        write_report(payload, fmt, out)
    else:
        write_report(payload, fmt, _artifact_path(out, label, fmt))


def _flush_stdout_sections(sections: list, fmt: str) -> None:
    if fmt == "json":
        if len(sections) == 1:
            write_report(sections[0][1], "json", None)
        else:
            combined = {
                label or "records": json.loads(render_report(payload, "json"))
                for label, payload in sections
            }
            json.dump(combined, sys.stdout, indent=2)
            sys.stdout.write("\n")
        return
    first = True
    for label, payload in sections:
        if not first:
            sys.stdout.write("\n")
        first = False
        write_report(payload, "csv", None)


def cmd_analyze(args: argparse.Namespace) -> int:
    conditional = _parse_conditional_set(args.conditional_functions)
    try:
        workbook = load_workbook(args.file, args.input_format)
    except (XlsxError, SchemaError, BadInputError, OSError, json.JSONDecodeError) as exc:
        logger.error("cannot read %s: %s", args.file, exc)
        return EXIT_BAD_INPUT
    record = analyze_workbook(workbook, conditional_functions=conditional)
    write_report(record, args.format, Path(args.out) if args.out else None)
    return EXIT_OK


def _scan_paths(root: Path) -> tuple[list[tuple[str, str]], int]:
    """(analyzable files as (absolute, relative-posix), skipped legacy count)."""
    selected: list[tuple[str, str]] = []
    legacy_skips = 0
    for path in root.rglob("*"):
        if not path.is_file():
            continue
        suffix = path.suffix.lower()
        if suffix in (".xlsx", ".json"):
            selected.append((str(path), path.relative_to(root).as_posix()))
        elif suffix in _SKIP_EXTENSIONS:
            legacy_skips += 1
            logger.warning("skipping legacy spreadsheet format: %s", path)
    selected.sort(key=lambda pair: pair[1])
    return selected, legacy_skips


def cmd_corpus(args: argparse.Namespace) -> int:
    root = Path(args.directory)
    if not root.is_dir():
        logger.error("not a directory: %s", root)
        return EXIT_BAD_INPUT
    conditional = _parse_conditional_set(args.conditional_functions)
    paths, legacy_skips = _scan_paths(root)
    degree = _parallelism(args.threads)

    tasks = [(path, relative, tuple(sorted(conditional))) for path, relative in paths]
    if degree > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=degree) as pool:
            outcomes = list(pool.map(_corpus_worker, tasks, chunksize=8))
    else:
        outcomes = [_corpus_worker(task) for task in tasks]

    records: list[MetricRecord] = []
    failures = 0
    for status, relative, payload in outcomes:
        if status == "ok":
            records.append(payload)  # type: ignore[arg-type]
        else:
            failures += 1
            logger.warning("skipping %s: %s", relative, payload)
    if not records:
        logger.error("no readable workbooks under %s", root)
        return EXIT_BAD_INPUT
    if failures or legacy_skips:
        logger.warning("skipped %d unreadable / %d legacy files", failures, legacy_skips)

    out = Path(args.out) if args.out else None
    sections: list = []
    _emit(records, args.format, out, None, sections)
    if args.summary:
        try:
            _emit(aggregate(records), args.format, out, "summary", sections)
        except EmptyCorpusError:
            pass
    if args.histogram:
        bounds = tuple(args.range) if args.range else None
        spec = None
        if args.bins or bounds:
            spec = HistogramSpec(bins=args.bins or 20, bounds=bounds)
        try:
            _emit(histogram(records, args.histogram, spec), args.format, out, f"histogram.{args.histogram}", sections)
        except NoDataError as exc:
            logger.warning("histogram skipped: %s", exc)
    if args.correlate:
        matrix = correlation_matrix(records, method=args.correlation_method)
        _emit(matrix, args.format, out, "correlation", sections)
    if sections:
        _flush_stdout_sections(sections, args.format)
    return EXIT_OK


def build_arg_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="cellgauge",
        description="Spreadsheet complexity analyzer: formula metrics, dependency graphs, corpus analytics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", help="write the report to this path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument(
            "--conditional-functions",
            metavar="NAMES",
            help="comma-separated function names counted as conditionals "
            "(default: IF,IFS,IFERROR,IFNA,COUNTIF,COUNTIFS,SUMIF,SUMIFS,AVERAGEIF,AVERAGEIFS)",
        )
        p.add_argument("--quiet", action="store_true", help="suppress warnings")

    p_analyze = sub.add_parser("analyze", help="analyze a single workbook")
    p_analyze.add_argument("file")
    p_analyze.add_argument(
        "--input-format", choices=("xlsx", "json"), help="override extension-based detection"
    )
    common(p_analyze)
    p_analyze.set_defaults(func=cmd_analyze)

    p_corpus = sub.add_parser("corpus", help="analyze every workbook under a directory")
    p_corpus.add_argument("directory")
    p_corpus.add_argument("--summary", action="store_true", help="also emit corpus-level means")
    p_corpus.add_argument(
        "--histogram", metavar="METRIC", choices=METRIC_IDS, help="also emit a histogram of METRIC"
    )
    p_corpus.add_argument("--bins", type=int, help="histogram bin count (default 20)")
    p_corpus.add_argument(
        "--range",
        type=_range_option,
        metavar="LO,HI",
        help="fixed histogram range (default: [0,1] for ratio metrics, observed min..max otherwise)",
    )
    p_corpus.add_argument("--correlate", action="store_true", help="also emit the metric correlation matrix")
    p_corpus.add_argument(
        "--correlation-method", choices=("pearson", "spearman"), default="pearson"
    )
    p_corpus.add_argument(
        "--threads",
        type=int,
        help="worker processes (default: CELLGAUGE_THREADS or all cores)",
    )
    common(p_corpus)
    p_corpus.set_defaults(func=cmd_corpus)
    return parser


def _range_option(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected LO,HI")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError("expected two numbers") from None
    if not hi > lo:
        raise argparse.ArgumentTypeError("range must be ascending")
    return lo, hi


def main(argv: list[str] | None = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.ERROR if args.quiet else logging.WARNING,
        format="cellgauge: %(levelname)s: %(message)s",
        force=True,
    )
    try:
        return args.func(args)
    except (XlsxError, SchemaError, BadInputError) as exc:
        logger.error("%s", exc)
        return EXIT_BAD_INPUT
    except BrokenPipeError:
        return EXIT_OK
    except Exception:  # pragma: no cover - last-resort diagnostics
        logger.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
