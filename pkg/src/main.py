"""
cidsrank command-line entry point.

Runs the country-ranking pipeline: ingest profile pages into a corpus, select
top-K teams by email suffix, compute the five team metrics and render
absolute and percentage-of-reference tables.

Exit codes: 0 success, 1 usage, 2 data/integrity, 3 cache-miss/fetch.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add src directory to Python path for imports
current_dir = Path(__file__).parent
src_dir = current_dir
if str(src_dir) not in sys.path:
    sys.path.insert(0, str(src_dir))

from config.config_manager import ConfigManager
from processing.audit_logger import AuditEventType, AuditLogger, setup_logging
from processing.command_processor import CommandProcessor, ProcessingResult
from processing.error_handler import ErrorHandler, UsageError


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems as UsageError (exit 1)."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_strict_flag(parser: argparse.ArgumentParser, default=argparse.SUPPRESS) -> None:
    # SUPPRESS keeps a subcommand from resetting a flag given before it
    parser.add_argument('--strict', action='store_true', default=default,
                        help='Reject unknown corpus fields and malformed profiles')


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--format', dest='fmt', choices=['text', 'csv', 'markdown'],
                        help='Output format (default from config: text)')
    parser.add_argument('--style', choices=['cids', 'scimago'],
                        help='Cits per Doc display: cids integers, scimago two decimals')
    parser.add_argument('--out', help='Also write the output here; a .xlsx path writes a workbook')


def build_parser() -> argparse.ArgumentParser:
    """The cidsrank argument parser; unset flags stay None so the config decides."""
    parser = _Parser(prog='cidsrank', description='Country rankings from researcher profile teams')
    parser.add_argument('--config', help='Configuration file path')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'])
    _add_strict_flag(parser, default=None)
    subparsers = parser.add_subparsers(dest='command', parser_class=_Parser)

    ingest = subparsers.add_parser('ingest', help='Parse search and profile pages into a corpus')
    _add_strict_flag(ingest)
    ingest.add_argument('--search', action='append', default=[], metavar='PATH',
                        help='Author-search page (repeatable, concatenated in order)')
    ingest.add_argument('--profile', action='append', default=[], metavar='PATH',
                        help='Profile page (repeatable)')
    ingest.add_argument('--query', action='append', default=[], metavar='SUFFIX',
                        help='Fetch search:<suffix> and its profiles through the page cache')
    ingest.add_argument('--suffix', action='append', default=[], help='Suffix to count stubs for')
    ingest.add_argument('--cache-dir', help='Page cache directory')
    ingest.add_argument('--online', action='store_true', default=None,
                        help='Allow the configured transport on cache misses')
    ingest.add_argument('--out', required=True, help='Corpus file to write')

    analyze = subparsers.add_parser('analyze', help='Compute team metrics and ranking tables')
    _add_strict_flag(analyze)
    analyze.add_argument('corpus', help='Corpus file')
    analyze.add_argument('--suffix', action='append', default=[], help='Email suffix (repeatable)')
    analyze.add_argument('--k', type=int, help='Team size (default 30)')
    analyze.add_argument('--mode', choices=['all', 'cited-only'], help='Citable-documents mode')
    analyze.add_argument('--reference', help='Reference row label (default: first row)')
    analyze.add_argument('--raw-suffix', action='store_true', default=None,
                         help='Plain string-suffix matching instead of label-aware')
    analyze.add_argument('--full-precision', action='store_true', default=None,
                         help='Cits per Doc percentages from exact ratios')
    analyze.add_argument('--name-match', choices=['initial', 'full'], help='Self-citation name matching')
    analyze.add_argument('--workers', type=int, help='Threads for per-team metrics')
    analyze.add_argument('--metrics-out', help='Write the metric rows as a metrics file')
    _add_output_flags(analyze)

    reference = subparsers.add_parser('reference-tables', help='Recompute the published percentage tables')
    _add_strict_flag(reference)
    reference.add_argument('dataset', choices=['scimago', 'cids'])
    _add_output_flags(reference)

    render = subparsers.add_parser('render', help='Render a metrics file')
    _add_strict_flag(render)
    render.add_argument('metrics', help='Metrics file (reference-data format)')
    render.add_argument('--reference', help='Reference row label for the percentage table')
    render.add_argument('--full-precision', action='store_true', default=None,
                        help='Cits per Doc percentages from exact ratios')
    _add_output_flags(render)

    return parser


def _load_config(args: argparse.Namespace) -> ConfigManager:
    config = ConfigManager(args.config)
    config.apply_overrides({
        'logging.level': args.log_level,
        'corpus.strict': args.strict,
        'fetch.cache_dir': getattr(args, 'cache_dir', None),
        'fetch.offline_only': False if getattr(args, 'online', None) else None,
        'selection.k': getattr(args, 'k', None),
        'selection.raw_suffix': getattr(args, 'raw_suffix', None),
        'metrics.mode': (getattr(args, 'mode', None) or '').replace('-', '_') or None,
        'metrics.name_match': getattr(args, 'name_match', None),
        'metrics.workers': getattr(args, 'workers', None),
        'ranking.reference': getattr(args, 'reference', None),
        'ranking.cits_per_doc_precision': 'full' if getattr(args, 'full_precision', None) else None,
        'report.format': getattr(args, 'fmt', None),
        'report.style': getattr(args, 'style', None),
    })
    config.validate_config()
    return config


def run_command(processor: CommandProcessor, args: argparse.Namespace) -> ProcessingResult:
    """Dispatch the parsed subcommand to the processor."""
    if args.command == 'ingest':
        return processor.cmd_ingest(search_paths=args.search, profile_paths=args.profile, out=args.out,
                                    queries=args.query, suffixes=args.suffix)
    if args.command == 'analyze':
        return processor.cmd_analyze(args.corpus, suffixes=args.suffix, out=args.out,
                                     metrics_out=args.metrics_out)
    if args.command == 'reference-tables':
        return processor.cmd_reference_tables(args.dataset, fmt=args.fmt, style=args.style, out=args.out)
    if args.command == 'render':
        return processor.cmd_render(args.metrics, reference=args.reference, fmt=args.fmt,
                                    style=args.style, out=args.out)
    raise UsageError("A subcommand is required: ingest, analyze, reference-tables, render")


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for command-line usage."""
    error_handler = ErrorHandler()
    audit = AuditLogger()
    command = None
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        config = _load_config(args)
        setup_logging(config.get_logging_config())
        processor = CommandProcessor(config, audit=audit)
        result = run_command(processor, args)
    except Exception as e:
        error_info = error_handler.handle_error(e, {'command': command})
        audit.log_event(AuditEventType.COMMAND_FAILED, 'cli', command or 'parse',
                        error_message=error_info.message)
        print(f"error: {error_info.message}", file=sys.stderr)
        for suggestion in error_info.suggestions:
            print(f"  hint: {suggestion}", file=sys.stderr)
        return error_info.exit_code

    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    sys.stdout.write(result.output)
    logging.getLogger('cidsrank').info(result.message)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
