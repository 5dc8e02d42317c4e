"""
braidform command line.

Routes each subcommand to its registered Command and renders the records
as JSON lines, CSV or a rich table. Exit status: 0 success, 1 failed
verification (including --expect), 2 usage error.
"""
import argparse
import csv
import json
import logging
import math
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

from rich.console import Console
from rich.table import Table

from . import __version__
from .commands.base_command import CommandResult
from .commands.handlers import build_commands
from .config import configure_logging, load_settings, set_settings
from .errors import BraidformError, UsageError, VerificationError

logger = logging.getLogger(__name__)

FORMATS = ('human', 'json', 'csv')
EXIT_OK, EXIT_VERIFICATION, EXIT_USAGE = 0, 1, 2


def _global_options(parser: argparse.ArgumentParser):
    # SUPPRESS lets the options appear before or after the subcommand
    parser.add_argument('--format', choices=FORMATS, default=argparse.SUPPRESS)
    parser.add_argument('--json', dest='format', action='store_const', const='json', default=argparse.SUPPRESS,
                        help="alias of --format json")
    parser.add_argument('--tolerance', type=float, default=argparse.SUPPRESS,
                        help="residual tolerance (overrides BRAIDFORM_TOLERANCE)")
    parser.add_argument('--seed', type=int, default=argparse.SUPPRESS, help="recorded in every record")
    parser.add_argument('--quiet', action='store_true', default=argparse.SUPPRESS)
    parser.add_argument('--log-file', default=argparse.SUPPRESS, help="log file path; '' disables file logging")
    parser.add_argument('--expect', action='append', default=argparse.SUPPRESS, metavar='KEY=VALUE',
                        help="fail with exit 1 unless every record with KEY has VALUE")


def build_parser(commands) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='braidform', description="Braid-group representations on (C^2)^N")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    _global_options(parser)
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True
    for command in commands.values():
        _global_options(command.register(subparsers))
    return parser


def parse_expectations(items: Sequence[str]) -> List[Tuple[str, Any]]:
    expectations = []
    for item in items:
        key, sep, raw = item.partition('=')
        if not sep or not key.strip():
            raise UsageError(f"--expect needs KEY=VALUE, got {item!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        expectations.append((key.strip(), value))
    return expectations


def _matches(actual, expected, tolerance: float) -> bool:
    if isinstance(actual, bool) or isinstance(expected, bool):
        return actual == expected
    if isinstance(actual, (int, float)) and isinstance(expected, (int, float)):
        return math.isclose(actual, expected, rel_tol=1e-9, abs_tol=tolerance)
    return actual == expected


def check_expectations(records: List[Dict[str, Any]], expectations: List[Tuple[str, Any]],
                       tolerance: float) -> bool:
    ok = True
    for key, expected in expectations:
        hits = [r for r in records if key in r]
        if not hits:
            raise UsageError(f"--expect key {key!r} does not occur in the output")
        for record in hits:
            if not _matches(record[key], expected, tolerance):
                logger.error(f"Expectation failed: {key} = {record[key]!r}, expected {expected!r}")
                ok = False
    return ok


def _cell(value) -> str:
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True, separators=(',', ':'))
    return '' if value is None else str(value)


def emit(result: CommandResult, fmt: str, stream=None):
    stream = stream or sys.stdout
    records = result.records
    if fmt == 'json':
        for record in records:
            stream.write(json.dumps(record, sort_keys=True) + '\n')
        return
    fieldnames: List[str] = []
    for record in records:
        fieldnames.extend(k for k in record if k not in fieldnames)
    if fmt == 'csv':
        writer = csv.DictWriter(stream, fieldnames=fieldnames, lineterminator='\n')
        writer.writeheader()
        for record in records:
            writer.writerow({k: _cell(record.get(k)) for k in fieldnames})
        return

    table = Table(title=result.title or None)
    shown = [k for k in fieldnames if k != 'schema']
    for name in shown:
        table.add_column(name)
    for record in records:
        table.add_row(*(_cell(record.get(k)) for k in shown))
    Console(file=stream).print(table)


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        base = load_settings()
    except BraidformError as e:
        sys.stderr.write(f"braidform: {e}\n")
        return EXIT_USAGE
    set_settings(base)
    commands = build_commands(base)
    parser = build_parser(commands)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = base.with_tolerance(getattr(args, 'tolerance', None))
    except BraidformError as e:
        sys.stderr.write(f"braidform: {e}\n")
        return EXIT_USAGE
    set_settings(settings)
    configure_logging(settings, quiet=getattr(args, 'quiet', False), log_file=getattr(args, 'log_file', None))

    command = commands[args.command]
    command.settings = settings
    fmt = getattr(args, 'format', 'human')
    logger.info(f"Running {command.name}")
    try:
        expectations = parse_expectations(getattr(args, 'expect', []))
        result = command.handle(args)
        seed = getattr(args, 'seed', None)
        if seed is not None:
            for record in result.records:
                record['seed'] = seed
        emit(result, fmt)
        passed = check_expectations(result.records, expectations, settings.tolerance) and result.passed
    except UsageError as e:
        logger.error(f"{command.name}: {e}")
        sys.stderr.write(f"braidform {command.name}: {e}\n")
        return EXIT_USAGE
    except VerificationError as e:
        logger.error(f"{command.name}: verification failed: {e}")
        sys.stderr.write(f"braidform {command.name}: {e}\n")
        return EXIT_VERIFICATION
    except Exception as e:
        logger.exception(f"{command.name}: unexpected error: {e}")
        return EXIT_USAGE
    if passed:
        logger.info(f"✓ {command.name} completed")
        return EXIT_OK
    return EXIT_VERIFICATION


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
