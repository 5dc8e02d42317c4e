"""
Base command class for the braidform CLI.
Each subcommand (catalog, invariant-dim, supertrace, ...) registers as a command.
"""
import argparse
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List

from ..config import Settings
from ..errors import UsageError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass
class CommandResult:
    """Records to emit plus the verification verdict (False -> exit 1)"""
    records: List[Dict[str, Any]] = field(default_factory=list)
    passed: bool = True
    title: str = ''


class Command(ABC):
    """Base class for subcommands"""

    def __init__(self, name: str, description: str, settings: Settings):
        """
        Args:
            name: Subcommand name as typed on the command line
            description: One-line help text
            settings: Active runtime settings
        """
        self.name = name
        self.description = description
        self.settings = settings

    def register(self, subparsers) -> argparse.ArgumentParser:
        parser = subparsers.add_parser(self.name, help=self.description, description=self.description)
        self.add_arguments(parser)
        parser.set_defaults(command=self.name)
        logger.debug(f"✓ Command registered: {self.name}")
        return parser

    @abstractmethod
    def add_arguments(self, parser: argparse.ArgumentParser):
        pass

    @abstractmethod
    def handle(self, args: argparse.Namespace) -> CommandResult:
        """
        Run the subcommand

        Args:
            args: Parsed command-line arguments

        Returns:
            CommandResult: records to emit and whether all checks passed
        """

    def record(self, method: str, **fields) -> Dict[str, Any]:
        """Record carrying the schema version, tolerance and method used"""
        return {"schema": SCHEMA_VERSION, "tolerance": self.settings.tolerance, "method": method, **fields}


def parse_n_range(text) -> List[int]:
    """'5' -> [5]; '2..6' -> [2, 3, 4, 5, 6]; an empty range is a usage error"""
    raw = str(text).strip()
    start, sep, stop = raw.partition('..')
    try:
        first = int(start)
        last = int(stop) if sep else first
    except ValueError:
        raise UsageError(f"cannot parse N {raw!r}; expected K or A..B") from None
    if last < first:
        raise UsageError(f"empty N range {raw!r}")
    if first < 1:
        raise UsageError(f"N must be >= 1, got {first}")
    return list(range(first, last + 1))
