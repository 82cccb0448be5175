import argparse
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from config import LOG_LEVEL
from models.errors import (
    ConfigError,
    PropagationError,
    QuadratureError,
    SynthesisFailure,
    TableFormatError,
    UnattainableTolerance,
)
from modules.cli_commands import execute, load_run_config, register_commands
from modules.presets import PRESETS, run_preset
from services.sweep_service import SweepService
from utils.logging_setup import configure_logging, get_logger

logger = get_logger("cli")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SYNTHESIS = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perceptron",
        description="Pulse synthesis and evaluation for qubit perceptrons with sigmoid transfer functions.",
    )
    parser.add_argument("--log-level", default=LOG_LEVEL, help="logging level (default from PERCEPTRON_LOG_LEVEL)")
    register_commands(parser.add_subparsers(dest="command", required=True), PRESETS)
    return parser


def run(args: argparse.Namespace) -> int:
    """Run the parsed command and map failures onto exit codes."""
    if args.threads < 1:
        logger.error("--threads must be at least 1")
        return EXIT_CONFIG
    service = SweepService(threads=args.threads, progress=args.progress)
    out = Path(args.out)

    try:
        if args.command == "preset":
            written = run_preset(args.name, out, service)
        else:
            written = execute(load_run_config(args.config, args.command), out, service)
    except (ConfigError, ValidationError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_CONFIG
    except (SynthesisFailure, QuadratureError, PropagationError, UnattainableTolerance) as e:
        logger.error(f"Synthesis failed: {e}")
        return EXIT_SYNTHESIS
    except (OSError, TableFormatError) as e:
        logger.error(f"I/O failure: {e}")
        return EXIT_IO

    for path in written:
        logger.info(f"Wrote {path}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
