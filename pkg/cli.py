#!/usr/bin/env python3
"""
planck-lab command line

    python cli.py run configs/bound.ini [--output PATH] [--format csv|json-lines]
    python cli.py validate configs/bound.ini
    python cli.py version

Exit codes: 0 success, 2 invalid config, 3 computation failure, 4 I/O failure.
"""
import argparse
import json
import logging
import sys

from app_env_config import TOOL_NAME, TOOL_VERSION, configure_environment
from schemas.report import OutputFormat
from utils import constants
from utils.config_file import load_config
from utils.response_format import create_response, format_error_response
from utils.validation import ConfigValidationError, DomainError, ReportWriteError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID_CONFIG = 2
EXIT_COMPUTATION = 3
EXIT_IO = 4


def _print_error(message, exit_code, error_type, issues=None):
    payload = format_error_response(message, exit_code, error_type, issues)
    print(json.dumps(payload, indent=2), file=sys.stderr)
    return exit_code


def build_parser():
    parser = argparse.ArgumentParser(prog=TOOL_NAME, description="Planck-scale verification experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the experiment described by a config file")
    run.add_argument("config", help="path to the experiment config (INI)")
    run.add_argument("--output", help="results table path (overrides output_path)")
    run.add_argument("--format", choices=[f.value for f in OutputFormat], help="results table encoding")

    validate = sub.add_parser("validate", help="validate a config and print it normalized")
    validate.add_argument("config", help="path to the experiment config (INI)")

    sub.add_parser("version", help="print tool and constants-table versions")
    return parser


def cmd_version(args):
    print(json.dumps(create_response(data={
        "constants_version": constants.table_version(),
        "constants_sha256": constants.table_hash(),
    }), indent=2))
    return EXIT_OK


def cmd_validate(args):
    config = load_config(args.config)
    print(json.dumps(config.echo(), indent=2))
    return EXIT_OK


def cmd_run(args):
    # imported here so `version` and `validate` stay light
    from services.experiments import run

    config = load_config(args.config, output_path=args.output, output_format=args.format)
    report = run(config)
    print(json.dumps(create_response(data={
        "experiment": config.experiment.value,
        "output_path": config.output_path,
        "rows": len(report.rows),
        "summary": report.summary,
        "processing_time_seconds": report.processing_time_seconds,
    }), indent=2))
    return EXIT_OK


COMMANDS = {"run": cmd_run, "validate": cmd_validate, "version": cmd_version}


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_environment()

    try:
        return COMMANDS[args.command](args)
    except ConfigValidationError as e:
        return _print_error("invalid config", EXIT_INVALID_CONFIG, "validation_error", e.issues)
    except ReportWriteError as e:
        logger.error(f"❌ {e}")
        return _print_error(str(e), EXIT_IO, "io_error")
    except (DomainError, ValueError, ArithmeticError) as e:
        logger.error(f"❌ Computation failed: {e}")
        return _print_error(str(e), EXIT_COMPUTATION, "computation_error")
    except OSError as e:
        logger.error(f"❌ I/O failure: {e}")
        return _print_error(str(e), EXIT_IO, "io_error")


if __name__ == "__main__":
    sys.exit(main())
