"""
This module sets up the command-line parser and includes every subcommand.

Each RunConfig key gets exactly one `--flag-name` on every subcommand; flags override
the config file. Results go to stdout, logs to stderr.

Functions:
    - config_parent: Parent parser holding the config flags.
    - overrides_from: RunConfig values given on the command line.
    - build_parser: The full parser with all subcommands registered.
    - run: Parse, configure and dispatch; returns the exit code.
"""

import argparse
import sys
from typing import Any, Dict, List, Optional

from cli.commands import evaluate, extract, identify, preprocess, sweep, synth_corpus, train
from core.config import load_run_config
from schemas.run_config import RunConfig
from shared.constants import PROJECT_DESCRIPTION, SERVICE_NAME
from shared.exceptions import RunConfigInvalid, SpeakerIdError
from utils.logger import LogHandler


EXIT_OK = 0
EXIT_PIPELINE_ERROR = 1
EXIT_USAGE_ERROR = 2

FLAG_ALIASES = {
    "codebook_trainer": ["--codebook"],
    "feature_method": ["--method"],
    "manifest_path": ["--manifest"],
    "search_mode": ["--mode"],
}

COMMANDS = [preprocess, extract, train, identify, evaluate, sweep, synth_corpus]


class UsageErrorParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as one machine-parsable line."""

    def error(self, message: str):
        message = message.replace('"', "'").replace("\n", " ")
        sys.stderr.write(f'error=UsageError module=cli message="{message}"\n')
        sys.exit(EXIT_USAGE_ERROR)


def flag_name(field: str) -> str:
    return "--" + field.replace("_", "-")


def config_parent() -> argparse.ArgumentParser:
    """
    Parent parser with `--config`, `--log-level` and one flag per RunConfig key.

    Flag values are passed to pydantic as strings, so booleans accept true/false and
    eval_methods accepts a comma-separated list.
    """
    parent = UsageErrorParser(add_help=False)
    group = parent.add_argument_group("run configuration")
    group.add_argument("--config", default=None, help="JSON config file (default: SPKID_CONFIG_PATH)")
    group.add_argument("--log-level", default=None, help="Log level of the stderr sink")
    for name, field in RunConfig.model_fields.items():
        default = field.get_default(call_default_factory=True)
        if isinstance(default, list):
            default = ",".join(getattr(v, "value", str(v)) for v in default)
        elif hasattr(default, "value"):
            default = default.value
        group.add_argument(
            flag_name(name),
            *FLAG_ALIASES.get(name, []),
            dest=name,
            default=argparse.SUPPRESS,
            metavar=name.upper(),
            help=f"{field.description} (default: {default})",
        )
    return parent


def overrides_from(args: argparse.Namespace) -> Dict[str, Any]:
    return {name: getattr(args, name) for name in RunConfig.model_fields if hasattr(args, name)}


def build_parser() -> argparse.ArgumentParser:
    parser = UsageErrorParser(prog=SERVICE_NAME, description=PROJECT_DESCRIPTION)
    subparsers = parser.add_subparsers(dest="command", metavar="command", parser_class=UsageErrorParser)
    subparsers.required = True
    parent = config_parent()
    for command in COMMANDS:
        command.register(subparsers, parent)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """
    Run one command.

    Args:
        argv (Optional[List[str]]): Arguments without the program name; defaults to sys.argv.

    Returns:
        int: 0 on success, 1 on a pipeline error, 2 on a usage error.
    """
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE_ERROR

    try:
        if args.log_level:
            try:
                LogHandler().set_level(args.log_level)
            except ValueError as e:
                raise RunConfigInvalid(f"unknown log level {args.log_level!r}") from e
        overrides = overrides_from(args)
        config = load_run_config(args.config, overrides)
        return args.handler(args, config, overrides)
    except SpeakerIdError as e:
        sys.stderr.write(e.one_line() + "\n")
        return EXIT_PIPELINE_ERROR
