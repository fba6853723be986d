"""
`train --manifest <file> --codebook ga|lbg -o <dir>`: enroll the manifest's speakers.
"""

from cli.commands._common import load_manifest, output_path
from repositories.system_repository import SystemRepository
from services.enrollment import EnrollmentService


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser("train", parents=[parent], help="Train codebooks and speaker models")
    parser.add_argument("-o", "--output", default=None, help="Model directory")
    parser.set_defaults(handler=handle)


def handle(args, config, overrides) -> int:
    target = output_path(args, config)
    system = EnrollmentService(config).enroll(load_manifest(config), config.feature_method)
    path = SystemRepository(target).save(system)
    print(f"speakers={len(system.speakers)} codebook={system.symbol_codebook.size} output={path}")
    return 0
