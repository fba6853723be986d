"""
`evaluate --manifest <file> -o <dir>`: noisy-condition evaluation of every configured method.
"""

from cli.commands._common import load_manifest, output_path
from repositories.report_repository import ReportRepository
from services.evaluation import EvaluationService


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser("evaluate", parents=[parent], help="Evaluate identification under noise")
    parser.add_argument("-o", "--output", default=None, help="Report directory")
    parser.set_defaults(handler=handle)


def handle(args, config, overrides) -> int:
    report = EvaluationService(config).evaluate(load_manifest(config))
    paths = ReportRepository(output_path(args, config)).save_report(report)
    for average in report.method_averages:
        print(f"{average.method.value} {average.rate:.2f}")
    print(f"output={paths[0].parent}")
    return 0
