"""
`sweep --param crossover|generations --values <list> -o <dir>`: rate curve over one GA parameter.
"""

import argparse

from cli.commands._common import load_manifest, output_path
from repositories.report_repository import ReportRepository
from services.evaluation import SWEEP_PARAMS, EvaluationService


def int_list(text: str):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser("sweep", parents=[parent], help="Sweep a GA parameter")
    parser.add_argument("--param", required=True, choices=sorted(SWEEP_PARAMS), help="Swept parameter")
    parser.add_argument("--values", required=True, type=int_list, help="Comma-separated values, e.g. 1,2,3,5,7,10")
    parser.add_argument("-o", "--output", default=None, help="Output directory")
    parser.set_defaults(handler=handle)


def handle(args, config, overrides) -> int:
    curve = EvaluationService(config).sweep(load_manifest(config), config.feature_method, args.param, args.values)
    path = ReportRepository(output_path(args, config)).save_curve(curve)
    for point in curve.points:
        print(f"{point.x} {point.rate:.2f}")
    print(f"output={path}")
    return 0
