"""
`synth-corpus --speakers N --out <dir>`: write a synthetic corpus and its manifest.
"""

import argparse

from services.synthetic_corpus import SyntheticCorpusService


def float_list(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser("synth-corpus", parents=[parent], help="Generate a synthetic corpus")
    parser.add_argument("--speakers", type=int, default=5, help="Number of speakers")
    parser.add_argument("--enroll-per-speaker", type=int, default=2, help="Enroll utterances per speaker")
    parser.add_argument("--test-per-speaker", type=int, default=2, help="Test utterances per speaker")
    parser.add_argument("--snr-levels", type=float_list, default=[15.0, 10.0, 5.0, 0.0], help="Comma-separated SNRs written to the manifest")
    parser.add_argument("-o", "--out", required=True, help="Output directory")
    parser.set_defaults(handler=handle)


def handle(args, config, overrides) -> int:
    manifest = SyntheticCorpusService(config.seed).generate(
        args.out,
        n_speakers=args.speakers,
        enroll_per_speaker=args.enroll_per_speaker,
        test_per_speaker=args.test_per_speaker,
        snr_levels_db=args.snr_levels,
    )
    print(f"speakers={len(manifest.speakers())} entries={len(manifest.entries)} output={args.out}")
    return 0
