"""
`preprocess <wav> -o <wav>`: denoise and strip silence from one recording.
"""

from services.preprocess import PreprocessService
from services.signal_io import read_wav, write_wav


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser("preprocess", parents=[parent], help="Denoise and remove silence")
    parser.add_argument("wav", help="Input 16-bit mono WAV")
    parser.add_argument("-o", "--output", required=True, help="Output WAV")
    parser.set_defaults(handler=handle)


def handle(args, config, overrides) -> int:
    enhanced = PreprocessService(config).enhance(read_wav(args.wav))
    write_wav(args.output, enhanced)
    print(f"samples={len(enhanced)} output={args.output}")
    return 0
