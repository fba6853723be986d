"""
`extract <wav> --method <tag> -o <file>`: features of one recording as a binary feature file.
"""

from pathlib import Path

from repositories.feature_repository import FeatureRepository
from services.features import FeatureExtractor
from services.signal_io import read_wav


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser("extract", parents=[parent], help="Extract features to a feature file")
    parser.add_argument("wav", help="Input 16-bit mono WAV")
    parser.add_argument("-o", "--output", required=True, help="Output feature file")
    parser.set_defaults(handler=handle)


def handle(args, config, overrides) -> int:
    features = FeatureExtractor(config).extract(read_wav(args.wav), config.feature_method)
    target = Path(args.output)
    FeatureRepository(target.parent).save(target.name, features)
    print(f"method={features.method.value} frames={features.n_frames} dim={features.dim} output={target}")
    return 0
