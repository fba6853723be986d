"""
`identify <wav> --models <dir>`: print the identified speaker and every score.

Features are extracted with the configuration stored alongside the models; only
`--mode` is taken from the command line.
"""

from repositories.system_repository import SystemRepository
from services.features import FeatureExtractor
from services.identification import identify_with_system
from services.signal_io import read_wav


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser("identify", parents=[parent], help="Identify the speaker of a recording")
    parser.add_argument("wav", help="Input 16-bit mono WAV")
    parser.add_argument("--models", required=True, help="Model directory written by train")
    parser.set_defaults(handler=handle)


def handle(args, config, overrides) -> int:
    system = SystemRepository(args.models).load()
    probe = FeatureExtractor(system.config).extract(read_wav(args.wav), system.method)
    mode = config.search_mode if "search_mode" in overrides else None
    result = identify_with_system(probe, system, mode)
    print(f"speaker={result.speaker_id}")
    if result.group is not None:
        print(f"group={result.group}")
    for speaker, score in result.scores.items():
        print(f"score {speaker} {score!r}")
    return 0
