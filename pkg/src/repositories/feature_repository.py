"""
This module contains the FeatureRepository class for the binary feature file.

Layout, little-endian, fixed width:

    offset  size  field
    0       4     magic b"SIDF"
    4       2     format version (uint16)
    6       2     method code (uint16, lpc=1 lpcc=2 rcc=3 mfcc=4 dmfcc=5 ddmfcc=6)
    8       4     dim (uint32)
    12      4     frame count (uint32)
    16      8*N   values, float64, row-major (frame by frame)

Classes:
    - FeatureRepository: Encodes, decodes and stores FeatureSequence files.
"""

import struct

import numpy as np

from models.feature_sequence import FeatureSequence
from models.tags import FeatureMethod
from repositories.base_repository import BaseRepository, PathLike
from shared.constants import FEATURE_FILE_MAGIC, FEATURE_FORMAT_VERSION
from shared.exceptions import FeatureFileInvalid


HEADER = struct.Struct("<4sHHII")


class FeatureRepository(BaseRepository):
    def __init__(self, root: PathLike) -> None:
        super().__init__(class_name=__name__, root=root)

    @staticmethod
    def encode(fs: FeatureSequence) -> bytes:
        header = HEADER.pack(FEATURE_FILE_MAGIC, FEATURE_FORMAT_VERSION, fs.method.code, fs.dim, fs.n_frames)
        return header + np.ascontiguousarray(fs.vectors, dtype="<f8").tobytes()

    @staticmethod
    def decode(data: bytes) -> FeatureSequence:
        """
        Parse a feature file.

        Raises:
            FeatureFileInvalid: On a wrong magic, version, method code or size.
        """
        if len(data) < HEADER.size:
            raise FeatureFileInvalid("feature file shorter than its header", {"bytes": len(data)})
        magic, version, code, dim, frames = HEADER.unpack_from(data)
        if magic != FEATURE_FILE_MAGIC:
            raise FeatureFileInvalid("not a feature file", {"magic": magic.hex()})
        if version != FEATURE_FORMAT_VERSION:
            raise FeatureFileInvalid("unsupported feature file version", {"version": version})
        try:
            method = FeatureMethod.from_code(code)
        except ValueError as e:
            raise FeatureFileInvalid(str(e), {"code": code}) from e
        expected = HEADER.size + 8 * dim * frames
        if len(data) != expected:
            raise FeatureFileInvalid("feature file size does not match its header", {"bytes": len(data), "expected": expected})
        values = np.frombuffer(data, dtype="<f8", offset=HEADER.size).astype(np.float64)
        return FeatureSequence(values.reshape(frames, dim), method)

    def save(self, name: str, fs: FeatureSequence):
        path = self.write_bytes(name, self.encode(fs))
        self.logger.info("Features saved", {"path": str(path), "frames": fs.n_frames, "dim": fs.dim})
        return path

    def load(self, name: str) -> FeatureSequence:
        return self.decode(self.read_bytes(name))
