"""
This module contains the SyntheticCorpusService class, which generates a small
separable corpus for desk-scale runs: one formant-like tone complex per speaker framed
by low-level silence, plus stationary white and brown noise recordings.

Classes:
    - SyntheticCorpusService: Writes WAV files and a manifest for N synthetic speakers.
"""

from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
from scipy.signal import lfilter

from models.audio import AudioBuffer
from models.tags import CorpusSplit
from repositories.manifest_repository import ManifestRepository
from schemas.manifest import CorpusManifest, ManifestEntry, NoiseFile
from services.base import BaseService
from services.signal_io import rms, write_wav
from shared.constants import DEFAULT_SAMPLE_RATE_HZ, MANIFEST_FILE_NAME
from utils.seeding import make_rng


BASE_FORMANTS_HZ = (250.0, 900.0, 2000.0)
FORMANT_STEPS_HZ = (120.0, 210.0, 170.0)
FORMANT_AMPLITUDES = (0.25, 0.15, 0.08)

SILENCE_S = 0.2
SPEECH_S = 0.6
FADE_S = 0.01
SILENCE_STD = 0.001
NOISE_RMS = 0.1
BROWN_POLE = 0.98


class SyntheticCorpusService(BaseService):
    """
    Service class for generating synthetic corpora.

    Attributes:
        seed (int): Seed of every random draw.
        sample_rate_hz (int): Sample rate of the generated files.
    """

    def __init__(self, seed: int = 1234, sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ) -> None:
        super().__init__(self.__class__.__name__)
        self.seed = seed
        self.sample_rate_hz = sample_rate_hz

    def formants(self, speaker_index: int) -> List[float]:
        return [base + step * speaker_index for base, step in zip(BASE_FORMANTS_HZ, FORMANT_STEPS_HZ)]

    def utterance(self, speaker_index: int, speaker_id: str, utterance_id: str) -> AudioBuffer:
        """
        Silence, a jittered tone complex with short fades, silence.

        Frequencies jitter by up to 1% and amplitudes by up to 10% per utterance.
        """
        rng = make_rng(self.seed, "utterance", speaker_id, utterance_id)
        sr = self.sample_rate_hz
        n_silence, n_speech, n_fade = int(SILENCE_S * sr), int(SPEECH_S * sr), int(FADE_S * sr)

        t = np.arange(n_speech) / sr
        tone = np.zeros(n_speech)
        for freq, amp in zip(self.formants(speaker_index), FORMANT_AMPLITUDES):
            freq *= 1.0 + rng.uniform(-0.01, 0.01)
            amp *= 1.0 + rng.uniform(-0.1, 0.1)
            tone += amp * np.sin(2.0 * np.pi * freq * t + rng.uniform(0.0, 2.0 * np.pi))
        envelope = np.ones(n_speech)
        envelope[:n_fade] = np.linspace(0.0, 1.0, n_fade)
        envelope[-n_fade:] = np.linspace(1.0, 0.0, n_fade)
        tone *= envelope

        samples = np.concatenate([np.zeros(n_silence), tone, np.zeros(n_silence)])
        samples += rng.normal(0.0, SILENCE_STD, size=samples.size)
        return AudioBuffer(np.clip(samples, -1.0, 1.0), sr)

    def noise(self, kind: str, duration_s: float) -> AudioBuffer:
        """Stationary white or brown noise scaled to a fixed RMS."""
        rng = make_rng(self.seed, "noise", kind)
        white = rng.normal(0.0, 1.0, size=int(duration_s * self.sample_rate_hz))
        samples = white if kind == "white" else lfilter([1.0], [1.0, -BROWN_POLE], white)
        samples = samples - samples.mean()
        samples *= NOISE_RMS / rms(samples)
        return AudioBuffer(np.clip(samples, -1.0, 1.0), self.sample_rate_hz)

    def generate(
        self,
        out_dir: Union[str, Path],
        n_speakers: int = 5,
        enroll_per_speaker: int = 2,
        test_per_speaker: int = 2,
        snr_levels_db: Sequence[float] = (15.0, 10.0, 5.0, 0.0),
        noise_duration_s: float = 3.0,
    ) -> CorpusManifest:
        """
        Write the corpus and its manifest.

        Args:
            out_dir: Target directory, created if missing.
            n_speakers (int): Number of speakers.
            enroll_per_speaker (int): Enroll utterances per speaker.
            test_per_speaker (int): Test utterances per speaker.
            snr_levels_db (Sequence[float]): SNR conditions recorded in the manifest.
            noise_duration_s (float): Length of each noise file.

        Returns:
            CorpusManifest: The manifest with absolute paths; the file stores relative ones.
        """
        out_dir = Path(out_dir)
        with self.operation("synthetic corpus generation", {"speakers": n_speakers, "directory": str(out_dir)}):
            entries: List[ManifestEntry] = []
            for index in range(n_speakers):
                speaker_id = f"spk{index + 1:02d}"
                plan = [(CorpusSplit.ENROLL, f"e{i}") for i in range(enroll_per_speaker)]
                plan += [(CorpusSplit.TEST, f"t{i}") for i in range(test_per_speaker)]
                for split, utterance_id in plan:
                    path = out_dir / "speech" / speaker_id / f"{utterance_id}.wav"
                    path.parent.mkdir(parents=True, exist_ok=True)
                    write_wav(path, self.utterance(index, speaker_id, utterance_id))
                    entries.append(
                        ManifestEntry(speaker_id=speaker_id, utterance_id=utterance_id, wav_path=str(path), split=split)
                    )

            noise_files: List[NoiseFile] = []
            for kind in ("white", "brown"):
                path = out_dir / "noise" / f"{kind}.wav"
                path.parent.mkdir(parents=True, exist_ok=True)
                write_wav(path, self.noise(kind, noise_duration_s))
                noise_files.append(NoiseFile(noise_name=kind, wav_path=str(path)))

            manifest = CorpusManifest(
                entries=entries,
                noise_files=noise_files,
                snr_levels_db=[float(s) for s in snr_levels_db],
            )
            ManifestRepository(out_dir / MANIFEST_FILE_NAME).save(manifest)
            return manifest
