"""
This module contains constants and utility functions for the speaker identification toolkit.

Constants:
    - SERVICE_ROOT: The root directory of the service.
    - SERVICE_NAME: The name of the service, used as the logger namespace.
    - PROJECT_DESCRIPTION: A description of the toolkit, shown in the CLI help.
    - PCM_SCALE: Divisor mapping 16-bit PCM integers to the [-1, 1] range.
    - LOG_ENERGY_EPSILON: Floor added to frame energies before taking the logarithm.
    - TABLE_METHODS: Feature methods scored in the published rate tables, in column order.
    - SYSTEM_FORMAT_VERSION / FEATURE_FORMAT_VERSION: On-disk container versions.

Functions:
    - check_variables: Checks if constants are missing values.
"""

import os


SERVICE_ROOT = os.path.abspath(os.path.dirname(__file__))
SERVICE_NAME = os.environ.get("SPKID_SERVICE_NAME", "speaker-id")
PROJECT_DESCRIPTION: str = """
Noise-robust closed-set speaker identification: Wiener denoising, endpoint detection,
pre-emphasis, framing and windowing, six feature extractors, genetic-algorithm and LBG
codebook design, grouped encoder/decoder search and discrete-HMM scoring, evaluated
across noise types and SNRs.
"""

DEFAULT_SAMPLE_RATE_HZ = 11025
PCM_SCALE = 32768.0
PCM_MAX = 32767
PCM_MIN = -32768

LOG_ENERGY_EPSILON = 1e-12
RCC_EPSILON = 1e-10
MFCC_EPSILON = 1e-10

NOISE_FLOOR_QUANTILE = 0.1

SEGMENTAL_SNR_MIN_DB = -10.0
SEGMENTAL_SNR_MAX_DB = 35.0

TABLE_METHODS = ["mfcc", "dmfcc", "ddmfcc", "rcc", "lpcc"]

SYSTEM_FORMAT_VERSION = 1
FEATURE_FORMAT_VERSION = 1
FEATURE_FILE_MAGIC = b"SIDF"

SYSTEM_FILE_NAME = "system.json"
REPORT_CSV_NAME = "report.csv"
REPORT_MARKDOWN_NAME = "report.md"
REPORT_META_NAME = "run_meta.json"
MANIFEST_FILE_NAME = "manifest.json"


def check_variables():
    """
    Check if critical constants are missing values.

    This function checks all global variables in the module. If any integer, float,
    or string variables are missing values (e.g., -1 or an empty string), it raises
    an EnvironmentError listing the variables that are missing values.

    Raises:
        EnvironmentError: If any required variables are missing values.
    """
    variable_names = [
        k for k in globals() if (k[:2] != "__" and not callable(globals()[k]))
    ]
    variables_without_value = []
    for variable in variable_names:
        variable_value = globals()[variable]
        if isinstance(variable_value, bool):
            continue
        if isinstance(variable_value, int) and variable_value == -1:
            variables_without_value.append(variable)
        elif isinstance(variable_value, float) and variable_value == -1:
            variables_without_value.append(variable)
        elif isinstance(variable_value, str) and not variable_value:
            variables_without_value.append(variable)
    if variables_without_value:
        raise EnvironmentError(
            "A Error occurred while checking variables, please verify these variables without values {}".format(
                variables_without_value
            )
        )
