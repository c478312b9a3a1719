"""
Settings for the manipulator energy-model library.

Ambient settings (logging, model store location) may be overridden through the
environment or a ``.env`` file. Numerical defaults are plain constants so the
command-line tools stay pure functions of their inputs.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv()

LOG_LEVEL = os.environ.get('ENERGY_MODEL_LOG_LEVEL', 'WARNING')

# Directory where models trained by name are persisted
MODEL_DIR = Path(os.environ.get('ENERGY_MODEL_MODEL_DIR', 'trained_models'))

FIXTURES_DIR = BASE_DIR / 'energy_model' / 'fixtures'

# Base acceleration injected at every center of mass (m/s^2)
DEFAULT_GRAVITY = (0.0, 9.8, 0.0)

# Used when a robot description carries no motor torque constants (N*m/A)
DEFAULT_TORQUE_CONSTANT = 1.0

# Least squares
LSTSQ_RCOND = 1e-10
CONDITION_WARNING_THRESHOLD = 1e8

# Samples evaluated per regressor block
REGRESSOR_CHUNK_SIZE = 5000

# Synthetic data
DEFAULT_SAMPLE_RATE = 500.0
DEFAULT_SYNTH_SAMPLES = 50_000

# Files
MODEL_FORMAT_VERSION = 1
TRUTH_FORMAT_VERSION = 1
CSV_FLOAT_FORMAT = '%.17g'
SUMMARY_SIGNIFICANT_DIGITS = 4

# Tolerances
ROTATION_TOLERANCE = 1e-9
