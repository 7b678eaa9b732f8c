"""
Centralized configuration for the Exciton Entangler.
"""

import logging
import os
import sys
from pathlib import Path

# ==================== PATHS ====================

# Project root
PROJECT_ROOT = Path(__file__).parent

# Data
DATA_DIR = PROJECT_ROOT / "data"
FIGURE_CONFIGS_DIR = DATA_DIR / "configs"

# Output (CSV traces, PNG renders). EXCITON_OUTPUT_DIR overrides it.
OUTPUT_DIR_ENV = "EXCITON_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = PROJECT_ROOT / "output"


# ==================== MODEL DEFAULTS ====================

# Energy bias, tunneling, cavity frequency and coupling of the published run
DEFAULT_EPSILON = 0.4
DEFAULT_DELTA = 0.4
DEFAULT_OMEGA = 0.02
DEFAULT_G = 0.02

# Fock-space truncation of the cavity mode (12 moves c_peak by 2.5e-3 against 16)
DEFAULT_N_FOCK = 20

# Drive
DEFAULT_DRIVE_KIND = "cosine"
DEFAULT_AMPLITUDE = 0.48
DEFAULT_PERIOD = 4.0

DEFAULT_INITIAL_STATE = "01"
DEFAULT_T_END = 25000.0

# Composite dimension beyond which tensor products are refused
MAX_DIMENSION = 4096


# ==================== PROPAGATOR ====================

DEFAULT_K_MAX = 20
DEFAULT_ALPHA = 0.0

# Starting dt for calibration
DEFAULT_DT = 1.0

# Step acceptance (relative magnitude of the last retained term)
DEFAULT_TAIL_TOLERANCE = 1e-8

# Calibration targets
CALIBRATION_TAIL_TARGET = 1e-10
CALIBRATION_ORACLE_TARGET = 1e-9
CALIBRATION_MIN_DT = 1e-6
CALIBRATION_PROBE_STATES = 10

# Benchmark
BENCHMARK_T_END = 100.0
BENCHMARK_ACCURACY = 1e-7
BENCHMARK_MAX_RK4_SUBSTEPS = 1024
PUBLISHED_SPEEDUP_CLAIM = 8.0


# ==================== NUMERICAL TOLERANCES ====================

HERMITIAN_TOLERANCE = 1e-10
PSD_TOLERANCE = 1e-10
# Eigenvalues below this fraction of the largest are rounding noise in square roots
RANK_CUTOFF = 1e-12
STATE_TOLERANCE = 1e-8
NORMALIZATION_TOLERANCE = 1e-8


# ==================== ANALYSIS ====================

PEAK_THRESHOLD = 0.5
ENTROPY_LOG_BASE = 2.0

# Warn when samples are coarser than this fraction of the drive period
MIN_SAMPLES_PER_PERIOD = 40


# ==================== OUTPUT ====================

CSV_COLUMNS = (
    "t", "concurrence", "entropy", "norm", "mean_photon", "p00", "p01", "p10", "p11",
)
CSV_EXTRA_COLUMNS = ("entropy_q1", "entropy_q2")
CSV_SIGNIFICANT_DIGITS = 12

# Size of rendered trace images (pixels)
RENDER_SIZE = (1200, 800)
GRID_COLOR = (200, 200, 200, 255)


# ==================== EXIT CODES ====================

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERIC_FAILURE = 3


# ==================== DEVELOPMENT ====================

# Logging
LOG_LEVEL = "INFO"  # DEBUG, INFO, WARNING, ERROR

# Progress log interval during evolution
PROGRESS_EVERY_STEPS = 50000


# ==================== HELPERS ====================

def ensure_directories():
    """Creates the required directories if they do not exist."""
    DATA_DIR.mkdir(exist_ok=True)
    FIGURE_CONFIGS_DIR.mkdir(exist_ok=True)
    output_dir().mkdir(parents=True, exist_ok=True)


def output_dir() -> Path:
    """Output directory, honouring EXCITON_OUTPUT_DIR at call time."""
    return Path(os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR))


def setup_logging(level: str = LOG_LEVEL) -> None:
    """
    Configures the root logger. Diagnostics always go to standard error.

    Args:
        level: Logging level name (DEBUG, INFO, WARNING, ERROR)
    """
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="[%(levelname)s] %(message)s",
        stream=sys.stderr,
        force=True,
    )


def validate_figure_configs():
    """
    Checks that the canonical figure configs are present.

    Returns:
        tuple: (is_valid, message)
    """
    if not FIGURE_CONFIGS_DIR.exists():
        return False, f"Figure config folder not found: {FIGURE_CONFIGS_DIR}"

    yaml_files = sorted(FIGURE_CONFIGS_DIR.glob("*.yaml"))

    if len(yaml_files) == 0:
        return False, f"No YAML configs found in: {FIGURE_CONFIGS_DIR}"

    return True, f"✓ {len(yaml_files)} figure configs found"


if __name__ == "__main__":
    print("=== Exciton Entangler - Configuration ===\n")

    print(f"📁 Project root: {PROJECT_ROOT}")
    print(f"📁 Figure configs: {FIGURE_CONFIGS_DIR}")
    print(f"📁 Output: {output_dir()}\n")

    print("🔧 Creating directories...")
    ensure_directories()
    print("   ✓ Directories created\n")

    print("✅ Validating figure configs...")
    is_valid, message = validate_figure_configs()
    print(f"   {message}\n")

    if not is_valid:
        print("⚠️  WARNING: figure configs are missing!")
    else:
        print("✨ Configuration OK! Ready to run.\n")
