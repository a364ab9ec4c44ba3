"""
Application configuration settings.
"""

import os
from typing import Any, Dict

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


class Config:
    """Application configuration class"""

    # Application settings
    APP_NAME = os.getenv("APP_NAME", "idem")
    APP_VERSION = os.getenv("APP_VERSION", "0.1.0")
    APP_DESCRIPTION = os.getenv(
        "APP_DESCRIPTION",
        "Differential-entropy alignment metric and fine rigid pairwise registration",
    )

    # Logging settings
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

    # Run settings
    DEFAULT_SEED = int(os.getenv("IDEM_SEED", "0"))
    DEFAULT_JOBS = int(os.getenv("IDEM_JOBS", "1"))

    # Metric settings
    DEFAULT_A = float(os.getenv("IDEM_DEFAULT_A", "1.0"))

    # Sweep lattice defaults (cloud units / degrees)
    TRANSLATION_RANGE = float(os.getenv("IDEM_TRANSLATION_RANGE", "5"))
    TRANSLATION_STEP = float(os.getenv("IDEM_TRANSLATION_STEP", "1"))
    ROTATION_RANGE = float(os.getenv("IDEM_ROTATION_RANGE", "15"))
    ROTATION_STEP = float(os.getenv("IDEM_ROTATION_STEP", "0.25"))
    FULL_ROTATION_STEP = float(os.getenv("IDEM_FULL_ROTATION_STEP", "1"))

    # Registration settings
    REGISTER_MAX_ITERS = int(os.getenv("IDEM_REGISTER_MAX_ITERS", "500"))
    REGISTER_STEP_TOL = float(os.getenv("IDEM_REGISTER_STEP_TOL", "1e-3"))
    REGISTER_Q_TOL = float(os.getenv("IDEM_REGISTER_Q_TOL", "1e-9"))

    # Sensitivity settings
    DEFAULT_TRIALS = int(os.getenv("IDEM_TRIALS", "200"))

    # Reference data
    BUNNY_PATH = os.getenv("IDEM_BUNNY_PATH", "data/bunny.ply")

    # OpenTelemetry settings
    OTEL_SERVICE_NAME = os.getenv("OTEL_SERVICE_NAME", "idem")
    OTEL_SERVICE_VERSION = os.getenv("OTEL_SERVICE_VERSION", "0.1.0")
    OTEL_EXPORTER_OTLP_ENDPOINT = os.getenv("OTEL_EXPORTER_OTLP_ENDPOINT")
    OTEL_EXPORTER_OTLP_HEADERS = os.getenv("OTEL_EXPORTER_OTLP_HEADERS")
    HOSTNAME = os.getenv("HOSTNAME", "unknown")

    @classmethod
    def get_config(cls) -> Dict[str, Any]:
        """Get all configuration as dictionary"""
        return {
            "app_name": cls.APP_NAME,
            "app_version": cls.APP_VERSION,
            "log_level": cls.LOG_LEVEL,
            "default_seed": cls.DEFAULT_SEED,
            "default_jobs": cls.DEFAULT_JOBS,
            "default_a": cls.DEFAULT_A,
            "translation_range": cls.TRANSLATION_RANGE,
            "translation_step": cls.TRANSLATION_STEP,
            "rotation_range": cls.ROTATION_RANGE,
            "rotation_step": cls.ROTATION_STEP,
            "full_rotation_step": cls.FULL_ROTATION_STEP,
            "register_max_iters": cls.REGISTER_MAX_ITERS,
            "register_step_tol": cls.REGISTER_STEP_TOL,
            "register_q_tol": cls.REGISTER_Q_TOL,
            "default_trials": cls.DEFAULT_TRIALS,
            "bunny_path": cls.BUNNY_PATH,
            "otel_service_name": cls.OTEL_SERVICE_NAME,
            "otel_service_version": cls.OTEL_SERVICE_VERSION,
            "otel_exporter_otlp_endpoint": cls.OTEL_EXPORTER_OTLP_ENDPOINT,
            "hostname": cls.HOSTNAME,
        }
