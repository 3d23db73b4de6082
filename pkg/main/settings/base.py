"""
Base Django settings for the biharmonic models project.
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent

SECRET_KEY = os.environ.get("SECRET_KEY", "django-insecure-biharmonic-local-only")

DEBUG = os.environ.get("DEBUG", "True").lower() in ("true", "1", "yes", "on")

ALLOWED_HOSTS = os.environ.get("ALLOWED_HOSTS", "localhost,127.0.0.1").split(",")

# Application definition
DJANGO_APPS = [
    "django.contrib.contenttypes",
]

LOCAL_APPS = [
    "apps.core",
    "apps.geometry",
    "apps.functionals",
    "apps.catalog",
    "apps.solvers",
    "apps.stability",
    "apps.cli",
]

INSTALLED_APPS = DJANGO_APPS + LOCAL_APPS

# Nothing is persisted beyond flat files
DATABASES = {}

# Internationalization
LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = False

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Output of the management commands
OUTPUT_DIR = Path(os.environ.get("BIHARMONIC_OUTPUT_DIR", BASE_DIR / "output"))

LOG_LEVEL = os.environ.get("BIHARMONIC_LOG_LEVEL", "INFO").upper()

# Engineering defaults of the numerical routines, see apps.core.conf
NUMERICS = {
    "QUADRATURE_RTOL": float(os.environ.get("BIHARMONIC_QUADRATURE_RTOL", "1e-8")),
    "LAGRANGIAN_PARTIAL_STEP": 1e-6,
    "TRAJECTORY_TOTAL_STEP": 1e-4,
    "POLE_EPS": float(os.environ.get("BIHARMONIC_POLE_EPS", "1e-3")),
    "DIVERGENCE_THRESHOLD": float(os.environ.get("BIHARMONIC_DIVERGENCE_THRESHOLD", "1e12")),
    "NEWTON_DAMPING": float(os.environ.get("BIHARMONIC_NEWTON_DAMPING", "0.5")),
    "NEWTON_MAX_ITER": int(os.environ.get("BIHARMONIC_NEWTON_MAX_ITER", "50")),
    "NEWTON_TOL": 1e-9,
    "JACOBIAN_STEP": 1e-6,
    "ODE_RTOL": float(os.environ.get("BIHARMONIC_ODE_RTOL", "1e-10")),
    "ODE_ATOL": float(os.environ.get("BIHARMONIC_ODE_ATOL", "1e-12")),
    "STABILITY_TOL_POS": 1e-8,
    "ENDPOINT_MARGIN": 1e-3,
    "PROFILE_FD_STEP": 1e-5,
    "PROFILE_CHECK_STEP": 1e-4,
}

# Logging
LOG_DIR = BASE_DIR / "logs"
LOG_DIR.mkdir(exist_ok=True)

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {process:d} {thread:d} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "file": {
            "level": "INFO",
            "class": "logging.FileHandler",
            "filename": LOG_DIR / "biharmonic.log",
            "formatter": "verbose",
        },
        "console": {
            "level": "WARNING",
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "django": {
            "handlers": ["file", "console"],
            "level": "INFO",
            "propagate": False,
        },
        "apps": {
            "handlers": ["file", "console"],
            "level": LOG_LEVEL,
            "propagate": False,
        },
    },
}
