"""
Development settings for the biharmonic models project.
"""

from .base import *

DEBUG = True

# Solver progress on the console while developing
LOGGING["handlers"]["console"]["level"] = "INFO"
LOGGING["loggers"]["apps"]["level"] = os.environ.get("BIHARMONIC_LOG_LEVEL", "INFO").upper()
