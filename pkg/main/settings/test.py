"""
Test settings: no log file, quiet console, output under a scratch directory.
"""

import tempfile

from .base import *

DEBUG = False

OUTPUT_DIR = Path(os.environ.get("BIHARMONIC_OUTPUT_DIR", tempfile.gettempdir())) / "biharmonic-test-output"

LOGGING["handlers"].pop("file")
LOGGING["loggers"]["django"]["handlers"] = ["console"]
LOGGING["loggers"]["apps"]["handlers"] = ["console"]
LOGGING["loggers"]["apps"]["level"] = "WARNING"
