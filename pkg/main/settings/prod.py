"""
Production settings for batch runs of the biharmonic management commands.
"""

import os
from .base import *

DEBUG = False

SECRET_KEY = os.environ["SECRET_KEY"]

# Logging - Log to files in production
LOG_FILE_DIR = Path(os.environ.get("BIHARMONIC_LOG_DIR", "/var/log/biharmonic"))
LOGGING["handlers"]["file"]["filename"] = LOG_FILE_DIR / "biharmonic.log"
LOGGING["handlers"]["error_file"] = {
    "level": "ERROR",
    "class": "logging.FileHandler",
    "filename": LOG_FILE_DIR / "biharmonic_error.log",
    "formatter": "verbose",
}
LOGGING["loggers"]["apps"]["handlers"] = ["file", "error_file", "console"]
