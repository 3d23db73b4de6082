"""
Run configuration shared by the management commands: validation,
key=value config files and the CSV metadata round trip.
"""
import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Tuple

from django.db import models

from apps.core.exceptions import InvalidParameterError

TOOL_VERSION = "1.0.0"


class Command(models.TextChoices):
    CATALOG = "catalog"
    RESIDUAL = "residual"
    HAMILTONIAN = "hamiltonian"
    SOLVE = "solve"
    CONFORMAL = "conformal"
    STABILITY = "stability"
    CLASSIFY = "classify"
    VERIFY_ALL = "verify_all"


class OutputFormat(models.TextChoices):
    CSV = "csv"
    PARQUET = "parquet"


# fields that never go into the metadata header
_LOCAL_FIELDS = ("output", "fmt", "save")

_POSITIVE = ("c", "d", "lam", "nodes", "scale", "eps", "rtol", "atol", "b")


@dataclass(frozen=True)
class RunConfig:
    command: str
    case: Optional[str] = None
    domain: Optional[str] = None
    target: Optional[str] = None
    m: int = 4
    c: float = 1.0
    d: float = 1.0
    lam: Optional[float] = None
    rmin: Optional[float] = None
    rmax: Optional[float] = None
    tmin: Optional[float] = None
    tmax: Optional[float] = None
    nodes: Optional[int] = None
    eps: Optional[float] = None
    b: Optional[float] = None
    alpha_b: Optional[float] = None
    dalpha_b: Optional[float] = None
    mode: str = "clamped"
    scale: Optional[float] = None
    alpha: float = 0.5
    generic: bool = False
    witness: Optional[str] = None
    rtol: Optional[float] = None
    atol: Optional[float] = None
    workers: int = 4
    output: Optional[str] = None
    fmt: str = OutputFormat.CSV
    save: bool = False

    def validate(self) -> "RunConfig":
        if self.command not in Command.values:
            raise InvalidParameterError(f"Unknown command: {self.command!r}")
        if self.fmt not in OutputFormat.values:
            raise InvalidParameterError(f"Unknown output format: {self.fmt!r}")
        if int(self.m) != self.m or self.m < 3:
            raise InvalidParameterError(f"m must be an integer >= 3, got {self.m}")
        for name in _POSITIVE:
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise InvalidParameterError(f"--{name.replace('_', '-')} must be positive, got {value}")
        if self.workers < 1:
            raise InvalidParameterError(f"--workers must be at least 1, got {self.workers}")
        for lo_name, hi_name in (("rmin", "rmax"), ("tmin", "tmax")):
            lo, hi = getattr(self, lo_name), getattr(self, hi_name)
            if lo is not None and hi is not None and not hi > lo:
                raise InvalidParameterError(f"Interval [{lo}, {hi}] is not well ordered")
        if self.rmin is not None and self.rmin < 0:
            raise InvalidParameterError(f"--rmin must be nonnegative, got {self.rmin}")
        return self

    def interval(self, lo_name: str, hi_name: str, default: Tuple[float, float]) -> Tuple[float, float]:
        lo, hi = getattr(self, lo_name), getattr(self, hi_name)
        return (default[0] if lo is None else lo, default[1] if hi is None else hi)

    def metadata(self) -> Dict[str, object]:
        """Header written in front of every CSV: command, set parameters, version."""
        data: Dict[str, object] = {}
        for item in dataclasses.fields(self):
            value = getattr(self, item.name)
            if item.name in _LOCAL_FIELDS or value is None:
                continue
            data[item.name] = value
        data["tool_version"] = TOOL_VERSION
        return data

    @classmethod
    def from_metadata(cls, metadata: Dict[str, str]) -> "RunConfig":
        values = dict(metadata)
        values.pop("tool_version", None)
        return cls(**coerce_values(values)).validate()


def _coerce(item: dataclasses.Field, raw: str):
    text = str(raw).strip()
    hint = str(item.type)
    if "bool" in hint:
        if text.lower() in ("true", "1", "yes", "on"):
            return True
        if text.lower() in ("false", "0", "no", "off"):
            return False
        raise InvalidParameterError(f"{item.name} expects a boolean, got {raw!r}")
    try:
        if "int" in hint:
            return int(text)
        if "float" in hint:
            return float(text)
    except ValueError as exc:
        raise InvalidParameterError(f"{item.name} expects a number, got {raw!r}") from exc
    return text


def coerce_values(values: Dict[str, object]) -> Dict[str, object]:
    """Typed RunConfig keyword arguments from string values (flag names accepted)."""
    fields = {item.name: item for item in dataclasses.fields(RunConfig)}
    result: Dict[str, object] = {}
    for key, raw in values.items():
        name = FLAG_ALIASES.get(key.strip().lstrip("-").replace("-", "_"), key.strip().lstrip("-").replace("-", "_"))
        if name not in fields:
            raise InvalidParameterError(f"Unknown configuration key: {key!r}")
        result[name] = raw if not isinstance(raw, str) else _coerce(fields[name], raw)
    return result


FLAG_ALIASES = {
    "lambda": "lam",
    "R_star": "alpha_b",
    "r_star": "alpha_b",
    "from": "domain",
    "to": "target",
    "format": "fmt",
}


def read_config_file(path: str) -> Dict[str, object]:
    """key=value lines; blank lines and lines starting with '#' are skipped."""
    file_path = Path(path)
    if not file_path.exists():
        raise InvalidParameterError(f"Config file not found: {file_path}")
    values: Dict[str, str] = {}
    for number, line in enumerate(file_path.read_text(encoding="utf-8").splitlines(), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        key, sep, value = text.partition("=")
        if not sep:
            raise InvalidParameterError(f"{file_path}:{number}: expected key=value, got {line!r}")
        values[key.strip()] = value.strip()
    return coerce_values(values)
