"""
Dispatch of a validated RunConfig to the numerical apps and writing of
the resulting rows.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, TextIO

import numpy as np

from apps.catalog.classification import classify_constant_curvature
from apps.catalog.entries import (
    CATALOG_HEADER,
    CYLINDER_CASES,
    IDENTITY_CASES,
    CaseId,
    catalog_solution,
    export_catalog,
    full_catalog,
    verification_points,
)
from apps.catalog.identities import nonexistence_identity
from apps.cli.acceptance import run_acceptance
from apps.cli.config import Command, OutputFormat, RunConfig
from apps.core.conf import numeric_setting
from apps.core.exceptions import InvalidParameterError
from apps.core.export_utils import get_output_file_path, write_csv_file, write_csv_stream, write_parquet_file
from apps.functionals.hamiltonian import cylinder_lagrangian, hamiltonian_numeric, log_variable_lagrangian
from apps.functionals.jets import Jet4
from apps.functionals.log_variable import to_log_variable
from apps.functionals.residuals import biharmonic_residual, conformal_residual, conformality_defect, tension
from apps.geometry.profiles import ProfileKind, make_space_form
from apps.geometry.specs import MapSpec, cylinder_spec
from apps.solvers.conformal import solve_conformal
from apps.solvers.integration import TRAJECTORY_HEADER
from apps.solvers.shooting import BoundaryTarget, ShootingMode, conformal_seed, shoot_dirichlet
from apps.stability.cases import StabilityKind, catalog_beta, stability_case
from apps.stability.rayleigh import CERTIFICATE_HEADER, min_rayleigh

logger = logging.getLogger(__name__)

RESIDUAL_HEADER = ("r", "alpha", "tension", "residual")
IDENTITY_HEADER = ("r", "alpha", "residual", "identity")
HAMILTONIAN_HEADER = ("t", "beta", "hamiltonian")
CONFORMAL_HEADER = ("r", "alpha", "dalpha", "defect")
CLASSIFY_HEADER = ("from", "to", "classification", "case")
VERIFY_HEADER = ("check", "passed", "detail")

# column descriptions shown by --help
COLUMN_DOCS = {
    Command.CATALOG: "case_id, c, d, lambda, nature, domain",
    Command.RESIDUAL: "r, alpha, tension, residual (identity cases: r, alpha, residual, identity)",
    Command.HAMILTONIAN: "t, beta, hamiltonian",
    Command.SOLVE: "r, alpha, dalpha, ddalpha, dddalpha, residual",
    Command.CONFORMAL: "r, alpha, dalpha, defect (alpha' - h(alpha)/f(r))",
    Command.STABILITY: "case, interval_lo, interval_hi, nodes, min_rayleigh, verdict",
    Command.CLASSIFY: "from, to, classification, case",
    Command.VERIFY_ALL: "check, passed, detail",
}


@dataclass
class RunResult:
    header: Sequence[str]
    rows: List[Dict]
    message: str = ""
    output_path: Optional[str] = None
    details: Dict = field(default_factory=dict)


def _profile(kind, curvature: float):
    kind = ProfileKind(kind)
    return make_space_form(kind, None if kind == ProfileKind.EUCLIDEAN else curvature)


def build_spec(config: RunConfig, domain_default: str, target_default: str) -> MapSpec:
    domain = config.domain or domain_default
    target = config.target or target_default
    if domain not in ProfileKind.values or target not in ProfileKind.values:
        raise InvalidParameterError(f"Unknown model kind in ({domain}, {target})")
    h = _profile(target, config.d)
    if domain == ProfileKind.CYLINDER:
        return cylinder_spec(config.lam or 1.0, h, m=config.m)
    return MapSpec(m=config.m, f=_profile(domain, config.c), h=h, lam=config.lam)


def _require(config: RunConfig, name: str):
    value = getattr(config, name)
    if value is None:
        raise InvalidParameterError(f"--{name.replace('_', '-')} is required for {config.command}")
    return value


def _radii(config: RunConfig, default: np.ndarray) -> np.ndarray:
    if config.rmin is None and config.rmax is None:
        return default
    lo, hi = config.interval("rmin", "rmax", (float(default[0]), float(default[-1])))
    nodes = config.nodes or default.size
    return np.geomspace(lo, hi, nodes) if lo > 0 else np.linspace(lo, hi, nodes)


def _entry(config: RunConfig, default_case: str):
    lam = 3.0 if config.lam is None else config.lam
    return catalog_solution(config.case or default_case, c=config.c, d=config.d, lam=lam, m=config.m)


def run_catalog(config: RunConfig) -> RunResult:
    entries = full_catalog(c=config.c, d=config.d, lam=3.0 if config.lam is None else config.lam)
    return RunResult(CATALOG_HEADER, export_catalog(entries), f"{len(entries)} catalog entries")


def run_residual(config: RunConfig) -> RunResult:
    entry = _entry(config, CaseId.C1B)
    if CaseId(entry.case_id) in IDENTITY_CASES:
        margin = numeric_setting("ENDPOINT_MARGIN")
        hi = math.pi / config.c - margin if entry.spec.f.domain.hi is not None else 3.0
        default = np.linspace(margin, hi, config.nodes or 200)
        r = _radii(config, default)
        alpha = np.full_like(r, config.alpha)
        residual = np.asarray(conformal_residual(entry.spec, alpha, r, normalized=True))
        identity = np.asarray(nonexistence_identity(entry.case_id, config.c, config.d, r, alpha))
        rows = [dict(zip(IDENTITY_HEADER, values)) for values in zip(r, alpha, residual, identity)]
        worst = float(np.max(np.abs(residual - identity)))
        return RunResult(IDENTITY_HEADER, rows, f"{entry.case_id}: max |residual - identity| = {worst:.3e}")

    r = _radii(config, verification_points(entry, config.nodes or 200))
    jet = entry.map.jet(r)
    residual = np.asarray(biharmonic_residual(entry.spec, jet), dtype=float) * np.ones_like(r)
    tau = np.asarray(tension(entry.spec, jet), dtype=float) * np.ones_like(r)
    rows = [dict(zip(RESIDUAL_HEADER, values)) for values in zip(r, jet.a0 * np.ones_like(r), tau, residual)]
    worst = float(np.max(np.abs(residual)))
    return RunResult(RESIDUAL_HEADER, rows, f"{entry.case_id}: max |residual| = {worst:.3e}", details={"max": worst})


def run_hamiltonian(config: RunConfig) -> RunResult:
    entry = _entry(config, CaseId.C1B)
    if entry.map is None:
        raise InvalidParameterError(f"{entry.case_id} has no map")
    if CaseId(entry.case_id) in CYLINDER_CASES:
        lagrangian = cylinder_lagrangian(entry.spec.angular_weight, entry.spec.h)
        trajectory = entry.map
        default = (-10.0, 10.0)
    else:
        lagrangian = log_variable_lagrangian(config.m, entry.spec.h, config.lam)
        trajectory = to_log_variable(entry.map, entry.spec.f)
        domain = trajectory.domain
        lo = -8.0 if domain.lo is None else domain.lo + 0.1
        hi = 8.0 if domain.hi is None else min(8.0, domain.hi - 0.1)
        default = (lo, hi)
    lo, hi = config.interval("tmin", "tmax", default)
    t = np.linspace(lo, hi, config.nodes or 201)
    values = np.array([hamiltonian_numeric(lagrangian, trajectory, float(x)) for x in t])
    beta = np.asarray(trajectory(t, 0), dtype=float) * np.ones_like(t)
    rows = [dict(zip(HAMILTONIAN_HEADER, row)) for row in zip(t, beta, values)]
    drift = float(np.max(np.abs(values - values[0])))
    return RunResult(HAMILTONIAN_HEADER, rows, f"{entry.case_id}: Hamiltonian drift {drift:.3e}", details={"drift": drift})


def run_solve(config: RunConfig) -> RunResult:
    spec = build_spec(config, ProfileKind.EUCLIDEAN, ProfileKind.SPHERE)
    b = config.b or 1.0
    alpha_b = _require(config, "alpha_b")
    mode = ShootingMode(config.mode)
    if mode == ShootingMode.CLAMPED:
        _require(config, "dalpha_b")
    guess = conformal_seed(spec, b, alpha_b, config.eps)
    seed, trajectory = shoot_dirichlet(spec, b, BoundaryTarget(alpha_b, config.dalpha_b), guess, mode)
    if config.nodes:
        trajectory = trajectory.resample(config.nodes)
    message = f"a1={seed.a1:.12g} a3={seed.a3:.12g} defect={trajectory.meta.get('newton_defect', 0.0):.3e}"
    return RunResult(TRAJECTORY_HEADER, trajectory.to_csv_rows(), message, details={"seed": seed})


def default_conformal_scale(spec: MapSpec, c: float, d: float) -> float:
    """Pole slope of the catalog member with parameter c: 2c^2/d out of R^m into a curved target, c/d otherwise."""
    if spec.f.kind == ProfileKind.EUCLIDEAN and spec.h.kind != ProfileKind.EUCLIDEAN:
        return 2.0 * c * c / d
    return c / d


def run_conformal(config: RunConfig) -> RunResult:
    spec = build_spec(config, ProfileKind.EUCLIDEAN, ProfileKind.SPHERE)
    scale = config.scale or default_conformal_scale(spec, config.c, config.d)
    margin = numeric_setting("ENDPOINT_MARGIN")
    f_hi = spec.f.domain.hi
    default_hi = 10.0 if f_hi is None else f_hi - margin
    lo, hi = config.interval("rmin", "rmax", (0.0, default_hi))
    radial_map = solve_conformal(spec, scale, (lo, hi), nodes=config.nodes or 401, eps=config.eps)
    r = np.minimum(radial_map.meta["grid"].nodes, radial_map.domain.hi)
    jet = Jet4(r, radial_map(r, 0), radial_map(r, 1), radial_map(r, 2))
    defect = np.asarray(conformality_defect(spec, jet), dtype=float)
    rows = [dict(zip(CONFORMAL_HEADER, values)) for values in zip(r, jet.a0, jet.a1, defect)]
    truncated = radial_map.meta["truncated"]
    message = f"scale={scale:.12g} range=[{r[0]:g}, {r[-1]:g}] truncated={'true' if truncated else 'false'}"
    return RunResult(CONFORMAL_HEADER, rows, message, details={"truncated": truncated})


def _stability_interval(kind: str, c: float):
    if kind == StabilityKind.SPHERE:
        return (-10.0, math.log(1.0 / (c * c)))
    if kind == StabilityKind.HYPERBOLIC:
        return (-10.0, math.log(1.0 / (c * c)) - 0.1)
    return (-10.0, 0.0)


def run_stability(config: RunConfig) -> RunResult:
    case = stability_case(config.case or StabilityKind.HYPERBOLIC, config.d)
    beta = catalog_beta(case, config.c, config.witness)
    interval = config.interval("tmin", "tmax", _stability_interval(case.kind, config.c))
    certificate = min_rayleigh(
        case, beta, interval, config.nodes or 512, generic=config.generic, case_id=config.witness or case.kind
    )
    message = f"{certificate.case_id}: {certificate.verdict} (min_rayleigh={certificate.min_rayleigh:.6e})"
    return RunResult(CERTIFICATE_HEADER, [certificate.as_row()], message, details={"certificate": certificate})


def run_classify(config: RunConfig) -> RunResult:
    domain, target = _require(config, "domain"), _require(config, "target")
    result = classify_constant_curvature(domain, target)
    row = {"from": domain, "to": target, "classification": result.kind, "case": result.witness or result.identity}
    return RunResult(CLASSIFY_HEADER, [row], str(result))


def run_verify_all(config: RunConfig) -> RunResult:
    results = run_acceptance(workers=config.workers)
    rows = [{"check": item.name, "passed": item.passed, "detail": item.detail} for item in results]
    failed = [item.name for item in results if not item.passed]
    message = "all checks passed" if not failed else f"failed: {', '.join(failed)}"
    return RunResult(VERIFY_HEADER, rows, message, details={"failed": failed})


DISPATCH: Dict[str, Callable[[RunConfig], RunResult]] = {
    Command.CATALOG: run_catalog,
    Command.RESIDUAL: run_residual,
    Command.HAMILTONIAN: run_hamiltonian,
    Command.SOLVE: run_solve,
    Command.CONFORMAL: run_conformal,
    Command.STABILITY: run_stability,
    Command.CLASSIFY: run_classify,
    Command.VERIFY_ALL: run_verify_all,
}


def write_result(config: RunConfig, result: RunResult, stream: Optional[TextIO] = None) -> Optional[str]:
    """
    Write the rows to ``--output`` (or the default output directory with
    ``--save``); without either, CSV goes to ``stream``.
    """
    metadata = config.metadata()
    if config.output or config.save:
        path = config.output or get_output_file_path(config.command, config.fmt)
        if config.fmt == OutputFormat.PARQUET:
            _, count = write_parquet_file(path, result.rows, result.header, metadata=metadata)
        else:
            _, count = write_csv_file(path, result.rows, result.header, metadata=metadata)
        logger.info(f"Wrote {count} rows to {path}")
        return path
    if stream is not None:
        write_csv_stream(stream, result.rows, result.header, metadata=metadata)
    return None


def run(config: RunConfig, stream: Optional[TextIO] = None) -> RunResult:
    config.validate()
    logger.info(f"Running {config.command} with {config.metadata()}")
    result = DISPATCH[config.command](config)
    result.output_path = write_result(config, result, stream)
    return result
