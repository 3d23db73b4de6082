"""
Smallest Rayleigh quotient of the second variation over clamped
finite-difference fields, and the stability certificate built on it.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from django.db import models
from scipy import linalg, sparse

from apps.core.conf import numeric_setting
from apps.core.exceptions import InvalidParameterError
from apps.core.grids import GridSpec, difference_matrices, simpson_weights
from apps.functionals.jets import RadialMap
from apps.stability.cases import StabilityCase, coerce_case
from apps.stability.forms import conformal_zeroth_coefficient, generic_zeroth_coefficient
from apps.stability.variation import CLAMPED_NODES

logger = logging.getLogger(__name__)

MIN_RAYLEIGH_NODES = 64
CERTIFICATE_HEADER = ("case", "interval_lo", "interval_hi", "nodes", "min_rayleigh", "verdict")


class Verdict(models.TextChoices):
    STABLE = "Stable"
    INDEFINITE = "Indefinite"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class StabilityCertificate:
    case_id: str
    interval: Tuple[float, float]
    nodes: int
    min_rayleigh: float
    verdict: str
    history: Tuple[Tuple[int, float], ...] = ()
    diagnostics: str = ""
    meta: Dict = field(default_factory=dict, compare=False)

    @property
    def stable(self) -> bool:
        return self.verdict == Verdict.STABLE

    def as_row(self) -> Dict:
        return {
            "case": self.case_id,
            "interval_lo": self.interval[0],
            "interval_hi": self.interval[1],
            "nodes": self.nodes,
            "min_rayleigh": self.min_rayleigh,
            "verdict": str(self.verdict),
        }


def certificate_rows(certificates: List[StabilityCertificate]) -> List[Dict]:
    return [certificate.as_row() for certificate in certificates]


def assemble_form_matrix(
    case: StabilityCase, beta: RadialMap, grid: GridSpec, generic: bool = False
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Matrix of the quadrature-discretised form and the diagonal of the
    Simpson Gram matrix, both restricted to the free (unclamped) nodes.
    """
    n, step = grid.nodes, grid.step
    t = grid.points()
    b = np.asarray(beta(t, 0), dtype=float)
    first, second = difference_matrices(n, step)
    principal = second + 2.0 * first - sparse.diags(3.0 * case.q1(b))
    weights = simpson_weights(n, step)
    if generic:
        zeroth = generic_zeroth_coefficient(case, beta, t)
    else:
        zeroth = conformal_zeroth_coefficient(case, b)

    form = principal.T @ sparse.diags(weights) @ principal + sparse.diags(weights * zeroth)
    free = slice(CLAMPED_NODES, n - CLAMPED_NODES)
    dense = form.toarray()[free, free]
    return 0.5 * (dense + dense.T), weights[free]


def _smallest_eigenvalue(case, beta, grid: GridSpec, generic: bool) -> float:
    matrix, gram = assemble_form_matrix(case, beta, grid, generic)
    values = linalg.eigh(matrix, np.diag(gram), subset_by_index=[0, 0], eigvals_only=True)
    return float(values[0])


def min_rayleigh(
    case,
    beta: RadialMap,
    interval: Tuple[float, float],
    node_count: int,
    generic: bool = False,
    case_id: Optional[str] = None,
) -> StabilityCertificate:
    """
    Smallest generalized eigenvalue of (form, Gram) at ``node_count`` and
    at the refined grid. Stable needs both above the positivity tolerance.
    """
    case = coerce_case(case)
    if node_count < MIN_RAYLEIGH_NODES:
        raise InvalidParameterError(f"min_rayleigh needs at least {MIN_RAYLEIGH_NODES} nodes, got {node_count}")
    lo, hi = (float(v) for v in interval)
    tol_pos = numeric_setting("STABILITY_TOL_POS")
    label = case_id or case.label

    history = []
    diagnostics = ""
    for nodes in (node_count, 2 * node_count):
        try:
            history.append((nodes, _smallest_eigenvalue(case, beta, GridSpec(lo, hi, nodes), generic)))
        except linalg.LinAlgError as exc:
            diagnostics = f"eigensolver failed at {nodes} nodes: {exc}"
            logger.warning(f"Stability of {label} on [{lo:g}, {hi:g}]: {diagnostics}")
            break
        logger.debug(f"Stability of {label}: {nodes} nodes, smallest eigenvalue {history[-1][1]:.6e}")

    if len(history) < 2:
        verdict = Verdict.INCONCLUSIVE
    elif all(value > tol_pos for _, value in history):
        verdict = Verdict.STABLE
    elif history[-1][1] < -tol_pos:
        verdict = Verdict.INDEFINITE
    else:
        verdict = Verdict.INCONCLUSIVE
    value = history[0][1] if history else float("nan")
    logger.info(f"Stability of {label} on [{lo:g}, {hi:g}] with {node_count} nodes: {verdict} ({value:.6e})")
    return StabilityCertificate(
        case_id=label,
        interval=(lo, hi),
        nodes=node_count,
        min_rayleigh=value,
        verdict=verdict.value,
        history=tuple(history),
        diagnostics=diagnostics,
        meta={"generic": generic},
    )
