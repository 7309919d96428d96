"""
Peak and antipeak plurisubharmonic functions at infinity.

All three candidates are built from a separating frame through
w_j(z) = L_j(z) - a_j + 1, which has real part >= 1 on the closure of D.
"""
import logging
from typing import Callable, Dict, Sequence, Union

import numpy as np

from .decompose import Frame
from .errors import DomainError, NotInteriorError, OutsideClosureError
from .schemas import PotentialReport

logger = logging.getLogger(__name__)

TOL_QUADRATURE = 1e-8
ZERO_LIMIT = 1e-4
MINUS_INFINITY_LIMIT = -10.0

SUM_FORM_NOTE = (
    "the sum-form peak candidate stays bounded away from 0 along this ray, so it "
    "is not a peak function at infinity here (open question: sum-form peak "
    "function); the max-form candidate is"
)


def _terms(frame: Frame, z) -> np.ndarray:
    pts = np.asarray(z, dtype=np.complex128)
    values = pts @ frame.matrix.T
    slack = values.real - frame.thresholds
    tol = 1e-9 * (1.0 + np.linalg.norm(pts, axis=-1))
    if np.any(slack.min(axis=-1) < -tol):
        raise OutsideClosureError("Point lies outside the closure of the domain")
    return values - frame.thresholds + 1.0


def peak_sum(frame: Frame, z) -> Union[float, np.ndarray]:
    """-Re sum_j 1 / (L_j(z) - a_j + 1); negative on the closure."""
    return -np.sum(np.real(1.0 / _terms(frame, z)), axis=-1)


def peak_max(frame: Frame, z) -> Union[float, np.ndarray]:
    """
    max_j -Re 1 / (L_j(z) - a_j + 1).

    Negative on the closure and tends to 0 at infinity, since some
    |L_j(z)| grows without bound along any escaping sequence.
    """
    return np.max(-np.real(1.0 / _terms(frame, z)), axis=-1)


def antipeak_log(frame: Frame, z) -> Union[float, np.ndarray]:
    """-sum_j log |L_j(z) - a_j + 1|; pluriharmonic, <= 0, -inf at infinity."""
    return -np.sum(np.log(np.abs(_terms(frame, z))), axis=-1)


POTENTIALS: Dict[str, Callable] = {
    "peak_sum": peak_sum,
    "peak_max": peak_max,
    "antipeak_log": antipeak_log,
}


def _resolve(potential: Union[str, Callable]):
    if isinstance(potential, str):
        if potential not in POTENTIALS:
            raise DomainError(f"Unknown potential '{potential}'")
        return potential, POTENTIALS[potential]
    for name, fn in POTENTIALS.items():
        if fn is potential:
            return name, fn
    raise DomainError(f"Unknown potential {potential!r}")


def _non_increasing(values: np.ndarray) -> bool:
    return bool(np.all(values[1:] <= values[:-1] * (1 + 1e-12) + 1e-15))


def scan_ray(potential: Union[str, Callable], frame: Frame, base, direction,
             radii: Sequence[float]) -> PotentialReport:
    """
    Sample a potential along base + r·direction and judge its limit.

    Peak kinds are fitted as c + b/r, the antipeak as -b·log r + c. The
    verdict looks at the last sample and at monotonicity over the final
    three decades of radii.

    Args:
        potential: Name in POTENTIALS or one of the functions
        frame: Separating frame of the domain
        base: Closure point
        direction: Ray direction (normalized here)
        radii: Strictly increasing positive radii

    Returns:
        PotentialReport

    Raises:
        OutsideClosureError: If the ray leaves the closure
    """
    kind, fn = _resolve(potential)
    radii = np.asarray(radii, dtype=float)
    if radii.size < 2 or np.any(np.diff(radii) <= 0) or radii[0] <= 0:
        raise DomainError("Radii must be positive and strictly increasing (at least two)")
    base = np.asarray(base, dtype=np.complex128)
    direction = np.asarray(direction, dtype=np.complex128)
    direction = direction / np.linalg.norm(direction)

    points = base[None, :] + radii[:, None] * direction[None, :]
    values = np.asarray(fn(frame, points), dtype=float)

    if kind == "antipeak_log":
        design = np.column_stack([np.ones_like(radii), -np.log(radii)])
    else:
        design = np.column_stack([np.ones_like(radii), 1.0 / radii])
    (offset, rate), *_ = np.linalg.lstsq(design, values, rcond=None)

    window = radii >= radii[-1] / 1e3
    last = float(values[-1])
    note = None
    limit_value = None
    if abs(last) < ZERO_LIMIT and _non_increasing(np.abs(values[window])):
        verdict = "limit_zero"
    elif last < MINUS_INFINITY_LIMIT and _non_increasing(values[window]):
        verdict = "limit_minus_infinity"
    else:
        verdict = "limit_other"
        limit_value = last
        if kind == "peak_sum":
            note = SUM_FORM_NOTE
    logger.debug(f"{kind}: verdict {verdict}, fit offset={offset:.6g} rate={rate:.6g}")
    return PotentialReport(
        kind=kind,
        samples=[(float(r), float(v)) for r, v in zip(radii, values)],
        verdict=verdict,
        limit_value=limit_value,
        fitted_rate=float(rate),
        fitted_offset=float(offset),
        note=note,
    )


def submean_check(potential: Union[str, Callable], frame: Frame, center, direction,
                  radius: float, n: int = 256) -> float:
    """
    Sub-mean-value residual on the complex disc center + radius·D·direction.

    residual = (1/n) sum_k u(center + radius e^{2 pi i k/n} v) - u(center),
    which is >= -TOL_QUADRATURE for a plurisubharmonic u.

    Raises:
        NotInteriorError: If the closed disc is not inside the domain
    """
    _, fn = _resolve(potential)
    center = np.asarray(center, dtype=np.complex128)
    v = np.asarray(direction, dtype=np.complex128)
    v = v / np.linalg.norm(v)
    # min over the circle of Re L_j is Re L_j(center) - radius |L_j(v)|
    slack = (frame.matrix @ center).real - frame.thresholds - radius * np.abs(frame.matrix @ v)
    if np.any(slack <= 0):
        raise NotInteriorError("Disc exits the domain")
    angles = 2 * np.pi * np.arange(n) / n
    circle = center[None, :] + radius * np.exp(1j * angles)[:, None] * v[None, :]
    return float(np.mean(fn(frame, circle)) - fn(frame, center))
