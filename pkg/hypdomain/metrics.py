"""
Certified bounds on the Kobayashi distance of a polyhedral convex domain.

On convex domains the Kobayashi distance, the Lempert function and the
Caratheodory distance agree, so a Caratheodory lower bound (pull back each
half-plane's distance) and an analytic-disc upper bound bracket the same
number. Distances use the normalization k(0, t) = arctanh t on the unit disc.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Literal, Sequence, Tuple

import numpy as np

from .domain import DomainSpec, require_interior, truncate
from .errors import BracketError, DomainError
from .schemas import DistanceBracket, ExhaustionRow

logger = logging.getLogger(__name__)

ANGLE_TOL = 1e-10
# |L_j(w - z)| below this (relative) counts as a constraint that does not move
MOVE_TOL = 1e-12
REFINE_TOL = 1e-4
MAX_CHAIN_STEPS = 2 ** 20
DEFAULT_CHAIN_STEPS = 64
BRACKET_ROUNDING = 1e-12

ModelShape = Literal["half_plane", "strip", "bounded_polygon", "whole_plane"]
BallVerdict = Literal["certified_in", "certified_out", "unknown"]


def _arctanh_ratio(num: float, den: float, product: float) -> float:
    """
    arctanh(num / den) given product = den^2 - num^2 > 0.

    Near 1 the ratio rounds off, so the value is read from
    log((den + num)^2 / product) instead of the quotient.
    """
    ratio = num / den
    if ratio <= 0.5:
        return math.atanh(ratio)
    return max(0.0, 0.5 * (2.0 * math.log(den + num) - math.log(product)))


def disc_distance(z1: complex, z2: complex) -> float:
    """
    Distance in the unit disc: arctanh |(z1 - z2) / (1 - conj(z2) z1)|.

    Evaluated as 0.5 log((|1 - conj(z2) z1| + |z1 - z2|)^2 / ((1 - |z1|^2)(1 - |z2|^2)))
    once the points are far apart, which stays finite up to the circle.

    Raises:
        DomainError: If a point is on or outside the unit circle
    """
    z1, z2 = complex(z1), complex(z2)
    r1, r2 = abs(z1), abs(z2)
    if r1 >= 1 or r2 >= 1:
        raise DomainError("Disc points must satisfy |z| < 1")
    if z1 == z2:
        return 0.0
    product = (1.0 - r1) * (1.0 + r1) * (1.0 - r2) * (1.0 + r2)
    return _arctanh_ratio(abs(z1 - z2), abs(1 - z2.conjugate() * z1), product)


def halfplane_distance(w1: complex, w2: complex) -> float:
    """
    Distance in {Re w > 0}: arctanh |(w1 - w2) / (w1 + conj(w2))|.

    Far pairs use log((|w1 + conj(w2)| + |w1 - w2|) / (2 sqrt(Re w1 Re w2))).

    Raises:
        DomainError: If a point is not in the half-plane
    """
    w1, w2 = complex(w1), complex(w2)
    if w1.real <= 0 or w2.real <= 0:
        raise DomainError("Half-plane points must satisfy Re w > 0")
    if w1 == w2:
        return 0.0
    A = abs(w1 + w2.conjugate())
    B = abs(w1 - w2)
    if B / A <= 0.5:
        return math.atanh(B / A)
    return max(0.0, math.log(A + B) - math.log(2.0) - 0.5 * (math.log(w1.real) + math.log(w2.real)))


def _halfplane_batch(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    A = np.abs(p + np.conj(q))
    B = np.abs(p - q)
    ratio = B / A
    near = np.arctanh(np.minimum(ratio, 0.5))
    far = np.log(A + B) - math.log(2.0) - 0.5 * (np.log(p.real) + np.log(q.real))
    return np.where(ratio <= 0.5, near, np.maximum(far, 0.0))


def _moving(D: DomainSpec, z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Mask of constraints whose functional changes between z and w."""
    delta = D.matrix @ (w - z)
    return np.abs(delta) > MOVE_TOL * D.row_norms * np.linalg.norm(w - z)


def cara_lower(D: DomainSpec, z, w) -> float:
    """
    Caratheodory lower bound max_j k_H(L_j(z) - a_j, L_j(w) - a_j).

    Each half-space maps D into a half-plane H, and holomorphic maps do not
    increase the distance.

    Raises:
        NotInteriorError: If z or w is not interior
    """
    z = require_interior(D, z, "z")
    w = require_interior(D, w, "w")
    if D.is_whole_space:
        return 0.0
    mask = _moving(D, z, w)
    if not np.any(mask):
        return 0.0
    C = D.matrix[mask]
    a = D.thresholds[mask]
    return float(np.max(_halfplane_batch(C @ z - a, C @ w - a)))


@dataclass(frozen=True, eq=False)
class PlanarSlice:
    """
    Omega = {zeta : Re(alpha_j zeta) > beta_j}, the preimage of D under
    zeta -> z + zeta (w - z). Each alpha_j has modulus 1 and no two share a
    direction; 0 and 1 are interior.
    """
    alphas: np.ndarray
    betas: np.ndarray

    @property
    def n_constraints(self) -> int:
        return self.alphas.shape[0]

    def as_domain(self) -> DomainSpec:
        return DomainSpec.from_arrays(self.alphas.reshape(-1, 1), self.betas, [0.5])


def planar_slice(D: DomainSpec, z, w) -> PlanarSlice:
    """
    Slice D by the complex line through z and w.

    Constraints that do not move along the line are dropped (they hold with
    positive slack on the whole line); parallel constraints are merged,
    keeping the tighter one.

    Raises:
        DomainError: If z = w
    """
    z = require_interior(D, z, "z")
    w = require_interior(D, w, "w")
    if np.array_equal(z, w):
        raise DomainError("Slice needs two distinct points")
    alphas: List[complex] = []
    betas: List[float] = []
    if not D.is_whole_space:
        mask = _moving(D, z, w)
        raw_alpha = D.matrix[mask] @ (w - z)
        raw_beta = D.thresholds[mask] - (D.matrix[mask] @ z).real
        for alpha, beta in zip(raw_alpha, raw_beta):
            scale = abs(alpha)
            unit, b = alpha / scale, beta / scale
            for i, existing in enumerate(alphas):
                if abs(existing - unit) <= ANGLE_TOL:
                    betas[i] = max(betas[i], b)
                    break
            else:
                alphas.append(unit)
                betas.append(b)
    return PlanarSlice(np.array(alphas, dtype=np.complex128), np.array(betas, dtype=float))


def classify_slice(omega: PlanarSlice) -> ModelShape:
    """Detect the model shape from the constraint normals."""
    n = omega.n_constraints
    if n == 0:
        return "whole_plane"
    if n == 1:
        return "half_plane"
    if n == 2 and abs(omega.alphas[0] + omega.alphas[1]) <= ANGLE_TOL:
        return "strip"
    # any other polygonal region, bounded or not
    return "bounded_polygon"


def _halfplane_slice_distance(omega: PlanarSlice) -> float:
    # zeta -> alpha zeta - beta sends Omega onto {Re > 0}
    alpha, beta = omega.alphas[0], omega.betas[0]
    return halfplane_distance(-beta, alpha - beta)


def _strip_slice_distance(omega: PlanarSlice) -> float:
    alpha, beta1 = omega.alphas[0], omega.betas[0]
    beta2 = omega.betas[1]
    # s = alpha zeta - beta1 ranges over the strip 0 < Re s < h
    h = -beta2 - beta1

    def to_halfplane(zeta: complex) -> complex:
        # exp(i pi s / h) lands in the upper half-plane; -i rotates it right
        return -1j * np.exp(1j * np.pi * (alpha * zeta - beta1) / h)

    return halfplane_distance(to_halfplane(0.0), to_halfplane(1.0))


def _segment_radius(D: DomainSpec, z: np.ndarray, w: np.ndarray, t: np.ndarray) -> np.ndarray:
    """
    Radius of the largest disc z(t) + r·D·u inside D, u = (w - z)/|w - z|.

    Slacks are affine in t, so the radius is a minimum of affine functions.
    """
    radius = np.full(t.shape, math.inf)
    if D.is_whole_space:
        return radius
    u = (w - z) / np.linalg.norm(w - z)
    lu = np.abs(D.matrix @ u)
    s0 = (D.matrix @ z).real - D.thresholds
    s1 = (D.matrix @ w).real - D.thresholds
    for j in np.nonzero(lu > MOVE_TOL * D.row_norms)[0]:
        radius = np.minimum(radius, (s0[j] + t * (s1[j] - s0[j])) / lu[j])
    return radius


def _chain_sum(edges: np.ndarray, length: float, D: DomainSpec, z, w) -> Tuple[float, np.ndarray]:
    mids = 0.5 * (edges[:-1] + edges[1:])
    steps = np.diff(edges) * length
    r = _segment_radius(D, z, w, mids)
    finite = np.isfinite(r)
    bad = finite & (steps >= r / 2)
    ok = finite & ~bad
    terms = np.zeros_like(steps)
    # the disc centred at the midpoint reaches both ends of the step
    terms[ok] = 2.0 * np.arctanh(steps[ok] / (2.0 * r[ok]))
    return float(np.sum(terms)), bad


def chain_upper(D: DomainSpec, z, w, n: int = DEFAULT_CHAIN_STEPS, refine: bool = True) -> float:
    """
    Upper bound by chaining inscribed analytic discs along the segment [z, w].

    The segment is cut into n steps; any step not shorter than half the
    inscribed disc radius at its midpoint is bisected until none is left.
    With ``refine`` every step is then bisected repeatedly until the bound
    changes by less than REFINE_TOL or MAX_CHAIN_STEPS is reached.

    Args:
        D: Domain
        z, w: Interior points
        n: Initial number of steps
        refine: Run the improvement loop

    Returns:
        Finite upper bound; 0 when no constraint moves along the segment

    Raises:
        NotInteriorError: If z or w is not interior
    """
    z = require_interior(D, z, "z")
    w = require_interior(D, w, "w")
    length = float(np.linalg.norm(w - z))
    if length == 0.0:
        return 0.0
    edges = np.linspace(0.0, 1.0, max(int(n), 1) + 1)
    while True:
        value, bad = _chain_sum(edges, length, D, z, w)
        if not np.any(bad):
            break
        left = edges[:-1][bad]
        right = edges[1:][bad]
        edges = np.sort(np.concatenate([edges, 0.5 * (left + right)]))
    best = value
    rounds = 0
    while refine and 2 * (edges.size - 1) <= MAX_CHAIN_STEPS:
        edges = np.sort(np.concatenate([edges, 0.5 * (edges[:-1] + edges[1:])]))
        value, _ = _chain_sum(edges, length, D, z, w)
        rounds += 1
        improvement = abs(best - value)
        best = min(best, value)
        if improvement < REFINE_TOL:
            break
    logger.debug(f"Chain bound {best:.10g} with {edges.size - 1} steps after {rounds} refinements")
    return best


def _slice_upper(D: DomainSpec, z, w, n: int) -> Tuple[float, str]:
    omega = planar_slice(D, z, w)
    shape = classify_slice(omega)
    if shape == "whole_plane":
        return 0.0, "slice_whole_plane"
    if shape == "half_plane":
        return _halfplane_slice_distance(omega), "slice_half_plane"
    if shape == "strip":
        return _strip_slice_distance(omega), "slice_strip"
    return chain_upper(omega.as_domain(), [0.0], [1.0], n), "slice_chain"


def slice_upper(D: DomainSpec, z, w) -> float:
    """
    k_D(z, w) <= k_Omega(0, 1) for the planar slice Omega.

    Closed forms for half-plane, strip and whole-plane slices; chaining
    inside Omega otherwise.

    Raises:
        DomainError: If z = w
    """
    return _slice_upper(D, z, w, DEFAULT_CHAIN_STEPS)[0]


def distance_bracket(D: DomainSpec, z, w, n: int = DEFAULT_CHAIN_STEPS) -> DistanceBracket:
    """
    Certified bracket lower <= k_D(z, w) <= upper.

    Args:
        D: Domain
        z, w: Interior points
        n: Initial chain subdivision

    Returns:
        DistanceBracket with method provenance

    Raises:
        NotInteriorError: If z or w is not interior
        BracketError: If the bounds cross beyond rounding
    """
    z = require_interior(D, z, "z")
    w = require_interior(D, w, "w")
    if np.array_equal(z, w):
        return DistanceBracket(lower=0.0, upper=0.0, lower_method="identical", upper_method="identical")

    lower = cara_lower(D, z, w)
    lower_method = "caratheodory_halfplane" if not D.is_whole_space else "whole_space"
    upper, upper_method = _slice_upper(D, z, w, n)
    if upper > 0.0:
        chained = chain_upper(D, z, w, n)
        if chained < upper:
            upper, upper_method = chained, "chain"

    if lower > upper:
        if lower - upper > BRACKET_ROUNDING * (1.0 + upper):
            raise BracketError(f"Lower bound {lower!r} exceeds upper bound {upper!r}")
        logger.warning(f"Bounds differ by rounding only ({lower - upper:.2e}); reporting upper = lower")
        upper = lower
    logger.debug(f"Bracket [{lower:.9g}, {upper:.9g}] via {lower_method} / {upper_method}")
    return DistanceBracket(lower=lower, upper=upper, lower_method=lower_method, upper_method=upper_method)


def ball_probe(D: DomainSpec, z0, eps: float, z) -> BallVerdict:
    """
    Decide membership of z in the closed Kobayashi ball of radius eps at z0.

    Returns:
        certified_in if upper <= eps, certified_out if lower > eps,
        unknown otherwise
    """
    bracket = distance_bracket(D, z0, z)
    if bracket.upper <= eps:
        return "certified_in"
    if bracket.lower > eps:
        return "certified_out"
    logger.debug(f"Ball probe undecided: [{bracket.lower:.6g}, {bracket.upper:.6g}] vs {eps}")
    return "unknown"


def exhaustion_curve(D: DomainSpec, z, w, R_list: Sequence[float]) -> List[ExhaustionRow]:
    """
    Lower bounds on the box truncations D_R, for increasing R.

    Truncations increase to D, so the bounds are non-increasing in R and
    stay above cara_lower(D, z, w).

    Raises:
        DomainError: If the witness is outside the smallest box
        NotInteriorError: If z or w is not interior to the smallest truncation
    """
    rows = []
    for R in sorted(float(r) for r in R_list):
        rows.append(ExhaustionRow(R=R, lower=cara_lower(truncate(D, R), z, w)))
    values = [row.lower for row in rows]
    if any(b > a * (1 + 1e-12) + 1e-15 for a, b in zip(values, values[1:])):
        logger.warning(f"Exhaustion curve is not monotone: {values}")
    return rows
