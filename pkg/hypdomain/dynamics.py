"""
Iteration of split holomorphic self-maps f(z, w) = (phi(z), psi(z, w)) of
D = D' x C^m, orbit classification and fixed-point search on D'.

Maps act in split coordinates: the first k variables belong to the
hyperbolic factor, the last m are flat.
"""
import cmath
import logging
import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from .decompose import Decomposition, complex_rank
from .domain import DomainSpec, HalfSpace, as_point, classify_point, is_interior, require_interior
from .errors import DomainError, MapEvaluationError, MapSpecError
from .mapexpr import MapExpr, add, exp, parse_expr, var
from .schemas import MapFile, OrbitSummary
from .utils import complex_to_pairs

logger = logging.getLogger(__name__)

ESCAPE_NORM = 1e8
BOUNDARY_ESCAPE = 1e-8
BOUNDARY_RUN = 8
PERIOD_TOL = 1e-9
PERIOD_REPEATS = 3
CONVERGE_TOL = 1e-10
MIN_RECORD = 16
FIXED_POINT_TOL = 1e-8
DAMPING = (1.0, 0.5, 0.25)

# log(i pi), principal value ln(pi) + i pi/2
PERIOD_TWO_W0 = cmath.log(1j * math.pi)


@dataclass(frozen=True, eq=False)
class SelfMap:
    """Split map: phi uses only the first k variables, psi may use all."""
    k: int
    m: int
    phi: Tuple[MapExpr, ...]
    psi: Tuple[MapExpr, ...]

    @property
    def dim(self) -> int:
        return self.k + self.m

    def __call__(self, p) -> np.ndarray:
        p = as_point(p, self.dim)
        return np.array([e.evaluate(p) for e in self.phi + self.psi], dtype=np.complex128)

    def factor_map(self, z) -> np.ndarray:
        """phi alone, as a map of the hyperbolic factor."""
        z = as_point(z, self.k)
        return np.array([e.evaluate(z) for e in self.phi], dtype=np.complex128)


def build_map(spec: Union[MapFile, dict], decomposition: Optional[Decomposition] = None) -> SelfMap:
    """
    Build and statically check a split self-map.

    Args:
        spec: MapFile or its JSON dict
        decomposition: When given, k and m must match it

    Returns:
        SelfMap

    Raises:
        MapSpecError: Ill-formed expressions, wrong counts, phi depending on
            a flat variable, or a dimension mismatch with the decomposition
    """
    if not isinstance(spec, MapFile):
        try:
            spec = MapFile.model_validate(spec)
        except Exception as e:
            raise MapSpecError(f"Invalid map spec: {e}") from e
    k, m = spec.k, spec.m
    if len(spec.phi) != k:
        raise MapSpecError(f"phi has {len(spec.phi)} components, expected k={k}")
    if len(spec.psi) != m:
        raise MapSpecError(f"psi has {len(spec.psi)} components, expected m={m}")
    phi = tuple(parse_expr(node, f"phi[{i}]") for i, node in enumerate(spec.phi))
    psi = tuple(parse_expr(node, f"psi[{i}]") for i, node in enumerate(spec.psi))
    for i, e in enumerate(phi):
        bad = sorted(j for j in e.variables() if j >= k)
        if bad:
            raise MapSpecError(f"phi[{i}] references flat variable(s) {bad}; phi may use only z_0..z_{k - 1}")
    for i, e in enumerate(psi):
        bad = sorted(j for j in e.variables() if j >= k + m)
        if bad:
            raise MapSpecError(f"psi[{i}] references variable(s) {bad} beyond dimension {k + m}")
    if decomposition is not None and (decomposition.k, decomposition.m) != (k, m):
        raise MapSpecError(
            f"Map has (k, m) = ({k}, {m}) but the domain splits as ({decomposition.k}, {decomposition.m})"
        )
    return SelfMap(k=k, m=m, phi=phi, psi=psi)


def exp_shift_map(k: int, m: int) -> SelfMap:
    """
    (z, w', w) -> (z, w', exp(w) + w) on D' x C^(m-1) x C.

    It has no fixed point (exp never vanishes) but w0 = log(i pi) has
    period 2: exp(w0) = i pi and exp(w0 + i pi) = -i pi.

    Raises:
        MapSpecError: If m = 0
    """
    if m < 1:
        raise MapSpecError("The counterexample map needs at least one flat variable")
    last = k + m - 1
    phi = tuple(var(j) for j in range(k))
    psi = tuple(var(j) for j in range(k, last)) + (add(exp(var(last)), var(last)),)
    return SelfMap(k=k, m=m, phi=phi, psi=psi)


def split_domain(decomposition: Decomposition) -> DomainSpec:
    """D in split coordinates: the factor's constraints padded with flat zeros."""
    factor = decomposition.factor
    pad = np.zeros(decomposition.m, dtype=np.complex128)
    halfspaces = tuple(
        HalfSpace.from_coeffs(np.concatenate([h.functional.coeffs, pad]), h.threshold)
        for h in factor.halfspaces
    )
    witness = np.concatenate([factor.witness, pad])
    return DomainSpec(decomposition.k + decomposition.m, halfspaces, witness)


def counterexample_map(decomposition: Decomposition) -> Tuple[SelfMap, np.ndarray]:
    """
    The fixed-point-free map with a period-2 point, for a non-hyperbolic D.

    Returns:
        (map in split coordinates, base point (z*, 0, ..., w0) in split coordinates)
    """
    f = exp_shift_map(decomposition.k, decomposition.m)
    base = np.concatenate([
        decomposition.factor.witness,
        np.zeros(decomposition.m - 1, dtype=np.complex128),
        [PERIOD_TWO_W0],
    ])
    return f, base


@dataclass(frozen=True, eq=False)
class OrbitRecord:
    """Iterates p, f(p), ..., with per-iterate slack and sup-norm."""
    points: np.ndarray
    slacks: np.ndarray
    norms: np.ndarray
    left_domain: bool = False
    overflowed: bool = False
    summary: Optional[OrbitSummary] = None

    def __len__(self) -> int:
        return self.points.shape[0]


def _sup_norm(p: np.ndarray) -> float:
    return float(np.max(np.abs(p))) if p.size else 0.0


def iterate(f: SelfMap, p, n: int, D: DomainSpec) -> OrbitRecord:
    """
    Record up to n iterates of f starting at p.

    Stops early when an iterate leaves D (the map is not a self-map on this
    orbit), when the sup-norm passes ESCAPE_NORM, or when evaluation
    overflows. The record is classified when long enough.

    Raises:
        NotInteriorError: If p is not interior
        MapEvaluationError: Division by zero or log of zero
    """
    if f.dim != D.dim:
        raise DomainError(f"Map dimension {f.dim} does not match domain dimension {D.dim}")
    p = require_interior(D, p, "seed")
    points = [p]
    slacks = [classify_point(D, p).slack]
    left = overflowed = False
    for step in range(n):
        try:
            q = f(points[-1])
        except OverflowError:
            overflowed = True
            logger.info(f"Evaluation overflowed at step {step + 1}; treating as escape")
            break
        pc = classify_point(D, q)
        if pc.tag == "exterior":
            left = True
            logger.warning(f"Iterate {step + 1} left the domain (slack {pc.slack:.3e}); not a self-map on this orbit")
            break
        points.append(q)
        slacks.append(pc.slack)
        if _sup_norm(q) > ESCAPE_NORM:
            break
    pts = np.array(points)
    record = OrbitRecord(
        points=pts,
        slacks=np.array(slacks, dtype=float),
        norms=np.array([_sup_norm(x) for x in pts]),
        left_domain=left,
        overflowed=overflowed,
    )
    if len(record) >= MIN_RECORD or overflowed or record.norms.max() > ESCAPE_NORM:
        record = replace(record, summary=classify_orbit(record, D))
    return record


def _earliest_period(points: np.ndarray, norms: np.ndarray, max_q: int) -> Optional[Tuple[int, int]]:
    """Minimal q with PERIOD_REPEATS consecutive repeats; returns (q, start)."""
    for q in range(1, max_q + 1):
        gaps = np.max(np.abs(points[q:] - points[:-q]), axis=1)
        ok = gaps <= PERIOD_TOL * (1.0 + norms[:-q])
        need = PERIOD_REPEATS * q
        run = 0
        for t, flag in enumerate(ok):
            run = run + 1 if flag else 0
            if run >= need:
                return q, t - need + 1
    return None


def classify_orbit(rec: OrbitRecord, D: DomainSpec) -> OrbitSummary:
    """
    Heuristic orbit class: escaping, periodic(q), converging(limit) or undecided.

    Rules, in order:
      1. escaping if evaluation overflowed or the sup-norm exceeds ESCAPE_NORM;
      2. escaping if the last BOUNDARY_RUN slacks are below BOUNDARY_ESCAPE
         (relative): the orbit runs into the boundary;
      3. converging if the last step is below CONVERGE_TOL (relative);
      4. periodic(q) for the minimal q <= n/4 whose window repeats within
         PERIOD_TOL over PERIOD_REPEATS consecutive periods;
      5. escaping if norms increase strictly over the second half without the
         steps shrinking below half their size (drift to infinity);
      6. undecided.

    Raises:
        DomainError: If the record is too short and shows no norm escape
    """
    pts, norms, slacks = rec.points, rec.norms, rec.slacks
    L = len(rec)
    base = dict(length=L, left_domain=rec.left_domain, overflowed=rec.overflowed)

    if rec.overflowed or norms.max() > ESCAPE_NORM:
        return OrbitSummary(classification="escaping",
                            evidence={"rule": "norm", "max_norm": float(norms.max())}, **base)
    if L < MIN_RECORD:
        raise DomainError(f"Orbit record has {L} points; at least {MIN_RECORD} are needed")

    tail = slice(L - BOUNDARY_RUN, L)
    if np.all(slacks[tail] < BOUNDARY_ESCAPE * (1.0 + norms[tail])):
        return OrbitSummary(classification="escaping",
                            evidence={"rule": "boundary", "last_slack": float(slacks[-1])}, **base)

    steps = np.max(np.abs(np.diff(pts, axis=0)), axis=1)
    if steps[-1] <= CONVERGE_TOL * (1.0 + norms[-1]):
        return OrbitSummary(classification="converging", limit=complex_to_pairs(pts[-1]),
                            evidence={"rule": "step", "last_step": float(steps[-1])}, **base)

    found = _earliest_period(pts, norms, L // 4)
    if found is not None:
        q, start = found
        gap = np.max(np.abs(pts[start + q:start + 4 * q] - pts[start:start + 3 * q]))
        return OrbitSummary(classification="periodic", period=q,
                            evidence={"rule": "window", "start": start, "max_gap": float(gap)}, **base)

    half = L // 2
    tail_norms = norms[half:]
    tail_steps = steps[half - 1:]
    if np.all(np.diff(tail_norms) > 0) and tail_steps[-1] >= 0.5 * tail_steps[0]:
        return OrbitSummary(classification="escaping",
                            evidence={"rule": "drift", "norm_growth": float(tail_norms[-1] - tail_norms[0])},
                            **base)

    logger.warning("Orbit undecided under the classification thresholds")
    return OrbitSummary(classification="undecided",
                        evidence={"last_step": float(steps[-1]), "last_slack": float(slacks[-1])}, **base)


def fixed_point_search(f: SelfMap, D_prime: DomainSpec, seeds: Iterable, budget: int = 10_000) -> Optional[np.ndarray]:
    """
    Look for a fixed point of phi on the hyperbolic factor.

    Runs averaged iteration p <- (1 - lam) p + lam phi(p) for each seed and
    each lam in DAMPING, at most ``budget`` steps per run. A hit is
    re-verified by a fresh evaluation.

    Returns:
        p with ||phi(p) - p||_inf <= FIXED_POINT_TOL, or None (inconclusive)

    Raises:
        DomainError: If D' is not hyperbolic or dimensions disagree
        NotInteriorError: If a seed is not interior
    """
    if f.k != D_prime.dim:
        raise DomainError(f"Map factor dimension {f.k} does not match D' dimension {D_prime.dim}")
    if complex_rank(D_prime) != D_prime.dim:
        raise DomainError("Fixed-point search needs a hyperbolic factor")
    seeds = [require_interior(D_prime, s, "seed") for s in seeds]
    for i, seed in enumerate(seeds):
        for lam in DAMPING:
            p = seed
            for step in range(budget):
                try:
                    fp = f.factor_map(p)
                except (OverflowError, MapEvaluationError) as e:
                    logger.debug(f"Seed {i}, lambda {lam}: evaluation failed at step {step}: {e}")
                    break
                if _sup_norm(fp - p) <= FIXED_POINT_TOL:
                    residual = _sup_norm(f.factor_map(p) - p)
                    if residual <= FIXED_POINT_TOL:
                        logger.info(f"Fixed point from seed {i} (lambda {lam}) after {step} steps, residual {residual:.2e}")
                        return p
                q = (1 - lam) * p + lam * fp
                if not is_interior(D_prime, q):
                    logger.debug(f"Seed {i}, lambda {lam}: iterate left D' at step {step}")
                    break
                p = q
    logger.info("No fixed point found within budget (inconclusive)")
    return None


def maps_into(f: SelfMap, target: DomainSpec, points: Sequence) -> bool:
    """True if phi sends every sample point into the interior of target."""
    return all(is_interior(target, f.factor_map(p)) for p in points)
