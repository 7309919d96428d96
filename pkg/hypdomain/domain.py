"""
Polyhedral convex domains in C^N.

A domain is a finite intersection of open real half-spaces {Re L(z) > a},
where L is a complex linear functional, together with a strictly interior
witness point. An empty constraint list is the whole space.
"""
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, Literal, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionError, DomainError, NotInteriorError, OutsideClosureError
from .schemas import DomainFile, HalfSpaceFile, Violation
from .utils import complex_to_pairs, pairs_to_complex

logger = logging.getLogger(__name__)

# Boundary band, relative to (1 + ||z||)
TOL_MEMBERSHIP = 1e-9


def as_point(z, dim: Optional[int] = None) -> np.ndarray:
    """
    Convert a point-like value to a 1-D complex128 array.

    Args:
        z: Sequence of numbers (complex or real) or an array
        dim: Expected length, checked when given

    Returns:
        Complex vector

    Raises:
        DimensionError: If the length differs from ``dim``
    """
    arr = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    if arr.ndim != 1:
        raise DimensionError(f"Expected a vector, got array of shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionError(f"Point has length {arr.shape[0]}, expected {dim}")
    return arr


def membership_tol(z: np.ndarray) -> float:
    """Width of the boundary band around a point."""
    return TOL_MEMBERSHIP * (1.0 + float(np.linalg.norm(z)))


@dataclass(frozen=True, eq=False)
class CFunctional:
    """Complex linear functional L(z) = sum_j c_j z_j (no conjugation)."""
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=np.complex128))
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise DimensionError("Functional coefficients must be a non-empty vector")
        if not np.all(np.isfinite(coeffs)):
            raise DomainError("Functional coefficients must be finite")
        if not np.any(coeffs != 0):
            raise DomainError("Functional has all coefficients zero")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def __call__(self, z) -> complex:
        return eval_functional(self, z)


def eval_functional(L: CFunctional, z) -> complex:
    """
    Evaluate L(z) = sum_j c_j z_j.

    Raises:
        DimensionError: If z has the wrong length
    """
    z = as_point(z, L.dim)
    return complex(np.dot(L.coeffs, z))


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """Open half-space {z : Re L(z) > threshold}."""
    functional: CFunctional
    threshold: float

    def __post_init__(self):
        threshold = float(self.threshold)
        if not math.isfinite(threshold):
            raise DomainError("Half-space threshold must be finite")
        object.__setattr__(self, "threshold", threshold)

    @classmethod
    def from_coeffs(cls, coeffs, threshold: float) -> "HalfSpace":
        return cls(CFunctional(coeffs), threshold)

    def slack(self, z) -> float:
        return eval_functional(self.functional, z).real - self.threshold


@dataclass(frozen=True, eq=False)
class DomainSpec:
    """
    The domain D = intersection of the half-spaces, in C^dim.

    Instances are not validated on construction; run ``validate`` (or build
    them through ``pipeline.parse_domain``) before relying on the witness.
    """
    dim: int
    halfspaces: Tuple[HalfSpace, ...]
    witness: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "halfspaces", tuple(self.halfspaces))
        witness = as_point(self.witness) if self.dim > 0 else np.zeros(0, dtype=np.complex128)
        witness.setflags(write=False)
        object.__setattr__(self, "witness", witness)

    @classmethod
    def from_arrays(cls, matrix, thresholds, witness) -> "DomainSpec":
        """Build a domain from an M x N coefficient matrix and M thresholds."""
        witness = as_point(witness)
        matrix = np.asarray(matrix, dtype=np.complex128).reshape(-1, witness.shape[0])
        thresholds = np.atleast_1d(np.asarray(thresholds, dtype=float))
        if matrix.shape[0] != thresholds.shape[0]:
            raise DimensionError(
                f"{matrix.shape[0]} functionals but {thresholds.shape[0]} thresholds"
            )
        halfspaces = [HalfSpace.from_coeffs(row, a) for row, a in zip(matrix, thresholds)]
        return cls(witness.shape[0], tuple(halfspaces), witness)

    @classmethod
    def whole_space(cls, dim: int) -> "DomainSpec":
        return cls(dim, (), np.zeros(dim, dtype=np.complex128))

    @property
    def n_constraints(self) -> int:
        return len(self.halfspaces)

    @property
    def is_whole_space(self) -> bool:
        return not self.halfspaces

    @cached_property
    def matrix(self) -> np.ndarray:
        """M x N coefficient matrix, one row per half-space."""
        if not self.halfspaces:
            return np.zeros((0, self.dim), dtype=np.complex128)
        return np.vstack([h.functional.coeffs for h in self.halfspaces])

    @cached_property
    def thresholds(self) -> np.ndarray:
        return np.array([h.threshold for h in self.halfspaces], dtype=float)

    @cached_property
    def row_norms(self) -> np.ndarray:
        return np.linalg.norm(self.matrix, axis=1)

    def slacks(self, points) -> np.ndarray:
        """
        Per-constraint slacks Re L_j(z) - a_j.

        Args:
            points: One point (N,) or a batch (P, N)

        Returns:
            Array (M,) or (P, M)
        """
        pts = np.asarray(points, dtype=np.complex128)
        if pts.shape[-1] != self.dim:
            raise DimensionError(f"Point has length {pts.shape[-1]}, expected {self.dim}")
        return (pts @ self.matrix.T).real - self.thresholds


@dataclass(frozen=True)
class PointClass:
    tag: Literal["interior", "boundary", "exterior"]
    slack: float


def min_slack(D: DomainSpec, z) -> float:
    """Minimum slack over all constraints; +inf for the whole space."""
    z = as_point(z, D.dim)
    if D.is_whole_space:
        return math.inf
    return float(np.min(D.slacks(z)))


def classify_point(D: DomainSpec, z) -> PointClass:
    """
    Classify z as interior, boundary or exterior.

    Args:
        D: Domain
        z: Point in C^N

    Returns:
        PointClass with the minimum slack
    """
    z = as_point(z, D.dim)
    slack = min_slack(D, z)
    tol = membership_tol(z)
    if slack > tol:
        tag = "interior"
    elif abs(slack) <= tol:
        tag = "boundary"
    else:
        tag = "exterior"
    return PointClass(tag=tag, slack=slack)


def is_interior(D: DomainSpec, z) -> bool:
    return classify_point(D, z).tag == "interior"


def in_closure(D: DomainSpec, z) -> bool:
    return classify_point(D, z).tag != "exterior"


def require_interior(D: DomainSpec, z, what: str = "point") -> np.ndarray:
    """Return z as a vector, raising NotInteriorError unless it is interior."""
    z = as_point(z, D.dim)
    pc = classify_point(D, z)
    if pc.tag != "interior":
        raise NotInteriorError(f"{what} is {pc.tag} (slack {pc.slack:.3e})")
    return z


def require_closure(D: DomainSpec, z, what: str = "point") -> np.ndarray:
    z = as_point(z, D.dim)
    pc = classify_point(D, z)
    if pc.tag == "exterior":
        raise OutsideClosureError(f"{what} lies outside the closure (slack {pc.slack:.3e})")
    return z


def euclid_boundary_dist(D: DomainSpec, z) -> float:
    """
    Radius of the largest Euclidean ball centred at z inside D.

    Raises:
        NotInteriorError: If z is not interior
    """
    z = require_interior(D, z)
    if D.is_whole_space:
        return math.inf
    return float(np.min(D.slacks(z) / D.row_norms))


def truncate(D: DomainSpec, R: float) -> DomainSpec:
    """
    Intersect D with the box |Re z_j| < R, |Im z_j| < R.

    The 4N box half-spaces are appended after D's own list, so the result
    is bounded and its constraint list extends D's.

    Raises:
        DomainError: If R <= 0 or the witness is not inside the box
    """
    if not R > 0:
        raise DomainError(f"Truncation radius must be positive, got {R}")
    w = D.witness
    if np.any(np.abs(w.real) >= R) or np.any(np.abs(w.imag) >= R):
        raise DomainError(f"Witness lies outside the box of radius {R}")

    box = []
    eye = np.eye(D.dim, dtype=np.complex128)
    for j in range(D.dim):
        e = eye[j]
        # Re z_j > -R, -Re z_j > -R, Im z_j > -R, -Im z_j > -R
        for coeffs in (e, -e, -1j * e, 1j * e):
            box.append(HalfSpace.from_coeffs(coeffs, -R))
    return DomainSpec(D.dim, D.halfspaces + tuple(box), w)


def _file_arrays(doc: DomainFile) -> Tuple[List[np.ndarray], np.ndarray, np.ndarray]:
    rows = []
    thresholds = []
    for hs in doc.halfspaces:
        c = pairs_to_complex(hs.c)
        a = float(hs.a)
        if hs.sense == "<":
            c, a = -c, -a
        rows.append(c)
        thresholds.append(a)
    return rows, np.array(thresholds, dtype=float), pairs_to_complex(doc.witness)


def _raw_violations(dim: int, rows: Sequence[np.ndarray], thresholds: np.ndarray,
                    witness: np.ndarray, min_dim: int) -> List[Violation]:
    violations = []
    if dim < min_dim:
        violations.append(Violation(field="dim", message=f"dimension {dim} < {min_dim}"))
    consistent = True
    for i, c in enumerate(rows):
        if c.shape[0] != dim:
            consistent = False
            violations.append(Violation(
                field=f"halfspaces[{i}].c",
                message=f"functional has length {c.shape[0]}, expected {dim}",
            ))
        elif not np.all(np.isfinite(c)):
            consistent = False
            violations.append(Violation(field=f"halfspaces[{i}].c", message="non-finite coefficient"))
        elif not np.any(c != 0):
            consistent = False
            violations.append(Violation(field=f"halfspaces[{i}].c", message="zero functional"))
        if not math.isfinite(thresholds[i]):
            consistent = False
            violations.append(Violation(field=f"halfspaces[{i}].a", message="non-finite threshold"))
    if witness.shape[0] != dim:
        violations.append(Violation(
            field="witness",
            message=f"witness has length {witness.shape[0]}, expected {dim}",
        ))
        return violations
    if not np.all(np.isfinite(witness)):
        violations.append(Violation(field="witness", message="non-finite witness"))
        return violations
    if consistent and rows:
        tol = membership_tol(witness)
        slacks = (np.vstack(rows) @ witness).real - thresholds
        for i, s in enumerate(slacks):
            if s <= tol:
                violations.append(Violation(
                    field=f"halfspaces[{i}]",
                    message=f"witness slack {s:.6g} ≤ tol {tol:.1e}",
                ))
    return violations


def validate(D: Union[DomainSpec, DomainFile]) -> List[Violation]:
    """
    Check a domain (or a parsed domain file) for structural problems.

    Never raises; an empty list means the domain is valid.

    Args:
        D: DomainSpec, or a DomainFile before conversion

    Returns:
        List of violations
    """
    if isinstance(D, DomainFile):
        rows, thresholds, witness = _file_arrays(D)
        return _raw_violations(D.dim, rows, thresholds, witness, min_dim=1)
    rows = [h.functional.coeffs for h in D.halfspaces]
    return _raw_violations(D.dim, rows, D.thresholds, D.witness, min_dim=0)


def domain_from_file(doc: DomainFile) -> DomainSpec:
    """Convert a file document to a DomainSpec, applying sign normalization."""
    rows, thresholds, witness = _file_arrays(doc)
    halfspaces = tuple(HalfSpace.from_coeffs(c, a) for c, a in zip(rows, thresholds))
    return DomainSpec(doc.dim, halfspaces, witness)


def domain_to_file(D: DomainSpec) -> DomainFile:
    return DomainFile(
        dim=D.dim,
        halfspaces=[
            HalfSpaceFile(c=complex_to_pairs(h.functional.coeffs), a=h.threshold)
            for h in D.halfspaces
        ],
        witness=complex_to_pairs(D.witness),
    )


def _complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def sample_interior(D: DomainSpec, count: int, rng: np.random.Generator,
                    walk: int = 3, spread: float = 10.0) -> np.ndarray:
    """
    Sample strictly interior points by hit-and-run from the witness.

    The walk runs in D intersected with the box of half-width
    ``spread * (1 + ||witness||)`` around the witness, so every chord is
    bounded and the samples stay at the witness's scale.

    Args:
        D: Domain (validated)
        count: Number of points
        rng: Random generator
        walk: Hit-and-run moves between recorded samples
        spread: Box half-width factor

    Returns:
        Array (count, N)
    """
    w = np.array(D.witness)
    half_width = spread * (1.0 + float(np.linalg.norm(w)))
    eye = np.eye(D.dim, dtype=np.complex128)
    # Re z_j, -Re z_j, Im z_j, -Im z_j each within half_width of the witness
    box = np.vstack([eye, -eye, -1j * eye, 1j * eye])
    C = np.vstack([D.matrix, box])
    a = np.concatenate([D.thresholds, (box @ w).real - half_width])

    out = np.empty((count, D.dim), dtype=np.complex128)
    p = w
    for i in range(count):
        for _ in range(walk):
            v = _complex_normal(rng, D.dim)
            v /= np.linalg.norm(v)
            s = (C @ p).real - a
            d = (C @ v).real
            pos, neg = d > 0, d < 0
            lo = float(np.max(-s[pos] / d[pos]))
            hi = float(np.min(s[neg] / -d[neg]))
            margin = 0.01 * (hi - lo)
            q = p + rng.uniform(lo + margin, hi - margin) * v
            if is_interior(D, q):
                p = q
        out[i] = p
    return out


def recession_directions(D: DomainSpec, count: int, rng: np.random.Generator,
                         max_tries: int = 200) -> np.ndarray:
    """
    Sample unit directions v with Re L_j(v) >= 0 for every constraint.

    Rays z + r v with z in the closure then stay in the closure. Candidates
    solve a random square subsystem for a target with nonnegative real part
    and pick up a random kernel component; each is checked against all
    constraints. Bounded domains yield an empty array.

    Returns:
        Array (k, N) with k <= count
    """
    N = D.dim
    if D.is_whole_space:
        v = _complex_normal(rng, (count, N))
        return v / np.linalg.norm(v, axis=1, keepdims=True)

    C = D.matrix
    M = C.shape[0]
    proj_kernel = np.eye(N) - np.linalg.pinv(C) @ C
    found = []
    for _ in range(count * max_tries):
        rows = rng.choice(M, size=min(M, N), replace=False)
        target = rng.exponential(1.0, rows.shape[0]) + 1j * rng.standard_normal(rows.shape[0])
        target *= rng.random(rows.shape[0]) < 0.8
        v = np.linalg.pinv(C[rows]) @ target + proj_kernel @ _complex_normal(rng, N)
        norm = np.linalg.norm(v)
        if norm == 0:
            continue
        v /= norm
        if np.all((C @ v).real >= -1e-12 * D.row_norms):
            found.append(v)
            if len(found) == count:
                break
    if len(found) < count:
        logger.warning(f"Found {len(found)}/{count} recession directions")
    return np.array(found, dtype=np.complex128).reshape(-1, N)
