"""
Hyperbolicity decisions and the canonical splitting D = D' x C^m.

For a polyhedral domain the complex lineality space is the common complex
kernel of the constraint functionals: a line p + C v lies in D exactly when
Re L_j(p + t v) > a_j for every t in C, which forces L_j(v) = 0 for all j.
Everything here is driven by one SVD of the coefficient matrix.
"""
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
import scipy.linalg

from .domain import DomainSpec, HalfSpace, as_point
from .errors import DomainError, RankDeficientError, RealizationError
from .schemas import ConditionEntry

logger = logging.getLogger(__name__)

# Singular values below TOL_RANK * max count as zero
TOL_RANK = 1e-10


def _normalize_phase(basis: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-modulus entry is real positive."""
    out = np.array(basis, dtype=np.complex128)
    for col in range(out.shape[1]):
        v = out[:, col]
        mags = np.abs(v)
        # first entry within rounding of the maximum, so ties resolve stably
        idx = int(np.argmax(mags >= mags.max() * (1 - 1e-12)))
        out[:, col] = v * (np.conj(v[idx]) / mags[idx])
    return out


def _split_basis(D: DomainSpec) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Orthonormal bases of the row space and of the common kernel.

    Returns:
        (row_basis N x k, kernel_basis N x m, singular values)
    """
    N = D.dim
    if D.is_whole_space:
        return (np.zeros((N, 0), dtype=np.complex128), np.eye(N, dtype=np.complex128),
                np.zeros(0))
    _, s, vh = scipy.linalg.svd(D.matrix, full_matrices=True)
    rank = int(np.sum(s > TOL_RANK * s.max()))
    logger.debug(f"Singular values {s}, rank {rank}")
    row_basis = _normalize_phase(vh[:rank].conj().T)
    kernel_basis = _normalize_phase(vh[rank:].conj().T)
    return row_basis, kernel_basis, s


def complex_rank(D: DomainSpec) -> int:
    """
    Rank over C of the coefficient matrix of D's functionals.

    Args:
        D: Domain

    Returns:
        k with 0 <= k <= N
    """
    if D.is_whole_space:
        return 0
    s = scipy.linalg.svdvals(D.matrix)
    return int(np.sum(s > TOL_RANK * s.max()))


def common_kernel(D: DomainSpec) -> np.ndarray:
    """Orthonormal basis (N x m) of the complex lineality space."""
    return _split_basis(D)[1]


@dataclass(frozen=True, eq=False)
class LineWitness:
    """A complex affine line base + C·direction contained in D."""
    base: np.ndarray
    direction: np.ndarray
    kernel_basis: np.ndarray
    residual: float

    def point(self, t: complex) -> np.ndarray:
        return self.base + complex(t) * self.direction


def contains_complex_line(D: DomainSpec) -> Optional[LineWitness]:
    """
    Find a complex affine line inside D.

    Returns:
        LineWitness when complex_rank(D) < N, None otherwise
    """
    kernel = common_kernel(D)
    if kernel.shape[1] == 0:
        return None
    v = kernel[:, 0] / np.linalg.norm(kernel[:, 0])
    residual = float(np.max(np.abs(D.matrix @ v))) if not D.is_whole_space else 0.0
    return LineWitness(base=np.array(D.witness), direction=v, kernel_basis=kernel, residual=residual)


def entire_curve(D: DomainSpec) -> Optional[Callable[[complex], np.ndarray]]:
    """Nonconstant entire curve t -> base + t v inside D, if D is not hyperbolic."""
    witness = contains_complex_line(D)
    return witness.point if witness is not None else None


@dataclass(frozen=True, eq=False)
class Decomposition:
    """
    D = D' x C^m in coordinates zeta = T z.

    T is unitary; the last m rows of T span the conjugate of the common
    kernel, so every functional of D has zero coefficients there.
    """
    k: int
    m: int
    T: np.ndarray
    factor: DomainSpec
    condition: float

    @property
    def kernel_basis(self) -> np.ndarray:
        return self.T[self.k:].conj().T

    def to_split(self, z) -> np.ndarray:
        return self.T @ as_point(z, self.T.shape[0])

    def from_split(self, zeta) -> np.ndarray:
        return self.T.conj().T @ as_point(zeta, self.T.shape[0])

    def project(self, z) -> np.ndarray:
        """First k split coordinates, a point of the factor."""
        return self.to_split(z)[: self.k]


def decompose(D: DomainSpec) -> Decomposition:
    """
    Compute the canonical splitting of D.

    The factor's functionals are D's functionals rewritten in split
    coordinates with the (numerically zero) flat coefficients dropped; its
    witness is the projected witness.

    Args:
        D: Validated domain

    Returns:
        Decomposition (k, m, T, factor)
    """
    N = D.dim
    row_basis, kernel_basis, _ = _split_basis(D)
    k = row_basis.shape[1]
    m = N - k
    if m == 0:
        # Already hyperbolic: keep the original coordinates
        T = np.eye(N, dtype=np.complex128)
        factor = D
    else:
        T = np.vstack([row_basis.conj().T, kernel_basis.conj().T])
        halfspaces = tuple(
            HalfSpace.from_coeffs(h.functional.coeffs @ row_basis, h.threshold)
            for h in D.halfspaces
        )
        factor = DomainSpec(k, halfspaces, row_basis.conj().T @ D.witness)
    condition = float(np.linalg.cond(T)) if N > 0 else 1.0
    logger.info(f"Decomposed: k={k}, m={m}, cond(T)={condition:.3g}")
    return Decomposition(k=k, m=m, T=T, factor=factor, condition=condition)


@dataclass(frozen=True, eq=False)
class Frame:
    """N separating half-spaces of D with independent functionals."""
    entries: Tuple[HalfSpace, ...]
    indices: Tuple[int, ...]
    smallest_singular_value: float

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def matrix(self) -> np.ndarray:
        return np.vstack([h.functional.coeffs for h in self.entries])

    @property
    def thresholds(self) -> np.ndarray:
        return np.array([h.threshold for h in self.entries], dtype=float)


def separating_frame(D: DomainSpec) -> Frame:
    """
    Pick N constraints of D with linearly independent functionals.

    Each pick is one of D's own constraints, so D lies inside the frame's
    intersection. Selection is QR with column pivoting on the conjugate
    transpose of the coefficient matrix.

    Raises:
        RankDeficientError: If D contains a complex line (carries the witness)
    """
    N = D.dim
    k = complex_rank(D)
    if k < N:
        witness = contains_complex_line(D)
        raise RankDeficientError(f"Complex rank {k} < {N}: D contains a complex line", witness)
    _, _, piv = scipy.linalg.qr(D.matrix.conj().T, mode="economic", pivoting=True)
    indices = tuple(sorted(int(i) for i in piv[:N]))
    sub = D.matrix[list(indices)]
    s = scipy.linalg.svdvals(sub)
    if s.min() <= TOL_RANK * scipy.linalg.svdvals(D.matrix).max():
        raise DomainError(f"Pivoted selection {indices} is numerically singular")
    logger.info(f"Separating frame: constraints {indices}, sigma_min={s.min():.3g}")
    return Frame(
        entries=tuple(D.halfspaces[i] for i in indices),
        indices=indices,
        smallest_singular_value=float(s.min()),
    )


@dataclass(frozen=True, eq=False)
class BoundedRealization:
    """
    F(z) = (1 / (L_j(z) - a_j + 1))_j, mapping D into the closed unit polydisc.

    ``shift`` holds a_j - 1.
    """
    frame: Frame
    shift: np.ndarray

    def apply(self, z) -> np.ndarray:
        """
        Evaluate F at one point (N,) or a batch (P, N).

        Raises:
            RealizationError: If some Re L_j(z) - a_j < -tol
        """
        pts = np.asarray(z, dtype=np.complex128)
        values = pts @ self.frame.matrix.T
        slack = values.real - self.frame.thresholds
        tol = 1e-9 * (1.0 + np.linalg.norm(pts, axis=-1))
        if np.any(slack.min(axis=-1) < -tol):
            raise RealizationError("Point lies outside the closure of the frame")
        return 1.0 / (values - self.shift)

    def invert(self, u) -> np.ndarray:
        """
        Solve L_j(z) = 1/u_j + a_j - 1 for z.

        Raises:
            RealizationError: If some u_j = 0 (a point at infinity)
        """
        u = np.asarray(u, dtype=np.complex128)
        if np.any(u == 0):
            raise RealizationError("Coordinate u_j = 0 corresponds to a point at infinity")
        rhs = 1.0 / u + self.shift
        return np.linalg.solve(self.frame.matrix, rhs.T).T


def realize_bounded(frame: Frame) -> BoundedRealization:
    return BoundedRealization(frame=frame, shift=frame.thresholds - 1.0)


@dataclass(frozen=True)
class FacetLines:
    index: int
    dimension: int
    direction: Optional[np.ndarray]


def facet_complex_lines(D: DomainSpec, j: int) -> FacetLines:
    """
    Dimension of the complex lines through the face {Re L_j = a_j} of D.

    A complex line inside the face must annihilate every constraint
    functional, so the answer is the dimension of the common kernel.

    Raises:
        DomainError: If j is not a constraint index
    """
    if not 0 <= j < D.n_constraints:
        raise DomainError(f"Constraint index {j} out of range 0..{D.n_constraints - 1}")
    kernel = common_kernel(D)
    m = kernel.shape[1]
    direction = kernel[:, 0] if m > 0 else None
    return FacetLines(index=j, dimension=m, direction=direction)


@dataclass(frozen=True, eq=False)
class HyperbolicityReport:
    hyperbolic: bool
    decomposition: Decomposition
    line_witness: Optional[LineWitness]
    frame: Optional[Frame]
    realization: Optional[BoundedRealization]
    facets: Tuple[FacetLines, ...]

    @property
    def k(self) -> int:
        return self.decomposition.k

    @property
    def m(self) -> int:
        return self.decomposition.m

    @property
    def bergman_admissible(self) -> bool:
        # A flat factor C^m, m >= 1, carries no square-integrable holomorphic functions
        return self.hyperbolic


def hyperbolicity_report(D: DomainSpec) -> HyperbolicityReport:
    """
    Decide hyperbolicity and collect the certificates.

    Args:
        D: Validated domain

    Returns:
        Report with a frame and realization when hyperbolic, a line
        witness otherwise
    """
    decomposition = decompose(D)
    hyperbolic = decomposition.k == D.dim
    line = None
    frame = None
    realization = None
    if hyperbolic:
        frame = separating_frame(D)
        realization = realize_bounded(frame)
    else:
        line = contains_complex_line(D)
    facets = tuple(facet_complex_lines(D, j) for j in range(D.n_constraints))
    logger.info(f"Hyperbolic: {hyperbolic} (k={decomposition.k}, N={D.dim})")
    return HyperbolicityReport(
        hyperbolic=hyperbolic,
        decomposition=decomposition,
        line_witness=line,
        frame=frame,
        realization=realization,
        facets=facets,
    )


def equivalence_table(report: HyperbolicityReport) -> List[ConditionEntry]:
    """
    The eleven equivalent conditions, all equal to the verdict.

    Each entry says whether it is backed by a computed certificate, by the
    equivalence theorem alone, or by an explicit counterexample map.
    """
    h = report.hyperbolic
    cert_or_eq = "certificate" if h else "equivalence"
    line = "complex line in the kernel direction"
    rows = [
        ("biholomorphic_to_bounded", cert_or_eq, "bounded realization F" if h else None),
        ("hyperbolic", "certificate", "separating frame" if h else line),
        ("taut", "equivalence", None),
        ("complete_hyperbolic", "equivalence", None),
        ("no_entire_curves", "equivalence" if h else "certificate", None if h else "t -> base + t v"),
        ("no_complex_lines", "certificate", "rank N" if h else line),
        ("separating_frame", "certificate", "pivoted selection" if h else "rank deficit"),
        ("peak_antipeak_at_infinity", cert_or_eq, "peak_max / antipeak_log" if h else None),
        ("bergman_metric", "equivalence", None),
        ("bergman_complete", "equivalence", None),
        ("fixed_point_property", "equivalence" if h else "counterexample",
         None if h else "(z, w) -> (z, exp(w) + w) has period 2, no fixed point"),
    ]
    return [
        ConditionEntry(condition=name, holds=h, certified_by=how, detail=detail)
        for name, how, detail in rows
    ]
