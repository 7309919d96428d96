"""
Orchestration behind the command line: parsing domain and map files,
running each analysis and writing its JSON report and CSV tables.

Every cmd_* function returns (ReportDoc, exit code) and raises
HypDomainError subclasses on bad input; the CLI maps those to exit code 1.
"""
import json
import logging
import os
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from .decompose import (
    Decomposition,
    decompose,
    entire_curve,
    equivalence_table,
    hyperbolicity_report,
    separating_frame,
)
from .domain import DomainSpec, domain_from_file, domain_to_file, is_interior, recession_directions, sample_interior, validate
from .dynamics import (
    MIN_RECORD,
    SelfMap,
    build_map,
    counterexample_map,
    fixed_point_search,
    iterate,
    split_domain,
)
from .errors import DomainError, DomainFileError
from .metrics import DEFAULT_CHAIN_STEPS, distance_bracket, exhaustion_curve
from .potentials import scan_ray
from .schemas import (
    CertificateBlock,
    DistanceRow,
    DomainFile,
    MapFile,
    RealizationStats,
    ReportDoc,
    VerdictBlock,
)
from .utils import (
    clean_filename,
    complex_to_pairs,
    flatten_point,
    point_columns,
    read_text,
    save_report,
    sha256_text,
    write_csv,
)

logger = logging.getLogger(__name__)

__version__ = "0.1.0"

DEFAULT_RADII = tuple(np.logspace(0, 8, 33))
DEFAULT_SAMPLES = 200
CURVE_SAMPLES = (0, 1, -1, 1j, -1j, 10 + 10j, -1e3, 1e3j)


def _loc_path(loc: Sequence) -> str:
    """('halfspaces', 0, 'c') -> 'halfspaces[0].c'"""
    out = ""
    for part in loc:
        if isinstance(part, int):
            out += f"[{part}]"
        else:
            out += f".{part}" if out else str(part)
    return out or "<root>"


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DomainFileError(f"Invalid {what} JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e


def parse_domain(text: str) -> DomainSpec:
    """
    Parse and validate a domain file.

    "<" half-spaces are normalized to the "Re L > a" form.

    Args:
        text: JSON text of the domain file

    Returns:
        Validated DomainSpec

    Raises:
        DomainFileError: Bad JSON, schema violation, or failed validation,
            with one field-precise message per problem
    """
    data = _load_json(text, "domain")
    if isinstance(data, dict) and "witness" not in data:
        raise DomainFileError("witness required")
    try:
        doc = DomainFile.model_validate(data)
    except ValidationError as e:
        details = [f"{_loc_path(err['loc'])}: {err['msg']}" for err in e.errors()]
        raise DomainFileError("Domain file does not match the schema", details) from e
    violations = validate(doc)
    if violations:
        raise DomainFileError("Invalid domain", [f"{v.field}: {v.message}" for v in violations])
    return domain_from_file(doc)


def emit_domain(D: DomainSpec) -> str:
    """Domain file text for D, accepted back by parse_domain."""
    return domain_to_file(D).model_dump_json(indent=2)


def parse_map(text: str, decomposition: Optional[Decomposition] = None) -> SelfMap:
    """
    Parse a map file into a SelfMap.

    Raises:
        DomainFileError: Bad JSON or schema violation
        MapSpecError: Ill-formed expressions or broken split structure
    """
    data = _load_json(text, "map")
    try:
        doc = MapFile.model_validate(data)
    except ValidationError as e:
        details = [f"{_loc_path(err['loc'])}: {err['msg']}" for err in e.errors()]
        raise DomainFileError("Map file does not match the schema", details) from e
    return build_map(doc, decomposition)


def _new_report(command: str, text: str) -> ReportDoc:
    return ReportDoc(version=__version__, command=command, input_sha256=sha256_text(text))


def _output_path(output_dir: Optional[str], domain_path: str, suffix: str) -> Optional[str]:
    if not output_dir:
        return None
    return os.path.join(output_dir, f"{clean_filename(domain_path)}_{suffix}")


def _finish(report: ReportDoc, output_dir: Optional[str], domain_path: str) -> ReportDoc:
    path = _output_path(output_dir, domain_path, f"{report.command}.json")
    if path:
        save_report(report, path)
        logger.info(f"📁 Report saved to: {path}")
    return report


def _realization_stats(realization, D: DomainSpec, rng: np.random.Generator, samples: int) -> RealizationStats:
    pts = sample_interior(D, samples, rng)
    images = realization.apply(pts)
    back = realization.invert(images)
    err = np.linalg.norm(back - pts, axis=1) / (1.0 + np.linalg.norm(pts, axis=1))
    return RealizationStats(
        samples=samples,
        max_modulus=float(np.max(np.abs(images))),
        max_roundtrip_error=float(np.max(err)),
    )


def cmd_analyze(domain_path: str, output_dir: Optional[str] = None, seed: int = 0,
                samples: int = DEFAULT_SAMPLES, orbit_steps: int = 24) -> Tuple[ReportDoc, int]:
    """
    Hyperbolicity verdict with certificates.

    Hyperbolic domains get the frame, bounded-realization statistics on
    sampled interior points and peak/antipeak scans along one escaping ray.
    Non-hyperbolic domains get the complex-line witness, a check of the
    entire curve along it and the period-2 orbit of the fixed-point-free
    counterexample map.

    Returns:
        (report, 0 if hyperbolic else 2)
    """
    text = read_text(domain_path)
    D = parse_domain(text)
    rng = np.random.default_rng(seed)
    hr = hyperbolicity_report(D)
    report = _new_report("analyze", text)
    report.verdict = VerdictBlock(
        hyperbolic=hr.hyperbolic,
        k=hr.k,
        m=hr.m,
        bergman_admissible=hr.bergman_admissible,
        transform_condition=hr.decomposition.condition,
    )
    report.conditions = equivalence_table(hr)

    if hr.hyperbolic:
        report.certificates.append(CertificateBlock(
            kind="frame",
            frame_indices=list(hr.frame.indices),
            smallest_singular_value=hr.frame.smallest_singular_value,
        ))
        if samples > 0:
            report.realization = _realization_stats(hr.realization, D, rng, samples)
        directions = recession_directions(D, 1, rng)
        if len(directions):
            for kind in ("peak_max", "antipeak_log"):
                report.potential_scans.append(scan_ray(kind, hr.frame, D.witness, directions[0], DEFAULT_RADII))
        else:
            report.notes.append("bounded domain: no escaping ray to scan")
    else:
        line = hr.line_witness
        report.certificates.append(CertificateBlock(
            kind="line",
            line_base=complex_to_pairs(line.base),
            line_direction=complex_to_pairs(line.direction),
            residual=line.residual,
        ))
        curve = entire_curve(D)
        inside = all(is_interior(D, curve(t)) for t in CURVE_SAMPLES)
        report.notes.append(f"entire curve t -> base + t v stays interior on {len(CURVE_SAMPLES)} samples: {inside}")
        f, base = counterexample_map(hr.decomposition)
        rec = iterate(f, base, orbit_steps, split_domain(hr.decomposition))
        if rec.summary is not None:
            report.orbits.append(rec.summary)

    logger.info(f"{'✅' if hr.hyperbolic else '⚠️'} Verdict for {domain_path}: "
                f"hyperbolic={hr.hyperbolic}, k={hr.k}, m={hr.m}")
    return _finish(report, output_dir, domain_path), 0 if hr.hyperbolic else 2


def cmd_distance(domain_path: str, z, w, grid: int = 0, seed: int = 0,
                 chain_steps: int = DEFAULT_CHAIN_STEPS,
                 output_dir: Optional[str] = None) -> Tuple[ReportDoc, int]:
    """
    Distance bracket for (z, w), optionally plus brackets from z to a grid
    of sampled interior points (written as CSV).

    Raises:
        NotInteriorError: If z or w is not interior
    """
    text = read_text(domain_path)
    D = parse_domain(text)
    report = _new_report("distance", text)
    pairs = [(np.asarray(z, dtype=np.complex128), np.asarray(w, dtype=np.complex128))]
    if grid > 0:
        rng = np.random.default_rng(seed)
        pairs += [(pairs[0][0], p) for p in sample_interior(D, grid, rng)]
    for a, b in pairs:
        bracket = distance_bracket(D, a, b, chain_steps)
        report.distances.append(DistanceRow(z=complex_to_pairs(a), w=complex_to_pairs(b), bracket=bracket))

    first = report.distances[0].bracket
    logger.info(f"📏 k_D in [{first.lower:.9g}, {first.upper:.9g}] ({first.lower_method} / {first.upper_method})")
    csv_path = _output_path(output_dir, domain_path, "distance_grid.csv")
    if grid > 0 and csv_path:
        header = point_columns("z", D.dim) + point_columns("w", D.dim) + [
            "lower", "upper", "lower_method", "upper_method"]
        rows = [
            flatten_point(a) + flatten_point(b) + [row.bracket.lower, row.bracket.upper,
                                                   row.bracket.lower_method, row.bracket.upper_method]
            for (a, b), row in zip(pairs, report.distances)
        ]
        write_csv(csv_path, header, rows)
        logger.info(f"📁 Grid saved to: {csv_path}")
    return _finish(report, output_dir, domain_path), 0


def cmd_peaks(domain_path: str, base=None, direction=None, random_rays: int = 0, seed: int = 0,
              radii: Sequence[float] = DEFAULT_RADII,
              output_dir: Optional[str] = None) -> Tuple[ReportDoc, int]:
    """
    Scan the three potentials along an explicit ray or random escaping rays.

    Raises:
        RankDeficientError: If D is not hyperbolic (no separating frame)
        OutsideClosureError: If a ray leaves the closure
    """
    text = read_text(domain_path)
    D = parse_domain(text)
    frame = separating_frame(D)
    report = _new_report("peaks", text)

    rays: List[Tuple[np.ndarray, np.ndarray]] = []
    if random_rays > 0:
        rng = np.random.default_rng(seed)
        rays = [(np.array(D.witness), v) for v in recession_directions(D, random_rays, rng)]
    else:
        if direction is None:
            raise DomainError("cmd_peaks needs a direction or a number of random rays")
        start = np.array(D.witness) if base is None else np.asarray(base, dtype=np.complex128)
        rays = [(start, np.asarray(direction, dtype=np.complex128))]

    csv_rows = []
    for i, (start, v) in enumerate(rays):
        for kind in ("peak_sum", "peak_max", "antipeak_log"):
            scan = scan_ray(kind, frame, start, v, radii)
            report.potential_scans.append(scan)
            logger.info(f"   ray {i} {kind}: {scan.verdict}"
                        + (f" ({scan.limit_value:.6g})" if scan.limit_value is not None else ""))
            if scan.note:
                logger.warning(f"ray {i}: {scan.note}")
                if scan.note not in report.notes:
                    report.notes.append(scan.note)
            csv_rows += [[i, kind, r, value, scan.verdict] for r, value in scan.samples]

    csv_path = _output_path(output_dir, domain_path, "peaks.csv")
    if csv_path:
        write_csv(csv_path, ["ray", "kind", "r", "value", "verdict"], csv_rows)
        logger.info(f"📁 Samples saved to: {csv_path}")
    return _finish(report, output_dir, domain_path), 0


def cmd_iterate(domain_path: str, map_path: str, start=None, n: int = 24, trace: bool = False,
                output_dir: Optional[str] = None) -> Tuple[ReportDoc, int]:
    """
    Iterate a split self-map and classify the orbit.

    The map acts in split coordinates zeta = T z; ``start`` is given in the
    domain's own coordinates (the witness by default) and converted.

    Raises:
        MapSpecError: If the map does not fit the domain's splitting
        DomainError: If the orbit is too short to classify
    """
    text = read_text(domain_path)
    D = parse_domain(text)
    decomposition = decompose(D)
    f = parse_map(read_text(map_path), decomposition)
    D_split = split_domain(decomposition)
    p = decomposition.to_split(D.witness if start is None else start)
    report = _new_report("iterate", text)

    rec = iterate(f, p, n, D_split)
    if rec.summary is None:
        reason = " (an iterate left the domain)" if rec.left_domain else ""
        raise DomainError(f"Orbit stopped after {len(rec)} points{reason}; "
                          f"at least {MIN_RECORD} are needed to classify")
    report.orbits.append(rec.summary)
    logger.info(f"🔁 Orbit: {rec.summary.classification}"
                + (f" (period {rec.summary.period})" if rec.summary.period else ""))

    if decomposition.m == 0 and decomposition.k > 0:
        fp = fixed_point_search(f, D_split, [p])
        if fp is None:
            report.notes.append("fixed_point_search: inconclusive within budget")
        else:
            residual = float(np.max(np.abs(f.factor_map(fp) - fp)))
            report.notes.append(f"fixed point {complex_to_pairs(fp)} with residual {residual:.3e}")

    csv_path = _output_path(output_dir, domain_path, "orbit.csv")
    if trace and csv_path:
        header = ["step"] + point_columns("p", f.dim) + ["slack", "norm"]
        rows = [
            [i] + flatten_point(q) + [float(s), float(nrm)]
            for i, (q, s, nrm) in enumerate(zip(rec.points, rec.slacks, rec.norms))
        ]
        write_csv(csv_path, header, rows)
        logger.info(f"📁 Trace saved to: {csv_path}")
    return _finish(report, output_dir, domain_path), 0


def cmd_exhaust(domain_path: str, z, w, R_list: Sequence[float],
                output_dir: Optional[str] = None) -> Tuple[ReportDoc, int]:
    """Lower bounds on box truncations D_R for each R, as a monotone curve."""
    text = read_text(domain_path)
    D = parse_domain(text)
    report = _new_report("exhaust", text)
    report.exhaustion = exhaustion_curve(D, z, w, R_list)
    for row in report.exhaustion:
        logger.debug(f"R={row.R:g}: lower={row.lower:.9g}")

    csv_path = _output_path(output_dir, domain_path, "exhaust.csv")
    if csv_path:
        write_csv(csv_path, ["R", "lower", "method"],
                  [[row.R, row.lower, row.method] for row in report.exhaustion])
        logger.info(f"📁 Curve saved to: {csv_path}")
    return _finish(report, output_dir, domain_path), 0
