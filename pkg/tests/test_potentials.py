import numpy as np
import pytest

from hypdomain.decompose import separating_frame
from hypdomain.domain import sample_interior
from hypdomain.errors import DomainError, NotInteriorError, OutsideClosureError
from hypdomain.potentials import (
    SUM_FORM_NOTE,
    TOL_QUADRATURE,
    antipeak_log,
    peak_max,
    peak_sum,
    scan_ray,
    submean_check,
)

RADII = np.logspace(0, 8, 33)


@pytest.fixture
def quadrant_frame(quadrant):
    return separating_frame(quadrant)


def test_values_at_witness(quadrant_frame):
    z = [1.0, 1.0]
    assert peak_sum(quadrant_frame, z) == pytest.approx(-1.0)
    assert peak_max(quadrant_frame, z) == pytest.approx(-0.5)
    assert antipeak_log(quadrant_frame, z) == pytest.approx(-2 * np.log(2))


def test_negative_on_closure(rng, quadrant_frame, quadrant):
    pts = np.vstack([sample_interior(quadrant, 200, rng), [[0, 0], [0, 5j]]])
    assert np.all(peak_sum(quadrant_frame, pts) < 0)
    assert np.all(peak_max(quadrant_frame, pts) < 0)
    assert np.all(antipeak_log(quadrant_frame, pts) <= 0)


def test_max_form_dominates_the_average(rng, random_hyperbolic):
    for D in random_hyperbolic:
        frame = separating_frame(D)
        pts = sample_interior(D, 100, rng)
        assert np.all(peak_max(frame, pts) >= peak_sum(frame, pts) / D.dim - 1e-12)


def test_outside_closure_raises(quadrant_frame):
    with pytest.raises(OutsideClosureError):
        peak_max(quadrant_frame, [-1.0, 1.0])


class TestQuadrantRay:
    """The ray z = (1, 1 + t i) escapes through the imaginary direction."""

    base = np.array([1.0, 1.0])
    direction = np.array([0.0, 1j])

    def test_peak_max_tends_to_zero(self, quadrant_frame):
        report = scan_ray("peak_max", quadrant_frame, self.base, self.direction, RADII)
        assert report.verdict == "limit_zero"
        assert report.note is None

    def test_peak_sum_stays_at_minus_half(self, quadrant_frame):
        report = scan_ray("peak_sum", quadrant_frame, self.base, self.direction, RADII)
        assert report.verdict == "limit_other"
        assert report.limit_value == pytest.approx(-0.5, abs=1e-4)
        assert report.note == SUM_FORM_NOTE
        assert "open question" in report.note

    def test_antipeak_tends_to_minus_infinity(self, quadrant_frame):
        report = scan_ray("antipeak_log", quadrant_frame, self.base, self.direction, RADII)
        assert report.verdict == "limit_minus_infinity"
        # -log|2 + t i| ~ -log t
        assert report.fitted_rate == pytest.approx(1.0, abs=0.05)
        assert np.log10(RADII[-1] / RADII[0]) >= 6
        assert report.samples[-1][1] < report.samples[0][1] - 5

    def test_samples_are_recorded(self, quadrant_frame):
        report = scan_ray(peak_max, quadrant_frame, self.base, self.direction, RADII)
        assert report.kind == "peak_max"
        assert [r for r, _ in report.samples] == pytest.approx(list(RADII))


def test_random_escaping_rays(rng, make_domain):
    rays = 0
    for _ in range(5):
        dim = int(rng.integers(1, 4))
        frame = None
        while frame is None or frame.smallest_singular_value < 0.2:
            D = make_domain(rng, dim, dim, dim)
            frame = separating_frame(D)
        for _ in range(4):
            # every frame functional grows with real speed in [0.5, 1]
            target = rng.uniform(0.5, 1.0, dim) + 1j * rng.uniform(-1.0, 1.0, dim)
            v = np.linalg.solve(frame.matrix, target)
            assert np.all((D.matrix @ v).real > 0)
            assert scan_ray("peak_max", frame, D.witness, v, RADII).verdict == "limit_zero"
            antipeak = scan_ray("antipeak_log", frame, D.witness, v, RADII)
            assert antipeak.verdict == "limit_minus_infinity"
            assert antipeak.samples[-1][1] < antipeak.samples[0][1] - 5
            rays += 1
    assert rays == 20


def test_scan_ray_rejects_bad_radii(quadrant_frame):
    with pytest.raises(DomainError):
        scan_ray("peak_max", quadrant_frame, [1, 1], [0, 1j], [1.0, 1.0])
    with pytest.raises(DomainError):
        scan_ray("no_such_kind", quadrant_frame, [1, 1], [0, 1j], RADII)


def test_ray_leaving_closure(quadrant_frame):
    with pytest.raises(OutsideClosureError):
        scan_ray("peak_max", quadrant_frame, [1, 1], [-1, 0], RADII)


@pytest.mark.parametrize("kind", ["peak_sum", "peak_max", "antipeak_log"])
def test_submean_property(rng, random_hyperbolic, kind):
    checked = 0
    for D in random_hyperbolic[:10]:
        frame = separating_frame(D)
        for center in sample_interior(D, 10, rng):
            v = rng.standard_normal(D.dim) + 1j * rng.standard_normal(D.dim)
            v /= np.linalg.norm(v)
            slack = (frame.matrix @ center).real - frame.thresholds
            radius = 0.5 * float(np.min(slack / np.abs(frame.matrix @ v)))
            assert submean_check(kind, frame, center, v, radius) >= -TOL_QUADRATURE
            checked += 1
    assert checked == 100


def test_antipeak_is_pluriharmonic_on_discs(quadrant_frame):
    residual = submean_check("antipeak_log", quadrant_frame, [2, 2 + 1j], [1, 1j], 0.5)
    assert residual == pytest.approx(0.0, abs=1e-10)


def test_submean_rejects_disc_leaving_domain(quadrant_frame):
    with pytest.raises(NotInteriorError):
        submean_check("peak_max", quadrant_frame, [1, 1], [1, 0], 2.0)
