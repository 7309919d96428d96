import itertools
import math

import numpy as np
import pytest

from hypdomain.domain import (
    CFunctional,
    DomainSpec,
    HalfSpace,
    classify_point,
    domain_from_file,
    euclid_boundary_dist,
    in_closure,
    is_interior,
    min_slack,
    recession_directions,
    require_interior,
    sample_interior,
    truncate,
    validate,
)
from hypdomain.errors import DimensionError, DomainError, NotInteriorError
from hypdomain.schemas import DomainFile


def test_functional_rejects_zero_and_nonfinite():
    with pytest.raises(DomainError):
        CFunctional([0, 0])
    with pytest.raises(DomainError):
        CFunctional([1, math.inf])


def test_eval_functional_has_no_conjugation():
    L = CFunctional([1j, 2])
    assert L([1j, 1]) == pytest.approx(-1 + 2)


def test_wrong_length_point():
    L = CFunctional([1, 0])
    with pytest.raises(DimensionError):
        L([1, 2, 3])


@pytest.mark.parametrize("z, tag", [(1.0, "interior"), (1e-12, "boundary"), (0.0, "boundary"), (-1.0, "exterior")])
def test_classify_point_halfplane(halfplane, z, tag):
    assert classify_point(halfplane, [z]).tag == tag


def test_membership_band_scales_with_norm(halfplane):
    # band is 1e-9 (1 + |z|), about 1e-5 at |z| = 1e4
    assert classify_point(halfplane, [1e-4 + 1e4j]).tag == "interior"
    assert classify_point(halfplane, [1e-6 + 1e4j]).tag == "boundary"


def test_whole_space_everything_interior():
    D = DomainSpec.whole_space(3)
    assert min_slack(D, [1e9, 0, -1j]) == math.inf
    assert is_interior(D, [0, 0, 0])
    assert euclid_boundary_dist(D, [0, 0, 0]) == math.inf


def test_require_interior(halfplane):
    with pytest.raises(NotInteriorError):
        require_interior(halfplane, [0.0])
    assert in_closure(halfplane, [0.0])


def test_euclid_boundary_dist_quadrant(quadrant):
    assert euclid_boundary_dist(quadrant, [1.0, 3.0]) == pytest.approx(1.0)


def test_validate_reports_witness_and_zero_functional():
    doc = DomainFile(
        dim=1,
        halfspaces=[{"c": [[1, 0]], "a": 0}, {"c": [[0, 0]], "a": -1}],
        witness=[[0, 0]],
    )
    fields = {v.field: v.message for v in validate(doc)}
    assert "halfspaces[1].c" in fields
    assert "zero functional" in fields["halfspaces[1].c"]
    # the zero functional makes the slack check meaningless
    assert "halfspaces[0]" not in fields


def test_validate_witness_on_boundary():
    doc = DomainFile(dim=1, halfspaces=[{"c": [[1, 0]], "a": 0}], witness=[[0, 0]])
    violations = validate(doc)
    assert len(violations) == 1
    assert violations[0].field == "halfspaces[0]"
    assert "witness slack" in violations[0].message


def test_validate_length_mismatch():
    doc = DomainFile(dim=2, halfspaces=[{"c": [[1, 0]], "a": 0}], witness=[[1, 0], [0, 0]])
    assert [v.field for v in validate(doc)] == ["halfspaces[0].c"]


def test_validate_valid_spec_is_empty(quadrant):
    assert validate(quadrant) == []


def test_less_than_sense_is_normalized():
    doc = DomainFile(
        dim=1,
        halfspaces=[{"c": [[1, 0]], "a": 4, "sense": "<"}],
        witness=[[1, 0]],
    )
    D = domain_from_file(doc)
    assert D.thresholds[0] == -4.0
    assert D.matrix[0, 0] == -1.0
    assert is_interior(D, [3.9])
    assert not is_interior(D, [4.1])


def test_truncate_is_bounded_and_extends(quadrant):
    T = truncate(quadrant, 10.0)
    assert T.n_constraints == 2 + 4 * 2
    assert is_interior(T, [5 + 9j, 1 - 9j])
    assert not is_interior(T, [11, 1])
    assert not is_interior(T, [1, 1 + 11j])
    # the original constraints come first
    assert np.array_equal(T.matrix[:2], quadrant.matrix)


def test_truncate_rejects_small_box(quadrant):
    with pytest.raises(DomainError):
        truncate(quadrant, 0.5)
    with pytest.raises(DomainError):
        truncate(quadrant, -1.0)


def test_sample_interior_points_are_interior(rng, make_domain):
    for _ in range(10):
        dim = int(rng.integers(1, 5))
        D = make_domain(rng, dim, dim + 2, int(rng.integers(1, dim + 1)))
        pts = sample_interior(D, 50, rng)
        assert pts.shape == (50, dim)
        assert all(is_interior(D, p) for p in pts)


def test_sample_interior_is_reproducible(quadrant):
    a = sample_interior(quadrant, 5, np.random.default_rng(1))
    b = sample_interior(quadrant, 5, np.random.default_rng(1))
    assert np.array_equal(a, b)


def test_recession_directions_stay_in_closure(rng, make_domain):
    for _ in range(5):
        dim = int(rng.integers(1, 4))
        D = make_domain(rng, dim, dim, dim)
        dirs = recession_directions(D, 4, rng)
        for v in dirs:
            assert np.linalg.norm(v) == pytest.approx(1.0)
            assert np.all((D.matrix @ v).real >= -1e-10)
            far = D.witness + 1e6 * v
            assert in_closure(D, far)


def test_recession_directions_bounded_domain_is_empty(rng, quadrant):
    box = truncate(quadrant, 5.0)
    assert recession_directions(box, 3, rng, max_tries=20).shape == (0, 2)


def test_halfspace_slack():
    h = HalfSpace.from_coeffs([1, 1j], 1.0)
    assert h.slack([2, 1j]) == pytest.approx(2 - 1 - 1)


def test_truncation_only_shrinks(rng, random_hyperbolic):
    for D in random_hyperbolic:
        R = 2.0 * float(np.max(np.abs(np.concatenate([D.witness.real, D.witness.imag])))) + 1.0
        T = truncate(D, R)
        for _ in range(200):
            z = D.witness + R * (rng.standard_normal(D.dim) + 1j * rng.standard_normal(D.dim))
            if classify_point(T, z).tag == "interior":
                assert classify_point(D, z).tag == "interior"


def test_nested_truncation_keeps_the_tighter_box():
    D = DomainSpec.from_arrays(np.eye(2), [0.0, 0.0], [0.5, 0.5])
    once = truncate(D, 1.0)
    twice = truncate(once, 2.0)
    axis = np.linspace(-2.5, 2.5, 6)
    grid = [np.array([a + 1j * b, c + 1j * d]) for a, b, c, d in itertools.product(axis, repeat=4)]
    assert len(grid) >= 1000
    assert [classify_point(twice, z).tag for z in grid] == [classify_point(once, z).tag for z in grid]
    # Re z_j = 0.5 and Im z_j = ±0.5
    assert sum(is_interior(once, z) for z in grid) == 4


def test_dropping_a_constraint_never_shrinks_the_ball(rng, make_domain):
    for _ in range(20):
        dim = int(rng.integers(1, 4))
        D = make_domain(rng, dim, dim + 3, dim)
        for z in sample_interior(D, 10, rng):
            full = euclid_boundary_dist(D, z)
            for i in range(D.n_constraints):
                keep = np.arange(D.n_constraints) != i
                fewer = DomainSpec.from_arrays(D.matrix[keep], D.thresholds[keep], D.witness)
                assert euclid_boundary_dist(fewer, z) >= full * (1 - 1e-12)


def test_inscribed_ball_is_interior(rng, make_domain):
    for _ in range(20):
        dim = int(rng.integers(1, 4))
        D = make_domain(rng, dim, dim + 2, dim)
        for p in sample_interior(D, 5, rng):
            # halfway to the witness keeps the slack at least 0.25
            z = 0.5 * (p + D.witness)
            radius = euclid_boundary_dist(D, z) * (1 - 1e-12)
            nearest = int(np.argmin(D.slacks(z) / D.row_norms))
            c = D.matrix[nearest]
            directions = [-np.conj(c) / np.linalg.norm(c)]
            for _ in range(50):
                u = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
                directions.append(u / np.linalg.norm(u))
            for u in directions:
                assert min_slack(D, z + radius * u) > 0
                assert in_closure(D, z + radius * u)


def test_slack_is_lipschitz(rng, make_domain):
    for _ in range(20):
        dim = int(rng.integers(1, 5))
        D = make_domain(rng, dim, dim + 2, int(rng.integers(1, dim + 1)))
        bound = float(np.max(D.row_norms))
        for _ in range(50):
            z = D.witness + 3 * (rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
            w = D.witness + 3 * (rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
            change = np.abs(D.slacks(z) - D.slacks(w))
            assert np.all(change <= bound * np.linalg.norm(z - w) * (1 + 1e-12) + 1e-12)
            assert abs(min_slack(D, z) - min_slack(D, w)) <= bound * np.linalg.norm(z - w) * (1 + 1e-12) + 1e-12
