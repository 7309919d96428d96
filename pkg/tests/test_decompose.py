import numpy as np
import pytest

from hypdomain.decompose import (
    common_kernel,
    complex_rank,
    contains_complex_line,
    decompose,
    entire_curve,
    equivalence_table,
    facet_complex_lines,
    hyperbolicity_report,
    realize_bounded,
    separating_frame,
)
from hypdomain.domain import DomainSpec, classify_point, is_interior, sample_interior, truncate
from hypdomain.errors import DomainError, RankDeficientError, RealizationError


def real_embedding_rank(C: np.ndarray) -> int:
    """Complex rank via the real 2M x 2N embedding, independent of the SVD path."""
    A, B = C.real, C.imag
    return np.linalg.matrix_rank(np.block([[A, -B], [B, A]]), tol=1e-8) // 2


class TestDecomposition:

    def test_halfplane_times_c(self, halfplane_times_c):
        dec = decompose(halfplane_times_c)
        assert (dec.k, dec.m) == (1, 1)
        assert dec.factor.dim == 1
        assert dec.factor.n_constraints == 1
        assert dec.factor.matrix[0, 0] == pytest.approx(1.0)
        assert dec.factor.thresholds[0] == 0.0

    def test_rank1_strip_kernel_direction(self, rank1_strip):
        dec = decompose(rank1_strip)
        assert (dec.k, dec.m) == (1, 1)
        expected = np.array([1.0, -1.0]) / np.sqrt(2)
        assert np.allclose(dec.kernel_basis[:, 0], expected, atol=1e-9)

    def test_hyperbolic_keeps_coordinates(self, quadrant):
        dec = decompose(quadrant)
        assert (dec.k, dec.m) == (2, 0)
        assert np.array_equal(dec.T, np.eye(2))
        assert dec.factor is quadrant

    def test_whole_space(self):
        dec = decompose(DomainSpec.whole_space(2))
        assert (dec.k, dec.m) == (0, 2)
        assert dec.factor.dim == 0

    def test_transform_is_unitary_and_splits_membership(self, rng, make_domain):
        for _ in range(20):
            dim = int(rng.integers(2, 5))
            rank = int(rng.integers(1, dim))
            D = make_domain(rng, dim, int(rng.integers(rank, 7)), rank)
            dec = decompose(D)
            assert dec.k == rank
            assert np.allclose(dec.T @ dec.T.conj().T, np.eye(dim), atol=1e-10)
            assert dec.condition == pytest.approx(1.0)
            for z in sample_interior(D, 10, rng):
                assert np.allclose(dec.from_split(dec.to_split(z)), z, atol=1e-10)
                assert is_interior(dec.factor, dec.project(z))
            # moving along the kernel does not change the factor point
            z = np.array(D.witness)
            shifted = z + 5.0 * dec.kernel_basis[:, 0]
            assert np.allclose(dec.project(shifted), dec.project(z), atol=1e-9)


class TestRankCertificates:

    def test_planted_rank_duality(self, rng, make_domain):
        for _ in range(500):
            dim = int(rng.integers(1, 6))
            rank = int(rng.integers(1, dim + 1))
            M = int(rng.integers(rank, 13))
            D = make_domain(rng, dim, M, rank)
            assert complex_rank(D) == rank == real_embedding_rank(D.matrix)
            report = hyperbolicity_report(D)
            assert report.hyperbolic == (rank == dim)
            if report.hyperbolic:
                assert report.frame is not None
                assert report.line_witness is None
            else:
                assert report.line_witness.residual <= 1e-9
                assert report.frame is None

    def test_line_witness_stays_inside(self, halfplane_times_c):
        witness = contains_complex_line(halfplane_times_c)
        assert witness is not None
        for t in (0, 1e6, -1e6j, 3 + 4j):
            assert is_interior(halfplane_times_c, witness.point(t))

    def test_entire_curve(self, quadrant, rank1_strip):
        assert entire_curve(quadrant) is None
        curve = entire_curve(rank1_strip)
        assert all(is_interior(rank1_strip, curve(t)) for t in (0, 10, 1e4j))

    def test_common_kernel_whole_space(self):
        assert common_kernel(DomainSpec.whole_space(3)).shape == (3, 3)


class TestFrameAndRealization:

    def test_quadrant_frame(self, quadrant):
        frame = separating_frame(quadrant)
        assert frame.indices == (0, 1)
        assert frame.smallest_singular_value == pytest.approx(1.0)

    def test_frame_rejects_line(self, halfplane_times_c):
        with pytest.raises(RankDeficientError) as err:
            separating_frame(halfplane_times_c)
        assert err.value.witness is not None
        assert err.value.witness.residual <= 1e-15

    def test_frame_skips_redundant_constraints(self):
        D = DomainSpec.from_arrays([[1, 0], [2, 0], [0, 1]], [0, 0, 0], [1, 1])
        frame = separating_frame(D)
        assert 2 in frame.indices
        assert len(frame.indices) == 2

    def test_realization_bounds_and_roundtrip(self, rng, random_hyperbolic):
        worst_modulus = 0.0
        worst_error = 0.0
        for D in random_hyperbolic:
            F = realize_bounded(separating_frame(D))
            pts = sample_interior(D, 500, rng)
            u = F.apply(pts)
            back = F.invert(u)
            worst_modulus = max(worst_modulus, float(np.max(np.abs(u))))
            err = np.linalg.norm(back - pts, axis=1) / (1 + np.linalg.norm(pts, axis=1))
            worst_error = max(worst_error, float(np.max(err)))
        assert worst_modulus <= 1.0
        assert worst_error <= 1e-10

    def test_realization_of_halfplane(self, halfplane):
        F = realize_bounded(separating_frame(halfplane))
        assert F.apply([1.0])[0] == pytest.approx(0.5)
        assert F.invert([0.5])[0] == pytest.approx(1.0)

    def test_realization_errors(self, halfplane):
        F = realize_bounded(separating_frame(halfplane))
        with pytest.raises(RealizationError):
            F.apply([-1.0])
        with pytest.raises(RealizationError):
            F.invert([0.0])


def test_facet_complex_lines(halfplane_times_c, quadrant):
    facet = facet_complex_lines(halfplane_times_c, 0)
    assert facet.dimension == 1
    assert np.allclose(np.abs(facet.direction), [0.0, 1.0])
    assert facet_complex_lines(quadrant, 1).dimension == 0
    with pytest.raises(DomainError):
        facet_complex_lines(quadrant, 2)


@pytest.mark.parametrize("fixture, hyperbolic", [("quadrant", True), ("rank1_strip", False)])
def test_equivalence_table(request, fixture, hyperbolic):
    D = request.getfixturevalue(fixture)
    rows = equivalence_table(hyperbolicity_report(D))
    assert len(rows) == 11
    assert all(row.holds == hyperbolic for row in rows)
    by_name = {row.condition: row for row in rows}
    expected = "equivalence" if hyperbolic else "counterexample"
    assert by_name["fixed_point_property"].certified_by == expected
    assert by_name["no_complex_lines"].certified_by == "certificate"


def test_rank_survives_linear_change_of_coordinates(rng, make_domain):
    for _ in range(300):
        dim = int(rng.integers(1, 5))
        rank = int(rng.integers(1, dim + 1))
        D = make_domain(rng, dim, int(rng.integers(rank, rank + 4)), rank)
        U, _ = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
        V, _ = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
        P = U @ np.diag(np.exp(rng.uniform(-1, 1, dim))) @ V
        moved = DomainSpec.from_arrays(D.matrix @ np.linalg.inv(P), D.thresholds, P @ D.witness)
        assert complex_rank(moved) == complex_rank(D) == rank


def test_truncations_are_hyperbolic(rng, make_domain):
    for _ in range(100):
        dim = int(rng.integers(1, 5))
        D = make_domain(rng, dim, int(rng.integers(1, 5)), int(rng.integers(1, dim + 1)))
        R = float(np.max(np.abs(np.concatenate([D.witness.real, D.witness.imag])))) + rng.uniform(0.5, 10)
        T = truncate(D, R)
        assert complex_rank(T) == dim
        assert hyperbolicity_report(T).hyperbolic


def test_split_reconstruction_and_membership(rng, make_domain):
    mismatches = 0
    for _ in range(3):
        dim = int(rng.integers(2, 5))
        rank = int(rng.integers(1, dim))
        D = make_domain(rng, dim, rank + 2, rank)
        dec = decompose(D)
        for _ in range(1000):
            z = D.witness + 3 * (rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
            assert np.allclose(dec.from_split(dec.to_split(z)), z, atol=1e-10)
            whole = classify_point(D, z).tag
            if whole == "boundary":
                continue
            mismatches += whole != classify_point(dec.factor, dec.project(z)).tag
    assert mismatches == 0
