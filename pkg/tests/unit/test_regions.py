"""Unit tests for stability rasters"""

import numpy as np
import pytest

from msstab.core.regions import (
    SDE_LABEL,
    cell_centres,
    classify_grid,
    scan_domain,
    scan_region,
)
from msstab.core.scalar import classify, region_ab2_xy, region_am2_xy
from msstab.core.schemes import ScalarTestEq, all_schemes, catalog


def _robust_cells(region, xs, ys):
    """Cells whose closed-form verdict does not change within half a cell"""
    x, big_y = np.meshgrid(xs, ys)
    dx = 0.5 * (xs[1] - xs[0])
    dy = 0.5 * (ys[1] - ys[0])
    expected = region(x, big_y)
    robust = np.ones_like(expected)
    for sx in (-dx, dx):
        for sy in (-dy, dy):
            robust &= region(x + sx, big_y + sy) == expected
    return expected, robust


@pytest.fixture(scope="module")
def raster():
    return scan_region(all_schemes(), resolution=(80, 64), workers=2)


@pytest.mark.unit
class TestCellCentres:
    """Test grid construction"""

    def test_midpoints(self):
        """Happy path: centres of equal cells"""
        centres = cell_centres((0.0, 1.0), 4)
        np.testing.assert_allclose(centres, [0.125, 0.375, 0.625, 0.875])

    def test_empty_interval(self):
        """Error case: bounds must be increasing"""
        with pytest.raises(ValueError):
            cell_centres((1.0, 1.0), 4)

    def test_nonpositive_resolution(self):
        """Error case: at least one cell"""
        with pytest.raises(ValueError):
            cell_centres((0.0, 1.0), 0)


@pytest.mark.unit
class TestScanRegion:
    """Test the real (x, Y) raster"""

    def test_shape_and_labels(self, raster):
        """Happy path: one grid per scheme plus the SDE pseudo-scheme"""
        assert list(raster.verdicts) == [
            "ab2", "ab2i", "am2", "am2i", "bdf2", "bdf2i", SDE_LABEL
        ]
        assert raster.verdicts["ab2"].shape == (64, 80)
        assert raster.header == ("x", "Y", "scheme", "verdict")

    def test_row_count(self, raster):
        """Happy path: rows cover every cell of every grid"""
        assert sum(1 for _ in raster.rows()) == 7 * 80 * 64

    @pytest.mark.parametrize(
        "token,region", [("ab2", region_ab2_xy), ("am2", region_am2_xy)]
    )
    def test_matches_closed_form(self, raster, token, region):
        """Invariant: away from the boundary the raster is the closed-form region"""
        expected, robust = _robust_cells(region, raster.first, raster.second)
        assert robust.sum() > 0.9 * robust.size
        assert expected[robust].any()
        mask = raster.stable_mask(token)
        np.testing.assert_array_equal(mask[robust], expected[robust])

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "token,region", [("ab2", region_ab2_xy), ("am2", region_am2_xy)]
    )
    def test_full_grid_matches_closed_form(self, token, region):
        """Invariant: on 400 x 400 cells only cells near the boundary differ"""
        full = scan_region([catalog(token)], resolution=400, workers=2)
        x, big_y = np.meshgrid(full.first, full.second)
        expected = region(x, big_y)
        near = np.zeros_like(expected)
        for sx, sy in ((1e-6, 0.0), (-1e-6, 0.0), (0.0, 1e-6), (0.0, -1e-6)):
            near |= region(x + sx, big_y + sy) != expected
        assert near.sum() < 10
        mask = full.stable_mask(token)
        np.testing.assert_array_equal(mask[~near], expected[~near])

    def test_bdf2_contains_sde_region(self, raster):
        """Invariant: BDF2 is stable wherever the test equation clearly is"""
        x, big_y = np.meshgrid(raster.first, raster.second)
        inside = x + 0.5 * big_y < -0.1
        assert np.all(raster.stable_mask("bdf2")[inside])

    def test_sde_pseudo_scheme(self, raster):
        """Happy path: the sde grid marks x + Y/2 < 0"""
        x, big_y = np.meshgrid(raster.first, raster.second)
        mask = raster.stable_mask(SDE_LABEL)
        np.testing.assert_array_equal(mask, x + 0.5 * big_y < 0)

    def test_cells_match_classify(self, raster):
        """Invariant: each cell carries the verdict of classify at its centre"""
        rng = np.random.default_rng(31)
        for _ in range(25):
            i = rng.integers(len(raster.first))
            j = rng.integers(len(raster.second))
            x, big_y = raster.first[i], raster.second[j]
            eq = ScalarTestEq(x, np.sqrt(big_y))
            for token in ("am2i", "bdf2i"):
                verdict = classify(token, eq, 1.0, check_propositions=False)
                assert raster.verdicts[token][j, i] == verdict.status.value


@pytest.mark.unit
class TestScanDomain:
    """Test the complex x raster"""

    def test_header_and_fixed_y(self):
        """Happy path: domain rasters are labelled by Re x and Im x"""
        raster = scan_domain([catalog("bdf2")], 1.0, resolution=8)
        assert raster.header == ("re_x", "im_x", "scheme", "verdict")
        assert raster.fixed_y == 1.0
        assert raster.verdicts["bdf2"].shape == (8, 8)

    def test_conjugate_symmetry(self):
        """Invariant: verdicts are symmetric in Im x"""
        raster = scan_domain(
            [catalog("am2")], 0.5, im_bounds=(-2.0, 2.0), resolution=20
        )
        grid = raster.verdicts["am2"]
        np.testing.assert_array_equal(grid, grid[::-1, :])

    def test_negative_y(self):
        """Error case: Y = |mu|^2 h cannot be negative"""
        with pytest.raises(ValueError):
            scan_domain([catalog("ab2")], -1.0)

    def test_complex_cells(self):
        """Happy path: complex cells follow the scalar classification"""
        x = np.array([-0.5 + 0.2j, -7.0 + 3.0j])
        grid = classify_grid(catalog("ab2"), x, np.array([0.3, 0.3]))
        assert list(grid) == ["stable", "unstable"]
