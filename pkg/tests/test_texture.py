import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alwseg.errors import InvalidConfigError, InvalidInputError
from alwseg.texture import (TEXTURE_EPS, THETAS, glcm, glcm_all, global_stats,
                            haralick, local_contrast, local_contrast_batch, quantize)
from oracles import glcm_brute, haralick_brute


class TestQuantize:
    def test_bounds_and_mid(self):
        assert quantize(np.array([[0.0]]), 32)[0, 0] == 0
        assert quantize(np.array([[1.0]]), 32)[0, 0] == 31
        assert quantize(np.array([[0.5]]), 8)[0, 0] == 4

    def test_bad_levels(self):
        with pytest.raises(InvalidConfigError):
            quantize(np.zeros((2, 2)), 1)


class TestGlcm:
    def test_constant_region_horizontal_pairs(self):
        q = np.full((3, 3), 5, dtype=np.int32)
        counts = glcm(q, 0, 1, n_g=8)
        assert counts[5, 5] == 6
        assert counts.sum() == 6

    def test_single_pair(self):
        q = np.array([[2, 7]], dtype=np.int32)
        counts = glcm(q, 0, 1, n_g=8)
        assert counts[2, 7] == 1
        assert counts.sum() == 1

    def test_reversed_direction_transposes_pair(self):
        q = np.array([[2, 7]], dtype=np.int32)
        counts = glcm(q, 180, 1, n_g=8)
        assert counts[7, 2] == 1
        assert counts.sum() == 1

    def test_too_small_region_gives_zeros(self):
        q = np.array([[3]], dtype=np.int32)
        assert glcm(q, 0, 1, n_g=4).sum() == 0

    def test_matches_brute_force(self):
        rng = np.random.default_rng(7)
        for n_g in (8, 32):
            for d in (1, 2, 5):
                q = rng.integers(0, n_g, size=(16, 16)).astype(np.int32)
                for theta in THETAS:
                    brute = np.zeros((n_g, n_g), dtype=np.int64)
                    small = glcm_brute(q, theta, d)
                    brute[:small.shape[0], :small.shape[1]] = small
                    assert np.array_equal(glcm(q, theta, d, n_g), brute), (n_g, d, theta)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(1, 4))
    def test_opposite_directions_are_transposes(self, seed, d):
        rng = np.random.default_rng(seed)
        q = rng.integers(0, 8, size=(10, 12)).astype(np.int32)
        assert np.array_equal(glcm(q, 0, d, 8), glcm(q, 180, d, 8).T)
        assert np.array_equal(glcm(q, 90, d, 8), glcm(q, 270, d, 8).T)

    def test_bad_direction(self):
        with pytest.raises(InvalidConfigError):
            glcm(np.zeros((3, 3), dtype=np.int32), 45, 1, 4)


class TestHaralick:
    def test_diagonal_matrix(self):
        p = np.zeros((8, 8))
        p[2, 2] = 0.5
        p[6, 6] = 0.5
        hom, con = haralick(p)
        assert hom == pytest.approx(1.0)
        assert con == pytest.approx(0.0)

    def test_single_far_corner(self):
        n_g = 16
        p = np.zeros((n_g, n_g))
        p[0, n_g - 1] = 1.0
        hom, con = haralick(p)
        assert hom == pytest.approx(1.0 / n_g)
        assert con == pytest.approx(1.0)

    def test_two_cell_example(self):
        n_g = 8
        p = np.zeros((n_g, n_g))
        p[0, 0] = 0.5
        p[0, 1] = 0.5
        hom, con = haralick(p)
        assert hom == pytest.approx(0.75)
        assert con == pytest.approx(0.5 / (n_g - 1) ** 2)

    def test_zero_matrix(self):
        assert haralick(np.zeros((4, 4))) == (0.0, 0.0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_feature_ranges(self, seed):
        rng = np.random.default_rng(seed)
        p = rng.random((12, 12))
        hom, con = haralick(p / p.sum())
        assert 0.0 < hom <= 1.0
        assert 0.0 <= con <= 1.0

    def test_matches_brute(self):
        rng = np.random.default_rng(11)
        counts = rng.integers(0, 50, size=(16, 16))
        assert haralick(counts) == pytest.approx(haralick_brute(counts))


class TestGlobalStats:
    def test_constant_roi(self):
        gh, gc = global_stats(np.full((10, 10), 0.4), n_g=32)
        assert gh == pytest.approx(1.0)
        assert gc == TEXTURE_EPS

    def test_checkerboard(self):
        n_g = 32
        board = np.indices((12, 12)).sum(axis=0) % 2
        gh, gc = global_stats(board.astype(float), n_g=n_g)
        assert gh == pytest.approx(1.0 / n_g)
        assert gc == pytest.approx(1.0)

    def test_vertical_stripes_intermediate(self):
        img = np.tile(np.array([0.0, 1.0] * 6), (12, 1))
        q = quantize(img, 32)
        _, con_h = haralick(glcm(q, 0, 1, 32))
        _, con_v = haralick(glcm(q, 90, 1, 32))
        _, gc = global_stats(img, n_g=32)
        lo, hi = sorted([con_h, con_v])
        assert lo < gc < hi

    def test_degenerate_roi_errors(self):
        with pytest.raises(InvalidInputError):
            global_stats(np.zeros((1, 1)), n_g=8)

    def test_transpose_leaves_global_stats_unchanged(self):
        rng = np.random.default_rng(13)
        img = rng.random((14, 10))
        assert global_stats(img) == pytest.approx(global_stats(img.T))


class TestLocalContrast:
    def test_constant_window_floored(self):
        img = np.full((15, 15), 0.6)
        lcx, lcy = local_contrast(img, center=(7, 7), window=(7, 7))
        assert lcx == TEXTURE_EPS and lcy == TEXTURE_EPS

    def test_horizontal_stripes(self):
        # rows alternate 0 / max level: vertical pairs maximal, horizontal equal
        img = np.tile(np.array([[0.0], [1.0]]), (8, 16))[:16, :16]
        lcx, lcy = local_contrast(img, center=(8, 8), window=(7, 7), n_g=32)
        assert lcy == pytest.approx(1.0)
        assert lcx == TEXTURE_EPS

    def test_transpose_swaps_axes(self):
        rng = np.random.default_rng(17)
        img = rng.random((21, 21))
        lcx, lcy = local_contrast(img, center=(10, 10), window=(9, 7))
        lcx_t, lcy_t = local_contrast(img.T, center=(10, 10), window=(7, 9))
        assert lcx_t == pytest.approx(lcy)
        assert lcy_t == pytest.approx(lcx)

    def test_degenerate_window_floored(self):
        img = np.random.default_rng(0).random((9, 9))
        lcx, lcy = local_contrast(img, center=(0, 0), window=(1, 1))
        assert lcx == TEXTURE_EPS and lcy == TEXTURE_EPS

    def test_batch_matches_per_direction_glcm(self):
        # the batch kernel must equal the mean of opposite-direction GLCM
        # contrasts evaluated on the clamped window
        rng = np.random.default_rng(19)
        img = rng.random((20, 20))
        n_g, d = 16, 1
        q = quantize(img, n_g)
        rows = np.array([3, 10, 18], dtype=np.int64)
        cols = np.array([2, 10, 19], dtype=np.int64)
        wx = np.array([5, 9, 7], dtype=np.int64)
        wy = np.array([7, 9, 5], dtype=np.int64)
        lcx, lcy = local_contrast_batch(q, rows, cols, wx, wy, n_g=n_g, d=d)
        for k in range(3):
            r0, r1 = max(0, rows[k] - wy[k] // 2), min(20, rows[k] + wy[k] // 2 + 1)
            c0, c1 = max(0, cols[k] - wx[k] // 2), min(20, cols[k] + wx[k] // 2 + 1)
            win = q[r0:r1, c0:c1]
            _, con0 = haralick(glcm_brute(win, 0, d))
            _, con180 = haralick(glcm_brute(win, 180, d))
            _, con90 = haralick(glcm_brute(win, 90, d))
            _, con270 = haralick(glcm_brute(win, 270, d))
            # brute matrices are sized by the window's own max level
            n_loc = int(win.max()) + 1
            scale = (n_loc - 1) ** 2 / (n_g - 1) ** 2 if n_loc > 1 else 0.0
            ex = max(0.5 * (con0 + con180) * scale, TEXTURE_EPS)
            ey = max(0.5 * (con90 + con270) * scale, TEXTURE_EPS)
            assert lcx[k] == pytest.approx(ex), k
            assert lcy[k] == pytest.approx(ey), k


def test_glcm_all_bundles_four_directions():
    rng = np.random.default_rng(23)
    q = rng.integers(0, 8, size=(9, 9)).astype(np.int32)
    bundle = glcm_all(q, d=2, n_g=8)
    assert set(bundle.counts) == set(THETAS)
    assert bundle.n_g == 8 and bundle.offset_d == 2
    for theta in THETAS:
        assert np.array_equal(bundle.counts[theta], glcm(q, theta, 2, 8))
