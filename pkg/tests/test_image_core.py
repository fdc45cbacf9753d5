import numpy as np
import pytest

from alwseg.errors import InvalidConfigError, InvalidInputError
from alwseg.image_core import (GrayImage, Roi, _tile_mapping, clahe, crop,
                               normalize, read_raster, write_mask_pgm, write_pgm)


class TestNormalize:
    def test_affine_rescale_8bit(self):
        out = normalize(np.array([[0, 128, 255]]))
        assert np.allclose(out.data, [[0.0, 128 / 255, 1.0]])
        assert abs(out.data[0, 1] - 0.50196) < 1e-5

    def test_constant_maps_to_half(self):
        out = normalize(np.full((4, 4), 77))
        assert np.all(out.data == 0.5)

    def test_16bit_range(self):
        out = normalize(np.array([[100, 300, 500]], dtype=np.uint16))
        assert np.allclose(out.data, [[0.0, 0.5, 1.0]])

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        raw = rng.integers(0, 4096, size=(12, 9))
        once = normalize(raw)
        twice = normalize(once.data)
        assert np.array_equal(once.data, twice.data)

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            normalize(np.zeros((0, 3)))


class TestRoiCrop:
    def test_full_image_identity(self):
        img = normalize(np.arange(20).reshape(4, 5))
        out, r = crop(img, Roi(0, 0, 5, 4))
        assert np.array_equal(out.data, img.data)
        assert r == Roi(0, 0, 5, 4)

    def test_central_block(self):
        img = GrayImage(np.arange(16).reshape(4, 4) / 15.0)
        out, _ = crop(img, Roi(1, 1, 2, 2))
        assert np.array_equal(out.data, img.data[1:3, 1:3])

    def test_overflow_clamped_and_returned(self):
        img = GrayImage(np.zeros((6, 6)))
        out, r = crop(img, Roi(4, 4, 10, 10))
        assert r == Roi(4, 4, 2, 2)
        assert out.data.shape == (2, 2)

    def test_nested_crop_composes(self):
        rng = np.random.default_rng(1)
        img = GrayImage(rng.random((16, 16)))
        outer = Roi(2, 3, 10, 9)
        inner = Roi(1, 2, 5, 4)
        stepwise, r1 = crop(img, outer)
        stepwise, _ = crop(stepwise, inner)
        direct, _ = crop(img, r1.compose(inner))
        assert np.array_equal(stepwise.data, direct.data)

    def test_no_overlap_is_error(self):
        img = GrayImage(np.zeros((6, 6)))
        with pytest.raises(InvalidInputError):
            crop(img, Roi(10, 10, 3, 3))


class TestClahe:
    def test_constant_image_identity(self):
        img = GrayImage(np.full((32, 32), 0.37))
        out = clahe(img, tiles=(4, 4), clip_limit=0.5)
        assert np.allclose(out.data, 0.37)

    def test_single_tile_unclipped_equals_plain_equalization(self):
        rng = np.random.default_rng(2)
        img = GrayImage(rng.random((24, 24)))
        out = clahe(img, tiles=(1, 1), clip_limit=1.0, nbins=256)
        # plain equalization: v -> cdf at v's bin
        bins = np.minimum((img.data * 256).astype(int), 255)
        hist = np.bincount(bins.ravel(), minlength=256)
        cdf = np.cumsum(hist) / img.data.size
        assert np.allclose(out.data, cdf[bins], atol=1e-12)

    def test_two_tile_bilinear_blend(self):
        # width 15, 2x1 grid: tiles [0,8) and [8,15) with centers 3.5 and
        # 11.0; away from the centers every pixel must equal the linear
        # blend of the two tile mappings at its own intensity
        rng = np.random.default_rng(3)
        data = rng.random((8, 15))
        img = GrayImage(data)
        out = clahe(img, tiles=(2, 1), clip_limit=1.0, nbins=64)
        left = _tile_mapping(data[:, :8].ravel(), 1.0, 64)
        right = _tile_mapping(data[:, 8:].ravel(), 1.0, 64)
        bins = np.minimum((data * 64).astype(int), 63)
        c1, c2 = 3.5, 11.0
        for x in range(15):
            fx = min(max((x - c1) / (c2 - c1), 0.0), 1.0)
            expected = (1 - fx) * left[bins[:, x]] + fx * right[bins[:, x]]
            assert np.allclose(out.data[:, x], expected, atol=1e-12), x

    def test_two_tile_near_midpoint_averages(self):
        # at the blend midpoint the remapped value is the mean of the two tile
        # mappings; x=7.25 is the midpoint here, checked via both neighbors
        rng = np.random.default_rng(31)
        data = rng.random((6, 15))
        out = clahe(GrayImage(data), tiles=(2, 1), clip_limit=1.0, nbins=64)
        left = _tile_mapping(data[:, :8].ravel(), 1.0, 64)
        right = _tile_mapping(data[:, 8:].ravel(), 1.0, 64)
        bins = np.minimum((data * 64).astype(int), 63)
        fx = (7 - 3.5) / 7.5
        mean_map = 0.5 * left[bins[:, 7]] + 0.5 * right[bins[:, 7]]
        blended = (1 - fx) * left[bins[:, 7]] + fx * right[bins[:, 7]]
        assert np.allclose(out.data[:, 7], blended, atol=1e-12)
        # the exact-midpoint value differs from the mean only by the remaining
        # (0.5 - fx) fraction of the mapping gap
        gap = right[bins[:, 7]] - left[bins[:, 7]]
        assert np.allclose(blended - mean_map, (fx - 0.5) * gap, atol=1e-12)

    def test_clip_invariant(self):
        # after clipping + uniform redistribution no bin exceeds
        # clip_limit * n_pixels + excess / nbins
        rng = np.random.default_rng(4)
        pixels = rng.beta(0.5, 3.0, size=400)
        clip_limit, nbins = 0.02, 64
        lut = _tile_mapping(pixels, clip_limit, nbins)
        assert lut is not None
        raw = np.bincount(np.minimum((pixels * nbins).astype(int), nbins - 1),
                          minlength=nbins).astype(float)
        threshold = clip_limit * pixels.size
        excess = np.sum(np.maximum(raw - threshold, 0.0))
        clipped = np.diff(np.concatenate([[0.0], lut])) * pixels.size
        assert np.all(clipped <= threshold + excess / nbins + 1e-9)

    def test_output_in_range(self):
        rng = np.random.default_rng(5)
        img = GrayImage(rng.random((40, 40)))
        out = clahe(img, tiles=(8, 8), clip_limit=0.01)
        assert out.data.min() >= 0.0 and out.data.max() <= 1.0

    def test_tiny_tiles_rejected(self):
        img = GrayImage(np.zeros((8, 8)))
        with pytest.raises(InvalidConfigError):
            clahe(img, tiles=(8, 8))

    def test_bad_clip_rejected(self):
        img = GrayImage(np.zeros((32, 32)))
        with pytest.raises(InvalidConfigError):
            clahe(img, clip_limit=0.0)


class TestRasterIO:
    def test_pgm_8bit_roundtrip(self, tmp_path):
        path = tmp_path / "mask.pgm"
        values = np.arange(20, dtype=np.uint8).reshape(4, 5) * 12
        write_pgm(path, values)
        back = read_raster(path)
        assert back.dtype == np.uint8
        assert np.array_equal(back, values)

    def test_pgm_16bit_read(self, tmp_path):
        path = tmp_path / "img.pgm"
        values = np.array([[100, 300], [500, 65535]], dtype=np.uint16)
        header = b"P5\n2 2\n65535\n"
        path.write_bytes(header + values.astype(">u2").tobytes())
        back = read_raster(path)
        assert np.array_equal(back, values)

    def test_pgm_comment_header(self, tmp_path):
        path = tmp_path / "c.pgm"
        payload = bytes(range(6))
        path.write_bytes(b"P5\n# a comment\n3 2\n255\n" + payload)
        back = read_raster(path)
        assert back.shape == (2, 3)

    def test_mask_pgm_values(self, tmp_path):
        path = tmp_path / "m.pgm"
        write_mask_pgm(path, np.array([[True, False]]))
        back = read_raster(path)
        assert back.tolist() == [[255, 0]]

    def test_png_gray_read(self, tmp_path):
        from PIL import Image

        path = tmp_path / "img.png"
        values = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
        Image.fromarray(values, mode="L").save(path)
        back = read_raster(path)
        assert np.array_equal(back, values)

    def test_unknown_format_rejected(self, tmp_path):
        path = tmp_path / "x.bin"
        path.write_bytes(b"\x00\x01\x02\x03")
        with pytest.raises(InvalidInputError):
            read_raster(path)


class TestGrayImageInvariants:
    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidInputError):
            GrayImage(np.array([[0.0, 1.2]]))

    def test_rejects_nan(self):
        with pytest.raises(InvalidInputError):
            GrayImage(np.array([[0.0, np.nan]]))

    def test_data_is_readonly(self):
        img = GrayImage(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            img.data[0, 0] = 1.0
