import math

import numpy as np
import pytest

from alwseg.errors import ContourCollapseError, InvalidSeedError
from alwseg.levelset import (DistanceMap, curvature, curvature_grid, dirac,
                             evolve_step, extend_forces, gradient_norm, heaviside,
                             init_circle, rebuild_band, reinit_sdf)
from oracles import central_difference, contour_length, trapezoid_integral

EPS = 1.5


class TestHeaviside:
    def test_saturated_regions(self):
        assert heaviside(2 * EPS, EPS) == 1.0
        assert heaviside(-2 * EPS, EPS) == 0.0

    def test_midpoint(self):
        assert heaviside(0.0, EPS) == pytest.approx(0.5)

    def test_half_epsilon_value(self):
        # 0.5 * (1 + 1/2 + sin(pi/2)/pi) = 0.75 + 1/(2*pi)
        expected = 0.75 + 1.0 / (2.0 * math.pi)
        assert heaviside(EPS / 2, EPS) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.9092, abs=5e-5)

    def test_continuous_at_support_edge(self):
        assert heaviside(EPS, EPS) == pytest.approx(1.0)
        assert heaviside(-EPS, EPS) == pytest.approx(0.0)

    def test_requires_positive_epsilon(self):
        with pytest.raises(ValueError):
            heaviside(0.0, 0.0)


class TestDirac:
    def test_peak(self):
        assert dirac(0.0, EPS) == pytest.approx(1.0 / EPS)

    def test_support_boundary(self):
        assert dirac(EPS, EPS) == pytest.approx(0.0)
        assert dirac(-EPS, EPS) == pytest.approx(0.0)

    def test_integrates_to_one(self):
        total = trapezoid_integral(lambda x: dirac(x, EPS), -EPS, EPS)
        assert abs(total - 1.0) <= 1e-3

    def test_matches_heaviside_derivative(self):
        xs = np.linspace(-EPS * 0.99, EPS * 0.99, 100)
        for x in xs:
            fd = central_difference(lambda v: heaviside(v, EPS), x)
            assert abs(fd - dirac(x, EPS)) <= 1e-3


class TestInitCircle:
    def test_signed_distances(self):
        dm = init_circle((64, 64), center=(32, 32), radius=10)
        assert dm.phi[32, 32] == pytest.approx(-10.0)
        assert dm.phi[32, 42] == pytest.approx(0.0)
        assert dm.phi[32, 45] == pytest.approx(3.0)

    def test_radius_floor(self):
        with pytest.raises(InvalidSeedError):
            init_circle((32, 32), center=(16, 16), radius=1.5)

    def test_center_must_be_inside(self):
        with pytest.raises(InvalidSeedError):
            init_circle((32, 32), center=(40, 16), radius=5)


class TestNarrowBand:
    def test_annulus_band(self):
        dm = init_circle((64, 64), center=(32, 32), radius=10, band_radius=3)
        band = rebuild_band(dm)
        assert len(band) > 0
        assert np.all(np.abs(dm.phi[band.rows, band.cols]) <= 3)
        # zls points are a subset of band points
        zset = set(zip(band.zls_rows.tolist(), band.zls_cols.tolist()))
        bset = set(zip(band.rows.tolist(), band.cols.tolist()))
        assert zset <= bset

    def test_every_zls_point_has_opposite_neighbor(self):
        dm = init_circle((48, 48), center=(24, 24), radius=8)
        band = rebuild_band(dm)
        neg = dm.phi < 0
        for r, c in zip(band.zls_rows, band.zls_cols):
            neighbors = []
            if r > 0:
                neighbors.append(neg[r - 1, c])
            if r < 47:
                neighbors.append(neg[r + 1, c])
            if c > 0:
                neighbors.append(neg[r, c - 1])
            if c < 47:
                neighbors.append(neg[r, c + 1])
            assert any(n != neg[r, c] for n in neighbors)

    def test_single_signed_phi_collapses(self):
        dm = DistanceMap(phi=np.ones((16, 16)))
        with pytest.raises(ContourCollapseError):
            rebuild_band(dm)

    def test_single_interior_pixel_frontier(self):
        phi = np.ones((9, 9))
        phi[4, 4] = -0.5
        band = rebuild_band(DistanceMap(phi=phi))
        zset = set(zip(band.zls_rows.tolist(), band.zls_cols.tolist()))
        assert (4, 4) in zset
        assert {(3, 4), (5, 4), (4, 3), (4, 5)} <= zset


class TestCurvature:
    def test_circle_curvature(self):
        for radius in (8, 12, 20):
            dm = init_circle((64, 64), center=(32, 32), radius=radius)
            # sample grid points near the zero level set
            band = rebuild_band(dm)
            kappas = curvature_grid(dm.phi)[band.zls_rows, band.zls_cols]
            assert np.abs(np.mean(kappas) - 1.0 / radius) <= 0.15 / radius

    def test_planar_sdf_is_flat(self):
        xx = np.tile(np.arange(32, dtype=float), (32, 1))
        phi = xx - 15.5
        kappa = curvature_grid(phi)
        assert np.all(np.abs(kappa[2:-2, 2:-2]) <= 1e-6)

    def test_sign_flips_with_convention(self):
        dm = init_circle((48, 48), center=(24, 24), radius=9)
        k1 = curvature(dm, (33, 24))
        k2 = curvature(DistanceMap(phi=-dm.phi), (33, 24))
        assert k1 == pytest.approx(-k2)


class TestEvolve:
    def test_null_update(self):
        dm = init_circle((48, 48), center=(24, 24), radius=9)
        band = rebuild_band(dm)
        before = dm.phi.copy()
        evolve_step(dm, band, np.zeros(len(band.zls_rows)), mu=0.0)
        assert np.array_equal(dm.phi, before)

    def test_uniform_inflation_grows_radius(self):
        dm = init_circle((64, 64), center=(32, 32), radius=10)
        band = rebuild_band(dm)
        areas = [int((dm.phi < 0).sum())]
        for _ in range(12):
            forces = np.ones(len(band.zls_rows))
            band = evolve_step(dm, band, forces, mu=0.0, reinit=True)
            areas.append(int((dm.phi < 0).sum()))
        assert areas[-1] > areas[0]
        assert all(b >= a for a, b in zip(areas, areas[1:]))

    def test_curvature_shrinks_wiggly_contour(self):
        yy, xx = np.mgrid[0:64, 0:64].astype(float)
        ang = np.arctan2(yy - 32, xx - 32)
        radius = 12 + 2.5 * np.cos(7 * ang)
        phi = np.sqrt((xx - 32) ** 2 + (yy - 32) ** 2) - radius
        dm = DistanceMap(phi=phi)
        reinit_sdf(dm)
        band = rebuild_band(dm)
        lengths = [contour_length(dm.phi, dm.epsilon)]
        for _ in range(10):
            band = evolve_step(dm, band, np.zeros(len(band.zls_rows)),
                               mu=0.5, reinit=True)
            lengths.append(contour_length(dm.phi, dm.epsilon))
        assert all(b <= a + 1e-9 for a, b in zip(lengths, lengths[1:]))

    def test_zls_stays_inside_band(self):
        dm = init_circle((64, 64), center=(32, 32), radius=12)
        band = rebuild_band(dm)
        rng = np.random.default_rng(5)
        for _ in range(15):
            forces = rng.normal(0, 1, size=len(band.zls_rows))
            band = evolve_step(dm, band, forces, mu=0.1)
            zr, zc = band.zls_rows, band.zls_cols
            assert np.all(np.abs(dm.phi[zr, zc]) <= dm.band_radius)

    def test_collapse_detected(self):
        dm = init_circle((32, 32), center=(16, 16), radius=2.5)
        band = rebuild_band(dm)
        with pytest.raises(ContourCollapseError):
            for _ in range(200):
                band = evolve_step(dm, band, -np.ones(len(band.zls_rows)),
                                   mu=0.0, reinit=True)


class TestExtendForces:
    def test_band_points_take_nearest_zls_force(self):
        dm = init_circle((40, 40), center=(20, 20), radius=8)
        band = rebuild_band(dm)
        forces = np.arange(len(band.zls_rows), dtype=float)
        ext = extend_forces(band, forces)
        # brute-force nearest with row-major tie break
        zr, zc = band.zls_rows.astype(int), band.zls_cols.astype(int)
        for i in (0, len(band) // 2, len(band) - 1):
            r, c = int(band.rows[i]), int(band.cols[i])
            d2 = (zr - r) ** 2 + (zc - c) ** 2
            assert ext[i] == forces[int(np.argmin(d2))]


class TestReinit:
    def test_restores_unit_gradient_in_band(self):
        dm = init_circle((64, 64), center=(32, 32), radius=12)
        dm.phi *= 3.0  # destroy the SDF property, keep the zero set
        reinit_sdf(dm)
        band = rebuild_band(dm)
        norms = gradient_norm(dm.phi)[band.rows, band.cols]
        assert np.all(np.abs(norms - 1.0) <= 0.2)

    def test_preserves_zero_crossings(self):
        rng = np.random.default_rng(9)
        dm = init_circle((64, 64), center=(32, 32), radius=14)
        band = rebuild_band(dm)
        dm.phi[band.rows, band.cols] += rng.normal(0, 0.2, size=len(band))
        before = rebuild_band(dm)
        zbefore = set(zip(before.zls_rows.tolist(), before.zls_cols.tolist()))
        reinit_sdf(dm)
        after = rebuild_band(dm)
        zafter = set(zip(after.zls_rows.tolist(), after.zls_cols.tolist()))
        changed = len(zbefore ^ zafter)
        assert changed <= 0.02 * len(before)

    def test_single_signed_rejected(self):
        with pytest.raises(ContourCollapseError):
            reinit_sdf(DistanceMap(phi=np.ones((8, 8))))
