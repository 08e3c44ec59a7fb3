import math

import numpy as np
import pytest
from scipy.integrate import quad

from coorbitkit import (FrequencyGrid, GroupFamily, WaveletSpec,
                        WaveletSupportError, bump_wavelet, counterexample_pair,
                        dist_complement, field_from_profile, in_orbit, l2_norm,
                        moment_slope, moment_wavelet, schwartz_seminorm)
from coorbitkit.wavelets import mollifier, radial_profile, vanishing_order

SIM = GroupFamily.similitude()
DIAG = GroupFamily.diagonal()
SHEAR = GroupFamily.shearlet(0.5)
FAMILIES = [SIM, DIAG, SHEAR]
GRID = FrequencyGrid(256, 8.0)


def default_center(family):
    return (1.0, 1.0) if family.tag == "diagonal" else (1.0, 0.0)


class TestBump:
    def test_peak_value(self):
        psi = bump_wavelet(SIM, WaveletSpec("bump", (1.0, 0.0), 0.5), GRID)
        i = np.searchsorted(GRID.axis(), 1.0)
        j = np.searchsorted(GRID.axis(), 0.0)
        norm = l2_norm(field_from_profile(
            GRID, lambda x1, x2: mollifier(np.hypot(x1 - 1, x2) / 0.5)))
        assert np.isclose(psi.values[i, j].real, math.exp(-1.0) / norm)

    def test_support_inside_orbit(self):
        for fam in FAMILIES:
            psi = bump_wavelet(fam, WaveletSpec("bump", default_center(fam),
                                                0.5), GRID)
            nz = np.abs(psi.values) > 0
            pts = GRID.points()[nz]
            assert np.all(in_orbit(fam, pts))
            center = np.asarray(default_center(fam))
            r = np.hypot(pts[:, 0] - center[0], pts[:, 1] - center[1])
            assert np.all(r < 0.5)

    def test_unit_norm(self):
        for fam in FAMILIES:
            psi = bump_wavelet(fam, WaveletSpec("bump", default_center(fam),
                                                0.5), GRID)
            assert abs(l2_norm(psi) - 1.0) < 1e-10

    def test_ball_leaving_orbit_rejected(self):
        # the base point sits at distance 1 from the shearlet blind line
        bump_wavelet(SHEAR, WaveletSpec("bump", (1.0, 0.0), 0.5), GRID)
        with pytest.raises(WaveletSupportError) as err:
            bump_wavelet(SHEAR, WaveletSpec("bump", (1.0, 0.0), 1.5), GRID)
        assert err.value.margin == pytest.approx(-0.5)

    def test_profile_matches_samples(self):
        psi = bump_wavelet(SIM, WaveletSpec("bump", (1.0, 0.0), 0.5), GRID)
        x1, x2 = GRID.mesh()
        assert np.array_equal(psi.profile(x1, x2), psi.values)


class TestMoment:
    def test_unit_norm_and_zero_at_origin(self):
        psi = moment_wavelet(SIM, WaveletSpec("moment", order=1), GRID)
        assert abs(l2_norm(psi) - 1.0) < 1e-10
        mid = GRID.n // 2
        assert psi.values[mid, mid] == 0.0
        # gradient vanishes at the origin as well: quadratic factor
        assert abs(psi.values[mid + 1, mid] - psi.values[mid - 1, mid]) < 1e-14

    def test_diagonal_vanishes_on_axes(self):
        psi = moment_wavelet(DIAG, WaveletSpec("moment", order=2), GRID)
        mid = GRID.n // 2
        assert np.all(psi.values[mid, :] == 0.0)
        assert np.all(psi.values[:, mid] == 0.0)

    def test_vanishing_order_bookkeeping(self):
        assert vanishing_order(SIM, WaveletSpec("moment", order=2)) == 4
        assert vanishing_order(DIAG, WaveletSpec("moment", order=2)) == 2
        assert vanishing_order(SHEAR, WaveletSpec("moment", order=3)) == 3


class TestCounterexamplePair:
    def test_radial_normalization(self):
        prof = radial_profile(1.0, 2.0)
        val, _ = quad(lambda s: prof(s) ** 2 / s, 1.0, 2.0, limit=300)
        assert abs(val - 1.0) < 1e-6

    def test_rotation_symmetry_on_grid(self):
        f, _ = counterexample_pair(GRID, 1.0, 2.0)
        # 90-degree rotations map the grid into itself away from the edge row
        v = f.values[1:, 1:]
        assert np.allclose(v, np.rot90(v), atol=1e-14)

    def test_sign_flip_vanishes_on_axis(self):
        _, g = counterexample_pair(GRID, 1.0, 2.0)
        mid = GRID.n // 2
        assert np.all(g.values[mid, :] == 0.0)

    def test_radii_validation(self):
        with pytest.raises(ValueError):
            counterexample_pair(GRID, 2.0, 1.0)
        with pytest.raises(ValueError):
            counterexample_pair(GRID, 1.0, 5.0)


class TestSchwartzSeminorm:
    def test_flat_bump_r0(self):
        psi = bump_wavelet(SIM, WaveletSpec("bump", (1.0, 0.0), 0.5), GRID)
        assert np.isclose(schwartz_seminorm(psi, 0, 0.0),
                          float(np.max(np.abs(psi.values))))

    def test_gaussian_r0(self):
        f = field_from_profile(GRID,
                               lambda x1, x2: np.exp(-np.pi * (x1 ** 2 + x2 ** 2)))
        assert np.isclose(schwartz_seminorm(f, 0, 0.0), 1.0)

    def test_gaussian_r1_m2_against_line_search(self):
        f = field_from_profile(GRID,
                               lambda x1, x2: np.exp(-np.pi * (x1 ** 2 + x2 ** 2)))
        # independent 1D maximization of the weighted radial derivative
        rr = np.linspace(0.0, 4.0, 400_001)
        target = float(np.max((1.0 + rr) ** 2 * 2.0 * np.pi * rr
                              * np.exp(-np.pi * rr ** 2)))
        assert abs(schwartz_seminorm(f, 1, 2.0) - target) < 0.01 * target

    def test_monotone_in_r_and_m(self):
        psi = moment_wavelet(SHEAR, WaveletSpec("moment", order=2), GRID)
        vals_r = [schwartz_seminorm(psi, r, 1.0) for r in range(4)]
        assert all(x <= y + 1e-12 for x, y in zip(vals_r, vals_r[1:]))
        vals_m = [schwartz_seminorm(psi, 2, m) for m in (0.0, 1.0, 2.0)]
        assert all(x <= y + 1e-12 for x, y in zip(vals_m, vals_m[1:]))

    def test_order_cap(self):
        psi = moment_wavelet(SIM, WaveletSpec("moment", order=1), GRID)
        with pytest.raises(ValueError):
            schwartz_seminorm(psi, 7, 0.0)


class TestMomentSlope:
    def test_bump_reports_infinite(self):
        psi = bump_wavelet(SHEAR, WaveletSpec("bump", (1.0, 0.0), 0.5), GRID)
        assert moment_slope(psi, SHEAR) == math.inf

    @pytest.mark.parametrize("fam,order,expected", [
        (SIM, 1, 2.0), (SHEAR, 2, 2.0), (SHEAR, 3, 3.0),
        (DIAG, 1, 1.0), (DIAG, 3, 3.0),
    ], ids=["sim1", "shear2", "shear3", "diag1", "diag3"])
    def test_recovers_construction_order(self, fam, order, expected):
        psi = moment_wavelet(fam, WaveletSpec("moment", order=order), GRID)
        assert abs(moment_slope(psi, fam) - expected) <= 0.2
