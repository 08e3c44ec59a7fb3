import numpy as np
import pytest

from coorbitkit import (DilationParams, FrequencyGrid, GroupFamily, HGrid,
                        MixedNormParams, SampledField, WaveletSpec, analyze,
                        build_hgrid, bump_wavelet, calderon_constant,
                        calderon_function, field_from_profile, inner,
                        iter_analyze, l2_norm, mixed_norm_stream,
                        parseval_ratio, radial_bump_field, read_transform,
                        synthesize, write_transform)
from coorbitkit.groups import compose_ab, det_ab, invert_ab

SIM = GroupFamily.similitude()


def small_grid():
    return FrequencyGrid(64, 4.0)


def unit_hgrid(family):
    e = family.identity()
    return HGrid(family, [e.a], [e.b], [1.0])


class TestHGrid:
    def test_default_shapes(self):
        assert len(build_hgrid(SIM)) == 33 * 33
        assert len(build_hgrid(GroupFamily.diagonal())) == 33 * 33 * 4
        assert len(build_hgrid(GroupFamily.shearlet(0.5))) == 33 * 33 * 2
        assert len(build_hgrid(GroupFamily.scalar())) == 33

    def test_quadrature_of_known_integral(self):
        # integral of exp(-2 log(rho)^2) over the similitude group equals
        # 2 pi sqrt(pi / 2); the integrand decays below 1e-15 inside the
        # default mesh range
        hg = build_hgrid(SIM, n_a=129)
        val = np.sum(np.exp(-2.0 * np.log(np.hypot(hg.a, hg.b)) ** 2)
                     * hg.weight)
        assert np.isclose(val, 2 * np.pi * np.sqrt(np.pi / 2), rtol=1e-6)

    def test_nodes_valid(self):
        for fam in (SIM, GroupFamily.diagonal(), GroupFamily.shearlet(0.5),
                    GroupFamily.scalar()):
            hg = build_hgrid(fam, n_a=9, n_b=9)
            assert len(hg.nodes) == len(hg)
            assert np.all(hg.weight > 0)
            assert np.all(np.abs(hg.dets()) > 0)


class TestAnalyze:
    def test_self_coefficient_at_identity(self):
        g = small_grid()
        psi = bump_wavelet(SIM, WaveletSpec("bump", (1.0, 0.0), 0.5), g)
        T = analyze(psi, psi, unit_hgrid(SIM))
        mid = g.n // 2
        assert np.isclose(T.values[0, mid, mid], 1.0, atol=1e-12)

    def test_linearity(self):
        g = small_grid()
        rng = np.random.default_rng(0)
        psi = bump_wavelet(SIM, WaveletSpec("bump", (1.0, 0.0), 0.5), g)
        f1 = SampledField(g, rng.normal(size=(g.n, g.n)) + 0j)
        f2 = SampledField(g, rng.normal(size=(g.n, g.n)) + 0j)
        hg = build_hgrid(SIM, n_a=5, n_b=5)
        a, b = 1.7 - 0.3j, -0.4 + 1.1j
        combo = SampledField(g, a * f1.values + b * f2.values)
        lhs = analyze(combo, psi, hg).values
        rhs = (a * analyze(f1, psi, hg).values
               + b * analyze(f2, psi, hg).values)
        assert np.allclose(lhs, rhs, atol=1e-12)
        # conjugate-linear in the wavelet
        lam = 0.8 + 0.6j
        scaled = psi.copy_with(lam * psi.values)
        assert np.allclose(analyze(f1, scaled, hg).values,
                           np.conj(lam) * analyze(f1, psi, hg).values,
                           atol=1e-12)

    def test_thread_determinism(self):
        g = small_grid()
        psi = bump_wavelet(SIM, WaveletSpec("bump", (1.0, 0.0), 0.5), g)
        f = radial_bump_field(g, 0.5, 1.5, SIM)
        hg = build_hgrid(SIM, n_a=9, n_b=9)
        T1 = analyze(f, psi, hg, chunk=7, threads=1)
        T2 = analyze(f, psi, hg, chunk=7, threads=3)
        assert np.array_equal(T1.values, T2.values)

    def test_covariance_under_grid_aligned_shifts(self):
        # unit-determinant integer shear and a grid translation
        fam = GroupFamily.shearlet(1.0)
        g = FrequencyGrid(128, 4.0)
        psi = bump_wavelet(fam, WaveletSpec("bump", (1.0, 0.0), 0.4), g)
        b1 = bump_wavelet(fam, WaveletSpec("bump", (1.2, -0.5), 0.3), g)
        b2 = bump_wavelet(fam, WaveletSpec("bump", (0.5, 0.3), 0.2), g)

        def f_prof(u1, u2):
            return b1.profile(u1, u2) + 0.7 * b2.profile(u1, u2)

        f = SampledField(g, f_prof(*g.mesh()), "frequency", fam)

        y = np.array([0.5, -0.25])
        shear = 1.0  # group element (1, 1): matrix [[1,1],[0,1]]
        x1, x2 = g.mesh()
        phase = np.exp(-2j * np.pi * (y[0] * x1 + y[1] * x2))
        moved = SampledField(g, phase * f_prof(x1, x1 + x2), "frequency",
                             fam)

        bvals = np.arange(-3.0, 3.01, 0.5)
        nodes_a = np.concatenate([np.full_like(bvals, 1.0),
                                  np.full_like(bvals, 2.0)])
        nodes_b = np.concatenate([bvals, bvals])
        hg = HGrid(fam, nodes_a, nodes_b, np.ones_like(nodes_a))

        T_moved = analyze(moved, psi, hg)
        T_base = analyze(f, psi, hg)

        # (y,g)^{-1} (x,h) = (g^{-1}(x - y), g^{-1} h)
        ga, gb = invert_ab(fam, 1.0, shear)
        dx = g.space_spacing
        s1 = np.round(y[0] / dx).astype(int)
        s2 = np.round(y[1] / dx).astype(int)
        n = g.n
        checked = 0
        for j in range(len(hg)):
            ca, cb = compose_ab(fam, ga, gb, hg.a[j], hg.b[j])
            match = np.nonzero((np.abs(hg.a - ca) < 1e-12)
                               & (np.abs(hg.b - cb) < 1e-12))[0]
            if len(match) == 0:
                continue
            jp = int(match[0])
            # x' = g^{-1}(x - y): i' = i - (k - n/2) - s1 + s2, k' = k - s2
            i, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
            ip = i - (k - n // 2) - s1 + s2
            kp = k - s2
            ok = (ip >= 0) & (ip < n) & (kp >= 0) & (kp < n)
            lhs = T_moved.values[j][ok]
            rhs = T_base.values[jp][ip[ok], kp[ok]]
            scale = np.max(np.abs(T_base.values[jp])) + 1e-30
            if scale > 1e-6:
                assert np.max(np.abs(lhs - rhs)) < 1e-6 * scale
                checked += 1
        assert checked >= 8

    def test_similitude_rotation_symmetry(self):
        g = small_grid()
        rad = radial_bump_field(g, 0.5, 1.5, SIM)
        theta = np.array([0.0, np.pi / 2])
        hg = HGrid(SIM, 1.3 * np.cos(theta), 1.3 * np.sin(theta), [1.0, 1.0])
        T = analyze(rad, rad, hg)
        # same modulus, different rotation: identical radial slices
        assert np.allclose(T.values[0], T.values[1], atol=1e-12)
        # each slice is itself invariant under quarter turns of x
        v = T.values[0][1:, 1:]
        assert np.allclose(v, np.rot90(v), atol=1e-10)


class TestSynthesize:
    def test_zero_transform(self):
        g = small_grid()
        psi = bump_wavelet(SIM, WaveletSpec("bump", (1.0, 0.0), 0.5), g)
        hg = build_hgrid(SIM, n_a=5, n_b=5)
        T = analyze(psi, psi, hg)
        T.values[:] = 0.0
        assert np.all(synthesize(T, psi).values == 0.0)

    def test_single_coefficient_gives_translate(self):
        g = small_grid()
        psi = bump_wavelet(SIM, WaveletSpec("bump", (1.0, 0.0), 0.5), g)
        hg = HGrid(SIM, [1.0], [0.0], [0.7])
        vals = np.zeros((1, g.n, g.n), dtype=complex)
        i0, k0 = g.n // 2 + 4, g.n // 2 - 8
        c = 2.0 - 1.0j
        vals[0, i0, k0] = c
        from coorbitkit.cwt import TransformArray
        rec = synthesize(TransformArray(g, hg, vals), psi)
        x0 = np.array([g.space_axis()[i0], g.space_axis()[k0]])
        x1, x2 = g.mesh()
        expected = (c * 0.7 * g.space_spacing ** 2
                    * np.exp(-2j * np.pi * (x0[0] * x1 + x0[1] * x2))
                    * psi.values)
        assert np.allclose(rec.values, expected, atol=1e-12)

    def test_adjoint_identity(self):
        g = small_grid()
        rng = np.random.default_rng(1)
        psi = bump_wavelet(SIM, WaveletSpec("bump", (1.0, 0.0), 0.5), g)
        f = SampledField(g, rng.normal(size=(g.n, g.n))
                         + 1j * rng.normal(size=(g.n, g.n)))
        hg = build_hgrid(SIM, n_a=5, n_b=5)
        T = analyze(f, psi, hg)
        R = T.values.copy()
        rng.shuffle(R.reshape(len(hg), -1))
        from coorbitkit.cwt import TransformArray
        Trand = TransformArray(g, hg, R)
        cellx = g.space_spacing ** 2
        lhs = np.sum(hg.weight / np.abs(hg.dets())
                     * np.sum(T.values * np.conj(Trand.values),
                              axis=(1, 2)) * cellx)
        rhs = inner(f, synthesize(Trand, psi))
        assert abs(lhs - rhs) < 1e-8 * abs(lhs)

    def test_inversion_up_to_calderon_constant(self):
        g = FrequencyGrid(128, 4.0)
        rad = radial_bump_field(g, 0.5, 1.6, SIM)
        hg = build_hgrid(SIM)
        T = analyze(rad, rad, hg)
        rec = synthesize(T, rad)
        c = parseval_ratio(rad, rad, hg)
        err = l2_norm(SampledField(g, rec.values - c * rad.values))
        assert err / (c * l2_norm(rad)) < 0.02


class TestCalderon:
    def probes(self, rng, n=64):
        th = rng.uniform(-np.pi, np.pi, n)
        rr = 2.0 ** rng.uniform(-1, 1, n)
        return np.stack([rr * np.cos(th), rr * np.sin(th)], axis=1)

    def test_radial_constant_is_two_pi(self):
        g = FrequencyGrid(256, 8.0)
        rad = radial_bump_field(g, 0.5, 2.0, SIM)
        hg = build_hgrid(SIM, n_a=129, n_b=17)
        mean, rel = calderon_constant(rad, hg, self.probes(
            np.random.default_rng(2)))
        assert rel < 0.01
        assert np.isclose(mean, 2 * np.pi, rtol=0.01)

    def test_zero_wavelet(self):
        g = small_grid()
        z = SampledField(g, np.zeros((g.n, g.n), dtype=complex))
        hg = build_hgrid(SIM, n_a=9, n_b=9)
        assert np.all(calderon_function(z, [[1.0, 0.0]], hg) == 0.0)

    def test_action_invariance(self):
        g = FrequencyGrid(256, 8.0)
        rad = radial_bump_field(g, 0.5, 2.0, SIM)
        hg = build_hgrid(SIM, n_a=129, n_b=17)
        xi = np.array([1.0, 0.3])
        xi2 = 1.25 * xi  # the dual action of a similitude node
        v1 = calderon_function(rad, xi[None, :], hg)
        v2 = calderon_function(rad, xi2[None, :], hg)
        assert np.isclose(v1, v2, rtol=0.01)

    def test_quadratic_scaling(self):
        g = small_grid()
        rad = radial_bump_field(g, 0.6, 1.6, SIM)
        hg = build_hgrid(SIM, n_a=17, n_b=9)
        doubled = rad.copy_with(2.0 * rad.values)
        probes = self.probes(np.random.default_rng(3), 16)
        m1, _ = calderon_constant(rad, hg, probes)
        m2, _ = calderon_constant(doubled, hg, probes)
        assert np.isclose(m2, 4.0 * m1, rtol=1e-12)

    def test_undersized_hgrid_flagged(self):
        g = FrequencyGrid(256, 8.0)
        rad = radial_bump_field(g, 0.5, 2.0, SIM)
        tiny = build_hgrid(SIM, a_min=2.0 ** -0.5, a_max=2.0 ** 0.5,
                           n_a=17, n_b=17)
        _, rel = calderon_constant(rad, tiny, self.probes(
            np.random.default_rng(4)))
        assert rel > 0.2

    def test_parseval_ratio_equals_streamed_norm(self):
        g = small_grid()
        psi = bump_wavelet(SIM, WaveletSpec("bump", (1.0, 0.0), 0.5), g)
        f = radial_bump_field(g, 0.5, 1.5, SIM)
        hg = build_hgrid(SIM, n_a=9, n_b=9)
        ratio = parseval_ratio(f, psi, hg)
        norm = mixed_norm_stream(iter_analyze(f, psi, hg), g, hg,
                                 MixedNormParams(2, 2))
        assert np.isclose(ratio, norm ** 2 / l2_norm(f) ** 2, rtol=1e-10)


class TestTransformIO:
    def test_round_trip(self, tmp_path):
        g = small_grid()
        psi = bump_wavelet(SIM, WaveletSpec("bump", (1.0, 0.0), 0.5), g)
        hg = build_hgrid(SIM, n_a=5, n_b=5)
        T = analyze(psi, psi, hg)
        path = tmp_path / "transform.bin"
        write_transform(T, path)
        back = read_transform(path)
        assert back.xgrid == T.xgrid
        assert back.hgrid.family == T.hgrid.family
        assert np.array_equal(back.values, T.values)
        assert np.array_equal(back.hgrid.weight, T.hgrid.weight)
