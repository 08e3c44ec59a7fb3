import numpy as np
import pytest

from coorbitkit import (AffinePoint, DilationParams, GroupFamily, WeightSpec,
                        control_weight_eval, control_weight_symmetric,
                        weight_eval)
from coorbitkit.groups import (affine_compose, affine_invert, modular_G,
                               operator_norm)
from coorbitkit.weights import control_weight_symmetric_slices, hweight_ab

from test_groups import ALL, random_element

SIM = GroupFamily.similitude()


class TestWeightEval:
    def test_trivial_weight(self):
        spec = WeightSpec(GroupFamily.shearlet(0.5))  # s = 0, u = 0
        rng = np.random.default_rng(0)
        for _ in range(20):
            h = random_element(spec.family, rng)
            assert weight_eval(spec, rng.normal(size=2), h) == 1.0

    def test_similitude_substitution(self):
        # s=1, u=0 at the identity with unit offset: (1+1+1) * 2
        spec = WeightSpec(SIM, s=1.0)
        assert weight_eval(spec, [1.0, 0.0], SIM.identity()) == 6.0

    def test_submultiplicative(self):
        rng = np.random.default_rng(1)
        for fam in ALL:
            spec = WeightSpec(fam, s=1.5, u=0.75, t=0.5)
            for _ in range(250):
                h1, h2 = random_element(fam, rng), random_element(fam, rng)
                p1 = AffinePoint(rng.normal(size=2), h1)
                p2 = AffinePoint(rng.normal(size=2), h2)
                p12 = affine_compose(p1, p2)
                v12 = weight_eval(spec, p12.x, p12.h)
                v1 = weight_eval(spec, p1.x, p1.h)
                v2 = weight_eval(spec, p2.x, p2.h)
                assert v12 <= v1 * v2 * (1 + 1e-12)

    def test_shearlet_literature_bundle(self):
        fam = GroupFamily.shearlet(0.5)
        spec = WeightSpec(fam, shear_lit=(1.0, 0.5))
        val = hweight_ab(spec, 4.0, 2.0)
        assert np.isclose(val, 4.0 * (4.0 + 0.25 + 1.0) ** 0.5)
        with pytest.raises(ValueError):
            WeightSpec(SIM, shear_lit=(1.0, 0.5))


class TestControlWeightBound:
    def test_similitude_example(self):
        # p=q=2, s=0, u=0 at determinant 4: (2+2) * 2 * 2 * 1
        spec = WeightSpec(SIM)
        h = DilationParams(SIM, 2.0, 0.0)
        assert control_weight_eval(spec, 2, 2, [0.0, 0.0], h) == 16.0

    def test_identity_p_equals_q(self):
        spec = WeightSpec(SIM)
        val = control_weight_eval(spec, 2, 2, [0.0, 0.0], SIM.identity())
        assert val == (2 + 2) * 1 * 2 * 1

    def test_dominates_plain_weight(self):
        rng = np.random.default_rng(2)
        for fam in ALL:
            spec = WeightSpec(fam, s=1.0, u=0.5, t=0.5)
            for _ in range(50):
                h = random_element(fam, rng)
                x = rng.normal(size=2)
                assert control_weight_eval(spec, 2, 1.0, x, h) >= \
                    weight_eval(spec, x, h) / (1.0 + operator_norm(h)) ** spec.s


class TestSymmetricControlWeight:
    @pytest.mark.parametrize("p,q", [(2, 2), (2, 1), (1.5, 3.0), (2, np.inf)])
    def test_symmetry_identity(self, p, q):
        rng = np.random.default_rng(3)
        for fam in ALL:
            spec = WeightSpec(fam, s=1.0, u=0.5, t=0.25)
            for _ in range(100):
                h = random_element(fam, rng)
                x = 2.0 * rng.normal(size=2)
                pinv = affine_invert(AffinePoint(x, h))
                v = control_weight_symmetric(spec, p, q, x, h)
                vi = control_weight_symmetric(spec, p, q, pinv.x, pinv.h)
                assert np.isclose(v, vi / modular_G(h), rtol=1e-10)

    def test_bounded_below_by_one(self):
        rng = np.random.default_rng(4)
        for fam in ALL:
            for s in (0.0, 1.0):
                spec = WeightSpec(fam, s=s, u=0.5, t=0.25)
                for _ in range(200):
                    h = random_element(fam, rng, span=4.0)
                    x = 3.0 * rng.normal(size=2)
                    assert control_weight_symmetric(spec, 2, 2, x, h) >= 1.0

    def test_slices_match_pointwise(self):
        fam = GroupFamily.shearlet(0.5)
        spec = WeightSpec(fam, s=1.0, u=0.5)
        rng = np.random.default_rng(5)
        x1 = rng.normal(size=(4, 4))
        x2 = rng.normal(size=(4, 4))
        a = np.array([0.7, 2.0])
        b = np.array([-0.3, 1.0])
        slices = control_weight_symmetric_slices(spec, 2, 2, x1, x2, a, b)
        for j in range(2):
            h = DilationParams(fam, a[j], b[j])
            for i in range(4):
                for k in range(4):
                    want = control_weight_symmetric(
                        spec, 2, 2, [x1[i, k], x2[i, k]], h)
                    assert np.isclose(slices[j, i, k], want, rtol=1e-12)
