import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from fuzzy_incubator.errors import ModelError
from fuzzy_incubator.membership import Gaussian, Triangular, eval_membership

finite = st.floats(-1e3, 1e3, allow_nan=False)


@st.composite
def triangles(draw):
    a, m, b = sorted(draw(st.lists(finite, min_size=3, max_size=3)))
    if a == b:
        b = a + 1.0
    return Triangular(a, m, b)


gaussians = st.builds(Gaussian, finite, st.floats(1e-3, 1e3))
mfs = st.one_of(triangles(), gaussians)


class TestTriangular:
    def test_peak(self):
        assert eval_membership(Triangular(37, 38, 39), 38) == 1.0

    def test_rising_midpoint(self):
        assert eval_membership(Triangular(37, 38, 39), 37.5) == 0.5

    def test_falling_flank_depends_on_x(self):
        tri = Triangular(37, 38, 39)
        assert tri(38.25) == pytest.approx(0.75)
        assert tri(38.75) == pytest.approx(0.25)

    @pytest.mark.parametrize("x", [36.0, 37.0, 39.0, 40.0])
    def test_zero_at_and_outside_feet(self, x):
        assert Triangular(37, 38, 39)(x) == 0.0

    def test_left_shoulder(self):
        cold = Triangular(0, 0, 38)
        assert cold(0) == 1.0
        assert cold(19) == pytest.approx(0.5)
        assert cold(-1) == 0.0

    def test_right_shoulder(self):
        hot = Triangular(38, 80, 80)
        assert hot(80) == 1.0
        assert hot(59) == pytest.approx(0.5)
        assert hot(81) == 0.0

    @pytest.mark.parametrize("params", [(2, 1, 3), (0, 4, 3), (1, 1, 1), (math.nan, 0, 1)])
    def test_rejects_bad_parameters(self, params):
        with pytest.raises(ModelError):
            Triangular(*params)


class TestGaussian:
    def test_centre(self):
        assert Gaussian(5, 1.2)(5) == 1.0

    def test_one_spread_out(self):
        assert Gaussian(5, 1.2)(6.2) == pytest.approx(0.606531, abs=1e-6)
        assert Gaussian(5, 1.2)(3.8) == pytest.approx(math.exp(-0.5), abs=1e-12)

    @pytest.mark.parametrize("k", [0.0, -1.0])
    def test_rejects_non_positive_spread(self, k):
        with pytest.raises(ModelError):
            Gaussian(0, k)


@given(mfs, finite)
def test_membership_in_unit_interval(mf, x):
    assert 0.0 <= mf(x) <= 1.0


@given(gaussians, st.floats(0, 1e3))
def test_gaussian_symmetric(mf, d):
    assert mf(mf.m + d) == pytest.approx(mf(mf.m - d), abs=1e-12)


@given(triangles(), finite, st.floats(1e-9, 1e-3))
def test_triangle_lipschitz_between_feet(mf, x, eps):
    # piecewise linear and continuous: bounded by the steeper flank's slope
    assume(mf.a < mf.m < mf.b)
    slope = 1.0 / min(mf.m - mf.a, mf.b - mf.m)
    assert abs(mf(x + eps) - mf(x)) <= slope * eps * (1 + 1e-6) + 1e-12


@given(mfs, st.lists(finite, min_size=1, max_size=30))
def test_vectorised_matches_scalar(mf, xs):
    got = mf.evaluate(np.array(xs))
    want = np.array([mf(x) for x in xs])
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-12)
