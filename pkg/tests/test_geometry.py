import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from annulus_neumann import AnnulusGeometry, GeometryError

E = math.e


@pytest.mark.parametrize("n,r0,r1,t,want", [
    (2, 1.0, E, 0.0, E),
    (2, 1.0, E, 0.5, math.exp(0.5)),
    (2, 1.0, E, 1.0, 1.0),
    (3, 1.0, 2.0, 1.0, 2.0),
    (3, 1.0, 2.0, 0.0, 1.0),
])
def test_r_of_t_values(n, r0, r1, t, want):
    assert AnnulusGeometry(n, r0, r1).r(t) == pytest.approx(want, rel=1e-14)


@pytest.mark.parametrize("n,r0,r1,t,want", [
    (2, 1.0, E, 1.0, -1.0),
    (2, 1.0, E, 0.0, -E),
    (3, 1.0, 2.0, 0.0, 0.5),
])
def test_rprime_values(n, r0, r1, t, want):
    assert AnnulusGeometry(n, r0, r1).rprime(t) == pytest.approx(want, rel=1e-14)


@pytest.mark.parametrize("n,r0,r1,t,want", [
    (2, 1.0, E, 0.0, E**2),
    (2, 1.0, E, 1.0, 1.0),
    (3, 1.0, 2.0, 0.0, 0.25),
])
def test_weight_values(n, r0, r1, t, want):
    assert AnnulusGeometry(n, r0, r1).d(t) == pytest.approx(want, rel=1e-14)


def test_d_extrema():
    assert AnnulusGeometry(2, 1.0, E).d_extrema() == pytest.approx((1.0, E**2), rel=1e-14)
    assert AnnulusGeometry(3, 1.0, 2.0).d_extrema() == pytest.approx((0.25, 4.0), rel=1e-14)


def test_thin_annulus_weights():
    lo, hi = AnnulusGeometry(2, 1.0, 1.0001).d_extrema()
    scale = math.log(1.0001) ** 2
    assert lo < hi
    assert lo == pytest.approx(scale, rel=1e-12)
    assert hi == pytest.approx(1.0001**2 * scale, rel=1e-12)


@pytest.mark.parametrize("n,r0,r1,want", [(2, 1.0, E, 1.0), (2, 1.0, E**2, 2.0), (3, 1.0, 2.0, 0.5)])
def test_alpha(n, r0, r1, want):
    assert AnnulusGeometry(n, r0, r1).alpha() == pytest.approx(want, rel=1e-14)


@pytest.mark.parametrize("args", [(1, 1.0, 2.0), (2, 0.0, 1.0), (2, 2.0, 1.0), (3, 1.0, 1.0),
                                  (2, 1.0, 1.0 + 1e-10), (2.5, 1.0, 2.0)])
def test_invalid_geometry_rejected(args):
    with pytest.raises(GeometryError):
        AnnulusGeometry(*args)


def test_domain_checked():
    g = AnnulusGeometry(2, 1.0, 2.0)
    for fn in (g.r, g.rprime, g.d):
        with pytest.raises(ValueError):
            fn(1.5)
        with pytest.raises(ValueError):
            fn(-0.1)


geoms = st.builds(
    lambda n, r0, ratio: AnnulusGeometry(n, r0, r0 * ratio),
    st.sampled_from([2, 3, 4, 7]),
    st.floats(0.05, 20.0),
    st.floats(1.01, 30.0),
)


@settings(max_examples=200, deadline=None)
@given(geoms, st.floats(0.0, 1.0))
def test_weight_is_rprime_squared(g, t):
    assert g.d(t) == pytest.approx(g.rprime(t) ** 2, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(geoms)
def test_bijection_endpoints_and_monotone(g):
    ts = np.linspace(0.0, 1.0, 201)
    rs = g.r(ts)
    assert sorted([rs[0], rs[-1]]) == pytest.approx([g.r0, g.r1], rel=1e-13)
    diffs = np.diff(rs)
    assert np.all(diffs > 0) or np.all(diffs < 0)
    assert np.allclose(g.t_of_r(rs), ts, atol=1e-10)


def _central(fn, t, h=1e-4):
    # Richardson combination of two central differences; n = 7 has a large r''' otherwise
    def cd(step):
        return (fn(t + step) - fn(t - step)) / (2 * step)
    return (4 * cd(h / 2) - cd(h)) / 3


mild_geoms = st.builds(
    lambda n, r0, ratio: AnnulusGeometry(n, r0, r0 * ratio),
    st.sampled_from([2, 3, 4, 7]),
    st.floats(0.05, 20.0),
    st.floats(1.01, 3.0),
)


@settings(max_examples=100, deadline=None)
@given(mild_geoms, st.floats(2e-4, 1 - 2e-4))
def test_rprime_matches_central_difference(g, t):
    assert _central(g.r, t) == pytest.approx(g.rprime(t), rel=1e-6)


@settings(max_examples=100, deadline=None)
@given(mild_geoms, st.floats(2e-4, 1 - 2e-4))
def test_rsecond_relation(g, t):
    assert _central(g.rprime, t) == pytest.approx(g.rsecond(t), rel=1e-6)
    assert g.rsecond(t) == pytest.approx((g.n - 1) * g.rprime(t) ** 2 / g.r(t), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(geoms)
def test_alpha_is_dense_minimum(g):
    ts = np.linspace(0.0, 1.0, 10001)
    assert g.alpha() == pytest.approx(np.min(np.abs(g.rprime(ts))), rel=1e-10)
    lo, hi = g.d_extrema()
    d = g.d(ts)
    assert lo == pytest.approx(d.min(), rel=1e-10)
    assert hi == pytest.approx(d.max(), rel=1e-10)
