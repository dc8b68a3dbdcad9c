import math

import numpy as np
import pytest

from annulus_neumann import AnnulusGeometry, EvalError, NonlinearSystem, check_H

GEOM = AnnulusGeometry(2, 1.0, math.e)


def make(f1, f2, omega=1.0, geom=GEOM):
    return NonlinearSystem.from_strings(f1, f2, omega, omega, geom)


def test_g_of_zero_nonlinearity_is_shift():
    assert make("0", "0").g(1, 0.5, 2.0, 0.0, 0.0, 0.0) == pytest.approx(2.0)


def test_g_example_values(example_sys):
    assert example_sys.g(1, 1.0, 0.0, 0.0, 0.0, 0.0) == 0.0
    want = 1.0 * example_sys.f(1, 1.0, 0.5, 0.0, 0.0, 0.0) + 0.5
    assert example_sys.g(1, 1.0, 0.5, 0.0, 0.0, 0.0) == pytest.approx(want, rel=1e-14)
    assert example_sys.g(1, 1.0, 0.5, 0.0, 0.0, 0.0) == pytest.approx(0.4967, abs=1e-4)


def test_g_divides_gradient_by_speed():
    # at t = 0 the speed |r'| is e, so p = e corresponds to |grad u| = 1
    sys_ = make("gu", "gv")
    assert sys_.g(1, 0.0, 0.0, 0.0, math.e, 0.0) == pytest.approx(GEOM.d(0.0) * 1.0)
    assert sys_.g(2, 0.0, 0.0, 0.0, 0.0, -math.e) == pytest.approx(GEOM.d(0.0) * 1.0)


def test_bad_component_index():
    with pytest.raises(ValueError):
        make("0", "0").g(3, 0.5, 0, 0, 0, 0)


def test_h_zero_nonlinearity_passes_with_zero_margin():
    rep = check_H(make("0", "0"), sample_density=5, z_bound=2.0)
    assert rep.passed
    assert all(c.worst_margin == 0.0 for c in rep.components)


def test_h_example_passes(example_sys):
    rep = check_H(example_sys, sample_density=9, z_bound=80.0)
    assert rep.passed


def test_h_fails_for_minus_u():
    rep = check_H(make("-u", "0"), sample_density=5, z_bound=2.0)
    assert not rep.passed
    bad = rep.components[0]
    assert not bad.passed and bad.witness[1] > 0
    assert rep.components[1].passed


def test_h_accepts_mild_decay():
    # -0.1 w >= -w / e^2 because 0.1 < e^-2
    assert check_H(make("-0.1*u", "-0.1*v"), sample_density=5).passed


def test_h_report_dict():
    d = check_H(make("0", "0"), sample_density=3, z_bound=1.0).as_dict()
    assert d["verdict"] == "PASS" and d["certified"] is False and len(d["components"]) == 2


def test_h_argument_checks():
    with pytest.raises(ValueError):
        check_H(make("0", "0"), sample_density=1)
    with pytest.raises(ValueError):
        check_H(make("0", "0"), z_bound=0.0)


def test_eval_error_propagates():
    with pytest.raises(EvalError):
        check_H(make("1/(u-1)", "0"), sample_density=3, z_bound=2.0)


def test_g_nonnegative_when_h_holds(example_sys):
    rep = check_H(example_sys, sample_density=9, z_bound=80.0)
    assert rep.passed
    rng = np.random.default_rng(11)
    n = 100_000
    t = rng.random(n)
    u, v = rng.uniform(0, 80, n), rng.uniform(0, 80, n)
    speed = np.abs(GEOM.rprime(t))
    # sample gradients inside the checked box, i.e. p / |r'| <= 80
    p, q = rng.uniform(0, 80, n) * speed, rng.uniform(0, 80, n) * speed
    for i in (1, 2):
        assert np.min(example_sys.g(i, t, u, v, p, q)) >= -1e-12


def test_describe_round_trip(example_sys):
    d = example_sys.describe()
    again = NonlinearSystem.from_strings(d["f1"], d["f2"], d["omega1"], d["omega2"], GEOM)
    assert again.f1 == example_sys.f1 and again.f2 == example_sys.f2
