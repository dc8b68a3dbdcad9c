import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from annulus_neumann import (AnnulusGeometry, Box5, LadderError, NonlinearSystem, RadiiLadder, SamplingBudget,
                             box_extremum, check_nonexistence, check_theorem_ellyptic, check_theorem_ellyptic2,
                             check_theorem_multi2, make_box, parse)
from annulus_neumann.hypotheses import ConditionReport

E = math.e
GEOM = AnnulusGeometry(2, 1.0, E)
C1 = 1 / math.cosh(1.0)
TWO_LEVEL = RadiiLadder((0.1, 0.1), (1.0, 1.0))


def make(f1, f2, omega=1.0):
    return NonlinearSystem.from_strings(f1, f2, omega, omega, GEOM)


def test_box_atilde_example():
    box = make_box("ATilde", 1, (0.5, 0.5), GEOM, (C1, C1))
    assert box.r == (1.0, E)
    assert box.w1 == pytest.approx((0.324027, 0.5), abs=1e-6)
    assert box.w2 == (0.0, 0.5)
    assert box.z1 == pytest.approx((0.0, 0.5)) and box.z2 == pytest.approx((0.0, 0.5))


def test_box_omegatilde_example():
    box = make_box("OmegaTilde", 1, (0.5, 0.5), GEOM, (C1, C1))
    top = 0.5 * math.cosh(1.0)
    assert top == pytest.approx(0.771540, abs=1e-6)
    assert box.w1 == pytest.approx((0.5, top))
    assert box.w2 == pytest.approx((0.0, top))
    assert box.z1 == pytest.approx((0.0, top)) and box.z2 == pytest.approx((0.0, top))


def test_box_star_starts_at_zero():
    box = make_box("OmegaTildeStar", None, (0.5, 0.5), GEOM, (C1, C1))
    assert box.w1[0] == 0.0 and box.w2[0] == 0.0
    assert box.w1[1] == pytest.approx(0.5 / C1)


def test_boxes_for_second_component_and_alpha():
    geom = AnnulusGeometry(2, 1.0, E**2)  # alpha = 2
    c = (0.6, 0.3)
    a2 = make_box("ATilde", 2, (1.0, 3.0), geom, c)
    assert a2.w1 == (0.0, 1.0) and a2.w2 == pytest.approx((0.9, 3.0))
    assert a2.z1 == pytest.approx((0.0, 2.0)) and a2.z2 == pytest.approx((0.0, 6.0))
    o2 = make_box("OmegaTilde", 2, (1.0, 3.0), geom, c)
    assert o2.w1 == pytest.approx((0.0, 1 / 0.6)) and o2.w2 == pytest.approx((3.0, 10.0))
    assert o2.z2 == pytest.approx((0.0, 20.0))


@pytest.mark.parametrize("args", [("ATilde", 3, (1, 1)), ("ATilde", 1, (0, 1)), ("Bogus", 1, (1, 1))])
def test_box_errors(args):
    kind, i, levels = args
    with pytest.raises(ValueError):
        make_box(kind, i, levels, GEOM, (C1, C1))


def test_box5_validation():
    with pytest.raises(ValueError):
        Box5((1, 2), (1, 0), (0, 1), (0, 1), (0, 1))
    with pytest.raises(ValueError):
        Box5((1, 2), (-1, 0), (0, 1), (0, 1), (0, 1))


def test_extremum_coordinate_function():
    box = Box5((1, E), (0.324, 0.5), (0, 1), (0, 1), (0, 1))
    value, witness, _ = box_extremum(parse("u"), box, "inf")
    assert value == pytest.approx(0.324) and witness[1] == pytest.approx(0.324)


def test_extremum_constant():
    box = Box5((1, E), (0.3, 0.5), (0, 1), (0, 1), (0, 1))
    for mode in ("inf", "sup"):
        assert box_extremum(parse("1"), box, mode)[0] == 1.0


def test_extremum_example_sup_on_atilde(example_sys):
    box = make_box("ATilde", 1, (0.5, 0.5), GEOM, example_sys.cone_constants())
    value, witness, _ = box_extremum(example_sys.f1, box, "sup")
    assert value < 0
    assert value == pytest.approx(-1.990796221386508e-3, rel=1e-9)


def test_extremum_bad_mode():
    with pytest.raises(ValueError):
        box_extremum(parse("u"), Box5((1, 2), (0, 1), (0, 1), (0, 1), (0, 1)), "max")


def test_budget_validation():
    with pytest.raises(ValueError):
        SamplingBudget(base_per_axis=2)


# separable oracle: true extremum is the sum of per-axis 1-D extrema
def _axis_extremum(poly, lo, hi, mode):
    crit = [x.real for x in np.roots(np.polyder(poly)) if abs(x.imag) < 1e-12 and lo <= x.real <= hi]
    vals = [np.polyval(poly, x) for x in [lo, hi, *crit]]
    return min(vals) if mode == "inf" else max(vals)


coef = st.floats(-3.0, 3.0).map(lambda x: round(x, 2))
polys = st.lists(coef, min_size=3, max_size=4)


def _poly_text(var, poly):
    deg = len(poly) - 1
    return "+".join(f"({a})*{var}^{deg - k}" for k, a in enumerate(poly))


@settings(max_examples=40, deadline=None)
@given(st.lists(polys, min_size=5, max_size=5), st.sampled_from(["inf", "sup"]))
def test_separable_polynomial_oracle(ps, mode):
    names = ["r", "u", "v", "gu", "gv"]
    box = Box5((1.0, 2.5), (0.0, 2.0), (0.5, 1.5), (0.0, 1.0), (0.2, 3.0))
    text = "+".join(_poly_text(n, p) for n, p in zip(names, ps))
    want = sum(_axis_extremum(p, lo, hi, mode) for p, (lo, hi) in zip(ps, box.intervals))
    got, witness, _ = box_extremum(parse(text), box, mode, SamplingBudget(9, 3))
    assert got == pytest.approx(want, abs=1e-9)
    assert all(lo <= x <= hi for x, (lo, hi) in zip(witness, box.intervals))


@settings(max_examples=25, deadline=None)
@given(st.lists(polys, min_size=2, max_size=2), st.sampled_from(["inf", "sup"]))
def test_refinement_is_monotone(ps, mode):
    text = f"({_poly_text('u', ps[0])})*({_poly_text('gu', ps[1])})+sin(3*u*gv)"
    box = Box5((1.0, 2.0), (0.0, 2.0), (0.0, 1.0), (0.0, 1.5), (0.0, 1.0))
    prev = None
    for rounds in range(4):
        val = box_extremum(parse(text), box, mode, SamplingBudget(5, rounds))[0]
        if prev is not None:
            assert val <= prev + 1e-15 if mode == "inf" else val >= prev - 1e-15
        prev = val


def test_condition_report_margin_rule():
    sup = ConditionReport("x", "sup", -1.0, 0.0, (0,) * 5, 1)
    inf = ConditionReport("y", "inf", 2.0, 3.0, (0,) * 5, 1)
    assert sup.margin == 1.0 and sup.verdict == "PASS"
    assert inf.margin == -1.0 and inf.verdict == "FAIL"
    assert ConditionReport("z", "inf", 0.0, 0.0, (0,) * 5, 1).verdict == "FAIL"
    assert ConditionReport("z", "inf", 1e-14, 1.0 - 1e-14 + 1e-14, (0,) * 5, 1).verdict == "FAIL"


# ------------------------------------------------------------------- theorems


def test_ladder_invariants():
    with pytest.raises(LadderError):
        RadiiLadder((1.0, 1.0), (0.5, 2.0), (3.0, 3.0), (4.0, 4.0))
    with pytest.raises(LadderError):
        RadiiLadder((0.5, 0.5), (1.1, 2.0), (3.5, 6.5), (3.5, 8.0))
    with pytest.raises(LadderError):
        RadiiLadder((0.5, 0.5), (1.1, 2.0), (3.5, 6.5))
    with pytest.raises(LadderError):
        RadiiLadder((0.0, 0.5), (1.1, 2.0))


def test_ladder_c_conditions(ladder):
    assert ladder.validate((C1, C1)) == []
    with pytest.raises(LadderError):
        RadiiLadder((0.5, 0.5), (0.6, 0.6)).validate((C1, C1))
    # s/c < theta holds here while s/c < c*theta does not
    with pytest.raises(LadderError, match="weaker"):
        RadiiLadder((0.5, 0.5), (1.0, 1.0), (2.0, 2.0), (3.0, 3.0)).validate((C1, C1))


def test_ellyptic_thresholds_are_zero_at_unit_shift():
    rep = check_theorem_ellyptic(make("1", "1"), TWO_LEVEL)
    verdicts = {c.condition: c.verdict for c in rep.conditions}
    assert verdicts == {"pde1[i=1]": "PASS", "pde1[i=2]": "PASS", "pde2[i=1]": "FAIL", "pde2[i=2]": "FAIL"}
    assert all(c.threshold == 0.0 for c in rep.conditions)
    assert not rep.passed


def test_ellyptic_negative_constant_fails_pde1():
    rep = check_theorem_ellyptic(make("-1", "-1"), TWO_LEVEL)
    assert [c.verdict for c in rep.conditions[:2]] == ["FAIL", "FAIL"]


def test_ellyptic2_pde3_threshold():
    rep = check_theorem_ellyptic2(make("10", "0"), RadiiLadder((0.5, 0.5), (5.0, 5.0)))
    pde3 = {c.condition: c for c in rep.conditions if c.condition.startswith("pde3")}
    assert pde3["pde3[i=1]"].threshold == pytest.approx(0.5)
    assert pde3["pde3[i=1]"].verdict == "PASS"
    assert pde3["pde3[i=2]"].verdict == "FAIL"
    pde4 = [c for c in rep.conditions if c.condition.startswith("pde4")]
    assert all(c.threshold == 0.0 for c in pde4)


def test_ellyptic2_zero_fails_pde3():
    rep = check_theorem_ellyptic2(make("0", "0"), TWO_LEVEL)
    assert [c.verdict for c in rep.conditions[:2]] == ["FAIL", "FAIL"]
    assert not rep.passed


def test_mode_mismatch(ladder):
    with pytest.raises(LadderError):
        check_theorem_ellyptic(make("1", "1"), ladder)
    with pytest.raises(LadderError):
        check_theorem_multi2(make("1", "1"), TWO_LEVEL)


def test_multi2_example_passes(example_sys, ladder):
    rep = check_theorem_multi2(example_sys, ladder)
    assert [c.condition for c in rep.conditions] == [
        f"{n}[i={i}]" for n in ("uno", "due", "tre", "quattro") for i in (1, 2)]
    assert all(c.verdict == "PASS" and c.margin > 0 for c in rep.conditions)
    assert rep.passed and rep.as_dict()["verdict"] == "sampled-PASS"


def test_multi2_is_deterministic(example_sys, ladder):
    a = check_theorem_multi2(example_sys, ladder).as_dict()
    b = check_theorem_multi2(example_sys, ladder).as_dict()
    assert a == b


def test_multi2_zero_fails_strict_conditions(ladder):
    rep = check_theorem_multi2(make("0", "0"), ladder)
    v = {c.condition: c.verdict for c in rep.conditions}
    for name in ("due", "quattro"):
        assert v[f"{name}[i=1]"] == v[f"{name}[i=2]"] == "FAIL"


def test_multi2_positive_constant_fails_uno(ladder):
    rep = check_theorem_multi2(make("1", "1"), ladder)
    assert {c.condition: c.verdict for c in rep.conditions}["uno[i=1]"] == "FAIL"


def test_multi2_pool_matches_serial(example_sys, ladder):
    from annulus_neumann.hypotheses import make_pool
    pool = make_pool(2)
    try:
        par = check_theorem_multi2(example_sys, ladder, pool=pool).as_dict()
    finally:
        pool.shutdown()
    assert par == check_theorem_multi2(example_sys, ladder).as_dict()


@pytest.mark.parametrize("f,want", [("-0.1*u", ("PASS", "FAIL")), ("u", ("FAIL", "PASS")),
                                    ("u-1", ("FAIL", "FAIL"))])
def test_nonexistence_sign_checks(f, want):
    f2 = f.replace("u", "v")
    cond1, cond2 = check_nonexistence(make(f, f2))
    assert (cond1.verdict, cond2.verdict) == want
    assert cond1.condition == "cond1" and cond2.condition == "cond2"


def test_nonexistence_example_fails_both(example_sys):
    cond1, cond2 = check_nonexistence(example_sys, SamplingBudget(z_bound=80.0))
    assert cond1.verdict == "FAIL" and cond2.verdict == "FAIL"
    assert cond1.extremum > 0 > cond2.extremum
