import math

import numpy as np
import pytest
from pydantic import ValidationError

from core.errors import BadParams, IndexOutOfRange, UndefinedAtPoint, UndefinedAtProfile
from core.rules import (
    KarcherMeanRule,
    Profile,
    RuleFamily,
    RuleSpec,
    SphereSelfMap,
    Totality,
    coordinate_embedding,
    delete_voter,
    diagonal_map,
    make_builtin,
    make_builtin_family,
    restrict_coordinate,
    restrict_pair,
    rule_from_spec,
    twin_embedding,
    two_slot_rule,
)
from core.sphere_core import SpherePoint, build_net, geodesic_distance, normalize
from tests.helpers import angle_deg, circle_profile


def test_dictator_returns_the_winner(circle_basis):
    e1, e2 = circle_basis
    rule = make_builtin("dictator", 3, 1, {"winner": 1})
    assert rule.evaluate(Profile((e2, e1, -e2))) == e2
    assert make_builtin("dictator", 3, 1, {"winner": 2})(Profile((e2, e1, -e2))) == e1


def test_normalized_mean_examples():
    rule = make_builtin("normalized_mean", 3, 1)
    with pytest.raises(UndefinedAtProfile):
        rule.evaluate(circle_profile(0, 120, 240))
    out = rule.evaluate(circle_profile(0, 90, 90))
    assert angle_deg(out) == pytest.approx(math.degrees(math.atan2(2, 1)), abs=1e-9)
    assert rule.totality_claim is Totality.PARTIAL


def test_constant_and_antagonistic(circle_basis):
    e1, e2 = circle_basis
    constant = make_builtin("constant", 3, 1, {"c": [0.0, 1.0]})
    assert constant.evaluate(circle_profile(10, 20, 30)) == e2
    assert make_builtin("constant", 2, 1).evaluate(circle_profile(10, 20)) == e1
    antagonistic = make_builtin("antagonistic_mean", 3, 1)
    assert angle_deg(antagonistic.evaluate(circle_profile(0, 0, 0))) == pytest.approx(180.0)


def test_karcher_mean_on_the_circle():
    rule = make_builtin("karcher_mean", 3, 1)
    p = circle_profile(0, 90, 90)
    m = rule.evaluate(p)
    assert angle_deg(m) == pytest.approx(60.0, abs=1e-7)
    assert KarcherMeanRule.stationarity_residual(m, p) <= 1e-8


def test_rotated_dictator_accepts_angle_alias(circle_basis):
    e1, e2 = circle_basis
    rule = make_builtin("rotated_dictator", 3, 1, {"angle": math.pi / 2})
    out = rule.evaluate(Profile((e1, e2, e2)))
    assert geodesic_distance(out, e2) <= 1e-12
    assert rule.params["rotation_angle"] == pytest.approx(math.pi / 2)


@pytest.mark.parametrize("name,params", [
    ("borda", {}),
    ("dictator", {"winner": 4}),
    ("dictator", {"winner": "1"}),
    ("normalized_mean", {"winner": 1}),
    ("constant", {"c": [1.0, 1.0]}),
    ("karcher_mean", {"max_iter": 0}),
    ("dictator", {"winner": 1, "rotation_angle": 3.0}),
    ("constant", {"winner": 2}),
    ("karcher_mean", {"winner": 1}),
    ("rotated_dictator", {"winner": 1, "c": [1.0, 0.0]}),
    ("antagonistic_mean", {"max_iter": 5}),
])
def test_bad_params(name, params):
    with pytest.raises(BadParams):
        make_builtin(name, 3, 1, params)


def test_rule_spec_forbids_unknown_fields():
    with pytest.raises(ValidationError):
        RuleSpec(name="dictator", k=3, dim_n=1, color="red")
    rule = rule_from_spec(RuleSpec(name="dictator", k=3, dim_n=1, params={"winner": 2}))
    assert rule.spec().params == {"winner": 2}


def test_evaluate_is_deterministic():
    rule = make_builtin("karcher_mean", 4, 2)
    p = Profile.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1], [0.6, 0.8, 0]])
    assert np.array_equal(rule.evaluate(p).coords, rule.evaluate(p).coords)


def test_twin_embedding(circle_basis):
    e1, e2 = circle_basis
    assert twin_embedding(3, 2, 3, e2).points == (e1, e2, e2)
    assert twin_embedding(2, 1, 2, e2).points == (e2, e2)
    with pytest.raises(IndexOutOfRange):
        twin_embedding(3, 1, 1, e2)


def test_coordinate_embedding(circle_basis):
    e1, e2 = circle_basis
    assert coordinate_embedding(3, 2, e2).points == (e1, e2, e1)
    assert coordinate_embedding(1, 1, e2).points == (e2,)
    with pytest.raises(IndexOutOfRange):
        coordinate_embedding(3, 4, e2)


def test_delete_voter(circle_basis):
    e1, e2 = circle_basis
    a, b, c = e1, e2, -e1
    assert delete_voter(Profile((a, b, c)), 2).points == (a, c)
    assert delete_voter(Profile((a, b)), 1).points == (b,)
    with pytest.raises(IndexOutOfRange):
        delete_voter(Profile((a,)), 1)


def test_dictator_restrictions(dictator3, circle_basis):
    e1, _ = circle_basis
    for x in build_net(1, 12).points:
        assert restrict_pair(dictator3, 2, 3)(x) == e1
        assert restrict_pair(dictator3, 1, 2)(x) == x
        assert restrict_pair(dictator3, 2, 1)(x) == x
        assert restrict_coordinate(dictator3, 1)(x) == x
        assert restrict_coordinate(dictator3, 2)(x) == e1


def test_normalized_mean_restrictions(circle_basis):
    e1, _ = circle_basis
    rule = make_builtin("normalized_mean", 3, 1)
    for x in build_net(1, 24).points:
        expected = normalize(2 * x.coords + e1.coords)
        assert geodesic_distance(restrict_pair(rule, 2, 3)(x), expected) <= 1e-12
        assert restrict_coordinate(rule, 1)(x).coords[0] > 0.0


def test_restriction_of_a_partial_rule_reports_the_point():
    rule = make_builtin("normalized_mean", 2, 1)
    g = restrict_coordinate(rule, 1)
    assert angle_deg(g(SpherePoint.from_angle(math.pi / 2))) == pytest.approx(45.0)
    with pytest.raises(UndefinedAtPoint) as excinfo:
        g(SpherePoint([-1.0, 0.0]))
    assert excinfo.value.locations


def test_diagonal_map_of_antagonistic_mean_is_antipodal():
    rule = make_builtin("antagonistic_mean", 3, 2)
    g = diagonal_map(rule)
    x = normalize([0.2, -0.5, 0.7])
    assert geodesic_distance(g(x), -x) <= 1e-12


def test_two_slot_rule_matches_the_full_rule():
    rule = make_builtin("normalized_mean", 4, 1)
    two = two_slot_rule(rule, 2, 4)
    x, y = SpherePoint.from_angle(0.4), SpherePoint.from_angle(2.0)
    e1 = SpherePoint.basis(1)
    full = rule.evaluate(Profile((e1, x, e1, y)))
    assert geodesic_distance(two.evaluate(Profile((x, y))), full) <= 1e-12
    assert two.params == {"source": "normalized_mean", "i": 2, "j": 4}


def test_rule_family_caches_and_validates():
    family = make_builtin_family("dictator", 1, {"winner": 1})
    assert family.rule(3) is family.rule(3)
    assert not family.supports(1)
    with pytest.raises(BadParams):
        family.rule(1)
    broken = RuleFamily("broken", 1, lambda k: make_builtin("dictator", k + 1, 1))
    with pytest.raises(BadParams):
        broken.rule(2)


def test_self_map_helpers():
    x = SpherePoint.from_angle(0.7)
    square = SphereSelfMap.circle_power(2)
    assert angle_deg(square(x)) == pytest.approx(math.degrees(1.4))
    composed = SphereSelfMap.antipodal(1).compose(SphereSelfMap.identity(1))
    assert composed(x) == -x
    assert composed.lipschitz_bound == 1.0
    assert SphereSelfMap.constant(x)(SpherePoint.from_angle(2.0)) == x


def test_unknown_params_name_the_allowed_ones():
    with pytest.raises(BadParams) as excinfo:
        make_builtin("dictator", 3, 1, {"winner": 1, "rotation_angle": 3.0})
    assert "rotation_angle" in str(excinfo.value)
    assert "winner" in str(excinfo.value)
    with pytest.raises(BadParams):
        make_builtin_family("constant", 1, {"winner": 2})


@pytest.mark.parametrize("name,params", [
    ("dictator", {"winner": 3}),
    ("rotated_dictator", {"winner": 2, "rotation_angle": 1.0}),
    ("constant", {"c": [0.0, 1.0]}),
    ("antagonistic_mean", {}),
])
def test_restrict_pair_matches_twin_embedding(name, params):
    rule = make_builtin(name, 3, 1, params)
    net = build_net(1, 1000)
    for i, j in ((1, 2), (1, 3), (2, 3)):
        f_ij = restrict_pair(rule, i, j)
        for x in net.points:
            direct = rule.evaluate(twin_embedding(3, i, j, x))
            assert np.array_equal(f_ij(x).coords, direct.coords)
