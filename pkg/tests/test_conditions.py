import math

import numpy as np
import pytest

from core.conditions import (
    AntipodeConfig,
    CheckStatus,
    Condition,
    SearchConfig,
    ViolationCertificate,
    ViolationKind,
    check_outsider_stability,
    check_participation,
    check_twin,
    find_antipodal_point,
    lift_two_slot_certificate,
    locate_antipodal_point,
    noshow_witness_from_antipode,
    scan_nau,
    search_noshow_violation,
    search_twin_violation,
    twin_witness_from_antipode,
    verify_certificate,
)
from core.errors import (
    IndexOutOfRange,
    NotAntipodal,
    PreconditionViolated,
    TwinPreconditionViolated,
    UndefinedAtPoint,
    UndefinedAtProfile,
)
from core.rules import (
    Profile,
    SphereSelfMap,
    make_builtin,
    make_builtin_family,
    restrict_coordinate,
    restrict_pair,
    two_slot_rule,
)
from core.sphere_core import SpherePoint, build_net, geodesic_distance
from tests.helpers import circle_profile

FAST = SearchConfig(net_size=8, refine_steps=10, restarts=2, seed=0)


# ---------------------------------------------------------------------------
# Checkers
# ---------------------------------------------------------------------------

def test_twin_check_on_a_dictator(dictator3, circle_basis):
    e1, e2 = circle_basis
    p = Profile((e1, e2, -e2))
    outcome = check_twin(dictator3, p, 2, 3)
    assert outcome.status is CheckStatus.STRICTNESS_VIOLATION
    assert outcome.margin == 0.0
    assert check_twin(dictator3, p, 1, 2).holds


def test_twin_check_on_the_antagonistic_mean():
    rule = make_builtin("antagonistic_mean", 3, 1)
    weak = check_twin(rule, circle_profile(0, 90, 270), 2, 3)
    assert weak.status is CheckStatus.WEAK_VIOLATION
    assert math.degrees(weak.d_before) == pytest.approx(90.0, abs=1e-9)
    assert math.degrees(weak.d_after) == pytest.approx(153.4349488, abs=1e-6)
    assert check_twin(rule, circle_profile(0, 90, 200), 2, 3).holds


def test_twin_check_guards(dictator3, circle_basis):
    e1, e2 = circle_basis
    with pytest.raises(TwinPreconditionViolated):
        check_twin(dictator3, Profile((e1, e2, e2)), 2, 3)
    with pytest.raises(IndexOutOfRange):
        check_twin(dictator3, Profile((e1, e2, -e2)), 2, 2)


def test_participation_check(dictator_family, circle_basis):
    e1, e2 = circle_basis
    outcome = check_participation(dictator_family, Profile((e1, e2, -e2, e2)), 2)
    assert outcome.status is CheckStatus.STRICTNESS_VIOLATION

    means = make_builtin_family("normalized_mean", 1)
    joined = check_participation(means, circle_profile(0, 10, 350), 2)
    assert joined.holds
    assert math.degrees(joined.d_after) == pytest.approx(10.0, abs=1e-9)
    assert math.degrees(joined.d_before) == pytest.approx(15.0, abs=1e-9)


def test_participation_reports_the_failing_stage():
    means = make_builtin_family("normalized_mean", 1)
    with pytest.raises(UndefinedAtProfile) as excinfo:
        check_participation(means, circle_profile(0, 180, 90), 3)
    assert excinfo.value.stage == "abstention"


def test_participation_needs_two_abstainers(dictator_family, circle_basis):
    e1, e2 = circle_basis
    with pytest.raises(PreconditionViolated):
        check_participation(dictator_family, Profile((e1, e2)), 1)


def test_outsider_stability(dictator_family, constant_family, circle_basis):
    e1, e2 = circle_basis
    assert check_outsider_stability(dictator_family, Profile((e2, e1)), 2).holds
    assert check_outsider_stability(constant_family, Profile((e2, -e1)), 1).holds
    means = make_builtin_family("normalized_mean", 1)
    result = check_outsider_stability(means, circle_profile(0, 90), 3)
    assert result.holds
    assert result.deviation <= 1e-9


@pytest.mark.parametrize("family_name,params", [("constant", {}), ("dictator", {"winner": 1})])
def test_participation_at_the_outcome_gives_outsider_stability(family_name, params):
    """A voter joining at the current outcome must not be pushed away, so the outcome stays put"""
    family = make_builtin_family(family_name, 1, params)
    rng = np.random.default_rng(11)
    for _ in range(50):
        k = int(rng.integers(2, 4))
        p = circle_profile(*rng.uniform(0.0, 360.0, size=k))
        y = family.rule(k).evaluate(p)
        for i in range(1, k + 2):
            joined = check_participation(family, p.insert(i, y), i)
            assert joined.holds
            stability = check_outsider_stability(family, p, i)
            assert stability.holds
            assert stability.deviation <= 1e-9


# ---------------------------------------------------------------------------
# Searches
# ---------------------------------------------------------------------------

def test_twin_search_on_a_dictator(dictator3):
    outcome = search_twin_violation(dictator3, SearchConfig(net_size=16, seed=0))
    assert outcome.found
    cert = outcome.certificate
    assert cert.kind is ViolationKind.STRICTNESS
    assert cert.verified
    assert {cert.focal_voter, cert.partner_voter} == {2, 3}
    assert outcome.diagnostics.profiles_checked > 0


@pytest.mark.parametrize("name,params", [
    ("constant", {}),
    ("rotated_dictator", {"winner": 1, "rotation_angle": math.pi}),
])
def test_twin_search_finds_verified_violations(name, params):
    rule = make_builtin(name, 3, 1, params)
    outcome = search_twin_violation(rule, FAST)
    assert outcome.found
    assert outcome.certificate.verified
    assert verify_certificate(outcome.certificate, rule)


def test_twin_search_skips_singular_profiles():
    rule = make_builtin("antagonistic_mean", 3, 1)
    outcome = search_twin_violation(rule, FAST)
    assert outcome.certificate.kind is ViolationKind.WEAK
    assert outcome.diagnostics.margin_after_refinement >= outcome.diagnostics.margin_before_refinement


def test_noshow_searches(dictator_family):
    outcome = search_noshow_violation(dictator_family, 2, FAST)
    assert outcome.certificate.kind is ViolationKind.STRICTNESS
    assert outcome.certificate.condition is Condition.PARTICIPATION
    assert outcome.certificate.verified

    antagonistic = make_builtin_family("antagonistic_mean", 1)
    weak = search_noshow_violation(antagonistic, 2, FAST)
    assert weak.certificate.kind is ViolationKind.WEAK
    assert verify_certificate(weak.certificate, antagonistic)


def test_searches_are_deterministic(dictator3):
    a = search_twin_violation(dictator3, FAST)
    b = search_twin_violation(dictator3, FAST)
    assert a.model_dump_json() == b.model_dump_json()


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

def test_certificates_re_verify_and_round_trip():
    """A hundred certificates from seed-swept searches over the catalog"""
    catalog = [
        ("dictator", {"winner": 2}),
        ("constant", {}),
        ("rotated_dictator", {"winner": 1, "rotation_angle": math.pi}),
        ("rotated_dictator", {"winner": 3, "rotation_angle": math.pi / 3}),
        ("antagonistic_mean", {}),
    ]
    certificates = []
    seed = 0
    while len(certificates) < 100:
        name, params = catalog[seed % len(catalog)]
        dim_n = 1 + (seed // len(catalog)) % 2
        rule = make_builtin(name, 3, dim_n, params)
        cfg = SearchConfig(net_size=6 + seed % 3, refine_steps=5, restarts=2, seed=seed)
        outcome = search_twin_violation(rule, cfg)
        if outcome.found:
            certificates.append((outcome.certificate, rule))
        seed += 1

    for cert, rule in certificates:
        assert cert.verified
        assert verify_certificate(cert, rule)
        text = cert.model_dump_json()
        again = ViolationCertificate.model_validate_json(text)
        assert again == cert
        assert again.model_dump_json() == text


def test_tampered_certificates_fail(dictator3):
    cert = search_twin_violation(dictator3, FAST).certificate
    assert not verify_certificate(cert.model_copy(update={"d_before": cert.d_before + 1e-6}), dictator3)
    assert not verify_certificate(cert.model_copy(update={"kind": ViolationKind.WEAK}), dictator3)
    assert not verify_certificate(cert, make_builtin_family("dictator", 1))
    assert not verify_certificate(cert, make_builtin("dictator", 3, 1, {"winner": 2}))


def test_certificate_reports_degrees(dictator3):
    cert = search_twin_violation(dictator3, FAST).certificate
    assert cert.deg["d_before"] == pytest.approx(math.degrees(cert.d_before))
    assert "deg" in cert.model_dump()


def test_two_slot_violation_lifts_to_the_full_rule(dictator3):
    two = two_slot_rule(dictator3, 2, 3)
    cert = search_twin_violation(two, FAST).certificate
    lifted = lift_two_slot_certificate(dictator3, 2, 3, cert)
    assert lifted.verified
    assert {lifted.focal_voter, lifted.partner_voter} == {2, 3}
    assert lifted.d_before == pytest.approx(cert.d_before, abs=1e-12)


# ---------------------------------------------------------------------------
# Nowhere Anti-Unanimity and antipodal points
# ---------------------------------------------------------------------------

def test_scan_nau_reference_maps(dictator3):
    net = build_net(1, 64)
    identity = scan_nau(SphereSelfMap.identity(1), net, lipschitz_bound=1.0)
    assert identity.gap == pytest.approx(math.pi)
    assert identity.certified

    antipodal = scan_nau(SphereSelfMap.antipodal(1), net, lipschitz_bound=1.0)
    assert antipodal.gap <= 1e-12
    assert not antipodal.certified

    constant = scan_nau(restrict_pair(dictator3, 2, 3), net, lipschitz_bound=0.0)
    assert constant.gap <= 1e-12
    np.testing.assert_allclose(constant.worst_point, [-1.0, 0.0], atol=1e-12)
    assert constant.gap_deg == pytest.approx(math.degrees(constant.gap))


def test_scan_without_lipschitz_bound_never_certifies():
    result = scan_nau(SphereSelfMap.identity(2), build_net(2, 200, "fibonacci_s2"))
    assert result.gap == pytest.approx(math.pi)
    assert not result.certified
    assert result.certificate_slack is None


def test_scan_reports_undefined_points():
    g = restrict_coordinate(make_builtin("normalized_mean", 2, 1), 1)
    with pytest.raises(UndefinedAtPoint) as excinfo:
        scan_nau(g, build_net(1, 4))
    assert len(excinfo.value.locations) == 1
    assert excinfo.value.locations[0][0] == pytest.approx(-1.0)


def test_antipodal_points_of_reference_maps(dictator3):
    x0 = find_antipodal_point(restrict_pair(dictator3, 2, 3))
    assert geodesic_distance(x0, SpherePoint([-1.0, 0.0])) <= 1e-9

    located = locate_antipodal_point(SphereSelfMap.antipodal(2))
    assert located.found and located.residual <= 1e-12

    square = SphereSelfMap.circle_power(2)
    x1 = find_antipodal_point(square)
    assert geodesic_distance(square(x1), -x1) <= 1e-9

    assert find_antipodal_point(SphereSelfMap.identity(1), AntipodeConfig(multistarts=2)) is None


def test_antipodal_point_of_an_off_axis_constant():
    c = SpherePoint.from_angle(math.pi / 3)
    located = locate_antipodal_point(SphereSelfMap.constant(c))
    assert located.found
    assert geodesic_distance(c, located.point) == pytest.approx(math.pi, abs=1e-9)


# ---------------------------------------------------------------------------
# Witness builders
# ---------------------------------------------------------------------------

def test_twin_witness_on_a_dictator(dictator3, circle_basis):
    e1, e2 = circle_basis
    cert = twin_witness_from_antipode(dictator3, 2, 3, -e1, e2)
    assert cert.kind is ViolationKind.STRICTNESS
    assert cert.verified
    assert cert.d_before == pytest.approx(math.pi, abs=1e-12)
    assert cert.d_after == pytest.approx(math.pi, abs=1e-12)
    with pytest.raises(NotAntipodal):
        twin_witness_from_antipode(dictator3, 2, 3, e2, e1)


def test_twin_witness_through_the_diagonal(circle_basis):
    e1, e2 = circle_basis
    rule = make_builtin("antagonistic_mean", 3, 1)
    cert = twin_witness_from_antipode(rule, 1, 3, e1, e2, embedding="diagonal")
    assert cert.kind is ViolationKind.WEAK
    assert cert.verified
    assert cert.d_after == pytest.approx(math.pi, abs=1e-12)
    with pytest.raises(ValueError):
        twin_witness_from_antipode(rule, 1, 3, e1, e2, embedding="spiral")
    with pytest.raises(TwinPreconditionViolated):
        twin_witness_from_antipode(rule, 1, 3, e1, e1, embedding="diagonal")


def test_noshow_witnesses(dictator_family, constant_family, circle_basis):
    e1, e2 = circle_basis
    cert = noshow_witness_from_antipode(dictator_family, 2, 2, 3, -e1)
    assert cert.condition is Condition.PARTICIPATION
    assert cert.kind is ViolationKind.STRICTNESS
    assert cert.verified
    assert cert.focal_voter == 3 and cert.partner_voter == 2
    assert cert.d_before == pytest.approx(math.pi, abs=1e-12)

    constant = noshow_witness_from_antipode(constant_family, 2, 1, 2, -e1)
    assert constant.verified
    assert constant.d_after == pytest.approx(math.pi, abs=1e-12)

    with pytest.raises(NotAntipodal):
        noshow_witness_from_antipode(dictator_family, 2, 2, 3, e2)
