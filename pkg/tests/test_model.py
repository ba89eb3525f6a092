import numpy as np
import pytest

from hylomorph.model import (
    NonlinearSpec,
    classify_charge_criteria,
    eval_nonlinearity,
    eval_remainder,
    find_binding_amplitude,
    validate_assumptions,
    wprime_over_s,
)


@pytest.fixture
def dw():
    return NonlinearSpec.double_well()


def test_double_well_values(dw):
    assert eval_nonlinearity(dw, 0.0, 0) == 0.0
    assert eval_nonlinearity(dw, 1.0, 0) == 0.0
    assert eval_nonlinearity(dw, 1.0, 1) == 0.0
    # W'(s) = s(1-s)(1-2s)
    s = 0.7
    assert eval_nonlinearity(dw, s, 1) == pytest.approx(s * (1 - s) * (1 - 2 * s), rel=1e-14)


def test_remainder_decomposition_exact(dw):
    s = np.linspace(0.0, 3.0, 257)
    w = eval_nonlinearity(dw, s, 0)
    r = eval_remainder(dw, s, 0)
    assert np.allclose(w - 0.5 * s**2, r, rtol=0, atol=1e-14)


def test_derivatives_match_finite_differences(dw):
    hs = 1e-5
    for s in np.linspace(0.1, 2.0, 20):
        fd = (eval_nonlinearity(dw, s + hs, 0) - eval_nonlinearity(dw, s - hs, 0)) / (2 * hs)
        an = eval_nonlinearity(dw, s, 1)
        assert abs(fd - an) < 1e-6 * max(1.0, abs(an))


def test_negative_amplitude_rejected(dw):
    with pytest.raises(ValueError):
        eval_nonlinearity(dw, -0.1, 0)


def test_wprime_over_s_smooth_at_zero(dw):
    assert wprime_over_s(dw, 0.0) == pytest.approx(1.0)
    pd = NonlinearSpec.power_deficit(1.0, 1.0, 3.0, 4.0)
    assert wprime_over_s(pd, 0.0) == pytest.approx(1.0)


def test_power_deficit_parameter_validation():
    with pytest.raises(ValueError):
        NonlinearSpec.power_deficit(1.0, 0.0, 2.0, 4.0)  # p must exceed 2
    with pytest.raises(ValueError):
        NonlinearSpec.power_deficit(1.0, 0.0, 4.0, 6.0)  # q must stay below 6
    with pytest.raises(ValueError):
        NonlinearSpec.power_deficit(-1.0, 0.0, 3.0, 4.0)


def test_validate_double_well_all_pass(dw):
    report = validate_assumptions(dw, s_max=3.0, n_samples=1000)
    assert report.all_pass
    # the binding witness sits at the second vacuum with R(1) = -1/2
    assert report.binding_witness == pytest.approx(1.0, abs=1e-6)
    assert report.binding_depth == pytest.approx(-0.5, abs=1e-9)
    assert report.binding_level == pytest.approx(0.0, abs=1e-9)


def test_validate_power_deficit_without_repulsion_fails_nonnegativity():
    # R(s) = -s^4/4 dips below -s^2/2 past sqrt(2)
    spec = NonlinearSpec.power_deficit(1.0, 0.0, 4.0, 5.0)
    report = validate_assumptions(spec, s_max=3.0, n_samples=1000)
    assert not report.nonnegative
    assert report.nonnegative_violation > np.sqrt(2.0) - 0.01
    assert eval_nonlinearity(spec, 1.4, 0) > 0 > eval_nonlinearity(spec, 1.45, 0)


def test_validate_preconditions(dw):
    with pytest.raises(ValueError):
        validate_assumptions(dw, s_max=0.0)
    with pytest.raises(ValueError):
        validate_assumptions(dw, s_max=1.0, n_samples=10)


def test_binding_amplitude_refinement(dw):
    s0, level = find_binding_amplitude(dw)
    assert s0 == pytest.approx(1.0, abs=1e-6)
    assert level == pytest.approx(0.0, abs=1e-10)


def test_classify_double_well(dw):
    report = classify_charge_criteria(dw)
    # R ~ -s^3 near zero: exponent 3 = 2 + 1 with 1 inside (0, 4/3)
    assert report.small_charge_threshold_vanishes == "holds"
    assert report.small_s_exponent == pytest.approx(3.0, abs=0.05)
    assert report.negative_up_to > 0.5
    # W(1) = 0 is the degenerate second vacuum
    assert report.second_vacuum == "holds"
    assert report.second_vacuum_witness == pytest.approx(1.0, abs=1e-5)
    assert abs(report.second_vacuum_value) < 1e-10


def test_classify_power_deficit():
    spec = NonlinearSpec.power_deficit(1.0, 1.0, 3.0, 4.0)
    report = classify_charge_criteria(spec)
    assert report.small_charge_threshold_vanishes == "holds"
    assert report.small_s_exponent == pytest.approx(3.0, abs=0.05)
    # W = s^2/2 - s^3/3 + s^4/4 is strictly positive for s > 0
    assert report.second_vacuum == "fails"


def test_growth_check_constants(dw):
    report = validate_assumptions(dw, s_max=3.0, n_samples=500)
    c1, c2 = report.growth_constants
    p, q = report.growth_exponents
    s = np.linspace(1e-3, 3.0, 400)
    envelope = c1 * s ** (p - 2) + c2 * s ** (q - 2)
    assert np.all(np.abs(eval_remainder(dw, s, 2)) <= envelope * (1 + 1e-9))
