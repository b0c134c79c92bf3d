"""Analytic limits and channel-composed MSE predictions."""

import math

import numpy as np
import pytest

from cvshare import bounds, estimators
from cvshare.bounds import (
    ThermalParams,
    hcrb_thermal,
    ideal_three_party_mse_sum,
    ideal_two_party_mse_sum,
    predicted_mse,
    thermal_params_from_state,
    witness_bound,
)
from cvshare.errors import InvalidArgumentError, UnsupportedStateError
from cvshare.estimators import Coalition
from cvshare.gaussian_core import (
    ExperimentModel,
    build_dealer_state,
    partial_trace,
)


def test_thermal_params_ordering_and_validation():
    p = ThermalParams(n1=0.2, n2=1.5)
    assert p.n1 == 1.5 and p.n2 == 0.2
    assert p.v1 == pytest.approx(4.0)
    assert p.v2 == pytest.approx(1.4)
    with pytest.raises(InvalidArgumentError):
        ThermalParams(n1=-0.1, n2=0.0)
    with pytest.raises(InvalidArgumentError):
        ThermalParams(n1=math.inf, n2=0.0)


def test_hcrb_thermal_values():
    assert hcrb_thermal(ThermalParams(0.0, 0.0)) == 4.0
    assert hcrb_thermal(ThermalParams(1.0, 2.0)) == pytest.approx(10.0)


@pytest.mark.parametrize("r", [0.25, 0.5, 1.0, 1.5])
def test_reduced_single_party_occupation(r):
    # tracing the dealer state down to the last mode leaves a symmetric
    # thermal state with n = sinh^2 r
    st = build_dealer_state(ExperimentModel(r=r), 0.0, 0.0)
    reduced = partial_trace(st, [2])
    p = thermal_params_from_state(reduced)
    assert p.n1 == pytest.approx(math.sinh(r) ** 2, rel=1e-12)
    assert p.n2 == pytest.approx(math.sinh(r) ** 2, rel=1e-12)


def test_reduced_occupation_under_loss_and_noise():
    r, eta, eps = 1.0, 0.7, 0.1
    st = build_dealer_state(ExperimentModel(r=r, eta_a=eta, eps_a=eps), 0.0, 0.0)
    p = thermal_params_from_state(partial_trace(st, [2]))
    expect = eta * math.sinh(r) ** 2 + eps / 2.0
    assert p.n1 == pytest.approx(expect, rel=1e-12)


def test_thermal_params_from_state_rejections():
    st = build_dealer_state(ExperimentModel(r=0.5), 0.0, 0.0)
    with pytest.raises(UnsupportedStateError):
        thermal_params_from_state(st)
    cov = np.array([[2.0, 0.5], [0.5, 2.0]])
    from cvshare.gaussian_core import GaussianState

    rotated = GaussianState(n_modes=1, mean=np.zeros(2), cov=cov)
    with pytest.raises(UnsupportedStateError):
        thermal_params_from_state(rotated)


def test_ideal_closed_forms_frozen():
    assert ideal_two_party_mse_sum() == 4.0
    assert ideal_three_party_mse_sum(1.0) == pytest.approx(1.063208915336319, rel=1e-14)
    assert ideal_three_party_mse_sum(0.0) == pytest.approx(4.0)
    assert witness_bound(1.0) == pytest.approx(0.5413411329464508, rel=1e-14)
    assert witness_bound(0.0) == pytest.approx(4.0)
    with pytest.raises(InvalidArgumentError):
        ideal_three_party_mse_sum(-0.1)
    with pytest.raises(InvalidArgumentError):
        witness_bound(math.nan)


@pytest.mark.parametrize("r", [0.25, 0.5, 1.0, 1.5])
def test_predicted_mse_ideal_matches_closed_forms(r):
    m = ExperimentModel(r=r)
    _, _, s_ab = predicted_mse(m, Coalition.AB)
    assert s_ab == pytest.approx(4.0, rel=1e-12)
    _, _, s_ac = predicted_mse(m, Coalition.AC)
    assert s_ac == pytest.approx(4.0, rel=1e-12)
    _, _, s_abc = predicted_mse(m, Coalition.ABC)
    assert s_abc == pytest.approx(ideal_three_party_mse_sum(r), rel=1e-12)
    mx, mp, s_a = predicted_mse(m, Coalition.A_ALONE)
    assert mx == pytest.approx(mp)
    assert s_a == pytest.approx(4.0 + 4.0 * math.sinh(r) ** 2, rel=1e-12)


def test_predicted_mse_single_party_is_hcrb():
    m = ExperimentModel(r=1.0)
    reduced = partial_trace(build_dealer_state(m, 0.0, 0.0), [2])
    _, _, s = predicted_mse(m, Coalition.A_ALONE)
    assert s == pytest.approx(hcrb_thermal(thermal_params_from_state(reduced)), rel=1e-12)


def test_predicted_mse_schur_oracle():
    # independent check: conditional variance via the 2x2 Schur complement
    m = ExperimentModel(r=0.8, eta_a=0.85, eta_b=0.9, eps_b=0.05)
    cov = build_dealer_state(m, 0.0, 0.0).cov
    i_a, i_b = estimators.X_A, 2  # x_a, x_b
    sub = cov[np.ix_([i_a, i_b], [i_a, i_b])]
    resid = sub[0, 0] - sub[0, 1] ** 2 / sub[1, 1]
    mx, _, _ = predicted_mse(m, Coalition.AB)
    assert mx == pytest.approx(2.0 * resid / m.eta_a, rel=1e-12)


def test_predicted_mse_monotone_in_loss_and_noise():
    base = ExperimentModel(r=1.0)
    for coalition in (Coalition.AB, Coalition.ABC, Coalition.A_ALONE):
        _, _, s0 = predicted_mse(base, coalition)
        _, _, s_loss = predicted_mse(ExperimentModel(r=1.0, eta_a=0.7), coalition)
        _, _, s_noise = predicted_mse(ExperimentModel(r=1.0, eps_a=0.2), coalition)
        assert s_loss > s0
        assert s_noise > s0


@pytest.mark.parametrize("r", [0.3, 1.0, 1.5])
def test_access_hierarchy(r):
    m = ExperimentModel(r=r)
    _, _, s3 = predicted_mse(m, Coalition.ABC)
    _, _, s2 = predicted_mse(m, Coalition.AB)
    _, _, s1 = predicted_mse(m, Coalition.A_ALONE)
    assert s3 < s2 < s1


def test_predicted_mse_rejects_non_coalition():
    with pytest.raises(InvalidArgumentError):
        predicted_mse(ExperimentModel(r=1.0), "ab")


def test_separability_threshold_constant():
    assert bounds.SEPARABILITY_THRESHOLD == 4.0
