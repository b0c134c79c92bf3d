"""Closed-form metrological limits and analytic MSE predictions.

The single-party limit for simultaneous estimation of both displacement
components on a (possibly unbalanced) thermal state is 4 + 2*n1 + 2*n2
in shot-noise units squared; it is attained by dual-homodyne detection.
Coalition predictions come from exact Gaussian channel composition plus
the conditional variance of the optimal linear combination, normalized
with the same resource-split and loss-correction conventions as the
estimators module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import estimators
from .errors import InvalidArgumentError, UnsupportedStateError
from .estimators import Coalition
from .gaussian_core import ExperimentModel, GaussianState, build_dealer_state

#: allowed off-diagonal magnitude when reading thermal parameters off a state
DIAGONAL_TOL = 1e-9
#: witness values at or above this are consistent with a separable state
SEPARABILITY_THRESHOLD = 4.0


@dataclass(frozen=True, slots=True)
class ThermalParams:
    """Thermal occupation parameters of the single-party reduced state.

    Stored so that v1 = 1 + 2*n1 >= v2 = 1 + 2*n2; inputs in the other
    order are swapped on construction.
    """

    n1: float
    n2: float

    def __post_init__(self):
        if not (math.isfinite(self.n1) and math.isfinite(self.n2)):
            raise InvalidArgumentError("thermal parameters must be finite")
        if self.n1 < 0.0 or self.n2 < 0.0:
            raise InvalidArgumentError("thermal parameters must be >= 0")
        if self.n1 < self.n2:
            n1, n2 = self.n2, self.n1
            object.__setattr__(self, "n1", n1)
            object.__setattr__(self, "n2", n2)

    @property
    def v1(self) -> float:
        return 1.0 + 2.0 * self.n1

    @property
    def v2(self) -> float:
        return 1.0 + 2.0 * self.n2


def hcrb_thermal(params: ThermalParams) -> float:
    """Lower bound on the summed MSE of both displacement estimates: 4 + 2*n1 + 2*n2."""
    return 4.0 + 2.0 * params.n1 + 2.0 * params.n2


def thermal_params_from_state(reduced: GaussianState) -> ThermalParams:
    """Read thermal parameters off a diagonal one-mode reduced state."""
    if reduced.n_modes != 1:
        raise UnsupportedStateError("expected a one-mode reduced state")
    cov = reduced.cov
    if abs(cov[0, 1]) > DIAGONAL_TOL:
        raise UnsupportedStateError("reduced covariance must be diagonal")
    return ThermalParams(n1=(cov[0, 0] - 1.0) / 2.0, n2=(cov[1, 1] - 1.0) / 2.0)


def ideal_two_party_mse_sum() -> float:
    """Two-party summed MSE in the ideal model: 4, independent of squeezing."""
    return 4.0


def ideal_three_party_mse_sum(r: float) -> float:
    """Three-party summed MSE in the ideal model: 8 / (e^{2r} + e^{-2r})."""
    if not (math.isfinite(r) and r >= 0.0):
        raise InvalidArgumentError("r must be finite and >= 0")
    return 8.0 / (math.exp(2.0 * r) + math.exp(-2.0 * r))


def witness_bound(r: float) -> float:
    """Resource-split witness MSE sum attainable with the entangled resource: 4 e^{-2r}."""
    if not (math.isfinite(r) and r >= 0.0):
        raise InvalidArgumentError("r must be finite and >= 0")
    return 4.0 * math.exp(-2.0 * r)


def _conditional_residual(cov: np.ndarray, target: int, aux: np.ndarray) -> float:
    """Var(target) - Cov(target, u)^2 / Var(u) for u = aux . quadratures."""
    g = estimators.optimal_gain(cov, target, aux)
    return float(cov[target, target] - g * (cov @ aux)[target])


def predicted_mse(model: ExperimentModel, coalition: Coalition) -> tuple[float, float, float]:
    """Analytic (mse_x, mse_p, mse_sum) for a coalition under the given model.

    Builds the model covariance, takes the conditional variance of the
    optimal linear combination per quadrature, divides by eta_A for the
    loss correction and doubles single-quadrature coalitions for the
    resource split. The single-party path reports the dual-homodyne
    values, which sum to 4 + 2*n1 + 2*n2 when eta_A = 1.
    """
    if not isinstance(coalition, Coalition):
        raise InvalidArgumentError(f"unknown coalition {coalition!r}")
    cov = build_dealer_state(model, 0.0, 0.0).cov
    if coalition is Coalition.A_ALONE:
        mse_x = (cov[estimators.X_A, estimators.X_A] + 1.0) / model.eta_a
        mse_p = (cov[estimators.P_A, estimators.P_A] + 1.0) / model.eta_a
        return mse_x, mse_p, mse_x + mse_p
    if coalition is Coalition.ABC:
        aux_x = estimators.triple_aux_coefficients()
    else:
        partner = "c" if coalition is Coalition.AC else "b"
        aux_x = estimators.pair_aux_coefficients(partner)
    # the p-quadrature auxiliary mirrors aux_x one index up; residuals
    # only involve squared covariances, so the sign pattern drops out
    aux_p = np.roll(aux_x, 1)
    res_x = _conditional_residual(cov, estimators.X_A, aux_x)
    res_p = _conditional_residual(cov, estimators.P_A, aux_p)
    split = estimators.RESOURCE_SPLIT_FACTOR
    mse_x = split * res_x / model.eta_a
    mse_p = split * res_p / model.eta_a
    return mse_x, mse_p, mse_x + mse_p
