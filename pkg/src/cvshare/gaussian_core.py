"""Gaussian states in shot-noise units and the operations that build the dealer's distributed state.

Conventions: quadratures obey [x, p] = 2i, the vacuum has unit variance
per quadrature, and vectors/matrices are ordered x1, p1, x2, p2, ...
The three-mode state shared by the dealer is stored in mode order
(C, B, A), so party A's quadratures occupy the last 2x2 block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, UnsupportedStateError

#: absolute tolerance for algebraic identities between covariance entries
ABS_TOL = 1e-12
#: relative tolerance for covariance symmetry
SYMMETRY_RTOL = 1e-10
#: eigenvalue slack allowed when testing physicality of cov + i*Omega
PHYSICALITY_SLACK = 1e-9


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form with [[0, 1], [-1, 0]] per mode.

    :param n_modes: number of modes.
    :return: 2n x 2n real antisymmetric matrix.
    """
    if n_modes < 1:
        raise InvalidArgumentError("n_modes must be >= 1")
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for m in range(n_modes):
        omega[2 * m, 2 * m + 1] = 1.0
        omega[2 * m + 1, 2 * m] = -1.0
    return omega


@dataclass(frozen=True, slots=True)
class GaussianState:
    """Mean vector and covariance matrix of an n-mode Gaussian state.

    Both arrays are stored read-only; operations return new states.

    :param n_modes: number of modes (>= 1).
    :param mean: length-2n mean vector in shot-noise units.
    :param cov: 2n x 2n covariance matrix, vacuum variance 1.
    """

    n_modes: int
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        if self.n_modes < 1:
            raise InvalidArgumentError("n_modes must be >= 1")
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        d = 2 * self.n_modes
        if mean.shape != (d,):
            raise InvalidArgumentError(f"mean must have shape ({d},), got {mean.shape}")
        if cov.shape != (d, d):
            raise InvalidArgumentError(f"cov must have shape ({d}, {d}), got {cov.shape}")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise InvalidArgumentError("mean and cov must be finite")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_RTOL * scale:
            raise InvalidArgumentError("cov must be symmetric")
        cov = 0.5 * (cov + cov.T)
        if physicality_min_eigenvalue_of(cov) < -PHYSICALITY_SLACK:
            raise InvalidArgumentError("cov violates the uncertainty relation")
        if np.linalg.eigvalsh(cov)[0] <= 0.0:
            raise InvalidArgumentError("cov must be positive definite")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    def mode_block(self, mode: int) -> np.ndarray:
        """2x2 covariance block of one mode."""
        _check_mode(self, mode)
        return self.cov[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2]


def physicality_min_eigenvalue_of(cov: np.ndarray) -> float:
    """Minimum eigenvalue of cov + i*Omega (>= 0 up to slack for physical states)."""
    n_modes = cov.shape[0] // 2
    h = cov.astype(complex) + 1j * symplectic_form(n_modes)
    return float(np.linalg.eigvalsh(h)[0])


def physicality_min_eigenvalue(state: GaussianState) -> float:
    """Minimum eigenvalue of state.cov + i*Omega."""
    return physicality_min_eigenvalue_of(state.cov)


@dataclass(frozen=True, slots=True)
class ExperimentModel:
    """Squeezing plus per-arm transmissivity and excess noise.

    Fully determines the distributed three-mode state: with unit
    transmissivities and zero excess noise the state is the ideal
    dealer resource.

    :param r: squeezing parameter, >= 0.
    :param eta_a, eta_b, eta_c: transmissivity per arm, each in (0, 1].
    :param eps_a, eps_b, eps_c: excess thermal noise per arm, >= 0 shot-noise units.
    """

    r: float
    eta_a: float = 1.0
    eta_b: float = 1.0
    eta_c: float = 1.0
    eps_a: float = 0.0
    eps_b: float = 0.0
    eps_c: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r >= 0.0):
            raise InvalidArgumentError("r must be finite and >= 0")
        for name in ("eta_a", "eta_b", "eta_c"):
            eta = getattr(self, name)
            if not (math.isfinite(eta) and 0.0 < eta <= 1.0):
                raise InvalidArgumentError(f"{name} must be in (0, 1]")
        for name in ("eps_a", "eps_b", "eps_c"):
            eps = getattr(self, name)
            if not (math.isfinite(eps) and eps >= 0.0):
                raise InvalidArgumentError(f"{name} must be >= 0")

    @property
    def is_ideal(self) -> bool:
        return (
            self.eta_a == self.eta_b == self.eta_c == 1.0
            and self.eps_a == self.eps_b == self.eps_c == 0.0
        )


def _check_mode(state: GaussianState, mode: int) -> None:
    if not (0 <= mode < state.n_modes):
        raise InvalidArgumentError(f"mode {mode} out of range for {state.n_modes} modes")


def vacuum(n_modes: int) -> GaussianState:
    """Vacuum state: zero mean, identity covariance.

    :param n_modes: number of modes, >= 1.
    """
    if n_modes < 1:
        raise InvalidArgumentError("n_modes must be >= 1")
    return GaussianState(n_modes, np.zeros(2 * n_modes), np.eye(2 * n_modes))


def squeezed_vacuum(r: float, squeezed_quadrature: str) -> GaussianState:
    """Single-mode squeezed vacuum with variance e^{-2r} in the chosen quadrature.

    :param r: squeezing parameter, >= 0.
    :param squeezed_quadrature: "x" or "p".
    """
    if not (math.isfinite(r) and r >= 0.0):
        raise InvalidArgumentError("r must be finite and >= 0")
    if squeezed_quadrature not in ("x", "p"):
        raise InvalidArgumentError("squeezed_quadrature must be 'x' or 'p'")
    lo, hi = math.exp(-2.0 * r), math.exp(2.0 * r)
    diag = (lo, hi) if squeezed_quadrature == "x" else (hi, lo)
    return GaussianState(1, np.zeros(2), np.diag(diag))


def tensor(*states: GaussianState) -> GaussianState:
    """Tensor product of states, modes concatenated in argument order."""
    if not states:
        raise InvalidArgumentError("tensor requires at least one state")
    n_modes = sum(s.n_modes for s in states)
    mean = np.concatenate([s.mean for s in states])
    cov = np.zeros((2 * n_modes, 2 * n_modes))
    offset = 0
    for s in states:
        d = 2 * s.n_modes
        cov[offset : offset + d, offset : offset + d] = s.cov
        offset += d
    return GaussianState(n_modes, mean, cov)


def beamsplitter(
    state: GaussianState, mode_i: int, mode_j: int, transmissivity: float
) -> GaussianState:
    """Mix two modes on a beamsplitter of the given transmissivity.

    The symplectic acting on the (mode_i, mode_j) quadrature blocks is
    [[sqrt(t) I2, sqrt(1-t) I2], [-sqrt(1-t) I2, sqrt(t) I2]].

    :param transmissivity: t in [0, 1]; t = 1 leaves the state unchanged.
    """
    _check_mode(state, mode_i)
    _check_mode(state, mode_j)
    if mode_i == mode_j:
        raise InvalidArgumentError("beamsplitter requires two distinct modes")
    t = transmissivity
    if not (math.isfinite(t) and 0.0 <= t <= 1.0):
        raise InvalidArgumentError("transmissivity must be in [0, 1]")
    ct, st = math.sqrt(t), math.sqrt(1.0 - t)
    s_full = np.eye(2 * state.n_modes)
    bi, bj = 2 * mode_i, 2 * mode_j
    for k in range(2):
        s_full[bi + k, bi + k] = ct
        s_full[bj + k, bj + k] = ct
        s_full[bi + k, bj + k] = st
        s_full[bj + k, bi + k] = -st
    return GaussianState(state.n_modes, s_full @ state.mean, s_full @ state.cov @ s_full.T)


def displace(state: GaussianState, mode: int, dx: float, dp: float) -> GaussianState:
    """Displace one mode in phase space; covariance is untouched."""
    _check_mode(state, mode)
    if not (math.isfinite(dx) and math.isfinite(dp)):
        raise InvalidArgumentError("displacement must be finite")
    mean = state.mean.copy()
    mean[2 * mode] += dx
    mean[2 * mode + 1] += dp
    return GaussianState(state.n_modes, mean, state.cov)


def loss(state: GaussianState, mode: int, eta: float) -> GaussianState:
    """Pure-loss channel of transmissivity eta on one mode.

    The mode's mean and cross-covariances scale by sqrt(eta); its block
    becomes eta * block + (1 - eta) * I2.
    """
    _check_mode(state, mode)
    if not (math.isfinite(eta) and 0.0 < eta <= 1.0):
        raise InvalidArgumentError("eta must be in (0, 1]")
    g = np.eye(2 * state.n_modes)
    b = 2 * mode
    g[b, b] = g[b + 1, b + 1] = math.sqrt(eta)
    cov = g @ state.cov @ g.T
    cov[b, b] += 1.0 - eta
    cov[b + 1, b + 1] += 1.0 - eta
    return GaussianState(state.n_modes, g @ state.mean, cov)


def add_excess_noise(state: GaussianState, mode: int, eps: float) -> GaussianState:
    """Add eps shot-noise units of thermal noise to one mode's block."""
    _check_mode(state, mode)
    if not (math.isfinite(eps) and eps >= 0.0):
        raise InvalidArgumentError("eps must be >= 0")
    cov = state.cov.copy()
    b = 2 * mode
    cov[b, b] += eps
    cov[b + 1, b + 1] += eps
    return GaussianState(state.n_modes, state.mean, cov)


def partial_trace(state: GaussianState, keep: list[int]) -> GaussianState:
    """Restrict to the listed modes, in the order given.

    :param keep: non-empty, duplicate-free mode indices.
    """
    if len(keep) == 0:
        raise InvalidArgumentError("keep must be non-empty")
    if len(set(keep)) != len(keep):
        raise InvalidArgumentError("keep must be duplicate-free")
    for m in keep:
        _check_mode(state, m)
    idx = np.array([2 * m + k for m in keep for k in range(2)])
    return GaussianState(len(keep), state.mean[idx], state.cov[np.ix_(idx, idx)])


def build_dealer_state(model: ExperimentModel, alpha_x: float, alpha_p: float) -> GaussianState:
    """Build the three-mode state distributed to parties (C, B, A).

    Pipeline: an x-squeezed and a p-squeezed vacuum (same r) meet on a
    50:50 beamsplitter to form the entangled pair; the first output is
    split again with vacuum on a 50:50 beamsplitter, yielding shares C
    and B, while the unsplit arm becomes A. The secret displacement
    (alpha_x, alpha_p) is applied to arm A, then each arm passes through
    its loss channel and picks up its excess noise.

    :return: three-mode state, mode order (C, B, A), mean
        (0, 0, 0, 0, alpha_x, alpha_p) before loss.
    """
    if not (math.isfinite(alpha_x) and math.isfinite(alpha_p)):
        raise InvalidArgumentError("displacement must be finite")
    st = tensor(vacuum(1), squeezed_vacuum(model.r, "x"), squeezed_vacuum(model.r, "p"))
    st = beamsplitter(st, 1, 2, 0.5)
    st = beamsplitter(st, 1, 0, 0.5)
    st = displace(st, 2, alpha_x, alpha_p)
    for mode, eta, eps in (
        (0, model.eta_c, model.eps_c),
        (1, model.eta_b, model.eps_b),
        (2, model.eta_a, model.eps_a),
    ):
        if eta < 1.0:
            st = loss(st, mode, eta)
        if eps > 0.0:
            st = add_excess_noise(st, mode, eps)
    return st


def state_to_text(state: GaussianState) -> str:
    """Serialize a state: first line n_modes, then the mean row, then cov rows."""
    lines = [str(state.n_modes)]
    lines.append(" ".join(repr(float(v)) for v in state.mean))
    for row in state.cov:
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def state_from_text(text: str) -> GaussianState:
    """Parse the textual state format produced by :func:`state_to_text`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise UnsupportedStateError("empty state text")
    try:
        n_modes = int(lines[0].strip())
    except ValueError as exc:
        raise UnsupportedStateError(f"bad n_modes line: {lines[0]!r}") from exc
    d = 2 * n_modes
    if len(lines) != 2 + d:
        raise UnsupportedStateError(f"expected {2 + d} lines for {n_modes} modes, got {len(lines)}")
    try:
        mean = np.array([float(v) for v in lines[1].split()])
        cov = np.array([[float(v) for v in lines[2 + i].split()] for i in range(d)])
    except ValueError as exc:
        raise UnsupportedStateError("non-numeric entry in state text") from exc
    if mean.shape != (d,) or cov.shape != (d, d):
        raise UnsupportedStateError("wrong row length in state text")
    return GaussianState(n_modes, mean, cov)
