"""Top-level acceptance gate.

One test per release criterion; each prints a single PASS/FAIL line with
the measured numbers before asserting, so the suite log doubles as the
acceptance report. Monte Carlo criteria use fixed streams and a 5
standard-error budget.
"""

import math
import time

import numpy as np
import pytest
import scipy.stats

import conftest
from conftest import MU_PAIR_ANCHOR, MU_SINGLE_ANCHOR, MU_TRIPLE_ANCHOR
from cvshare import estimators
from cvshare.bounds import (
    ThermalParams,
    hcrb_thermal,
    ideal_three_party_mse_sum,
    predicted_mse,
    witness_bound,
)
from cvshare.certificates import verify_certificates
from cvshare.estimators import Coalition
from cvshare.gaussian_core import ExperimentModel, build_dealer_state, partial_trace
from cvshare.protocol import batch_mse_distribution, witness_verification_run
from cvshare.sampler import MeasurementAssignment, RandomStream, sample_joint
from cvshare.security import (
    MseDistribution,
    crossing_threshold,
    mse_cdf,
    mutual_information,
    prob_mi_above,
    required_mse,
    security_probabilities,
)

R_GRID = (0.0, 0.5, 1.0, 1.5)


def report(n, ok, detail):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")


def _sampled_coalition_mse(model, coalition, n, gen):
    """Direct-sampling summed MSE and its standard error at zero displacement."""
    base = build_dealer_state(model, 0.0, 0.0)
    gains = estimators.gains_for_model(model, coalition)
    split = estimators.RESOURCE_SPLIT_FACTOR
    total, var = 0.0, 0.0
    for quad in ("x", "p"):
        if coalition is Coalition.ABC:
            choices = (quad, quad, quad)
        elif coalition is Coalition.AB:
            choices = ("none", quad, quad)
        else:
            choices = (quad, "none", quad)
        assign = MeasurementAssignment(choices)
        out = sample_joint(base, assign, n, gen)
        outcomes = {lab: out[:, i] for i, lab in enumerate(assign.labels(("c", "b", "a")))}
        sq = estimators.estimate(coalition, outcomes, gains, quad) ** 2
        total += split * float(sq.mean())
        var += (split * float(np.std(sq, ddof=1)) / math.sqrt(n)) ** 2
    return total, math.sqrt(var)


def test_criterion_1_single_party_bound_monte_carlo():
    # dual-homodyne on the reduced single-party state attains 4 + 2n1 + 2n2
    t0 = time.perf_counter()
    lines, ok = [], True
    for r in (0.5, 1.0):
        model = ExperimentModel(r=r)
        ax, ap = 0.8, -0.6
        reduced = partial_trace(build_dealer_state(model, ax, ap), [2])
        gen = RandomStream(101).generator()
        out = sample_joint(reduced, MeasurementAssignment(("xp",)), 1_000_000, gen)
        rx, rp = out[:, 0] - ax, out[:, 1] - ap
        mse = float(np.mean(rx**2) + np.mean(rp**2))
        se = math.hypot(
            np.std(rx**2, ddof=1) / 1000.0, np.std(rp**2, ddof=1) / 1000.0
        )
        n_th = math.sinh(r) ** 2
        target = hcrb_thermal(ThermalParams(n_th, n_th))
        ok &= abs(mse - target) <= 5.0 * se
        lines.append(f"r={r}: {mse:.5f} vs {target:.5f} (5se {5 * se:.5f})")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60.0
    report(1, ok, "; ".join(lines) + f"; {elapsed:.2f} s")
    assert ok


def test_criterion_2_two_party_constancy():
    gen = RandomStream(102).generator()
    lines, ok = [], True
    for r in R_GRID:
        s, se = _sampled_coalition_mse(ExperimentModel(r=r), Coalition.AB, 1_000_000, gen)
        ok &= abs(s - 4.0) <= 5.0 * se
        lines.append(f"r={r}: {s:.4f}")
    report(2, ok, "AB sum vs 4 at " + "; ".join(lines))
    assert ok


def test_criterion_3_three_party_curve():
    gen = RandomStream(103).generator()
    lines, ok = [], True
    for r in R_GRID:
        s, se = _sampled_coalition_mse(ExperimentModel(r=r), Coalition.ABC, 1_000_000, gen)
        target = ideal_three_party_mse_sum(r)
        ok &= abs(s - target) <= 5.0 * se
        lines.append(f"r={r}: {s:.4f} vs {target:.4f}")
    report(3, ok, "ABC sum at " + "; ".join(lines))
    assert ok


def test_criterion_4_witness_value_and_surrogate():
    lines, ok = [], True
    for r in (0.5, 1.0, 1.5):
        wit = witness_verification_run(
            ExperimentModel(r=r), 1.0, 1.0, 400_000, RandomStream(104)
        )
        target = witness_bound(r)
        ok &= abs(wit.mse_sum - target) <= 5.0 * wit.standard_error
        ok &= wit.entangled is True
        lines.append(f"r={r}: {wit.mse_sum:.4f} vs {target:.4f}")
    sur = witness_verification_run(
        ExperimentModel(r=1.0), 1.0, 1.0, 400_000, RandomStream(104), surrogate=True
    )
    ok &= sur.mse_sum >= 4.0 and sur.entangled is False
    lines.append(f"surrogate: {sur.mse_sum:.3f} >= 4")
    report(4, ok, "; ".join(lines))
    assert ok


def test_criterion_5_certificate_grid():
    t0 = time.perf_counter()
    grid = np.linspace(0.1, 3.0, 5)
    n_ok = 0
    for n1 in grid:
        for n2 in grid:
            rep = verify_certificates(ThermalParams(float(n1), float(n2)))
            good = (
                rep.feasible_primal
                and rep.feasible_dual
                and rep.values_match
                and rep.primal_value == pytest.approx(4.0 + 2.0 * n1 + 2.0 * n2, rel=1e-9)
            )
            n_ok += bool(good)
    elapsed = time.perf_counter() - t0
    ok = n_ok == 25 and elapsed < 1.0
    report(5, ok, f"{n_ok}/25 grid points verified in {elapsed * 1000:.0f} ms")
    assert ok


def test_criterion_6_batch_mse_law_and_separation():
    model = ExperimentModel(r=1.0)
    cos = (Coalition.A_ALONE, Coalition.AB, Coalition.ABC)
    mus = {co: predicted_mse(model, co)[2] for co in cos}
    samples, ok, lines = {}, True, []
    for i, n in enumerate((10, 50, 100)):
        for j, co in enumerate(cos):
            out = batch_mse_distribution(
                model, co, n, 10_000, RandomStream(107, stream_id=10 * i + j)
            )
            p = scipy.stats.kstest(
                out,
                lambda x, a=n, s=mus[co] / n: scipy.stats.gamma.cdf(x, a=a, scale=s),
            ).pvalue
            ok &= p > 0.01
            samples[(n, co)] = out
        lines.append(f"N={n} KS ok")
    # separation behavior: at the lone/pair crossing the lone party's
    # undershoot probability falls with N while the pair's success rises
    vstar = crossing_threshold(mus[Coalition.A_ALONE], mus[Coalition.AB])
    deltas = [float(np.mean(samples[(n, Coalition.A_ALONE)] < vstar)) for n in (10, 50, 100)]
    succ = [float(np.mean(samples[(n, Coalition.AB)] < vstar)) for n in (10, 50, 100)]
    ok &= deltas[0] >= deltas[1] >= deltas[2] and deltas[0] > deltas[2]
    ok &= succ[0] <= succ[1] <= succ[2] and succ[0] < succ[2]
    report(
        6,
        ok,
        "; ".join(lines)
        + f"; delta {deltas[0]:.3f}->{deltas[2]:.4f}, success {succ[0]:.3f}->{succ[2]:.4f}",
    )
    assert ok


def test_criterion_7_security_figures():
    # Known mismatch: these quoted delta targets at N=50 and N=100 imply
    # measured means near 7.73/4.07 rather than the 8/4 fixtures; with the
    # fixtures as given the two checks fail. Kept as stated.
    v_t = crossing_threshold(MU_SINGLE_ANCHOR, MU_TRIPLE_ANCHOR)
    quoted = {
        10: (0.18, 0.87),
        50: (0.013, 0.989),
        100: (8e-4, 0.9993),
    }
    ok, lines = True, []
    for n, (q_delta, q_ps) in quoted.items():
        rep = security_probabilities(
            v_t,
            MseDistribution(mu=MU_SINGLE_ANCHOR, n_probes=n),
            MseDistribution(mu=MU_TRIPLE_ANCHOR, n_probes=n),
        )
        d_ok = abs(rep.delta - q_delta) <= 0.15 * q_delta
        p_ok = abs(rep.p_success - q_ps) <= 0.15 * q_ps
        ok &= d_ok and p_ok
        lines.append(
            f"N={n}: delta {rep.delta:.2e} vs {q_delta:.2e} ({'ok' if d_ok else 'off'}), "
            f"P_s {rep.p_success:.4f} vs {q_ps:.4f} ({'ok' if p_ok else 'off'})"
        )
    report(7, ok, "; ".join(lines))
    assert ok


def test_criterion_8_mutual_information():
    ok = True
    # one bit exactly when the error variance equals the modulation variance
    for v in (0.25, 0.5, 1.0, 2.0, 3.7, 8.0):
        ok &= mutual_information(v, v) == 1.0
    # the required-MSE inverse reproduces the bit target
    worst = 0.0
    for c in (0.3, 1.0, 2.5):
        for v in (0.5, 2.0, 10.0):
            worst = max(worst, abs(mutual_information(v, required_mse(c, v)) - c))
    ok &= worst <= 1e-12
    # exceedance curves over the probe count, fixture means, 1 bit at
    # v_dist 5.2; N capped at 50 to stay clear of the region where the
    # best curve is 1 to machine precision and strict comparisons degenerate
    mus = {"a_alone": MU_SINGLE_ANCHOR, "ab": MU_PAIR_ANCHOR, "abc": MU_TRIPLE_ANCHOR}
    curves = {
        name: np.array(
            [
                prob_mi_above(1.0, 5.2, MseDistribution(mu=mu, n_probes=n))
                for n in range(1, 51)
            ]
        )
        for name, mu in mus.items()
    }
    for name, curve in curves.items():
        ok &= bool(np.all(np.diff(curve) > 0.0))
    ok &= bool(np.all(curves["abc"] > curves["ab"]))
    ok &= bool(np.all(curves["ab"] > curves["a_alone"]))
    report(
        8,
        ok,
        f"MI(v,v)=1 exact; inverse error {worst:.1e}; exceedance monotone and ordered",
    )
    assert ok


def test_criterion_9_total_runtime():
    # moved to the end of the whole run by the collection hook
    elapsed = time.perf_counter() - conftest.SUITE_T0
    ok = elapsed < 600.0
    report(9, ok, f"suite elapsed {elapsed:.1f} s < 600 s")
    assert ok
