import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from concurrence_lab.exceptions import (
    DimensionTooSmall,
    DuplicateSetup,
    InvalidSetup,
    MissingSetup,
    WrongScheme,
)
from concurrence_lab.measurement import ProbabilityDistribution
from concurrence_lab.oracle import HaarSeed, exact_concurrence, exact_purity, random_haar_state
from concurrence_lab.protocol import (
    MeasurementPlan,
    ProtocolStatistics,
    Setup,
    concurrence,
    concurrence_stderr,
    plan,
    purity_from_stats,
    radicand,
    reconstruct_offdiagonals,
    round_robin,
    run_plan,
    statistics,
)
from concurrence_lab.state import make_state, reduced_density

from conftest import random_rho, theta_state


def test_sequential_plan_d3():
    p = plan(3, "sequential")
    assert len(p) == 7
    assert [s.kind for s in p] == ["identity"] + ["U"] * 3 + ["V"] * 3
    assert [s.pairs for s in p.by_kind("U")] == [((0, 1),), ((0, 2),), ((1, 2),)]
    assert [s.pairs for s in p.by_kind("V")] == [((0, 1),), ((0, 2),), ((1, 2),)]


def test_parallel_plan_d4():
    p = plan(4, "parallel")
    assert len(p) == 7
    expected = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]
    assert [s.pairs for s in p.by_kind("U")] == expected
    assert [s.pairs for s in p.by_kind("V")] == expected


def _brute_force_round_check(d, rounds):
    # every pair exactly once, disjoint rounds, odd d: each path idle once
    seen = [p for rnd in rounds for p in rnd]
    assert sorted(seen) == list(combinations(range(d), 2))
    idle = []
    for rnd in rounds:
        used = [i for p in rnd for i in p]
        assert len(used) == len(set(used))
        idle.extend(set(range(d)) - set(used))
    if d % 2:
        assert sorted(idle) == list(range(d))
    else:
        assert idle == []


def test_parallel_plan_d5():
    p = plan(5, "parallel")
    assert len(p) == 11
    for kind in "UV":
        rounds = [s.pairs for s in p.by_kind(kind)]
        assert all(len(r) == 2 for r in rounds)
        _brute_force_round_check(5, rounds)


@pytest.mark.parametrize("d", range(2, 13))
def test_round_robin_properties(d):
    _brute_force_round_check(d, round_robin(d))


def test_plan_errors():
    with pytest.raises(DimensionTooSmall):
        plan(1)
    with pytest.raises(ValueError):
        plan(3, "diagonal")
    with pytest.raises(InvalidSetup):
        MeasurementPlan(2, "sequential", (Setup("I", "identity"), Setup("U0", "U", ((0, 1),))))


def test_run_plan_bell_is_uniform():
    rho = np.eye(2) / 2
    for sid, probs in run_plan(rho, plan(2, "sequential")):
        np.testing.assert_allclose(probs.probs, [0.5, 0.5])


def test_run_plan_theta_state():
    t = 0.37
    results = dict(run_plan(reduced_density(theta_state(t), "A"), plan(2, "sequential")))
    np.testing.assert_allclose(results["I"].probs, [math.cos(t) ** 2, math.sin(t) ** 2], atol=1e-15)
    np.testing.assert_allclose(results["U0"].probs, [0.5, 0.5], atol=1e-15)
    np.testing.assert_allclose(results["V0"].probs, [0.5, 0.5], atol=1e-15)


def test_run_plan_shots_close_to_exact():
    rho = random_rho(3, np.random.default_rng(4))
    p = plan(3, "parallel")
    exact = dict(run_plan(rho, p))
    noisy = dict(run_plan(rho, p, shots=10**8, seed=3))
    for sid in exact:
        assert np.max(np.abs(exact[sid].probs - noisy[sid].probs)) < 1e-3


def test_run_plan_seed_is_per_setup():
    rho = random_rho(4, np.random.default_rng(8))
    seq = plan(4, "sequential")
    a = dict(run_plan(rho, seq, shots=500, seed=21))
    reordered = MeasurementPlan(4, "sequential", tuple(reversed(seq.setups)))
    b = dict(run_plan(rho, reordered, shots=500, seed=21))
    for sid in a:
        np.testing.assert_array_equal(a[sid].probs, b[sid].probs)


@pytest.mark.parametrize("t", [0.0, 0.2, math.pi / 8, math.pi / 4])
def test_statistics_theta_state(t):
    p = plan(2, "sequential")
    stats = statistics(run_plan(reduced_density(theta_state(t), "A"), p), p)
    assert stats.T == pytest.approx(math.cos(t) ** 4 + math.sin(t) ** 4, abs=1e-15)
    assert stats.T_prime == pytest.approx(0.5, abs=1e-15)
    assert stats.T_double_prime == pytest.approx(0.5, abs=1e-15)
    assert concurrence(stats) == pytest.approx(abs(math.sin(2 * t)), abs=1e-12)


def test_statistics_maximally_mixed():
    p = plan(2, "sequential")
    stats = statistics(run_plan(np.eye(2) / 2, p), p)
    assert (stats.T, stats.T_prime, stats.T_double_prime) == pytest.approx((0.5, 0.5, 0.5))


def test_statistics_missing_and_duplicate():
    p = plan(2, "sequential")
    results = run_plan(np.eye(2) / 2, p)
    with pytest.raises(MissingSetup):
        statistics(results[:-1], p)
    with pytest.raises(DuplicateSetup):
        statistics(results + results[:1], p)


def _eq10_residual(rho, stats):
    d = rho.shape[0]
    off = sum(abs(rho[i, j]) ** 2 for i, j in combinations(range(d), 2))
    return stats.T_prime + stats.T_double_prime - (d * d - 2 * d) * stats.T - 2 * off - 1


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_sum_identity_sequential(d, seed):
    rho = random_rho(d, np.random.default_rng(seed))
    p = plan(d, "sequential")
    assert abs(_eq10_residual(rho, statistics(run_plan(rho, p), p))) < 1e-12


def test_purity_from_stats_examples():
    s = ProtocolStatistics(0.5, 0.5, 0.5, 2, "sequential")
    assert purity_from_stats(s).raw == pytest.approx(0.5)
    p = plan(2, "sequential")
    rho = reduced_density(make_state(2, 2, [1, 0, 0, 0]), "A")
    assert purity_from_stats(statistics(run_plan(rho, p), p)).raw == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(WrongScheme):
        purity_from_stats(ProtocolStatistics(0.5, 0.5, 0.5, 2, "parallel"))


def test_purity_d5_matches_oracle():
    rho = random_rho(5, np.random.default_rng(55))
    p = plan(5, "sequential")
    assert abs(purity_from_stats(statistics(run_plan(rho, p), p)).raw - exact_purity(rho)) < 1e-10


def test_purity_clamping():
    est = purity_from_stats(ProtocolStatistics(0.5, 0.2, 0.2, 2, "sequential"))
    assert est.raw == pytest.approx(-0.1)
    assert est.clamped == 0.5


def test_concurrence_examples():
    assert concurrence(ProtocolStatistics(1.0, 0.5, 0.5, 2, "sequential")) == 0.0
    a = b = c = 1 / math.sqrt(3)
    state = make_state(2, 2, [a, b, c, 0])
    p = plan(2, "sequential")
    est = concurrence(statistics(run_plan(reduced_density(state, "A"), p), p))
    assert est == pytest.approx(2 / 3, abs=1e-12)


def test_negative_radicand_clamps_to_zero():
    stats = ProtocolStatistics(1.0, 0.6, 0.6, 2, "sequential")
    c, r = concurrence(stats, return_radicand=True)
    assert c == 0.0 and r == pytest.approx(-0.4)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_both_schemes_match_oracle(dim_a, dim_b, seed):
    state = random_haar_state(HaarSeed(seed, (dim_a, dim_b)))
    rho = reduced_density(state, "A")
    truth = exact_concurrence(state)
    for scheme in ("sequential", "parallel"):
        p = plan(dim_a, scheme)
        assert abs(concurrence(statistics(run_plan(rho, p), p)) - truth) < 1e-10


def test_concurrence_independent_of_result_order():
    rho = random_rho(5, np.random.default_rng(2))
    p = plan(5, "parallel")
    results = run_plan(rho, p, shots=1000, seed=9)
    a = concurrence(statistics(results, p))
    b = concurrence(statistics(results[::-1], p))
    assert a == pytest.approx(b, abs=1e-15)


def test_parallel_radicand_drops_idle_paths_gives_wrong_answer():
    # idle paths must enter T' and T'' for odd d; dropping them breaks the estimate
    d = 5
    rho = random_rho(d, np.random.default_rng(31))
    p = plan(d, "parallel")
    results = dict(run_plan(rho, p))
    full = statistics(list(results.items()), p)
    trimmed = {"U": 0.0, "V": 0.0}
    for s in p.by_kind("U") + p.by_kind("V"):
        used = [i for pair in s.pairs for i in pair]
        trimmed[s.kind] += float(np.sum(results[s.id].probs[used] ** 2))
    wrong = ProtocolStatistics(full.T, trimmed["U"], trimmed["V"], d, "parallel")
    truth = 2 * (1 - exact_purity(rho))
    assert abs(radicand(full) - truth) < 1e-12
    assert abs(radicand(wrong) - truth) > 1e-3


def test_reconstruct_theta_state():
    rho = reduced_density(theta_state(0.3), "A")
    p = plan(2, "sequential")
    np.testing.assert_allclose(reconstruct_offdiagonals(run_plan(rho, p), p).entries, rho.entries, atol=1e-12)


def test_reconstruct_random_d3():
    rho = random_rho(3, np.random.default_rng(12))
    p = plan(3, "sequential")
    np.testing.assert_allclose(reconstruct_offdiagonals(run_plan(rho, p), p).entries, rho, atol=1e-12)


def test_reconstruct_with_shots():
    rho = random_rho(3, np.random.default_rng(13))
    p = plan(3, "sequential")
    rec = reconstruct_offdiagonals(run_plan(rho, p, shots=10**6, seed=1), p).entries
    assert np.max(np.abs(rec - rho)) < 5e-3


def test_reconstruct_rejects_parallel():
    p = plan(3, "parallel")
    with pytest.raises(WrongScheme):
        reconstruct_offdiagonals(run_plan(np.eye(3) / 3, p), p)


def test_stderr_tracks_spread():
    state = random_haar_state(HaarSeed(17, (3, 3)))
    rho = reduced_density(state, "A")
    p = plan(3, "sequential")
    shots = 20_000
    estimates, errs = [], []
    for seed in range(300):
        results = run_plan(rho, p, shots=shots, seed=seed)
        stats = statistics(results, p, shots=shots, seed=seed)
        estimates.append(concurrence(stats))
        errs.append(concurrence_stderr(results, p, stats))
    ratio = np.std(estimates) / np.mean(errs)
    assert 0.8 < ratio < 1.2
    exact_stats = statistics(run_plan(rho, p), p)
    assert concurrence_stderr(run_plan(rho, p), p, exact_stats) is None


def test_probability_distribution_input_validation():
    p = plan(2, "sequential")
    bad = [(sid, ProbabilityDistribution([1 / 3] * 3)) for sid, _ in run_plan(np.eye(2) / 2, p)]
    with pytest.raises(InvalidSetup):
        statistics(bad, p)


def test_shot_noise_scaling_generic_and_maximal():
    # generic states: RMS error ~ n**-0.5; at the Bell state the first-order
    # sensitivity of the radicand vanishes and the RMS error falls as n**-1
    from concurrence_lab.cli import bell_state, sweep_shots

    grid = [10**3, 10**4, 10**5, 10**6]
    generic = sweep_shots(theta_state(0.5), grid, 100, "sequential", seed=7)
    slope = np.polyfit(np.log10(grid), np.log10([r[3] for r in generic]), 1)[0]
    assert -0.6 <= slope <= -0.4
    bell = sweep_shots(bell_state(), grid, 100, "sequential", seed=7)
    slope = np.polyfit(np.log10(grid), np.log10([r[3] for r in bell]), 1)[0]
    assert -1.1 <= slope <= -0.9
