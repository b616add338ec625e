import math

import numpy as np
import pytest

from concurrence_lab.exceptions import InvalidDensityMatrix, InvalidRank
from concurrence_lab.oracle import (
    HaarSeed,
    exact_concurrence,
    exact_purity,
    random_haar_state,
    random_mixed_state,
    subsystem_bound,
    wootters_concurrence,
)
from concurrence_lab.state import make_state, partial_trace, pure_density

from conftest import theta_state


def test_exact_purity_examples():
    assert exact_purity(np.eye(2) / 2) == pytest.approx(0.5)
    v = np.array([0.6, 0.8j])
    assert exact_purity(np.outer(v, v.conj())) == pytest.approx(1.0)
    t = math.pi / 8
    assert exact_purity(np.diag([math.cos(t) ** 2, math.sin(t) ** 2])) == pytest.approx(
        math.cos(t) ** 4 + math.sin(t) ** 4
    )


def test_exact_concurrence_examples():
    assert exact_concurrence(make_state(2, 2, [1, 0, 0, 1])) == pytest.approx(1.0)
    for t in (0.1, 0.5, 1.0):
        assert exact_concurrence(theta_state(t)) == pytest.approx(abs(math.sin(2 * t)))
    assert exact_concurrence(make_state(3, 3, np.eye(3).ravel())) == pytest.approx(math.sqrt(4 / 3))


def test_exact_concurrence_subsystems_agree():
    for seed in range(20):
        s = random_haar_state(HaarSeed(seed, (2 + seed % 4, 3)))
        assert abs(exact_concurrence(s, "A") - exact_concurrence(s, "B")) < 1e-10


def test_wootters_examples():
    bell = make_state(2, 2, [1, 0, 0, 1])
    assert wootters_concurrence(pure_density(bell)) == pytest.approx(1.0, abs=1e-12)
    assert wootters_concurrence(np.eye(4) / 4) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(InvalidDensityMatrix):
        wootters_concurrence(np.eye(3) / 3)


def test_wootters_pure_consistency():
    for seed in range(50):
        s = random_haar_state(HaarSeed(seed, (2, 2)))
        assert abs(wootters_concurrence(pure_density(s)) - exact_concurrence(s)) < 1e-10


def test_werner_state_concurrence():
    # Werner state p|Bell><Bell| + (1-p) I/4 has concurrence max(0, (3p-1)/2)
    bell = pure_density(make_state(2, 2, [1, 0, 0, 1])).entries
    for p in (0.2, 1 / 3, 0.5, 0.9):
        rho = p * bell + (1 - p) * np.eye(4) / 4
        assert wootters_concurrence(rho) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-10)


def test_haar_states():
    a = random_haar_state(HaarSeed(1, (2, 3)))
    b = random_haar_state(HaarSeed(2, (2, 3)))
    assert abs(np.linalg.norm(a.amplitudes) - 1) < 1e-12
    assert abs(np.vdot(a.amplitudes, b.amplitudes)) < 1 - 1e-9
    np.testing.assert_array_equal(a.amplitudes, random_haar_state(HaarSeed(1, (2, 3))).amplitudes)


def test_haar_mean_purity():
    from concurrence_lab.state import reduced_density

    purities = [
        exact_purity(reduced_density(random_haar_state(HaarSeed(s, (2, 2))), "A"))
        for s in range(10_000)
    ]
    assert abs(np.mean(purities) - 0.8) < 0.01


def test_random_mixed_state():
    assert exact_purity(random_mixed_state(4, 1, 3)) == pytest.approx(1.0, abs=1e-10)
    for seed in range(50):
        assert 0.5 - 1e-12 <= exact_purity(random_mixed_state(2, 2, seed)) <= 1 + 1e-12
    eig = np.linalg.eigvalsh(random_mixed_state(5, 2, 8).entries)
    assert np.all(np.abs(eig[:3]) < 1e-10)
    with pytest.raises(InvalidRank):
        random_mixed_state(3, 4, 0)
    with pytest.raises(InvalidRank):
        random_mixed_state(3, 0, 0)


def test_subsystem_bound_dominates_wootters():
    for seed in range(100):
        rho = random_mixed_state(4, 2 + seed % 3, seed)
        assert subsystem_bound(partial_trace(rho, (2, 2), "A")) >= wootters_concurrence(rho) - 1e-10
