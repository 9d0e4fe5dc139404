#!/usr/bin/env python3
"""
경로손실 계산 테스트

실행:
    python tests/test_pathloss.py
"""

import math
import random
import sys
from pathlib import Path

import pytest

projectPath = Path(__file__).parent.parent
sys.path.insert(0, str(projectPath))

from locator.errors import EmptyInput, EqualDistances, NonPositiveAlpha, NonPositiveDistance
from locator.pathloss import (
    aggregateAlpha,
    aggregateDistance,
    alphaFromPair,
    distanceFromPower,
    filterAlphas,
    powerAtDistance,
)


def test_alpha_from_decade_pairs():
    assert alphaFromPair(-40, 100, -60, 1000) == pytest.approx(2.0, abs=1e-12)
    assert alphaFromPair(-40, 100, -70, 1000) == pytest.approx(3.0, abs=1e-12)


def test_alpha_equal_distances_raise():
    with pytest.raises(EqualDistances):
        alphaFromPair(-40, 500, -50, 500)


def test_alpha_rejects_non_positive_distance():
    with pytest.raises(NonPositiveDistance):
        alphaFromPair(-40, 0, -50, 100)


def test_alpha_is_symmetric_in_pair_order():
    rng = random.Random(7)
    for _ in range(200):
        pI, pJ = rng.uniform(-95, -30), rng.uniform(-95, -30)
        rI, rJ = rng.uniform(10, 5000), rng.uniform(10, 5000)
        assert alphaFromPair(pI, rI, pJ, rJ) == pytest.approx(alphaFromPair(pJ, rJ, pI, rI), rel=1e-12)


def test_aggregate_alpha_mean():
    assert aggregateAlpha([2.0]) == 2.0
    assert aggregateAlpha([2.0, 4.0]) == 3.0
    assert aggregateAlpha([1.5, 2.5, 2.0]) == pytest.approx(2.0, abs=1e-15)
    with pytest.raises(EmptyInput):
        aggregateAlpha([])


def test_filter_alphas():
    kept, discarded = filterAlphas([-3.0, 0.5, 2.0, 4.0, 9.0], (1.0, 6.0))
    assert kept == [2.0, 4.0]
    assert discarded == 3
    kept, discarded = filterAlphas([-3.0, 2.0], None)
    assert kept == [-3.0, 2.0]
    assert discarded == 0


def test_distance_from_power_examples():
    assert distanceFromPower(-40, -40, 100, 2) == pytest.approx(100.0, rel=1e-12)
    assert distanceFromPower(-60, -40, 100, 2) == pytest.approx(1000.0, rel=1e-12)
    assert distanceFromPower(-30, -40, 100, 2) == pytest.approx(31.6227766016838, rel=1e-12)


def test_distance_from_power_rejects_bad_alpha():
    with pytest.raises(NonPositiveAlpha):
        distanceFromPower(-50, -40, 100, 0.0)
    with pytest.raises(NonPositiveAlpha):
        distanceFromPower(-50, -40, 100, -2.0)


def test_distance_from_power_overflow_is_an_estimation_error():
    with pytest.raises(NonPositiveDistance):
        distanceFromPower(-1e6, -40, 100, 1.0)


def test_aggregate_distance_mean():
    assert aggregateDistance([100]) == 100
    assert aggregateDistance([100, 300]) == 200
    assert aggregateDistance([50, 100, 150]) == 100
    with pytest.raises(EmptyInput):
        aggregateDistance([])


def test_power_at_distance_examples():
    assert powerAtDistance(-40, 100, 100, 2) == pytest.approx(-40.0, abs=1e-12)
    assert powerAtDistance(-40, 100, 1000, 2) == pytest.approx(-60.0, abs=1e-12)
    assert powerAtDistance(-40, 100, 200, 3) == pytest.approx(-49.0308998699194, abs=1e-10)


def test_power_at_distance_rejects_bad_input():
    with pytest.raises(NonPositiveDistance):
        powerAtDistance(-40, 100, 0, 2)
    with pytest.raises(NonPositiveDistance):
        powerAtDistance(-40, -5, 10, 2)
    with pytest.raises(NonPositiveAlpha):
        powerAtDistance(-40, 100, 10, 0)


def test_roundtrip_and_exponent_recovery():
    rng = random.Random(2024)
    for _ in range(10_000):
        refP = rng.uniform(-60, -20)
        refR = rng.uniform(1, 1000)
        alpha = rng.uniform(1, 6)
        r = rng.uniform(1, 10_000)
        power = powerAtDistance(refP, refR, r, alpha)
        assert math.isclose(distanceFromPower(power, refP, refR, alpha), r, rel_tol=1e-9)

        r2 = rng.uniform(1, 10_000)
        if abs(math.log10(r2 / r)) < 1e-3:
            continue
        recovered = alphaFromPair(power, r, powerAtDistance(refP, refR, r2, alpha), r2)
        assert math.isclose(recovered, alpha, rel_tol=1e-9)


def test_distance_is_strictly_decreasing_in_power():
    powers = [-95 + 0.5 * i for i in range(131)]
    distances = [distanceFromPower(p, -40, 100, 2.4) for p in powers]
    assert all(a > b for a, b in zip(distances, distances[1:]))


if __name__ == "__main__":
    from tests.runner import runModule
    sys.exit(runModule(globals()))
