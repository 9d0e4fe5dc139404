#!/usr/bin/env python3
"""
테스트베드 시뮬레이터 / 채널 모델 / YAML 설정 테스트

실행:
    python tests/test_simulator.py
"""

import sys
from pathlib import Path

import numpy as np
import pytest

projectPath = Path(__file__).parent.parent
sys.path.insert(0, str(projectPath))

from locator.calibration import AnchorMap
from locator.errors import InvalidInputError, MalformedConfig, PositionOnAnchor, PositionOutOfBounds
from locator.geometry import Point2D
from testbed.channel import ChannelModel, anchorHash, sampleReading
from testbed.config import (
    SimulationOverrides,
    formatTestbedConfig,
    loadTestbedConfig,
    parseTestbedConfig,
    saveTestbedConfig,
)
from testbed.simulator import TestbedConfig, Trajectory, runTrajectory, simulateScan

NOISELESS = ChannelModel(alpha_true=2.0, ref_power=-40.0, ref_distance=100.0,
                         shadow_sigma_db=0.0, dropout_prob=0.0, rssi_floor=-200.0, seed=1)

SAMPLE_CONFIG = """\
format: rssiloc-testbed/1
floor: {min: [0, 0], max: [2000, 1000]}
anchors:
  - {id: AP01, x: 100, y: 100}
  - {id: AP02, x: 1900, y: 100}
  - {id: AP03, x: 1000, y: 900}
channel: {alpha_true: 2.2, shadow_sigma_db: 2.0, dropout_prob: 0.1, seed: 9}
trajectory:
  scans_per_waypoint: 2
  waypoints: [[500, 500], [1500, 400]]
"""


def _lineTestbed() -> TestbedConfig:
    anchors = AnchorMap({"A": Point2D(100.0, 0.0), "B": Point2D(1000.0, 0.0)})
    return TestbedConfig(anchors, Point2D(-10.0, -10.0), Point2D(1100.0, 100.0))


# === simulateScan ===

def test_noiseless_scan_follows_forward_model():
    scan = simulateScan(Point2D(0.0, 0.0), _lineTestbed(), NOISELESS, drawIndex=0)
    assert scan.readings["A"] == pytest.approx(-40.0, abs=1e-12)
    assert scan.readings["B"] == pytest.approx(-60.0, abs=1e-12)


def test_full_dropout_gives_empty_scan():
    channel = ChannelModel(dropout_prob=1.0, seed=3)
    assert simulateScan(Point2D(0.0, 0.0), _lineTestbed(), channel, drawIndex=5).readings == {}


def test_readings_below_floor_are_dropped():
    channel = ChannelModel(alpha_true=2.0, ref_power=-40.0, ref_distance=100.0,
                           shadow_sigma_db=0.0, dropout_prob=0.0, rssi_floor=-50.0)
    assert set(simulateScan(Point2D(0.0, 0.0), _lineTestbed(), channel, drawIndex=0).readings) == {"A"}


def test_same_draw_index_is_reproducible():
    channel = ChannelModel(seed=123)
    first = simulateScan(Point2D(300.0, 50.0), _lineTestbed(), channel, drawIndex=42)
    second = simulateScan(Point2D(300.0, 50.0), _lineTestbed(), channel, drawIndex=42)
    assert first == second
    other = simulateScan(Point2D(300.0, 50.0), _lineTestbed(), channel, drawIndex=43)
    assert first != other


def test_adding_an_anchor_keeps_other_draws():
    channel = ChannelModel(shadow_sigma_db=4.0, dropout_prob=0.0, seed=77)
    small = _lineTestbed()
    bigger = TestbedConfig(
        AnchorMap({**small.anchors.anchors, "C": Point2D(500.0, 90.0)}),
        small.floor_min, small.floor_max,
    )
    position = Point2D(400.0, 20.0)
    before = simulateScan(position, small, channel, 7).readings
    after = simulateScan(position, bigger, channel, 7).readings
    assert {k: after[k] for k in before} == before


def test_anchor_hash_is_stable():
    assert anchorHash("AP01") == anchorHash("AP01")
    assert anchorHash("AP01") != anchorHash("AP02")
    assert 0 <= anchorHash("한글") < 2 ** 64


def test_scan_position_checks():
    with pytest.raises(PositionOutOfBounds):
        simulateScan(Point2D(5000.0, 0.0), _lineTestbed(), NOISELESS, 0)
    with pytest.raises(PositionOnAnchor):
        simulateScan(Point2D(100.0, 0.0), _lineTestbed(), NOISELESS, 0)


# === 통계 특성 ===

def test_shadowing_statistics():
    channel = ChannelModel(alpha_true=2.4, shadow_sigma_db=4.0, dropout_prob=0.0, rssi_floor=-500.0, seed=2024)
    mean = channel.meanPower(750.0)
    deltas = np.array([sampleReading(channel, 750.0, k, "AP07") - mean for k in range(10_000)])
    assert abs(deltas.mean()) <= 0.15
    assert abs(deltas.std() - 4.0) <= 0.15


def test_dropout_rate():
    channel = ChannelModel(shadow_sigma_db=0.0, dropout_prob=0.3, rssi_floor=-500.0, seed=8)
    missing = sum(sampleReading(channel, 300.0, k, "AP11") is None for k in range(10_000))
    assert abs(missing / 10_000 - 0.3) <= 0.02


def test_channel_rejects_bad_parameters():
    with pytest.raises(InvalidInputError):
        ChannelModel(shadow_sigma_db=-1.0)
    with pytest.raises(InvalidInputError):
        ChannelModel(dropout_prob=1.5)
    with pytest.raises(InvalidInputError):
        ChannelModel(ref_distance=0.0)
    with pytest.raises(InvalidInputError):
        ChannelModel(seed=-1)


# === runTrajectory ===

def test_trajectory_timestamps_and_truth():
    trajectory = Trajectory((Point2D(0, 0), Point2D(500, 50), Point2D(900, 0)), scans_per_waypoint=2)
    trace = runTrajectory(trajectory, _lineTestbed(), NOISELESS, showProgress=False)
    assert len(trace) == 6
    assert [scan.timestamp for scan in trace.scans()] == [0.0, 60.0, 120.0, 180.0, 240.0, 300.0]
    assert [p for _, p in trace.groundTruth()] == [Point2D(0, 0)] * 2 + [Point2D(500, 50)] * 2 + [Point2D(900, 0)] * 2


def test_single_waypoint_single_scan():
    trace = runTrajectory(Trajectory((Point2D(0, 0),)), _lineTestbed(), NOISELESS, showProgress=False)
    assert len(trace) == 1


def test_trajectory_is_deterministic():
    channel = ChannelModel(seed=31)
    trajectory = Trajectory((Point2D(200, 10), Point2D(700, 80)), scans_per_waypoint=3)
    first = runTrajectory(trajectory, _lineTestbed(), channel, showProgress=False)
    second = runTrajectory(trajectory, _lineTestbed(), channel, showProgress=False)
    assert first.records == second.records


def test_trajectory_rejects_waypoint_outside_floor():
    with pytest.raises(PositionOutOfBounds):
        runTrajectory(Trajectory((Point2D(0, 0), Point2D(0, 500))), _lineTestbed(), NOISELESS, showProgress=False)


def test_testbed_invariants():
    with pytest.raises(InvalidInputError):
        TestbedConfig(AnchorMap({"A": Point2D(0, 0)}), Point2D(-1, -1), Point2D(1, 1))
    with pytest.raises(PositionOutOfBounds):
        TestbedConfig(AnchorMap({"A": Point2D(0, 0), "B": Point2D(50, 0)}), Point2D(-1, -1), Point2D(10, 10))
    with pytest.raises(InvalidInputError):
        Trajectory(())


# === YAML 설정 ===

def test_parse_sample_config():
    setup = parseTestbedConfig(SAMPLE_CONFIG)
    assert setup.testbed.anchors.ids() == ["AP01", "AP02", "AP03"]
    assert setup.channel.alpha_true == 2.2
    assert setup.channel.ref_power == -40.0
    assert setup.channel.seed == 9
    assert setup.trajectory.scans_per_waypoint == 2
    assert setup.trajectory.waypoints == (Point2D(500, 500), Point2D(1500, 400))


def test_example_config_in_docs_loads():
    setup = loadTestbedConfig(projectPath / "doc" / "testbed.example.yaml")
    assert len(setup.testbed.anchors) == 12
    assert setup.channel == ChannelModel()
    assert len(setup.trajectory.waypoints) == 3


def test_config_roundtrip(tmp_path):
    setup = parseTestbedConfig(SAMPLE_CONFIG)
    path = tmp_path / "testbed.yaml"
    saveTestbedConfig(setup, path)
    assert loadTestbedConfig(path) == setup
    assert formatTestbedConfig(setup).startswith("format: rssiloc-testbed/1\n")


def test_random_waypoints_are_seeded_and_clear():
    text = SAMPLE_CONFIG.replace(
        "  waypoints: [[500, 500], [1500, 400]]\n",
        "  random_waypoints: {count: 25, min_anchor_clearance_cm: 50, seed: 4}\n",
    )
    first = parseTestbedConfig(text).trajectory.waypoints
    assert first == parseTestbedConfig(text).trajectory.waypoints
    assert len(first) == 25
    anchors = parseTestbedConfig(text).testbed.anchors
    for p in first:
        assert all(np.hypot(p.x - a.x, p.y - a.y) >= 50 for a in anchors.anchors.values())


def test_anchors_file_is_relative_to_config(tmp_path):
    (tmp_path / "anchors.csv").write_text(
        "# rssiloc-anchors v1\nanchor_id,x_cm,y_cm\nA,10,10\nB,90,10\n", encoding="utf-8"
    )
    (tmp_path / "bed.yaml").write_text(
        "format: rssiloc-testbed/1\nfloor: {min: [0, 0], max: [100, 100]}\nanchors_file: anchors.csv\n"
        "trajectory: {waypoints: [[50, 50]]}\n",
        encoding="utf-8",
    )
    setup = loadTestbedConfig(tmp_path / "bed.yaml")
    assert setup.testbed.anchors.position("B") == Point2D(90.0, 10.0)
    assert setup.channel == ChannelModel()


CONFIG_BREAKAGES = [
    ("format: rssiloc-testbed/2\n", "format"),
    ("channel: {alpha_true: 2.2, gain: 3}\n", "channel.gain"),
    ("channel: {dropout_prob: 2.0}\n", "channel"),
    ("channel: {seed: 1.5}\n", "channel.seed"),
]


def test_config_errors_name_the_field():
    for broken, field in CONFIG_BREAKAGES:
        key = broken.split(":")[0]
        lines = [line for line in SAMPLE_CONFIG.splitlines(keepends=True) if not line.startswith(key + ":")]
        with pytest.raises(MalformedConfig) as info:
            parseTestbedConfig("".join(lines) + broken, "bed.yaml")
        assert info.value.field == field, broken


def test_config_yaml_syntax_error_has_line():
    with pytest.raises(MalformedConfig) as info:
        parseTestbedConfig("format: rssiloc-testbed/1\nfloor: {min: [0, 0]\n", "bed.yaml")
    assert info.value.line is not None


def test_config_waypoint_outside_floor():
    text = SAMPLE_CONFIG.replace("[1500, 400]", "[2500, 400]")
    with pytest.raises(MalformedConfig) as info:
        parseTestbedConfig(text)
    assert info.value.field == "trajectory.waypoints[1]"


def test_overrides_replace_channel_fields():
    setup = parseTestbedConfig(SAMPLE_CONFIG)
    channel, trajectory = SimulationOverrides(seed=99, shadow_sigma_db=0.0, scans_per_waypoint=5).apply(
        setup.channel, setup.trajectory
    )
    assert (channel.seed, channel.shadow_sigma_db, channel.alpha_true) == (99, 0.0, 2.2)
    assert trajectory.scans_per_waypoint == 5
    assert SimulationOverrides().apply(setup.channel, setup.trajectory) == (setup.channel, setup.trajectory)


if __name__ == "__main__":
    from tests.runner import runModule
    sys.exit(runModule(globals()))
