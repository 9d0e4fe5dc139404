"""테스트베드 YAML 설정 로드/저장

    format: rssiloc-testbed/1
    floor: {min: [0, 0], max: [6000, 3000]}
    anchors:                      # 또는 anchors_file: anchors.csv (설정 파일 기준 상대 경로)
      - {id: AP01, x: 333.33, y: 375.0}
    channel: {alpha_true: 2.4, ref_power_dbm: -40.0, ref_distance_cm: 100.0,
              shadow_sigma_db: 3.0, dropout_prob: 0.05, rssi_floor_dbm: -95.0, seed: 1}
    trajectory:
      scans_per_waypoint: 1
      waypoints: [[1200, 800], [1500, 900]]
      random_waypoints: {count: 100, min_anchor_clearance_cm: 50, seed: 7}   # 선택

channel 키를 생략하면 기본 채널 값을 쓴다. 알 수 없는 키는 오류.
"""

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from locator.calibration import AnchorMap
from locator.constants import DEFAULT_SCANS_PER_WAYPOINT, FORMAT_TESTBED
from locator.errors import InvalidInputError, MalformedConfig
from locator.geometry import Point2D, distance
from pipeline.storage import readText, writeTextAtomic
from pipeline.trace_io import loadAnchors
from testbed.channel import ChannelModel
from testbed.simulator import TestbedConfig, Trajectory

TOP_KEYS = {"format", "floor", "anchors", "anchors_file", "channel", "trajectory"}
# YAML 키 → ChannelModel 필드
CHANNEL_KEYS = {
    "alpha_true": "alpha_true",
    "ref_power_dbm": "ref_power",
    "ref_distance_cm": "ref_distance",
    "shadow_sigma_db": "shadow_sigma_db",
    "dropout_prob": "dropout_prob",
    "rssi_floor_dbm": "rssi_floor",
    "seed": "seed",
}
TRAJECTORY_KEYS = {"scans_per_waypoint", "waypoints", "random_waypoints"}
RANDOM_WAYPOINT_KEYS = {"count", "min_anchor_clearance_cm", "seed"}
RANDOM_WAYPOINT_MAX_TRIES = 1000


@dataclass(frozen=True)
class SimulationSetup:
    """설정 파일 1개의 내용"""
    testbed: TestbedConfig
    channel: ChannelModel
    trajectory: Trajectory


def _mapping(value, source: str, key: str) -> dict:
    if not isinstance(value, dict):
        raise MalformedConfig("expected a mapping", source=source, field=key)
    return value


def _rejectUnknown(raw: dict, allowed: set, source: str, prefix: str = ""):
    for key in raw:
        if key not in allowed:
            raise MalformedConfig("unknown key", source=source, field=f"{prefix}{key}")


def _number(value, source: str, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise MalformedConfig(f"expected a finite number, got {value!r}", source=source, field=key)
    return float(value)


def _point(value, source: str, key: str) -> Point2D:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise MalformedConfig(f"expected [x, y], got {value!r}", source=source, field=key)
    return Point2D(_number(value[0], source, f"{key}[0]"), _number(value[1], source, f"{key}[1]"))


def _parseAnchors(raw: dict, baseDir: Path, source: str) -> AnchorMap:
    if ("anchors" in raw) == ("anchors_file" in raw):
        raise MalformedConfig("exactly one of anchors / anchors_file is required", source=source, field="anchors")
    if "anchors_file" in raw:
        return loadAnchors(baseDir / str(raw["anchors_file"]))

    if not isinstance(raw["anchors"], list) or not raw["anchors"]:
        raise MalformedConfig("expected a non-empty list", source=source, field="anchors")
    anchors = {}
    for idx, item in enumerate(raw["anchors"]):
        where = f"anchors[{idx}]"
        item = _mapping(item, source, where)
        _rejectUnknown(item, {"id", "x", "y"}, source, f"{where}.")
        anchorId = item.get("id")
        if not isinstance(anchorId, str) or not anchorId:
            raise MalformedConfig("anchor id must be a non-empty string", source=source, field=f"{where}.id")
        if anchorId in anchors:
            raise MalformedConfig(f"duplicate anchor id '{anchorId}'", source=source, field=f"{where}.id")
        anchors[anchorId] = Point2D(_number(item.get("x"), source, f"{where}.x"),
                                    _number(item.get("y"), source, f"{where}.y"))
    return AnchorMap(anchors)


def _parseChannel(raw, source: str) -> ChannelModel:
    if raw is None:
        return ChannelModel()
    raw = _mapping(raw, source, "channel")
    _rejectUnknown(raw, set(CHANNEL_KEYS), source, "channel.")
    kwargs = {}
    for key, value in raw.items():
        if key == "seed":
            if isinstance(value, bool) or not isinstance(value, int):
                raise MalformedConfig(f"expected an integer, got {value!r}", source=source, field="channel.seed")
            kwargs["seed"] = value
        else:
            kwargs[CHANNEL_KEYS[key]] = _number(value, source, f"channel.{key}")
    try:
        return ChannelModel(**kwargs)
    except InvalidInputError as e:
        raise MalformedConfig(str(e), source=source, field="channel") from e


def randomWaypoints(testbed: TestbedConfig, count: int, clearance: float, seed: int) -> list[Point2D]:
    """바닥 영역 안에서 앵커와 clearance 이상 떨어진 무작위 웨이포인트 (시드 고정)"""
    rng = np.random.default_rng(seed)
    anchors = [testbed.anchors.position(k) for k in testbed.anchors.ids()]
    points = []
    while len(points) < count:
        for _ in range(RANDOM_WAYPOINT_MAX_TRIES):
            x = float(rng.uniform(testbed.floor_min.x, testbed.floor_max.x))
            y = float(rng.uniform(testbed.floor_min.y, testbed.floor_max.y))
            candidate = Point2D(x, y)
            if all(distance(candidate, a) >= clearance for a in anchors):
                points.append(candidate)
                break
        else:
            raise InvalidInputError(f"cannot place a waypoint {clearance} cm away from every anchor")
    return points


def _parseTrajectory(raw, testbed: TestbedConfig, source: str) -> Trajectory:
    raw = _mapping(raw, source, "trajectory")
    _rejectUnknown(raw, TRAJECTORY_KEYS, source, "trajectory.")

    waypoints = []
    if "waypoints" in raw:
        if not isinstance(raw["waypoints"], list):
            raise MalformedConfig("expected a list of [x, y]", source=source, field="trajectory.waypoints")
        waypoints = [_point(v, source, f"trajectory.waypoints[{i}]") for i, v in enumerate(raw["waypoints"])]

    if "random_waypoints" in raw:
        gen = _mapping(raw["random_waypoints"], source, "trajectory.random_waypoints")
        _rejectUnknown(gen, RANDOM_WAYPOINT_KEYS, source, "trajectory.random_waypoints.")
        count = gen.get("count")
        seed = gen.get("seed", 0)
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise MalformedConfig(f"expected a positive integer, got {count!r}",
                                  source=source, field="trajectory.random_waypoints.count")
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise MalformedConfig(f"expected a non-negative integer, got {seed!r}",
                                  source=source, field="trajectory.random_waypoints.seed")
        clearance = _number(gen.get("min_anchor_clearance_cm", 0.0), source,
                            "trajectory.random_waypoints.min_anchor_clearance_cm")
        try:
            waypoints.extend(randomWaypoints(testbed, count, clearance, seed))
        except InvalidInputError as e:
            raise MalformedConfig(str(e), source=source, field="trajectory.random_waypoints") from e

    scans = raw.get("scans_per_waypoint", DEFAULT_SCANS_PER_WAYPOINT)
    try:
        return Trajectory(tuple(waypoints), scans)
    except InvalidInputError as e:
        raise MalformedConfig(str(e), source=source, field="trajectory") from e


def parseTestbedConfig(text: str, source: str = "<testbed>", baseDir: Path = Path(".")) -> SimulationSetup:
    """YAML 텍스트 → SimulationSetup"""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise MalformedConfig(f"invalid YAML: {getattr(e, 'problem', e)}", source=source,
                              line=mark.line + 1 if mark else None) from e

    raw = _mapping(raw, source, "<root>")
    if raw.get("format") != FORMAT_TESTBED:
        raise MalformedConfig(f"expected format {FORMAT_TESTBED!r}, got {raw.get('format')!r}",
                              source=source, field="format")
    _rejectUnknown(raw, TOP_KEYS, source)
    if "floor" not in raw:
        raise MalformedConfig("missing required key", source=source, field="floor")
    if "trajectory" not in raw:
        raise MalformedConfig("missing required key", source=source, field="trajectory")

    floor = _mapping(raw["floor"], source, "floor")
    _rejectUnknown(floor, {"min", "max"}, source, "floor.")
    floorMin = _point(floor.get("min"), source, "floor.min")
    floorMax = _point(floor.get("max"), source, "floor.max")

    anchors = _parseAnchors(raw, baseDir, source)
    try:
        testbed = TestbedConfig(anchors, floorMin, floorMax)
    except InvalidInputError as e:
        raise MalformedConfig(str(e), source=source, field="floor") from e

    channel = _parseChannel(raw.get("channel"), source)
    trajectory = _parseTrajectory(raw["trajectory"], testbed, source)
    for idx, waypoint in enumerate(trajectory.waypoints):
        if not testbed.contains(waypoint):
            raise MalformedConfig("waypoint outside the floor bounds", source=source,
                                  field=f"trajectory.waypoints[{idx}]")
    return SimulationSetup(testbed, channel, trajectory)


def loadTestbedConfig(path) -> SimulationSetup:
    path = Path(path)
    return parseTestbedConfig(readText(path, MalformedConfig), source=str(path), baseDir=path.parent)


def formatTestbedConfig(setup: SimulationSetup) -> str:
    """SimulationSetup → YAML 텍스트 (웨이포인트는 목록으로 펼쳐서 기록)"""
    testbed, channel = setup.testbed, setup.channel
    data = {
        "format": FORMAT_TESTBED,
        "floor": {
            "min": [testbed.floor_min.x, testbed.floor_min.y],
            "max": [testbed.floor_max.x, testbed.floor_max.y],
        },
        "anchors": [
            {"id": k, "x": testbed.anchors.position(k).x, "y": testbed.anchors.position(k).y}
            for k in testbed.anchors.ids()
        ],
        "channel": {key: getattr(channel, attr) for key, attr in CHANNEL_KEYS.items()},
        "trajectory": {
            "scans_per_waypoint": setup.trajectory.scans_per_waypoint,
            "waypoints": [[p.x, p.y] for p in setup.trajectory.waypoints],
        },
    }
    return yaml.safe_dump(data, sort_keys=False, allow_unicode=True, default_flow_style=None)


def saveTestbedConfig(setup: SimulationSetup, path):
    writeTextAtomic(path, formatTestbedConfig(setup))


@dataclass(frozen=True)
class SimulationOverrides:
    """CLI 플래그로 설정 파일 값을 덮어쓰기 (None이면 유지)"""
    seed: Optional[int] = None
    alpha_true: Optional[float] = None
    shadow_sigma_db: Optional[float] = None
    dropout_prob: Optional[float] = None
    scans_per_waypoint: Optional[int] = None

    def apply(self, channel: ChannelModel, trajectory: Trajectory) -> tuple[ChannelModel, Trajectory]:
        changes = {
            name: getattr(self, name)
            for name in ("seed", "alpha_true", "shadow_sigma_db", "dropout_prob")
            if getattr(self, name) is not None
        }
        if changes:
            channel = replace(channel, **changes)
        if self.scans_per_waypoint is not None:
            trajectory = replace(trajectory, scans_per_waypoint=self.scans_per_waypoint)
        return channel, trajectory
