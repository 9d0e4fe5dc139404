"""실내 무선 테스트베드 시뮬레이터

고정 앵커 배치 + 웨이포인트를 따라 이동하는 로봇 + 채널 모델로
스캔 트레이스와 정답 위치(ground truth)를 생성한다.
로봇의 이동 과정(속도, 궤적 보간)은 다루지 않고 웨이포인트에서만 스캔한다.
"""

from dataclasses import dataclass, field

from tqdm import tqdm

from locator.calibration import AnchorMap
from locator.constants import COINCIDENT_EPS, DEFAULT_SCANS_PER_WAYPOINT, SCAN_INTERVAL_S, SHOW_PROGRESS
from locator.errors import InvalidInputError, PositionOnAnchor, PositionOutOfBounds
from locator.geometry import Point2D, distance
from pipeline.records import ScanRecord
from testbed.channel import ChannelModel, sampleReading


@dataclass(frozen=True)
class TestbedConfig:
    """앵커 배치 + 바닥 영역 (cm)"""
    __test__ = False  # pytest 수집 제외

    anchors: AnchorMap
    floor_min: Point2D
    floor_max: Point2D

    def __post_init__(self):
        if not (self.floor_min.x < self.floor_max.x and self.floor_min.y < self.floor_max.y):
            raise InvalidInputError(
                f"floor bounds must satisfy min < max, got ({self.floor_min.x}, {self.floor_min.y})"
                f" .. ({self.floor_max.x}, {self.floor_max.y})"
            )
        if len(self.anchors) < 2:
            raise InvalidInputError(f"testbed needs at least 2 anchors, got {len(self.anchors)}")
        for anchorId in self.anchors.ids():
            if not self.contains(self.anchors.position(anchorId)):
                raise PositionOutOfBounds(f"anchor '{anchorId}' lies outside the floor bounds")

    def contains(self, position: Point2D) -> bool:
        return (self.floor_min.x <= position.x <= self.floor_max.x
                and self.floor_min.y <= position.y <= self.floor_max.y)


@dataclass(frozen=True)
class Trajectory:
    """로봇 웨이포인트 목록"""
    waypoints: tuple
    scans_per_waypoint: int = DEFAULT_SCANS_PER_WAYPOINT

    def __post_init__(self):
        if not self.waypoints:
            raise InvalidInputError("trajectory needs at least one waypoint")
        if isinstance(self.scans_per_waypoint, bool) or not isinstance(self.scans_per_waypoint, int) \
                or self.scans_per_waypoint < 1:
            raise InvalidInputError(f"scans_per_waypoint must be a positive integer, got {self.scans_per_waypoint!r}")


@dataclass
class GroundTruthTrace:
    """(스캔, 실제 위치) 목록"""
    records: list = field(default_factory=list)   # (ScanRecord, Point2D)

    def __len__(self) -> int:
        return len(self.records)

    def scans(self) -> list[ScanRecord]:
        return [scan for scan, _ in self.records]

    def groundTruth(self) -> list[tuple[float, Point2D]]:
        return [(scan.timestamp, position) for scan, position in self.records]


def _checkPosition(position: Point2D, testbed: TestbedConfig):
    if not testbed.contains(position):
        raise PositionOutOfBounds(f"position ({position.x!r}, {position.y!r}) is outside the floor bounds")
    for anchorId in testbed.anchors.ids():
        if distance(position, testbed.anchors.position(anchorId)) < COINCIDENT_EPS:
            raise PositionOnAnchor(f"position ({position.x!r}, {position.y!r}) coincides with anchor '{anchorId}'")


def simulateScan(position: Point2D, testbed: TestbedConfig, channel: ChannelModel,
                 drawIndex: int, timestamp: float = 0.0) -> ScanRecord:
    """위치 1곳에서 스캔 1회 생성

    각 앵커의 측정값은 (seed, drawIndex, 앵커 ID)만으로 결정된다.

    Raises:
        PositionOutOfBounds: 바닥 영역 밖
        PositionOnAnchor: 앵커 좌표와 겹침
    """
    _checkPosition(position, testbed)
    readings = {}
    for anchorId in testbed.anchors.ids():
        power = sampleReading(channel, distance(position, testbed.anchors.position(anchorId)), drawIndex, anchorId)
        if power is not None:
            readings[anchorId] = power
    return ScanRecord(timestamp, readings)


def runTrajectory(trajectory: Trajectory, testbed: TestbedConfig, channel: ChannelModel,
                  firstDrawIndex: int = 0, showProgress: bool = SHOW_PROGRESS) -> GroundTruthTrace:
    """웨이포인트 순서대로 스캔 생성 (60초 간격 타임스탬프, draw_index 단조 증가)"""
    for position in trajectory.waypoints:
        _checkPosition(position, testbed)

    total = len(trajectory.waypoints) * trajectory.scans_per_waypoint
    trace = GroundTruthTrace()
    drawIndex = firstDrawIndex
    with tqdm(total=total, desc="[시뮬레이션]", disable=not showProgress, leave=False) as bar:
        for position in trajectory.waypoints:
            for _ in range(trajectory.scans_per_waypoint):
                timestamp = (drawIndex - firstDrawIndex) * SCAN_INTERVAL_S
                scan = simulateScan(position, testbed, channel, drawIndex, timestamp)
                trace.records.append((scan, position))
                drawIndex += 1
                bar.update(1)

    empty = sum(1 for scan, _ in trace.records if not scan.readings)
    if showProgress:
        print(f"[시뮬레이션] {len(trajectory.waypoints)}개 웨이포인트, {total}개 스캔 생성")
        if empty:
            print(f"[경고] 측정값이 없는 스캔 {empty}개 (트레이스 파일에는 기록되지 않음)")
    return trace
