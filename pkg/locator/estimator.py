"""위치 추정 파이프라인

1. 스캔에서 수신 전력 상위 N개 앵커 선택
2. 보정 DB의 기준 항목마다 거리 역변환 후 평균 → r̂_k
3. 앵커 쌍마다 두 원의 교점 계산 → 후보점 선택 (C(N,2)회)
4. 선택된 점들의 평균 → (x̂₀, ŷ₀)

locate는 입력에 대한 순수 함수이며, 공유된 불변 DB 위에서 동시에 호출해도 된다.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from locator.calibration import AnchorMap, CalibrationDatabase, strongestReadings
from locator.constants import (
    DEFAULT_MIN_PAIRS,
    DEFAULT_N,
    DEFAULT_SELECTION,
    SELECTION_POLICIES,
    SELECTION_RANGE_RESIDUAL,
    TIE_BREAK_POLICY,
)
from locator.errors import (
    CoincidentCenters,
    EmptyDatabase,
    InvalidInputError,
    NonPositiveAlpha,
    TooFewTargets,
    TooFewUsablePairs,
)
from locator.geometry import (
    Circle,
    Point2D,
    centroid,
    circleIntersection,
    selectCandidate,
    selectCandidateByResidual,
)
from locator.pathloss import aggregateDistance, distanceFromPower
from pipeline.records import ScanRecord


@dataclass(frozen=True)
class EstimatorConfig:
    """추정 설정"""
    n: int = DEFAULT_N                      # 사용할 상위 앵커 수 N
    min_pairs: int = DEFAULT_MIN_PAIRS      # 추정에 필요한 최소 유효 쌍 수
    tie_break: str = TIE_BREAK_POLICY
    selection: str = DEFAULT_SELECTION      # 후보점 선택 정책

    def __post_init__(self):
        if self.n < 2:
            raise InvalidInputError(f"n must be >= 2, got {self.n}")
        if self.min_pairs < 1:
            raise InvalidInputError(f"min_pairs must be >= 1, got {self.min_pairs}")
        if self.tie_break != TIE_BREAK_POLICY:
            raise InvalidInputError(f"unsupported tie-break policy {self.tie_break!r}")
        if self.selection not in SELECTION_POLICIES:
            raise InvalidInputError(f"unknown selection policy {self.selection!r}, expected one of {SELECTION_POLICIES}")


@dataclass(frozen=True)
class RangeTarget:
    """앵커 좌표 + 추정 거리"""
    position: Point2D
    distance: float
    anchor_id: str = ""


@dataclass(frozen=True)
class PairPoint:
    """앵커 쌍 1개에서 선택된 점"""
    anchors: tuple          # (앵커 A, 앵커 B)
    point: Point2D
    kind: str               # two_points / tangent / no_intersection


@dataclass(frozen=True)
class SkippedPair:
    anchors: tuple
    reason: str


@dataclass
class PositionEstimate:
    """위치 추정 결과 + 진단 정보"""
    position: Point2D
    per_pair_points: list = field(default_factory=list)   # PairPoint
    used_anchors: list = field(default_factory=list)      # (anchor_id, r̂_k)
    skipped_pairs: list = field(default_factory=list)     # SkippedPair
    ignored_readings: int = 0                             # 앵커맵에 없는 측정값 수

    @property
    def pairCount(self) -> int:
        return len(self.per_pair_points) + len(self.skipped_pairs)


def selectTopN(scan: ScanRecord, db: CalibrationDatabase, anchors: AnchorMap, n: int) -> list[tuple[str, float]]:
    """스캔에서 앵커맵에도 있는 측정값 중 전력 상위 N개

    N개보다 적으면 있는 만큼 반환. 전력 내림차순, 동률은 ID 사전순.
    """
    return strongestReadings(scan, anchors, n)


def estimateAnchorDistance(pK: float, db: CalibrationDatabase) -> float:
    """수신 전력 P_k → 추정 거리 r̂_k

    DB의 기준 항목마다 거리 역변환 후 산술 평균한다.

    Raises:
        EmptyDatabase: 기준 항목 없음
        NonPositiveAlpha: α̂ <= 0
    """
    if not db.entries:
        raise EmptyDatabase("calibration database has no reference entries")
    if db.alpha_hat is None or not db.alpha_hat > 0:
        raise NonPositiveAlpha(f"calibration database alpha_hat must be positive, got {db.alpha_hat!r}")
    estimates = [distanceFromPower(pK, entry.power, entry.distance, db.alpha_hat) for entry in db.entries]
    return aggregateDistance(estimates)


def _pairLabel(target: RangeTarget, index: int) -> str:
    return target.anchor_id or f"#{index}"


def multilaterate(targets: Sequence[RangeTarget], config: EstimatorConfig = EstimatorConfig()) -> PositionEstimate:
    """앵커 쌍별 원 교점으로 위치 추정

    쌍마다 두 원을 만들어 교점을 구하고, 쌍에 속하지 않은 앵커들을 기준으로
    후보점을 고른다. 중심이 겹치는 쌍은 건너뛰고 기록한다.

    Raises:
        TooFewTargets: 대상 앵커 < 2
        TooFewUsablePairs: 유효 쌍 < config.min_pairs
    """
    if len(targets) < 2:
        raise TooFewTargets(f"multilateration needs at least 2 anchors, got {len(targets)}")

    pairPoints = []
    skipped = []
    for (i, first), (j, second) in combinations(enumerate(targets), 2):
        label = (_pairLabel(first, i), _pairLabel(second, j))
        try:
            outcome = circleIntersection(
                Circle(first.position, first.distance),
                Circle(second.position, second.distance),
            )
        except CoincidentCenters as e:
            skipped.append(SkippedPair(label, f"CoincidentCenters: {e}"))
            continue

        others = [t for k, t in enumerate(targets) if k not in (i, j)]
        if config.selection == SELECTION_RANGE_RESIDUAL:
            point = selectCandidateByResidual(outcome, [(t.position, t.distance) for t in others])
        else:
            point = selectCandidate(outcome, [t.position for t in others])
        pairPoints.append(PairPoint(label, point, outcome.kind))

    if len(pairPoints) < config.min_pairs:
        raise TooFewUsablePairs(
            f"{len(pairPoints)} usable anchor pairs, at least {config.min_pairs} required "
            f"({len(skipped)} skipped)"
        )

    return PositionEstimate(
        position=centroid([p.point for p in pairPoints]),
        per_pair_points=pairPoints,
        used_anchors=[(t.anchor_id, t.distance) for t in targets],
        skipped_pairs=skipped,
    )


def locate(
    scan: ScanRecord,
    db: CalibrationDatabase,
    anchors: AnchorMap,
    config: EstimatorConfig = EstimatorConfig(),
) -> PositionEstimate:
    """스캔 1개 → 위치 추정 (전체 파이프라인)

    Raises:
        EmptyDatabase, NonPositiveAlpha, TooFewTargets, TooFewUsablePairs
    """
    if not db.entries:
        raise EmptyDatabase("calibration database has no reference entries")

    selected = selectTopN(scan, db, anchors, config.n)
    ignored = sum(1 for anchorId in scan.readings if anchorId not in anchors)
    if len(selected) < 2:
        raise TooFewTargets(
            f"scan at t={scan.timestamp!r} sees {len(selected)} mapped anchor(s), at least 2 required"
        )

    targets = [
        RangeTarget(anchors.position(anchorId), estimateAnchorDistance(power, db), anchorId)
        for anchorId, power in selected
    ]
    estimate = multilaterate(targets, config)
    estimate.ignored_readings = ignored
    return estimate
